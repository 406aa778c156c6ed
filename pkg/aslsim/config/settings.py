"""
将原始yaml配置转换为带类型的运行配置，物理量在此统一换算为SI单位。
"""
import copy
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Tuple

from aslsim.models.channel import RadioLink
from aslsim.models.cost import CostUnits, ServerSpec
from aslsim.models.profile import DEFAULT_PROFILE
from aslsim.schedulers.context import SchedulerKind, SolverSettings
from aslsim.utils.config import (
    apply_overrides,
    dbm_per_hz_to_w_per_hz,
    get_section,
    load_config,
)
from aslsim.utils.error_handling import ConfigError

GHZ = 1e9
MHZ = 1e6
DEFAULT_SEED = 20240601
DEFAULT_V_SCALE = 150.0


@dataclass(frozen=True)
class PinnedDevice:
    freq_hz: float
    cores: int
    distance_m: float


@dataclass(frozen=True)
class PopulationSpec:
    """
    MD群体：前若干个固定取值，其余从均匀分布中采样。

    cores_range为闭区间整数范围。
    """

    count: int
    pinned: Tuple[PinnedDevice, ...]
    freq_range_hz: Tuple[float, float]
    cores_range: Tuple[int, int]
    distance_range_m: Tuple[float, float]
    flops_per_cycle: float
    kappa: Optional[float] = None

    def __post_init__(self):
        if self.count < 1:
            raise ConfigError(f"MD数量必须至少为1: {self.count}")
        for name in ("freq_range_hz", "cores_range", "distance_range_m"):
            low, high = getattr(self, name)
            if not (math.isfinite(low) and math.isfinite(high)) or low <= 0 or low > high:
                raise ConfigError(f"采样范围 {name} 非法: [{low}, {high}]")


@dataclass(frozen=True)
class SweepSettings:
    schedulers: Tuple[SchedulerKind, ...] = tuple(SchedulerKind)[:4]
    v_factors: Tuple[float, ...] = (1.0,)
    max_workers: int = 1
    strict_population: bool = False


@dataclass(frozen=True)
class RunConfig:
    """
    一次仿真运行的全部参数。

    penalty_v为None时在运行开始前校准V；raw保存生成该配置的原始字典，用于溯源。
    """

    profile_path: str
    units: CostUnits
    server: ServerSpec
    uplink: RadioLink
    population: PopulationSpec
    penalty_v: Optional[float]
    v_scale: float
    e_th: float
    solver: SolverSettings
    episodes: int
    seed: int
    scheduler: SchedulerKind
    output_dir: Optional[Path] = None
    sweep: SweepSettings = SweepSettings()
    log_level: str = "INFO"
    log_file: Optional[str] = None
    raw: Dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.episodes < 1:
            raise ConfigError(f"episodes 必须至少为1: {self.episodes}")
        if self.penalty_v is not None and not self.penalty_v > 0:
            raise ConfigError(f"penalty.v 必须为正: {self.penalty_v}")
        if not self.e_th > 0 or not self.v_scale > 0:
            raise ConfigError("penalty.e_th_j 与 penalty.v_scale 必须为正")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed 必须是64位无符号整数: {self.seed}")

    def with_changes(self, **changes) -> "RunConfig":
        """
        返回修改若干字段后的配置，raw同步更新以保持溯源一致。
        """
        raw = copy.deepcopy(self.raw)
        mapping = {"seed": ("run", "seed"), "episodes": ("run", "episodes"), "penalty_v": ("penalty", "v")}
        for key, value in list(changes.items()):
            if key == "scheduler":
                value = SchedulerKind.parse(value)
                raw.setdefault("run", {})["scheduler"] = value.value
                changes[key] = value
            elif key == "output_dir":
                raw.setdefault("run", {})["output_dir"] = None if value is None else str(value)
            elif key in mapping:
                section, name = mapping[key]
                raw.setdefault(section, {})[name] = value
        return replace(self, raw=raw, **changes)


def _number(section: Dict[str, Any], key: str, name: str, default: Any = None) -> float:
    value = section.get(key, default)
    if value is None or isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"配置项 {name}.{key} 必须是数值: {value!r}")
    return float(value)


def _integer(section: Dict[str, Any], key: str, name: str, default: Any = None) -> int:
    value = section.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ConfigError(f"配置项 {name}.{key} 必须是整数: {value!r}")
    return int(value)


def _flag(section: Dict[str, Any], key: str, name: str, default: bool) -> bool:
    value = section.get(key, default)
    if not isinstance(value, bool):
        raise ConfigError(f"配置项 {name}.{key} 必须是布尔值: {value!r}")
    return value


def _range(section: Dict[str, Any], key: str, name: str, scale: float = 1.0) -> Tuple[float, float]:
    value = section.get(key)
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"配置项 {name}.{key} 必须是 [下限, 上限]: {value!r}")
    low, high = value
    return _number({"v": low}, "v", f"{name}.{key}") * scale, _number({"v": high}, "v", f"{name}.{key}") * scale


def _sequence(section: Dict[str, Any], key: str, name: str, default: Tuple[Any, ...]) -> Tuple[Any, ...]:
    value = section.get(key)
    if value is None:
        return tuple(default)
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(f"配置项 {name}.{key} 必须是非空列表: {value!r}")
    return tuple(value)


def _radio_link(
    link: Dict[str, Any], name: str, noise: float, interference: float, gain_is_power: bool
) -> RadioLink:
    return RadioLink(
        bandwidth_hz=_number(link, "bandwidth_mhz", name) * MHZ,
        tx_power_w=_number(link, "tx_power_w", name),
        antenna_gain=_number(link, "antenna_gain", name),
        carrier_hz=_number(link, "carrier_mhz", name) * MHZ,
        pathloss_exp=_number(link, "pathloss_exp", name, 1.0),
        distance_m=_number(link, "distance_m", name, 1.0),
        noise_psd_w_per_hz=noise,
        interference_psd_w_per_hz=interference,
        gain_is_power=gain_is_power,
    )


def build_run_config(raw: Dict[str, Any]) -> RunConfig:
    """
    从原始配置字典构造RunConfig。

    Args:
        raw: load_config + apply_overrides 的结果

    Returns:
        带类型的运行配置
    """
    profile = get_section(raw, "profile")
    server = get_section(raw, "server")
    devices = get_section(raw, "devices")
    radio = get_section(raw, "radio")
    penalty = get_section(raw, "penalty")
    solver = get_section(raw, "solver")
    run = get_section(raw, "run")
    sweep = get_section(raw, "sweep")
    logging_section = get_section(raw, "logging")

    gain_is_power = _flag(radio, "gain_is_power", "radio", True)
    noise = dbm_per_hz_to_w_per_hz(_number(radio, "noise_psd_dbm_hz", "radio", -174.0))
    uplink_interference = dbm_per_hz_to_w_per_hz(_number(radio, "interference_psd_dbm_hz", "radio", -164.0))
    downlink_dbm = radio.get("downlink_interference_psd_dbm_hz")
    downlink_interference = (
        uplink_interference
        if downlink_dbm is None
        else dbm_per_hz_to_w_per_hz(_number(radio, "downlink_interference_psd_dbm_hz", "radio"))
    )
    uplink = _radio_link(get_section(radio, "uplink"), "radio.uplink", noise, uplink_interference, gain_is_power)
    downlink = _radio_link(get_section(radio, "downlink"), "radio.downlink", noise, downlink_interference, gain_is_power)

    server_kappa = _number(server, "kappa", "server", 1e-26)
    server_spec = ServerSpec(
        freq_hz=_number(server, "freq_ghz", "server", 3.0) * GHZ,
        flops_per_cycle=_number(server, "flops_per_cycle", "server", 16),
        cores=_integer(server, "cores", "server", 32),
        downlink=downlink,
        kappa=server_kappa,
    )

    pinned = []
    for i, item in enumerate(devices.get("pinned") or [], start=1):
        if not isinstance(item, dict):
            raise ConfigError(f"devices.pinned 第{i}项必须是映射")
        pinned.append(PinnedDevice(
            freq_hz=_number(item, "freq_ghz", f"devices.pinned[{i}]") * GHZ,
            cores=_integer(item, "cores", f"devices.pinned[{i}]"),
            distance_m=_number(item, "distance_m", f"devices.pinned[{i}]"),
        ))
    sampling = get_section(devices, "sampling")
    device_kappa = devices.get("kappa")
    cores_low, cores_high = _range(sampling, "cores", "devices.sampling")
    population = PopulationSpec(
        count=_integer(devices, "count", "devices", 30),
        pinned=tuple(pinned),
        freq_range_hz=_range(sampling, "freq_ghz", "devices.sampling", GHZ),
        cores_range=(int(cores_low), int(cores_high)),
        distance_range_m=_range(sampling, "distance_m", "devices.sampling"),
        flops_per_cycle=_number(devices, "flops_per_cycle", "devices", 8),
        kappa=None if device_kappa is None else _number(devices, "kappa", "devices"),
    )

    v = penalty.get("v")
    solver_settings = SolverSettings(
        fixed_split=_integer(solver, "fixed_split", "solver", 9),
        share_floor=_number(solver, "share_floor", "solver", 1e-3),
        tolerance=_number(solver, "tolerance", "solver", 0.01),
        max_iterations=_integer(solver, "max_iterations", "solver", 100),
        refine_steps=_integer(solver, "refine_steps", "solver", 3),
        refine_step=_number(solver, "refine_step", "solver", 1e-3),
        verify=_flag(solver, "verify", "solver", False),
    )

    sweep_settings = SweepSettings(
        schedulers=tuple(
            SchedulerKind.parse(k) for k in _sequence(sweep, "schedulers", "sweep", SweepSettings.schedulers)
        ),
        v_factors=tuple(
            _number({"v": f}, "v", "sweep.v_factors") for f in _sequence(sweep, "v_factors", "sweep", (1.0,))
        ),
        max_workers=_integer(sweep, "max_workers", "sweep", 1),
        strict_population=_flag(sweep, "strict_population", "sweep", False),
    )
    if any(not f > 0 for f in sweep_settings.v_factors):
        raise ConfigError(f"sweep.v_factors 必须全部为正: {sweep_settings.v_factors}")

    output_dir = run.get("output_dir")
    return RunConfig(
        profile_path=str(profile.get("path") or DEFAULT_PROFILE),
        units=CostUnits(
            bytes_per_param=_number(profile, "bytes_per_param", "profile", 4),
            local_updates=_integer(run, "local_updates", "run", 1),
        ),
        server=server_spec,
        uplink=uplink,
        population=population,
        penalty_v=None if v is None else _number(penalty, "v", "penalty"),
        v_scale=_number(penalty, "v_scale", "penalty", DEFAULT_V_SCALE),
        e_th=_number(penalty, "e_th_j", "penalty", 3000.0),
        solver=solver_settings,
        episodes=_integer(run, "episodes", "run", 100),
        seed=_integer(run, "seed", "run", DEFAULT_SEED),
        scheduler=SchedulerKind.parse(run.get("scheduler", SchedulerKind.OPEN.value)),
        output_dir=Path(output_dir) if output_dir else None,
        sweep=sweep_settings,
        log_level=str(logging_section.get("level", "INFO")).upper(),
        log_file=logging_section.get("file"),
        raw=copy.deepcopy(raw),
    )


def load_run_config(path: Optional[Path] = None, overrides: Iterable[str] = ()) -> RunConfig:
    """读取yaml，应用--set覆盖项，返回RunConfig。"""
    return build_run_config(apply_overrides(load_config(path), overrides))
