"""
单个时隙的时延与能耗模型。

给定profile、MD、基站/边缘服务器、信道实现和决策 (s, c)，计算六个时延分量、
四个能耗分量及其总和。
"""
import math
from dataclasses import asdict, dataclass
from typing import Dict, Optional, Sequence, Tuple

from aslsim.models.channel import ChannelDraw, RadioLink, rate
from aslsim.models.profile import ModelProfile, device_flops, device_params, gradient_size, smashed_size
from aslsim.utils.error_handling import ConfigError, EmptyTraceError, InvalidDecisionError, UnreachableLinkError


def _require_positive(owner: str, **values) -> None:
    for name, value in values.items():
        if not math.isfinite(value) or value <= 0:
            raise ConfigError(f"{owner}.{name} 必须为正: {value}")


@dataclass(frozen=True)
class DeviceSpec:
    """MD的计算与上行射频参数。kappa为None时使用服务器的κ。"""

    freq_hz: float
    flops_per_cycle: float
    cores: int
    uplink: RadioLink
    kappa: Optional[float] = None

    def __post_init__(self):
        _require_positive("DeviceSpec", freq_hz=self.freq_hz, flops_per_cycle=self.flops_per_cycle)
        if int(self.cores) != self.cores or self.cores < 1:
            raise ConfigError(f"DeviceSpec.cores 必须是正整数: {self.cores}")
        if self.kappa is not None:
            _require_positive("DeviceSpec", kappa=self.kappa)

    @property
    def flops_per_second(self) -> float:
        return self.freq_hz * self.flops_per_cycle * self.cores

    @property
    def distance_m(self) -> float:
        return self.uplink.distance_m


@dataclass(frozen=True)
class ServerSpec:
    """基站+边缘服务器的计算与下行射频参数。"""

    freq_hz: float
    flops_per_cycle: float
    cores: int
    downlink: RadioLink
    kappa: float

    def __post_init__(self):
        _require_positive(
            "ServerSpec", freq_hz=self.freq_hz, flops_per_cycle=self.flops_per_cycle, kappa=self.kappa
        )
        if int(self.cores) != self.cores or self.cores < 1:
            raise ConfigError(f"ServerSpec.cores 必须是正整数: {self.cores}")

    @property
    def flops_per_second(self) -> float:
        return self.freq_hz * self.flops_per_cycle * self.cores


@dataclass(frozen=True)
class CostUnits:
    """参数个数到比特的换算，以及每个episode的本地更新次数。"""

    bytes_per_param: float = 4.0
    local_updates: int = 1

    def __post_init__(self):
        _require_positive("CostUnits", bytes_per_param=self.bytes_per_param)
        if int(self.local_updates) != self.local_updates or self.local_updates < 1:
            raise ConfigError(f"local_updates 必须是正整数: {self.local_updates}")

    def bits(self, params: float) -> float:
        return params * self.bytes_per_param * 8.0


@dataclass(frozen=True)
class Decision:
    """切分点 s 与服务器计算资源份额 c。"""

    split: int
    share: float

    def __post_init__(self):
        if not math.isfinite(self.share) or not 0.0 <= self.share <= 1.0:
            raise InvalidDecisionError(f"计算资源份额必须在[0, 1]内: {self.share}")


@dataclass(frozen=True)
class CostBreakdown:
    d_dev_comp: float
    d_srv_comp: float
    d_model_down: float
    d_smashed_up: float
    d_grad_down: float
    d_model_up: float
    delay_total: float
    e_dev_tx: float
    e_srv_tx: float
    e_dev_comp: float
    e_srv_comp: float
    energy_total: float

    @property
    def device_energy(self) -> float:
        """E^D = E^{D,T} + E^{D,C}"""
        return self.e_dev_tx + self.e_dev_comp

    @property
    def bs_energy(self) -> float:
        """E^B = E^{B,T} + E^{B,C}"""
        return self.e_srv_tx + self.e_srv_comp

    def to_dict(self) -> Dict[str, float]:
        data = asdict(self)
        data["device_energy"] = self.device_energy
        data["bs_energy"] = self.bs_energy
        return data


def _transfer_time(bits: float, link_rate: float, what: str) -> float:
    if bits <= 0:
        return 0.0
    if link_rate <= 0:
        raise UnreachableLinkError(f"{what}链路速率为0，但需传输 {bits:.6g} bit")
    return bits / link_rate


def evaluate(
    profile: ModelProfile,
    dev: DeviceSpec,
    srv: ServerSpec,
    draw: ChannelDraw,
    dec: Decision,
    units: CostUnits = CostUnits(),
) -> CostBreakdown:
    """
    计算决策dec在该时隙的时延与能耗分解。

    服务器侧工作量为0（s = S）时，服务器计算时延和能耗恒为0，与c无关。

    Raises:
        InvalidDecisionError: 切分点越界，或服务器有工作量而 c ≤ 0
        UnreachableLinkError: 链路速率为0但传输量为正
    """
    s = dec.split
    k = units.local_updates
    eta_d = device_flops(profile, s)
    server_work = profile.total_flops - eta_d
    model_bits = units.bits(device_params(profile, s))
    smashed_bits = units.bits(smashed_size(profile, s))
    gradient_bits = units.bits(gradient_size(profile, s))

    uplink_rate = rate(dev.uplink, draw.uplink_gain)
    downlink_rate = rate(srv.downlink, draw.downlink_gain)

    d_dev_comp = k * eta_d / dev.flops_per_second
    if server_work > 0:
        if dec.share <= 0:
            raise InvalidDecisionError(f"切分点{s}的服务器工作量为正，但计算资源份额为 {dec.share}")
        d_srv_comp = k * server_work / (dec.share * srv.flops_per_second)
        e_srv_comp = k * srv.kappa * dec.share * srv.flops_per_cycle * srv.cores * srv.freq_hz ** 2 * server_work
    else:
        d_srv_comp = 0.0
        e_srv_comp = 0.0

    d_model_down = _transfer_time(model_bits, downlink_rate, "下行(模型)")
    d_smashed_up = k * _transfer_time(smashed_bits, uplink_rate, "上行(smashed data)")
    d_grad_down = k * _transfer_time(gradient_bits, downlink_rate, "下行(梯度)")
    d_model_up = _transfer_time(model_bits, uplink_rate, "上行(模型)")
    delay_total = d_dev_comp + d_srv_comp + d_model_down + d_smashed_up + d_grad_down + d_model_up

    kappa_d = srv.kappa if dev.kappa is None else dev.kappa
    e_dev_tx = dev.uplink.tx_power_w * (d_smashed_up + d_model_up)
    e_srv_tx = srv.downlink.tx_power_w * (d_model_down + d_grad_down)
    e_dev_comp = k * kappa_d * dev.flops_per_cycle * dev.cores * dev.freq_hz ** 2 * eta_d
    energy_total = e_dev_tx + e_srv_tx + e_dev_comp + e_srv_comp

    return CostBreakdown(
        d_dev_comp=d_dev_comp,
        d_srv_comp=d_srv_comp,
        d_model_down=d_model_down,
        d_smashed_up=d_smashed_up,
        d_grad_down=d_grad_down,
        d_model_up=d_model_up,
        delay_total=delay_total,
        e_dev_tx=e_dev_tx,
        e_srv_tx=e_srv_tx,
        e_dev_comp=e_dev_comp,
        e_srv_comp=e_srv_comp,
        energy_total=energy_total,
    )


def average_metrics(trace: Sequence[CostBreakdown]) -> Tuple[float, float]:
    """平均时延与平均能耗（有限时域的算术平均）。"""
    if not trace:
        raise EmptyTraceError("无法对空轨迹求平均")
    n = len(trace)
    return math.fsum(c.delay_total for c in trace) / n, math.fsum(c.energy_total for c in trace) / n
