"""
仿真工作流：按episode逐个MD推进时隙，抽取信道、调用调度器、更新能耗亏空队列并收集轨迹。
"""
import hashlib
import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

import aslsim
from aslsim.config.settings import RunConfig
from aslsim.core.router import Router
from aslsim.memory.energy_queue import DEFAULT_HISTORY, EnergyDeficitQueue, PenaltyConfig
from aslsim.models.channel import ChannelDraw, downlink_for, draw, rate
from aslsim.models.cost import CostBreakdown, DeviceSpec, ServerSpec, average_metrics
from aslsim.models.profile import ModelProfile, load_profile
from aslsim.schedulers import build_schedulers
from aslsim.schedulers.baselines import solve_baseline
from aslsim.schedulers.context import SchedulerKind, SlotContext, SolverResult
from aslsim.utils import export, logging_utils
from aslsim.utils.error_handling import RoutingError
from aslsim.workflows.base import Workflow

logger = logging_utils.get_logger(__name__, color="white")

STREAMS = ("population", "fading", "calibration")


def spawn_streams(seed: int) -> Dict[str, np.random.Generator]:
    """由主种子派生互相独立的随机流：群体采样、逐时隙衰落、V校准。"""
    children = np.random.SeedSequence(seed).spawn(len(STREAMS))
    return {name: np.random.default_rng(child) for name, child in zip(STREAMS, children)}


@dataclass(frozen=True)
class Population:
    devices: Tuple[DeviceSpec, ...]
    server: ServerSpec

    def fingerprint(self) -> str:
        """群体参数的sha256，用于判断两次运行是否共享同一群体。"""
        payload = [
            [d.freq_hz, d.flops_per_cycle, d.cores, d.distance_m, d.kappa]
            for d in self.devices
        ]
        payload.append([self.server.freq_hz, self.server.flops_per_cycle, self.server.cores, self.server.kappa])
        return hashlib.sha256(json.dumps(payload).encode("utf-8")).hexdigest()


def build_population(cfg: RunConfig, rng: np.random.Generator) -> Population:
    """
    构造MD群体：前len(pinned)个MD取固定值，其余按均匀分布采样（频率、核数、距离依次抽取）。
    """
    spec = cfg.population
    devices = []
    for m in range(spec.count):
        if m < len(spec.pinned):
            pinned = spec.pinned[m]
            freq_hz, cores, distance_m = pinned.freq_hz, pinned.cores, pinned.distance_m
        else:
            freq_hz = float(rng.uniform(*spec.freq_range_hz))
            cores = int(rng.integers(spec.cores_range[0], spec.cores_range[1], endpoint=True))
            distance_m = float(rng.uniform(*spec.distance_range_m))
        devices.append(DeviceSpec(
            freq_hz=freq_hz,
            flops_per_cycle=spec.flops_per_cycle,
            cores=cores,
            uplink=cfg.uplink.with_distance(distance_m),
            kappa=spec.kappa,
        ))
    return Population(devices=tuple(devices), server=cfg.server)


def draw_slot_channel(population: Population, dev: DeviceSpec, rng: np.random.Generator) -> ChannelDraw:
    return draw(dev.uplink, downlink_for(population.server.downlink, dev.distance_m), rng)


def calibrate_v(
    cfg: RunConfig, profile: ModelProfile, population: Population, rng: np.random.Generator
) -> Tuple[float, Dict[str, float]]:
    """
    用时延最优调度在校准随机流上跑一个episode，得到典型时延D̄与典型能耗超额X̄，
    V = v_scale · E_th · X̄ / D̄。X̄为0时取E_th。

    Returns:
        (V, 校准输入)
    """
    placeholder = PenaltyConfig(v=1.0, e_th=cfg.e_th)
    delays, excesses = [], []
    for dev in population.devices:
        ctx = SlotContext(profile, dev, population.server, draw_slot_channel(population, dev, rng), placeholder, 0.0, cfg.units)
        cost = solve_baseline(ctx, SchedulerKind.DELAY_OPT, cfg.solver).cost
        delays.append(cost.delay_total)
        excesses.append(max(cost.energy_total - cfg.e_th, 0.0))
    mean_delay = math.fsum(delays) / len(delays)
    mean_excess = math.fsum(excesses) / len(excesses)
    excess = mean_excess if mean_excess > 0 else cfg.e_th
    v = cfg.v_scale * cfg.e_th * excess / mean_delay
    logger.info(f"V校准完成: D̄={mean_delay:.6g} s, X̄={mean_excess:.6g} J, V={v:.6g}")
    return v, {"mean_delay_s": mean_delay, "mean_excess_j": mean_excess, "v_scale": cfg.v_scale, "slots": len(delays)}


@dataclass(frozen=True)
class SlotRecord:
    t: int
    n: int
    m: int
    split: int
    share: float
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
    device_energy: float
    bs_energy: float
    uplink_gain: float
    downlink_gain: float
    uplink_rate: float
    downlink_rate: float
    backlog_before: float
    backlog_after: float
    lyapunov: float
    drift: float
    objective: float
    iterations: int

    @classmethod
    def from_slot(
        cls,
        t: int,
        n: int,
        m: int,
        result: SolverResult,
        ctx: SlotContext,
        queue_entry: Dict[str, Any],
    ) -> "SlotRecord":
        """queue_entry为能耗亏空队列add返回的条目。"""
        return cls(
            t=t,
            n=n,
            m=m,
            split=result.decision.split,
            share=result.decision.share,
            **result.cost.to_dict(),
            uplink_gain=ctx.draw.uplink_gain,
            downlink_gain=ctx.draw.downlink_gain,
            uplink_rate=rate(ctx.dev.uplink, ctx.draw.uplink_gain),
            downlink_rate=rate(ctx.srv.downlink, ctx.draw.downlink_gain),
            backlog_before=queue_entry["backlog_before"],
            backlog_after=queue_entry["backlog"],
            lyapunov=queue_entry["lyapunov"],
            drift=queue_entry["drift"],
            objective=result.objective,
            iterations=result.iterations,
        )


SLOT_COLUMNS = [f.name for f in fields(SlotRecord)]


def records_frame(records: List[SlotRecord]) -> pd.DataFrame:
    return pd.DataFrame([asdict(r) for r in records], columns=SLOT_COLUMNS)


def episodes_frame(slots: pd.DataFrame) -> pd.DataFrame:
    """每个episode一行：平均时延、平均能耗、episode末的积压。"""
    grouped = slots.groupby("n", sort=True)
    return pd.DataFrame({
        "mean_delay_s": grouped["delay_total"].mean(),
        "mean_energy_j": grouped["energy_total"].mean(),
        "mean_split": grouped["split"].mean(),
        "mean_share": grouped["share"].mean(),
        "final_backlog": grouped["backlog_after"].last(),
    }).reset_index()


@dataclass
class SimulationResult:
    records: List[SlotRecord]
    summary: Dict[str, Any]

    def frame(self) -> pd.DataFrame:
        return records_frame(self.records)

    def episodes(self) -> pd.DataFrame:
        return episodes_frame(self.frame())


def build_router(cfg: RunConfig) -> Router:
    """注册全部调度器的路由器。"""
    router = Router()
    for name, scheduler in build_schedulers(cfg.solver).items():
        router.register(name, scheduler)
    return router


class SimulationWorkflow(Workflow):
    """
    单次仿真运行。

    时隙严格按 t = (n-1)·M + m 顺序推进，因为 Q^t 依赖上一时隙。
    """

    def execute(self, context: Dict[str, Any]) -> Dict[str, Any]:
        result = self.run(context["config"], context.get("output_dir"))
        return {"records": result.records, "summary": result.summary}

    def run(self, cfg: RunConfig, output_dir: Optional[Path] = None) -> SimulationResult:
        """
        执行一次完整运行。

        Args:
            cfg: 运行配置
            output_dir: 给定时，出错前已产生的时隙记录会先写入该目录的slots.csv

        Returns:
            时隙记录与摘要
        """
        kind = cfg.scheduler.value
        if not self.router.has(kind):
            raise RoutingError(f"调度器未注册: {kind}")

        streams = spawn_streams(cfg.seed)
        profile = load_profile(cfg.profile_path)
        population = build_population(cfg, streams["population"])
        if cfg.penalty_v is None:
            v, calibration = calibrate_v(cfg, profile, population, streams["calibration"])
        else:
            v, calibration = cfg.penalty_v, None
        penalty = PenaltyConfig(v=v, e_th=cfg.e_th)
        self.memory = EnergyDeficitQueue(penalty, history_limit=max(len(population.devices), DEFAULT_HISTORY))

        logger.info(
            f"开始仿真: 调度器={kind}, N={cfg.episodes}, M={len(population.devices)}, "
            f"V={v:.6g}, E_th={cfg.e_th:.6g} J, seed={cfg.seed}"
        )
        fading = streams["fading"]
        records: List[SlotRecord] = []
        costs: List[CostBreakdown] = []
        backlog = 0.0
        try:
            for n in range(1, cfg.episodes + 1):
                for m, dev in enumerate(population.devices, start=1):
                    t = (n - 1) * len(population.devices) + m
                    ctx = SlotContext(
                        profile=profile,
                        dev=dev,
                        srv=population.server,
                        draw=draw_slot_channel(population, dev, fading),
                        cfg=penalty,
                        backlog=backlog,
                        units=cfg.units,
                    )
                    result = self.call_component(f"{kind}.solve", {"ctx": ctx})
                    entry = self.memory.add({"energy": result.cost.energy_total})
                    backlog = entry["backlog"]
                    records.append(SlotRecord.from_slot(t, n, m, result, ctx, entry))
                    costs.append(result.cost)
                episode = self.memory.get_relevant({"last": len(population.devices)})
                peak = max(e["backlog"] for e in episode)
                logger.debug(f"episode {n} 完成: {self.memory.summarize()}, 本轮峰值Q={peak:.6g} J")
        except Exception:
            if output_dir is not None:
                path = export.write_table(records_frame(records), Path(output_dir) / export.SLOTS_FILE, "slots")
                logger.error(f"仿真在时隙 {len(records) + 1} 失败，已写出 {len(records)} 条记录到 {path}")
            raise

        summary = summarize(cfg, profile, population, penalty, calibration, records, costs, self.memory)
        logger.info(
            f"仿真完成: 平均时延={summary['mean_delay_s']:.6g} s, 平均能耗={summary['mean_energy_j']:.6g} J, "
            f"Q/T={summary['stability_ratio']:.6g}"
        )
        return SimulationResult(records=records, summary=summary)


def summarize(
    cfg: RunConfig,
    profile: ModelProfile,
    population: Population,
    penalty: PenaltyConfig,
    calibration: Optional[Dict[str, float]],
    records: List[SlotRecord],
    costs: List[CostBreakdown],
    queue: EnergyDeficitQueue,
) -> Dict[str, Any]:
    mean_delay, mean_energy = average_metrics(costs)
    slots = records_frame(records)
    per_device = slots.groupby("m", sort=True).agg(
        mean_split=("split", "mean"),
        mean_share=("share", "mean"),
        mean_delay_s=("delay_total", "mean"),
        mean_energy_j=("energy_total", "mean"),
    ).reset_index()
    devices = []
    for row in per_device.itertuples(index=False):
        dev = population.devices[int(row.m) - 1]
        devices.append({
            "m": int(row.m),
            "freq_ghz": dev.freq_hz / 1e9,
            "cores": dev.cores,
            "distance_m": dev.distance_m,
            "mean_split": float(row.mean_split),
            "mean_share": float(row.mean_share),
            "mean_delay_s": float(row.mean_delay_s),
            "mean_energy_j": float(row.mean_energy_j),
        })
    stability = queue.stability()
    return {
        "version": aslsim.__version__,
        "csv_schema_version": export.CSV_SCHEMA_VERSION,
        "scheduler": cfg.scheduler.value,
        "seed": cfg.seed,
        "episodes": cfg.episodes,
        "devices": len(population.devices),
        "slots": len(records),
        "profile": {"model": profile.model, "source": profile.source, "sha256": profile.checksum},
        "population_fingerprint": population.fingerprint(),
        "v": penalty.v,
        "e_th_j": penalty.e_th,
        "v_calibrated": calibration is not None,
        "calibration": calibration,
        "mean_delay_s": mean_delay,
        "mean_energy_j": mean_energy,
        "mean_device_energy_j": float(slots["device_energy"].mean()),
        "mean_bs_energy_j": float(slots["bs_energy"].mean()),
        "final_backlog": queue.backlog,
        "stability_ratio": stability,
        "mean_drift": float(slots["drift"].mean()),
        "mean_iterations": float(slots["iterations"].mean()),
        "max_iterations": int(slots["iterations"].max()),
        "energy_within_budget": mean_energy <= penalty.e_th,
        "per_device": devices,
        "config": cfg.raw,
    }


def run(cfg: RunConfig, output_dir: Optional[Path] = None) -> SimulationResult:
    """构造路由器与工作流，执行一次运行。"""
    return SimulationWorkflow(build_router(cfg)).run(cfg, output_dir)


def write_outputs(result: SimulationResult, output_dir: Path) -> Dict[str, Path]:
    """写出slots.csv、episodes.csv与summary.json。"""
    directory = export.ensure_dir(output_dir)
    slots = result.frame()
    paths = {
        "slots": export.write_table(slots, directory / export.SLOTS_FILE, "slots"),
        "episodes": export.write_table(episodes_frame(slots), directory / export.EPISODES_FILE, "episodes"),
        "summary": export.write_summary(result.summary, directory / export.SUMMARY_FILE),
    }
    logger.info(f"结果已写出到 {directory}")
    return paths
