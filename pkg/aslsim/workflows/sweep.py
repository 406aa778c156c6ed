"""
多配置对比：调度器 × V系数矩阵，输出一行一个配置的对比表。
"""
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from aslsim.config.settings import RunConfig
from aslsim.models.profile import load_profile
from aslsim.schedulers.context import SchedulerKind
from aslsim.utils import logging_utils
from aslsim.utils.error_handling import PopulationMismatchError
from aslsim.workflows.simulation import build_population, calibrate_v, run, spawn_streams

logger = logging_utils.get_logger(__name__, color="white")

COMPARISON_COLUMNS = [
    "scheduler",
    "v",
    "v_factor",
    "seed",
    "mean_delay_s",
    "mean_energy_j",
    "stability_ratio",
    "energy_within_budget",
    "mean_split",
    "mean_share",
    "delay_reduction_pct",
    "energy_reduction_pct",
    "population_fingerprint",
    "population_match",
]


def resolve_v(cfg: RunConfig) -> float:
    """配置中给定V时直接返回，否则按运行时相同的随机流校准。"""
    if cfg.penalty_v is not None:
        return cfg.penalty_v
    streams = spawn_streams(cfg.seed)
    profile = load_profile(cfg.profile_path)
    population = build_population(cfg, streams["population"])
    v, _ = calibrate_v(cfg, profile, population, streams["calibration"])
    return v


def build_sweep_configs(cfg: RunConfig) -> Tuple[List[RunConfig], float]:
    """
    展开 sweep.v_factors × sweep.schedulers，V系数乘以该运行解析出的V。

    Returns:
        (配置列表, 基准V)
    """
    v0 = resolve_v(cfg)
    configs = [
        cfg.with_changes(scheduler=kind, penalty_v=v0 * factor)
        for factor in cfg.sweep.v_factors
        for kind in cfg.sweep.schedulers
    ]
    return configs, v0


def run_summary(cfg: RunConfig) -> Dict[str, Any]:
    return run(cfg).summary


def reduction_pct(value: float, reference: float) -> float:
    """(1 - value/reference)·100"""
    if reference == 0:
        return float("nan")
    return (1.0 - value / reference) * 100.0


def compare_summaries(summary: Dict[str, Any], reference: Dict[str, Any]) -> Dict[str, Any]:
    """
    summary相对reference的时延/能耗降低百分比。
    """
    return {
        "scheduler": summary.get("scheduler"),
        "reference": reference.get("scheduler"),
        "delay_reduction_pct": reduction_pct(summary["mean_delay_s"], reference["mean_delay_s"]),
        "energy_reduction_pct": reduction_pct(summary["mean_energy_j"], reference["mean_energy_j"]),
        "same_population": summary.get("population_fingerprint") == reference.get("population_fingerprint"),
    }


def sweep(
    cfgs: Sequence[RunConfig],
    max_workers: int = 1,
    base_v: Optional[float] = None,
    strict_population: bool = False,
) -> pd.DataFrame:
    """
    逐个运行配置并汇总为对比表，行序与cfgs一致。

    降低百分比相对第一个fixed-sl行计算；群体指纹与第一行不一致的行会被标记。

    Args:
        cfgs: 运行配置列表
        max_workers: 大于1时使用进程池并行
        base_v: V系数的基准，缺省取第一行的V
        strict_population: 为True时群体不一致直接抛出PopulationMismatchError
    """
    if not cfgs:
        return pd.DataFrame(columns=COMPARISON_COLUMNS)
    if max_workers > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            summaries = list(pool.map(run_summary, cfgs))
    else:
        summaries = [run_summary(cfg) for cfg in cfgs]

    reference = next((s for s in summaries if s["scheduler"] == SchedulerKind.FIXED_SL.value), None)
    fingerprint = summaries[0]["population_fingerprint"]
    base_v = base_v or summaries[0]["v"]
    rows = []
    for summary in summaries:
        match = summary["population_fingerprint"] == fingerprint
        if not match and strict_population:
            raise PopulationMismatchError(
                f"调度器 {summary['scheduler']} (seed={summary['seed']}) 的MD群体与第一行不一致"
            )
        if not match:
            logger.warning(f"调度器 {summary['scheduler']} 的MD群体与第一行不一致")
        per_device = summary["per_device"]
        row = {
            "scheduler": summary["scheduler"],
            "v": summary["v"],
            "v_factor": summary["v"] / base_v,
            "seed": summary["seed"],
            "mean_delay_s": summary["mean_delay_s"],
            "mean_energy_j": summary["mean_energy_j"],
            "stability_ratio": summary["stability_ratio"],
            "energy_within_budget": summary["energy_within_budget"],
            "mean_split": float(np.mean([d["mean_split"] for d in per_device])),
            "mean_share": float(np.mean([d["mean_share"] for d in per_device])),
            "delay_reduction_pct": float("nan"),
            "energy_reduction_pct": float("nan"),
            "population_fingerprint": summary["population_fingerprint"],
            "population_match": match,
        }
        if reference is not None:
            comparison = compare_summaries(summary, reference)
            row["delay_reduction_pct"] = comparison["delay_reduction_pct"]
            row["energy_reduction_pct"] = comparison["energy_reduction_pct"]
        logger.info(
            f"{row['scheduler']} (V×{row['v_factor']:.4g}): D={row['mean_delay_s']:.6g} s, "
            f"E={row['mean_energy_j']:.6g} J"
        )
        rows.append(row)
    return pd.DataFrame(rows, columns=COMPARISON_COLUMNS)
