#!/usr/bin/env python
"""
ASL-Sim 命令行入口。

子命令：
    run               执行一次仿真，写出 slots.csv / episodes.csv / summary.json
    sweep             执行调度器 × V系数矩阵，写出 comparison.csv
    validate-profile  校验profile文件并打印每个切分点的 η_D/ξ/β/γ
    compare           计算两个摘要之间的时延/能耗降低百分比
"""
import argparse
import logging
import sys
from typing import List, Optional

import pandas as pd

from aslsim.config.settings import RunConfig, load_run_config
from aslsim.models.profile import DEFAULT_PROFILE, load_profile, profile_table
from aslsim.schedulers.context import SchedulerKind
from aslsim.utils import export, logging_utils
from aslsim.utils.config import resolve_output_dir
from aslsim.utils.error_handling import exit_code_for
from aslsim.workflows.simulation import SimulationResult, SimulationWorkflow, build_router, write_outputs
from aslsim.workflows.sweep import build_sweep_configs, compare_summaries, sweep

logger = logging_utils.get_logger(__name__, color="magenta")

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]


def _add_run_arguments(parser: argparse.ArgumentParser, scheduler_help: str = "覆盖run.scheduler") -> None:
    parser.add_argument("--config", "-c", help="配置文件路径，缺省为项目根目录的config.yaml")
    parser.add_argument("--seed", type=int, help="覆盖run.seed")
    parser.add_argument("--out", "-o", help="输出目录，缺省依次取 run.output_dir、$ASLSIM_OUTPUT_DIR、./results")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="覆盖配置项，可重复，如 --set run.episodes=10")
    parser.add_argument("--scheduler", choices=[k.value for k in SchedulerKind], help=scheduler_help)
    parser.add_argument("--log-level", choices=LOG_LEVELS, help="日志级别")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aslsim",
        description="ASL-Sim - 能耗受限无线边缘网络中的自适应切分学习仿真",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    run_parser = subparsers.add_parser("run", help="执行一次仿真")
    _add_run_arguments(run_parser)

    sweep_parser = subparsers.add_parser("sweep", help="执行调度器 × V系数对比")
    _add_run_arguments(sweep_parser, "只对比该调度器，覆盖sweep.schedulers")
    sweep_parser.add_argument("--workers", type=int, help="覆盖sweep.max_workers")

    profile_parser = subparsers.add_parser("validate-profile", help="校验profile文件")
    profile_parser.add_argument("profile", nargs="?", default=DEFAULT_PROFILE, help="profile路径或内置名称")
    profile_parser.add_argument("--bytes-per-param", type=float, default=4.0, help="每个参数的字节数")
    profile_parser.add_argument("--log-level", choices=LOG_LEVELS, default="WARNING", help="日志级别")

    compare_parser = subparsers.add_parser("compare", help="比较两个摘要")
    compare_parser.add_argument("summary", help="待比较的summary.json或其所在目录")
    compare_parser.add_argument("reference", help="作为基准的summary.json或其所在目录")
    compare_parser.add_argument("--log-level", choices=LOG_LEVELS, default="WARNING", help="日志级别")
    return parser


def load_cli_config(args: argparse.Namespace) -> RunConfig:
    """配置文件 + --set覆盖项，再叠加命令行参数。"""
    cfg = load_run_config(args.config, args.overrides)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.scheduler is not None:
        changes["scheduler"] = args.scheduler
    return cfg.with_changes(**changes) if changes else cfg


def _print_frame(frame: pd.DataFrame) -> None:
    with pd.option_context("display.max_columns", None, "display.width", 200):
        print(frame.to_string(index=False))


def command_run(args: argparse.Namespace) -> int:
    cfg = load_cli_config(args)
    output_dir = resolve_output_dir(args.out, cfg.raw)
    router = build_router(cfg)
    workflow = SimulationWorkflow(router)
    router.register("simulation", workflow)
    result = router.route({
        "function": "simulation.execute",
        "parameters": {"context": {"config": cfg, "output_dir": output_dir}},
    })
    summary = result["summary"]
    paths = write_outputs(SimulationResult(records=result["records"], summary=summary), output_dir)

    print("\n=== 仿真结果 ===\n")
    print(f"调度器: {summary['scheduler']}")
    print(f"时隙数: {summary['slots']} (N={summary['episodes']}, M={summary['devices']})")
    print(f"V: {summary['v']:.6g}{' (校准)' if summary['v_calibrated'] else ''}")
    print(f"平均时延: {summary['mean_delay_s']:.6g} s")
    print(f"平均能耗: {summary['mean_energy_j']:.6g} J (上限 {summary['e_th_j']:.6g} J)")
    print(f"稳定性 Q^T/T: {summary['stability_ratio']:.6g}")
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


def command_sweep(args: argparse.Namespace) -> int:
    if args.scheduler is not None:
        # 只对比指定的调度器
        args.overrides = [*args.overrides, f"sweep.schedulers=[{args.scheduler}]"]
    cfg = load_cli_config(args)
    output_dir = resolve_output_dir(args.out, cfg.raw)
    configs, v0 = build_sweep_configs(cfg)
    workers = args.workers if args.workers is not None else cfg.sweep.max_workers
    logger.info(f"开始对比实验: {len(configs)} 个配置, 基准V={v0:.6g}, 并行度={workers}")
    table = sweep(configs, max_workers=workers, base_v=v0, strict_population=cfg.sweep.strict_population)
    path = export.write_table(table, export.ensure_dir(output_dir) / export.COMPARISON_FILE, "comparison")

    print("\n=== 对比结果 ===\n")
    _print_frame(table.drop(columns=["population_fingerprint"]))
    print(f"\ncomparison: {path}")
    return 0


def command_validate_profile(args: argparse.Namespace) -> int:
    profile = load_profile(args.profile)
    table = profile_table(profile, args.bytes_per_param)

    print(f"\n=== Profile: {profile.model} ===\n")
    print(f"切分点数 S: {profile.num_splits}")
    print(f"总计算量 η: {profile.total_flops:.10g} FLOPs")
    print(f"总参数量: {profile.total_params}")
    print(f"sha256: {profile.checksum}\n")
    _print_frame(table)
    return 0


def command_compare(args: argparse.Namespace) -> int:
    summary = export.read_summary(args.summary)
    reference = export.read_summary(args.reference)
    comparison = compare_summaries(summary, reference)

    print("\n=== 对比 ===\n")
    print(f"{comparison['scheduler']} 相对 {comparison['reference']}:")
    print(f"时延降低: {comparison['delay_reduction_pct']:.4f}%")
    print(f"能耗降低: {comparison['energy_reduction_pct']:.4f}%")
    if not comparison["same_population"]:
        print("警告: 两次运行的MD群体不同")
    return 0


COMMANDS = {
    "run": command_run,
    "sweep": command_sweep,
    "validate-profile": command_validate_profile,
    "compare": command_compare,
}


def main(argv: Optional[List[str]] = None) -> int:
    """主程序入口点，返回进程退出码。"""
    parser = build_parser()
    args = parser.parse_args(argv)

    logging_utils.setup_logging(args.log_level or "INFO")
    try:
        if args.command in ("run", "sweep"):
            # 配置文件中的日志设置仅在命令行未指定时生效
            cfg = load_run_config(args.config, args.overrides)
            logging_utils.setup_logging(args.log_level or cfg.log_level, cfg.log_file)
        return COMMANDS[args.command](args)
    except Exception as e:
        code = exit_code_for(e)
        category = getattr(e, "category", "error")
        logger.error(f"[{category}] {e}")
        logging.debug("异常详情", exc_info=True)
        print(f"错误 ({category}): {e}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
