"""
每时隙调度器：OPEN、联合oracle与三个基线。
"""
from typing import Dict

from aslsim.schedulers.base import Scheduler
from aslsim.schedulers.baselines import BaselineScheduler, solve_baseline
from aslsim.schedulers.context import SchedulerKind, SlotContext, SolverResult, SolverSettings
from aslsim.schedulers.open import OpenScheduler, best_split_given_share, optimal_share, solve_open
from aslsim.schedulers.oracle import OracleScheduler, solve_joint_oracle


def build_scheduler(kind, settings: SolverSettings = None) -> Scheduler:
    """按种类构造调度器实例。"""
    kind = SchedulerKind.parse(kind)
    if kind is SchedulerKind.OPEN:
        return OpenScheduler(settings)
    if kind is SchedulerKind.ORACLE:
        return OracleScheduler(settings)
    return BaselineScheduler(kind, settings)


def build_schedulers(settings: SolverSettings = None) -> Dict[str, Scheduler]:
    """所有调度器，以种类名为键，供Router注册。"""
    return {kind.value: build_scheduler(kind, settings) for kind in SchedulerKind}
