"""
对比基线：固定切分SL、时延最优、能耗最优。
"""
import math
from typing import Callable

from aslsim.models.cost import CostBreakdown, Decision
from aslsim.models.profile import server_flops
from aslsim.schedulers.base import Scheduler
from aslsim.schedulers.context import SchedulerKind, SlotContext, SolverResult, SolverSettings
from aslsim.utils.error_handling import ConfigError

BASELINE_KINDS = (SchedulerKind.FIXED_SL, SchedulerKind.DELAY_OPT, SchedulerKind.ENERGY_OPT)


def _argmin_split(ctx: SlotContext, share_for: Callable[[int], float], metric: Callable[[CostBreakdown], float]):
    best = None
    best_value = math.inf
    for s in ctx.profile.split_points:
        decision = Decision(s, share_for(s))
        cost = ctx.evaluate(decision)
        value = metric(cost)
        if value < best_value:
            best, best_value = (decision, cost), value
    return best


def solve_baseline(ctx: SlotContext, kind, settings: SolverSettings = SolverSettings()) -> SolverResult:
    """
    基线调度。

    fixed-sl: (fixed_split, 1)
    delay-opt: c = 1，按时延穷举切分点
    energy-opt: 服务器有工作量时 c = share_floor，否则 c = 0，按能耗穷举切分点
    """
    kind = SchedulerKind.parse(kind)
    if kind is SchedulerKind.FIXED_SL:
        if settings.fixed_split not in ctx.profile.split_points:
            raise ConfigError(f"固定切分点 {settings.fixed_split} 不在 1..{ctx.profile.num_splits} 内")
        decision = Decision(settings.fixed_split, 1.0)
        cost = ctx.evaluate(decision)
    elif kind is SchedulerKind.DELAY_OPT:
        decision, cost = _argmin_split(ctx, lambda s: 1.0, lambda c: c.delay_total)
    elif kind is SchedulerKind.ENERGY_OPT:
        decision, cost = _argmin_split(
            ctx,
            lambda s: settings.share_floor if server_flops(ctx.profile, s) > 0 else 0.0,
            lambda c: c.energy_total,
        )
    else:
        raise ConfigError(f"{kind.value} 不是基线调度器")
    return SolverResult(decision=decision, cost=cost, objective=ctx.objective(cost), iterations=1, kind=kind.value)


class BaselineScheduler(Scheduler):
    def __init__(self, kind, settings: SolverSettings = None):
        super().__init__(settings)
        self.kind = SchedulerKind.parse(kind).value
        if SchedulerKind(self.kind) not in BASELINE_KINDS:
            raise ConfigError(f"{self.kind} 不是基线调度器")

    def solve(self, ctx: SlotContext) -> SolverResult:
        return solve_baseline(ctx, self.kind, self.settings)
