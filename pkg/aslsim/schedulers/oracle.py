"""
联合枚举oracle：对每个切分点取闭式 c*(s) 及其附近候选点，求全局最小。
"""
import math
from typing import List

from aslsim.models.cost import Decision
from aslsim.models.profile import server_flops
from aslsim.schedulers.base import Scheduler
from aslsim.schedulers.context import SchedulerKind, SlotContext, SolverResult, SolverSettings
from aslsim.schedulers.open import optimal_share


def candidate_shares(ctx: SlotContext, s: int, settings: SolverSettings = SolverSettings()) -> List[float]:
    """切分点s的候选份额：c*(s)、1，以及 c*(1 ± k·step)，均落在(0, 1]内。"""
    if server_flops(ctx.profile, s) <= 0:
        return [0.0]
    c0 = optimal_share(ctx, s)
    candidates = {c0, 1.0}
    for k in range(1, settings.refine_steps + 1):
        for sign in (-1.0, 1.0):
            c = c0 * (1.0 + sign * k * settings.refine_step)
            if 0.0 < c <= 1.0:
                candidates.add(c)
    return sorted(candidates)


def solve_joint_oracle(ctx: SlotContext, settings: SolverSettings = SolverSettings()) -> SolverResult:
    best = None
    best_value = math.inf
    for s in ctx.profile.split_points:
        for c in candidate_shares(ctx, s, settings):
            decision = Decision(s, c)
            cost = ctx.evaluate(decision)
            value = ctx.objective(cost)
            if value < best_value:
                best, best_value = (decision, cost), value
    decision, cost = best
    return SolverResult(decision=decision, cost=cost, objective=best_value, iterations=1, kind=SchedulerKind.ORACLE.value)


class OracleScheduler(Scheduler):
    kind = SchedulerKind.ORACLE.value

    def solve(self, ctx: SlotContext) -> SolverResult:
        return solve_joint_oracle(ctx, self.settings)
