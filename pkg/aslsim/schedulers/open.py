"""
OPEN在线调度：闭式计算资源分配 + 切分点穷举 + 交替迭代。
"""
import math
from typing import Tuple

from aslsim.models.cost import Decision
from aslsim.models.profile import server_flops
from aslsim.schedulers.base import Scheduler
from aslsim.schedulers.context import SchedulerKind, SlotContext, SolverResult, SolverSettings
from aslsim.utils import logging_utils

logger = logging_utils.get_logger(__name__, color="green")


def optimal_share(ctx: SlotContext, s: int) -> float:
    """
    给定切分点s的最优计算资源份额 c*。

    c* = min(1, sqrt(V·ω₁ / (ω₄·Q)))，
    ω₁ = (η-η_D(s)) / (F^B δ^B σ^B)，ω₄ = κ δ^B σ^B (F^B)² (η-η_D(s))。
    服务器无工作量时返回0；Q = 0 时返回1。
    """
    server_work = server_flops(ctx.profile, s)
    if server_work <= 0:
        return 0.0
    if ctx.backlog == 0:
        return 1.0
    srv = ctx.srv
    omega1 = server_work / (srv.freq_hz * srv.flops_per_cycle * srv.cores)
    omega4 = srv.kappa * srv.flops_per_cycle * srv.cores * srv.freq_hz ** 2 * server_work
    return min(1.0, math.sqrt(ctx.cfg.v * omega1 / (omega4 * ctx.backlog)))


def interior_share(ctx: SlotContext) -> float:
    """
    与切分点无关的份额：ω₁/ω₄ 中 (η-η_D(s)) 相消后的 c*。
    """
    if ctx.backlog == 0:
        return 1.0
    srv = ctx.srv
    capability = srv.flops_per_cycle * srv.cores
    return min(1.0, math.sqrt(ctx.cfg.v / (srv.kappa * capability ** 2 * srv.freq_hz ** 3 * ctx.backlog)))


def best_split_given_share(ctx: SlotContext, c: float) -> Tuple[int, float]:
    """
    固定份额c，穷举所有切分点，返回使 f = V·D + Q·E 最小的 (s*, f(s*))。

    并列时取最小的s。
    """
    best_split, best_value = 0, math.inf
    for s in ctx.profile.split_points:
        value = ctx.objective(ctx.evaluate(Decision(s, c)))
        if value < best_value:
            best_split, best_value = s, value
    return best_split, best_value


def solve_open(ctx: SlotContext, settings: SolverSettings = SolverSettings()) -> SolverResult:
    """
    交替求解 c* 与 s*。

    初始 c* = 1、s* = 0（未设定）；首轮的 c* 使用与切分点无关的内点解。
    循环条件按原样实现：只有c的变化超过阈值且s也发生变化时才继续。
    """
    c_star, s_star = 1.0, 0
    iterations = 0
    for iterations in range(1, settings.max_iterations + 1):
        c_last, s_last = c_star, s_star
        c_star = interior_share(ctx) if s_star == 0 else optimal_share(ctx, s_star)
        # s* = S 时 c* = 0，切分点搜索改用内点份额
        search_share = c_star if c_star > 0 else interior_share(ctx)
        s_star, _ = best_split_given_share(ctx, search_share)
        if not (abs(c_star - c_last) > settings.tolerance and s_star != s_last):
            break
    else:
        logger.warning(f"OPEN达到迭代上限 {settings.max_iterations}，返回当前最优解 s={s_star}")

    decision = Decision(s_star, optimal_share(ctx, s_star))
    cost = ctx.evaluate(decision)
    return SolverResult(
        decision=decision,
        cost=cost,
        objective=ctx.objective(cost),
        iterations=iterations,
        kind=SchedulerKind.OPEN.value,
    )


class OpenScheduler(Scheduler):
    """OPEN调度器；settings.verify为True时逐时隙与联合oracle比对。"""

    kind = SchedulerKind.OPEN.value

    def solve(self, ctx: SlotContext) -> SolverResult:
        result = solve_open(ctx, self.settings)
        logger.debug(
            f"OPEN: s={result.decision.split}, c={result.decision.share:.6g}, "
            f"f={result.objective:.6g}, 迭代={result.iterations}"
        )
        if self.settings.verify:
            from aslsim.schedulers.oracle import solve_joint_oracle

            reference = solve_joint_oracle(ctx, self.settings)
            if result.objective - reference.objective > 1e-9 * abs(reference.objective):
                logger.warning(
                    f"OPEN未达到时隙最优: f={result.objective:.12g} (s={result.decision.split}), "
                    f"oracle f={reference.objective:.12g} (s={reference.decision.split})"
                )
        return result
