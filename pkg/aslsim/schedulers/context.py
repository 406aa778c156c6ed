"""
调度器的输入/输出类型。
"""
import math
from dataclasses import dataclass
from enum import Enum

from aslsim.memory.energy_queue import PenaltyConfig, objective
from aslsim.models.channel import ChannelDraw
from aslsim.models.cost import CostBreakdown, CostUnits, Decision, DeviceSpec, ServerSpec, evaluate
from aslsim.models.profile import ModelProfile
from aslsim.utils.error_handling import ConfigError, SimulationError


class SchedulerKind(str, Enum):
    OPEN = "open"
    FIXED_SL = "fixed-sl"
    DELAY_OPT = "delay-opt"
    ENERGY_OPT = "energy-opt"
    ORACLE = "oracle"

    @classmethod
    def parse(cls, value) -> "SchedulerKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ConfigError(f"未知的调度器: {value}，可选: {[k.value for k in cls]}") from None


@dataclass(frozen=True)
class SolverSettings:
    """
    求解器参数。

    fixed_split: SL基线的固定切分点
    share_floor: 能耗最优基线在服务器有工作量时使用的最小份额 ε_c
    tolerance: OPEN交替迭代中c的变化阈值
    max_iterations: OPEN迭代上限
    refine_steps/refine_step: 联合oracle在c*附近的相对扰动点
    verify: 为True时OPEN每个时隙都与oracle比对并记录反例
    """

    fixed_split: int = 9
    share_floor: float = 1e-3
    tolerance: float = 0.01
    max_iterations: int = 100
    refine_steps: int = 3
    refine_step: float = 1e-3
    verify: bool = False

    def __post_init__(self):
        if not 0 < self.share_floor <= 1:
            raise ConfigError(f"share_floor 必须在(0, 1]内: {self.share_floor}")
        if self.max_iterations < 1:
            raise ConfigError(f"max_iterations 必须至少为1: {self.max_iterations}")
        if self.tolerance < 0 or self.refine_step <= 0 or self.refine_steps < 0:
            raise ConfigError("tolerance/refine_step/refine_steps 取值非法")


@dataclass(frozen=True)
class SlotContext:
    """一个时隙求解所需的全部当前信息，backlog为时隙开始时的Q^t。"""

    profile: ModelProfile
    dev: DeviceSpec
    srv: ServerSpec
    draw: ChannelDraw
    cfg: PenaltyConfig
    backlog: float
    units: CostUnits = CostUnits()

    def __post_init__(self):
        if not math.isfinite(self.backlog) or self.backlog < 0:
            raise SimulationError(f"时隙开始时的积压必须为非负有限值: {self.backlog}")

    def evaluate(self, decision: Decision) -> CostBreakdown:
        return evaluate(self.profile, self.dev, self.srv, self.draw, decision, self.units)

    def objective(self, cost: CostBreakdown) -> float:
        return objective(self.cfg, self.backlog, cost)


@dataclass(frozen=True)
class SolverResult:
    decision: Decision
    cost: CostBreakdown
    objective: float
    iterations: int = 1
    kind: str = ""
