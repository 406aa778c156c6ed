"""
能耗亏空虚拟队列。

全系统只有一个队列，每个时隙（一个MD的一次训练）更新一次：
Q^{t+1} = max(Q^t + E^t - E_th, 0)，Q^0 = 0。
"""
import math
from collections import deque
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from aslsim.memory.base import Memory
from aslsim.models.cost import CostBreakdown
from aslsim.utils import logging_utils
from aslsim.utils.error_handling import ConfigError, EmptyTraceError, SimulationError

logger = logging_utils.get_logger(__name__, color="cyan")

DEFAULT_HISTORY = 64


@dataclass(frozen=True)
class PenaltyConfig:
    """V：时延与能耗的权衡系数；e_th：每时隙平均能耗上限 (J)。"""

    v: float
    e_th: float

    def __post_init__(self):
        for name in ("v", "e_th"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
                raise ConfigError(f"PenaltyConfig.{name} 必须为正: {value}")


@dataclass(frozen=True)
class QueueState:
    backlog: float = 0.0
    slot: int = 0
    history: Tuple[float, ...] = ()

    def __post_init__(self):
        if not self.backlog >= 0:
            raise SimulationError(f"队列积压不能为负: {self.backlog}")


def _backlog(q: Union[QueueState, float]) -> float:
    return q.backlog if isinstance(q, QueueState) else float(q)


def drift_plus_penalty(v: float, backlog: float, delay: float, energy: float) -> float:
    """f = V·D + Q·E"""
    return v * delay + backlog * energy


def objective(cfg: PenaltyConfig, q: Union[QueueState, float], cost: CostBreakdown) -> float:
    """时隙目标 f = V·D^t + Q^t·E^t，Q取时隙开始时的积压。"""
    return drift_plus_penalty(cfg.v, _backlog(q), cost.delay_total, cost.energy_total)


def update(cfg: PenaltyConfig, q: QueueState, energy: float, history_limit: int = DEFAULT_HISTORY) -> QueueState:
    """
    用本时隙实际能耗推进队列。

    Args:
        cfg: 惩罚配置
        q: 当前队列状态
        energy: 本时隙能耗 E^t (J)
        history_limit: 保留的历史积压个数

    Returns:
        新的队列状态，slot加一
    """
    if not energy >= 0:
        raise SimulationError(f"时隙能耗必须非负: {energy}")
    backlog = max(q.backlog + energy - cfg.e_th, 0.0)
    history = (q.history + (q.backlog,))[-history_limit:] if history_limit > 0 else ()
    return QueueState(backlog=backlog, slot=q.slot + 1, history=history)


def lyapunov_value(q: Union[QueueState, float]) -> float:
    """L(Q) = Q²/2"""
    backlog = _backlog(q)
    return 0.5 * backlog * backlog


def drift(before: Union[QueueState, float], after: Union[QueueState, float]) -> float:
    """单步实际漂移 L(Q^{t+1}) - L(Q^t)。"""
    return lyapunov_value(after) - lyapunov_value(before)


def stability_metric(trace: Sequence[QueueState]) -> float:
    """Q^T / T，T为最后状态的时隙数。"""
    if not trace:
        raise EmptyTraceError("队列轨迹为空")
    final = trace[-1]
    if final.slot < 1:
        raise EmptyTraceError("队列尚未推进任何时隙")
    return final.backlog / final.slot


class EnergyDeficitQueue(Memory):
    """
    一次仿真运行拥有的系统级能耗亏空队列。

    每次add以 {"energy": E^t} 推进一个时隙，返回的条目包含推进前后的积压、
    推进后的Lyapunov值与单步漂移；最多保留history_limit个条目。
    """

    def __init__(self, penalty: PenaltyConfig, history_limit: int = DEFAULT_HISTORY):
        self.penalty = penalty
        self.history_limit = history_limit
        self.state = QueueState()
        self.trace: deque = deque(maxlen=history_limit if history_limit > 0 else None)
        logger.debug(f"已初始化能耗亏空队列: V={penalty.v:.6g}, E_th={penalty.e_th:.6g} J")

    @property
    def backlog(self) -> float:
        return self.state.backlog

    def advance(self, energy: float) -> QueueState:
        """推进一个时隙并返回新状态。"""
        before = self.state
        self.state = update(self.penalty, before, energy, self.history_limit)
        self.trace.append({
            "slot": self.state.slot,
            "energy": float(energy),
            "backlog_before": before.backlog,
            "backlog": self.state.backlog,
            "lyapunov": lyapunov_value(self.state),
            "drift": drift(before, self.state),
        })
        return self.state

    def add(self, entry: Dict[str, Any]) -> Dict[str, Any]:
        if "energy" not in entry:
            raise SimulationError("队列条目缺少 'energy' 字段")
        self.advance(float(entry["energy"]))
        return dict(self.trace[-1])

    def get_relevant(self, context: Optional[Dict[str, Any]] = None) -> List[Dict[str, Any]]:
        last = int((context or {}).get("last", len(self.trace)))
        entries = list(self.trace)[-last:] if last > 0 else []
        return [dict(e) for e in entries]

    def clear(self) -> None:
        self.state = QueueState()
        self.trace.clear()

    def stability(self) -> float:
        return stability_metric([self.state])

    def summarize(self, context: Optional[Dict[str, Any]] = None) -> str:
        if self.state.slot == 0:
            return f"队列未推进: Q=0, E_th={self.penalty.e_th:.6g} J"
        return (
            f"时隙 {self.state.slot}: Q={self.state.backlog:.6g} J, "
            f"Q/T={self.stability():.6g} J, E_th={self.penalty.e_th:.6g} J"
        )
