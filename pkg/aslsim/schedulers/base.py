import abc
from typing import Dict, Any

from aslsim.core.base import Component
from aslsim.schedulers.context import SlotContext, SolverResult, SolverSettings


class Scheduler(Component):
    """
    ASL-Sim中所有每时隙调度器的抽象基类。

    调度器只依赖当前时隙的信息（SlotContext）给出决策 (s, c)，本身无状态。
    """

    kind: str = ""

    def __init__(self, settings: SolverSettings = None):
        """
        初始化调度器。

        Args:
            settings: 求解器参数
        """
        self.settings = settings or SolverSettings()

    @abc.abstractmethod
    def solve(self, ctx: SlotContext) -> SolverResult:
        """求解一个时隙的决策"""
        pass

    def execute(self, context: Dict[str, Any]) -> Dict[str, Any]:
        """以字典形式调用solve，context需包含 'ctx'"""
        result = self.solve(context["ctx"])
        return {"result": result, "decision": result.decision, "objective": result.objective}

    def get_id(self) -> str:
        return self.kind or super().get_id()
