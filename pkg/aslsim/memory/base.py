"""
按时隙推进的状态存储接口。
"""
import abc
from typing import Any, Dict, List, Optional


class Memory(abc.ABC):
    """
    一次仿真运行内逐时隙累积的状态。

    工作流每个时隙调用一次add写入实际结果，存储返回推进后的状态条目；
    get_relevant按上下文取回最近的条目，供日志与诊断使用。
    """

    @abc.abstractmethod
    def add(self, entry: Dict[str, Any]) -> Dict[str, Any]:
        """
        写入一个时隙的实际结果并推进状态。

        Args:
            entry: 时隙结果，字段由具体存储约定

        Returns:
            推进后的状态条目
        """

    @abc.abstractmethod
    def get_relevant(self, context: Optional[Dict[str, Any]] = None) -> List[Dict[str, Any]]:
        """按时隙顺序返回保留的状态条目，context可限定数量等条件。"""

    @abc.abstractmethod
    def clear(self) -> None:
        """回到初始状态。"""

    @abc.abstractmethod
    def summarize(self, context: Optional[Dict[str, Any]] = None) -> str:
        """当前状态的单行描述。"""

    def latest(self) -> Optional[Dict[str, Any]]:
        entries = self.get_relevant({"last": 1})
        return entries[-1] if entries else None
