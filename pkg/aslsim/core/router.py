from typing import Dict, Any

from aslsim.utils import logging_utils
from aslsim.utils.error_handling import RoutingError

logger = logging_utils.get_logger(__name__, color="white")


class Router:
    """
    组件通信的中央路由系统。

    仿真工作流通过 "scheduler.method" 形式的函数路径调用已注册的调度器，
    调度器种类（open / fixed-sl / delay-opt / energy-opt / oracle）即组件名。
    """

    def __init__(self):
        """初始化路由器"""
        self.components = {}  # 存储注册组件的字典

    def register(self, name: str, component) -> None:
        """
        向路由器注册组件。

        Args:
            name: 组件的字符串标识符
            component: 组件实例
        """
        self.components[name] = component
        logger.debug(f"已注册组件: {name} -> {component.__class__.__name__}")

    def has(self, name: str) -> bool:
        return name in self.components

    def route(self, function_call: Dict[str, Any]) -> Any:
        """
        将函数调用路由到适当的组件。

        Args:
            function_call: 包含'function'和'parameters'键的字典

        Returns:
            被调用组件方法的返回值

        Raises:
            RoutingError: 如果找不到组件或方法
        """
        function_path = function_call.get("function", "")
        parameters = function_call.get("parameters", {})

        if "." not in function_path:
            raise RoutingError(f"无效的函数路径: {function_path}。预期格式: 'component.method'")

        component_name, method_name = function_path.split(".", 1)

        component = self.components.get(component_name)
        if component is None:
            raise RoutingError(f"未找到组件: {component_name}，已注册: {sorted(self.components)}")

        method = getattr(component, method_name, None)
        if not method or not callable(method):
            raise RoutingError(f"未找到方法: {method_name} in component {component_name}")

        # 数值错误必须向上传播，不能被吞成结果字典
        try:
            return method(**parameters)
        except Exception as e:
            logger.error(f"组件调用失败 {function_path}: {e}")
            raise
