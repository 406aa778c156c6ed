"""
错误处理模块，定义ASL-Sim的异常层级及其对应的进程退出码。
"""


class AslSimError(Exception):
    """所有ASL-Sim异常的基类。"""

    exit_code = 1
    category = "error"


class ConfigError(AslSimError):
    """配置文件缺失、格式错误或取值越界。"""

    exit_code = 3
    category = "config"


class ProfileError(AslSimError):
    """模型profile文件解析或校验失败，消息中包含出错的层索引。"""

    exit_code = 4
    category = "profile"


class OutputError(AslSimError):
    """输入输出文件不可读或不可写。"""

    exit_code = 5
    category = "io"


class SimulationError(AslSimError):
    """仿真过程中违反不变量。"""

    exit_code = 6
    category = "invariant"


class UnreachableLinkError(SimulationError):
    """传输数据量为正但链路速率为0。"""


class InvalidDecisionError(SimulationError):
    """切分点越界或计算资源份额非法。"""


class EmptyTraceError(SimulationError):
    """对空轨迹求平均。"""


class PopulationMismatchError(SimulationError):
    """严格模式下，对比实验的配置不共享同一MD群体。"""


class RoutingError(AslSimError):
    """未知的调度器或方法。"""

    exit_code = 7
    category = "routing"


def exit_code_for(error: BaseException) -> int:
    """
    将异常映射为进程退出码。

    Args:
        error: 捕获到的异常

    Returns:
        对应的退出码，未知异常返回1
    """
    if isinstance(error, AslSimError):
        return error.exit_code
    if isinstance(error, (FileNotFoundError, PermissionError, IsADirectoryError)):
        return OutputError.exit_code
    return 1
