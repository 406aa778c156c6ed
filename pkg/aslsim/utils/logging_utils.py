"""
日志工具模块，为ASL-Sim提供分层着色的日志记录功能。
"""
import logging
import sys
from typing import Optional, Dict
import colorama
from colorama import Fore, Style
try:
    import colorlog
    COLORLOG_AVAILABLE = True
except ImportError:
    COLORLOG_AVAILABLE = False

# 初始化colorama
colorama.init(autoreset=True)

# 可用的颜色映射
COLORS = {
    "red": "RED",
    "green": "GREEN",  # 调度器
    "yellow": "YELLOW",
    "blue": "BLUE",  # 模型: profile / channel / cost
    "magenta": "MAGENTA",  # 命令行
    "cyan": "CYAN",  # 虚拟队列
    "white": "WHITE"  # 默认+工作流
}

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# 全局模块颜色配置字典
MODULE_COLORS: Dict[str, str] = {}


class SimpleColoredFormatter(logging.Formatter):
    """colorlog不可用时，使用colorama为整条记录着色。"""

    def format(self, record):
        formatted_message = super().format(record)
        color_name = COLORS.get(MODULE_COLORS.get(record.name, "white"), "WHITE")
        return f"{getattr(Fore, color_name)}{formatted_message}{Style.RESET_ALL}"


def setup_logging(log_level: str = "INFO", log_file: Optional[str] = None) -> None:
    """
    设置日志配置。

    Args:
        log_level: 日志级别 ("DEBUG", "INFO", "WARNING", "ERROR")
        log_file: 可选的日志文件路径
    """
    level = getattr(logging, str(log_level).upper(), logging.INFO)

    root_logger = logging.getLogger()
    root_logger.setLevel(level)

    for handler in list(root_logger.handlers):
        root_logger.removeHandler(handler)

    # 如果提供了日志文件，添加文件处理器；着色的模块日志同样写入文件
    if log_file:
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root_logger.addHandler(file_handler)
        for name in MODULE_COLORS:
            logging.getLogger(name).addHandler(file_handler)
    else:
        console = logging.StreamHandler(sys.stderr)
        console.setFormatter(logging.Formatter(LOG_FORMAT))
        root_logger.addHandler(console)

    for name in MODULE_COLORS:
        logging.getLogger(name).setLevel(level)

    logging.info(f"日志系统已配置，级别: {log_level}")


def get_logger(name: str, color: Optional[str] = None) -> logging.Logger:
    """
    获取命名的日志记录器，并可选地设置其颜色。

    Args:
        name: 日志记录器名称
        color: 日志颜色 (red, green, yellow, blue, magenta, cyan, white)

    Returns:
        命名的日志记录器
    """
    logger = logging.getLogger(name)

    if color and color in COLORS:
        MODULE_COLORS[name] = color

        # 防止日志消息被传递到父记录器
        logger.propagate = False

        for handler in list(logger.handlers):
            logger.removeHandler(handler)

        handler = logging.StreamHandler(sys.stderr)

        if COLORLOG_AVAILABLE:
            log_colors = {
                'DEBUG': 'cyan',
                'INFO': color,
                'WARNING': 'yellow',
                'ERROR': 'red',
                'CRITICAL': 'red,bg_white',
            }

            formatter = colorlog.ColoredFormatter(
                '%(log_color)s' + LOG_FORMAT,
                log_colors=log_colors
            )
        else:
            formatter = SimpleColoredFormatter(LOG_FORMAT)

        handler.setFormatter(formatter)
        logger.addHandler(handler)

    return logger
