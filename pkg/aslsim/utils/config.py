"""
配置加载模块。

优先级：命令行参数 > --set覆盖项 > yaml文件 > 内置默认值。
"""
import copy
import os
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

import yaml

from aslsim.utils.error_handling import ConfigError

CONFIG_NAME = "config.yaml"
OUTPUT_DIR_ENV = "ASLSIM_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "results"

SECTIONS = ("profile", "server", "devices", "radio", "penalty", "solver", "run", "sweep", "logging")


def get_project_root() -> Path:
    current_path = Path(__file__)
    return current_path.parent.parent.parent


def default_config_path() -> Path:
    return get_project_root() / CONFIG_NAME


def load_config(path: Optional[os.PathLike] = None) -> Dict[str, Any]:
    """
    读取yaml配置文件。

    Args:
        path: 配置文件路径，缺省为项目根目录下的config.yaml

    Returns:
        原始配置字典
    """
    config_path = Path(path) if path else default_config_path()
    try:
        with open(config_path, "r", encoding="utf-8") as f:
            config = yaml.safe_load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"配置文件不存在: {config_path}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"配置文件解析失败: {config_path}: {e}") from e

    if not isinstance(config, dict):
        raise ConfigError(f"配置文件顶层必须是映射: {config_path}")
    unknown = sorted(set(config) - set(SECTIONS))
    if unknown:
        raise ConfigError(f"未知的配置段: {unknown}")
    return config


def dump_config(config: Dict[str, Any]) -> str:
    """将配置序列化为yaml文本，键顺序保持不变。"""
    return yaml.safe_dump(config, sort_keys=False, allow_unicode=True, default_flow_style=False)


def parse_override(item: str) -> tuple:
    """
    解析形如 "run.episodes=10" 的覆盖项，值按yaml标量解析。

    Returns:
        (键路径列表, 值)
    """
    if "=" not in item:
        raise ConfigError(f"无效的覆盖项: {item}。预期格式: 'section.key=value'")
    key, raw = item.split("=", 1)
    keys = [k for k in key.strip().split(".") if k]
    if not keys:
        raise ConfigError(f"无效的覆盖项: {item}")
    try:
        value = yaml.safe_load(raw) if raw.strip() else None
    except yaml.YAMLError as e:
        raise ConfigError(f"覆盖项的值无法解析: {item}: {e}") from e
    # YAML 1.1 把 1e12 这类无小数点的科学计数法当作字符串
    if isinstance(value, str):
        try:
            value = float(value)
        except ValueError:
            pass
    return keys, value


def apply_overrides(config: Dict[str, Any], overrides: Iterable[str]) -> Dict[str, Any]:
    """
    在解析后的配置上应用--set覆盖项，返回新的配置字典。

    Args:
        config: 原始配置
        overrides: "a.b=value" 形式的覆盖项

    Returns:
        应用覆盖后的配置副本
    """
    result = copy.deepcopy(config)
    for item in overrides or ():
        keys, value = parse_override(item)
        if keys[0] not in SECTIONS:
            raise ConfigError(f"未知的配置段: {keys[0]}")
        node = result
        for k in keys[:-1]:
            child = node.get(k)
            if child is None:
                child = {}
                node[k] = child
            elif not isinstance(child, dict):
                raise ConfigError(f"覆盖项路径冲突: {item}")
            node = child
        node[keys[-1]] = value
    return result


def get_section(config: Dict[str, Any], name: str) -> Dict[str, Any]:
    section = config.get(name) or {}
    if not isinstance(section, dict):
        raise ConfigError(f"配置段 '{name}' 必须是映射")
    return section


def resolve_output_dir(cli_value: Optional[str], config: Dict[str, Any]) -> Path:
    """输出目录：命令行 > 配置 > 环境变量 > ./results"""
    if cli_value:
        return Path(cli_value)
    configured = get_section(config, "run").get("output_dir")
    if configured:
        return Path(configured)
    return Path(os.environ.get(OUTPUT_DIR_ENV, DEFAULT_OUTPUT_DIR))


def dbm_per_hz_to_w_per_hz(value_dbm_hz: float) -> float:
    """x dBm/Hz -> 10^((x-30)/10) W/Hz"""
    return 10.0 ** ((float(value_dbm_hz) - 30.0) / 10.0)
