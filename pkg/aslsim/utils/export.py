"""
结果导出：带版本头的CSV表与JSON摘要。
"""
import json
from pathlib import Path
from typing import Any, Dict, Union

import pandas as pd

from aslsim.utils.error_handling import OutputError

CSV_SCHEMA_VERSION = 1
SLOTS_FILE = "slots.csv"
EPISODES_FILE = "episodes.csv"
SUMMARY_FILE = "summary.json"
COMPARISON_FILE = "comparison.csv"


def ensure_dir(path: Union[str, Path]) -> Path:
    directory = Path(path)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(f"无法创建输出目录 {directory}: {e}") from e
    return directory


def write_table(frame: pd.DataFrame, path: Union[str, Path], table: str) -> Path:
    """
    写出CSV，首行为注释形式的schema版本头。

    Args:
        frame: 要写出的表
        path: 目标文件
        table: 表名，写入版本头
    """
    target = Path(path)
    ensure_dir(target.parent)
    try:
        with open(target, "w", encoding="utf-8", newline="") as f:
            f.write(f"# aslsim {table} schema_version={CSV_SCHEMA_VERSION}\n")
            frame.to_csv(f, index=False, lineterminator="\n")
    except OSError as e:
        raise OutputError(f"无法写入 {target}: {e}") from e
    return target


def read_table(path: Union[str, Path]) -> pd.DataFrame:
    try:
        return pd.read_csv(path, comment="#")
    except (OSError, pd.errors.ParserError) as e:
        raise OutputError(f"无法读取 {path}: {e}") from e


def write_summary(summary: Dict[str, Any], path: Union[str, Path]) -> Path:
    target = Path(path)
    ensure_dir(target.parent)
    try:
        with open(target, "w", encoding="utf-8") as f:
            json.dump(summary, f, ensure_ascii=False, indent=2, default=str)
            f.write("\n")
    except OSError as e:
        raise OutputError(f"无法写入 {target}: {e}") from e
    return target


def read_summary(path: Union[str, Path]) -> Dict[str, Any]:
    """读取摘要文件；传入目录时读取其中的summary.json。"""
    target = Path(path)
    if target.is_dir():
        target = target / SUMMARY_FILE
    try:
        with open(target, "r", encoding="utf-8") as f:
            return json.load(f)
    except OSError as e:
        raise OutputError(f"无法读取摘要 {target}: {e}") from e
    except json.JSONDecodeError as e:
        raise OutputError(f"摘要文件格式错误 {target}: {e}") from e
