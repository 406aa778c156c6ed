"""
分层模型profile：每个切分点的累计计算量与数据量。

提供 η、η_D(s)、ξ(s)、β(s)、γ(s) 以及profile文件的严格解析。
"""
import hashlib
import math
from dataclasses import dataclass, field
from itertools import accumulate
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

import pandas as pd
import yaml

from aslsim.utils import logging_utils
from aslsim.utils.error_handling import InvalidDecisionError, OutputError, ProfileError

logger = logging_utils.get_logger(__name__, color="blue")

SCHEMA_VERSION = 1
BUNDLED_PROFILES_DIR = Path(__file__).resolve().parent.parent / "config" / "profiles"
DEFAULT_PROFILE = "lenet12"

_LAYER_KEYS = {"index", "name", "flops", "params", "activation_size", "gradient_size"}
_HEADER_KEYS = {"schema_version", "model", "batch_size", "total_flops", "layers"}
_TOTAL_RTOL = 1e-9


@dataclass(frozen=True)
class LayerEntry:
    """单层的训练计算量（FLOPs）与参数/激活/梯度规模（按参数个数计）。"""

    index: int
    flops: float
    params: int
    activation_size: int
    gradient_size: int
    name: str = ""


@dataclass(frozen=True)
class ModelProfile:
    """
    链式模型的profile。

    前缀和在构造时按层序一次算好，device_flops(S) 与 total_flops 使用同一累加顺序。
    """

    layers: Tuple[LayerEntry, ...]
    model: str = "unnamed"
    batch_size: Optional[int] = None
    checksum: str = ""
    source: Optional[str] = None
    _flops_prefix: Tuple[float, ...] = field(init=False, repr=False, compare=False)
    _params_prefix: Tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.layers:
            raise ProfileError("profile中没有任何层")
        object.__setattr__(self, "_flops_prefix", tuple(accumulate(float(l.flops) for l in self.layers)))
        object.__setattr__(self, "_params_prefix", tuple(accumulate(int(l.params) for l in self.layers)))

    @property
    def total_flops(self) -> float:
        """η"""
        return self._flops_prefix[-1]

    @property
    def num_splits(self) -> int:
        """S"""
        return len(self.layers)

    @property
    def split_points(self) -> range:
        """𝒮 = {1..S}"""
        return range(1, len(self.layers) + 1)

    @property
    def total_params(self) -> int:
        return self._params_prefix[-1]


def _check_split(profile: ModelProfile, s: int) -> int:
    if isinstance(s, bool) or int(s) != s or not 1 <= s <= profile.num_splits:
        raise InvalidDecisionError(f"切分点越界: s={s}，有效范围 1..{profile.num_splits}")
    return int(s)


def device_flops(profile: ModelProfile, s: int) -> float:
    """η_D(s)：第1..s层的FLOPs之和。"""
    return profile._flops_prefix[_check_split(profile, s) - 1]


def server_flops(profile: ModelProfile, s: int) -> float:
    """η - η_D(s)，s = S 时恰为0。"""
    return profile.total_flops - device_flops(profile, s)


def device_params(profile: ModelProfile, s: int) -> int:
    """ξ(s)：设备侧子模型的参数个数。"""
    return profile._params_prefix[_check_split(profile, s) - 1]


def smashed_size(profile: ModelProfile, s: int) -> int:
    """β(s)：切分层输出激活的规模。"""
    return profile.layers[_check_split(profile, s) - 1].activation_size


def gradient_size(profile: ModelProfile, s: int) -> int:
    """γ(s)：切分层激活梯度的规模。"""
    return profile.layers[_check_split(profile, s) - 1].gradient_size


def _non_negative(value: Any, key: str, index: Any, integral: bool) -> Union[int, float]:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProfileError(f"第{index}层的字段 '{key}' 不是数值: {value!r}")
    if not math.isfinite(value) or value < 0:
        raise ProfileError(f"第{index}层的字段 '{key}' 为负数或非有限值: {value}")
    if integral:
        if int(value) != value:
            raise ProfileError(f"第{index}层的字段 '{key}' 必须是整数: {value}")
        return int(value)
    return float(value)


def _parse_layer(raw: Any, position: int) -> LayerEntry:
    if not isinstance(raw, dict):
        raise ProfileError(f"第{position}条层记录不是映射")
    index = raw.get("index", position)
    unknown = sorted(set(raw) - _LAYER_KEYS)
    if unknown:
        raise ProfileError(f"第{index}层包含未知字段: {unknown}")
    for key in ("index", "flops", "params", "activation_size"):
        if key not in raw:
            raise ProfileError(f"第{index}层缺少字段 '{key}'")
    index = _non_negative(raw["index"], "index", index, integral=True)
    activation = _non_negative(raw["activation_size"], "activation_size", index, integral=True)
    gradient = raw.get("gradient_size")
    return LayerEntry(
        index=index,
        flops=_non_negative(raw["flops"], "flops", index, integral=False),
        params=_non_negative(raw["params"], "params", index, integral=True),
        activation_size=activation,
        gradient_size=activation if gradient is None else _non_negative(gradient, "gradient_size", index, integral=True),
        name=str(raw.get("name", "")),
    )


def build_profile(
    layers: Iterable[Union[LayerEntry, Dict[str, Any]]],
    model: str = "unnamed",
    total_flops: Optional[float] = None,
    batch_size: Optional[int] = None,
    checksum: str = "",
    source: Optional[str] = None,
) -> ModelProfile:
    """
    校验层序列并构造ModelProfile。

    Args:
        layers: LayerEntry或原始映射
        model: 模型名
        total_flops: 文件头声明的η，缺省时由各层求和
        batch_size: 批大小，仅作记录
        checksum: 来源内容的sha256
        source: 来源路径

    Returns:
        校验通过的ModelProfile
    """
    entries: List[LayerEntry] = [
        layer if isinstance(layer, LayerEntry) else _parse_layer(layer, position)
        for position, layer in enumerate(layers, start=1)
    ]
    if not entries:
        raise ProfileError("profile中没有任何层")

    seen = set()
    for position, entry in enumerate(entries, start=1):
        if entry.index in seen:
            raise ProfileError(f"层索引重复: 第{entry.index}层")
        seen.add(entry.index)
        if entry.index != position:
            raise ProfileError(f"层索引不连续 (non-contiguous): 位置{position}处为第{entry.index}层")
        for key in ("flops", "params", "activation_size", "gradient_size"):
            _non_negative(getattr(entry, key), key, entry.index, integral=key != "flops")

    profile = ModelProfile(
        layers=tuple(entries),
        model=model,
        batch_size=batch_size,
        checksum=checksum,
        source=source,
    )
    if total_flops is not None:
        declared = _non_negative(total_flops, "total_flops", "header", integral=False)
        if not math.isclose(declared, profile.total_flops, rel_tol=_TOTAL_RTOL, abs_tol=0.0):
            raise ProfileError(
                f"文件头声明的total_flops={declared} 与各层之和 {profile.total_flops} 不一致"
            )
    return profile


def resolve_profile_path(name_or_path: Union[str, Path]) -> Path:
    """裸名称（如 lenet12）解析为内置profile，其余按路径处理。"""
    candidate = Path(name_or_path)
    if candidate.suffix == "" and not candidate.exists():
        bundled = BUNDLED_PROFILES_DIR / f"{candidate.name}.yaml"
        if bundled.exists():
            return bundled
    return candidate


def load_profile(path: Union[str, Path]) -> ModelProfile:
    """
    读取并严格校验profile文件。

    Args:
        path: yaml文件路径，或内置profile名称

    Returns:
        ModelProfile，checksum为文件内容的sha256
    """
    profile_path = resolve_profile_path(path)
    try:
        content = profile_path.read_bytes()
    except OSError as e:
        raise OutputError(f"无法读取profile文件 {profile_path}: {e}") from e

    try:
        raw = yaml.safe_load(content)
    except yaml.YAMLError as e:
        raise ProfileError(f"profile文件解析失败 {profile_path}: {e}") from e

    if not isinstance(raw, dict):
        raise ProfileError(f"profile文件顶层必须是映射: {profile_path}")
    unknown = sorted(set(raw) - _HEADER_KEYS)
    if unknown:
        raise ProfileError(f"profile文件头包含未知字段: {unknown}")
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ProfileError(f"不支持的profile schema_version: {version}")
    layers = raw.get("layers")
    if not isinstance(layers, list):
        raise ProfileError("profile文件缺少 'layers' 列表")

    profile = build_profile(
        layers,
        model=str(raw.get("model", profile_path.stem)),
        total_flops=raw.get("total_flops"),
        batch_size=raw.get("batch_size"),
        checksum=hashlib.sha256(content).hexdigest(),
        source=str(profile_path),
    )
    logger.info(f"已加载profile {profile.model}: S={profile.num_splits}, η={profile.total_flops:.6g} FLOPs")
    return profile


def profile_table(profile: ModelProfile, bytes_per_param: float = 4.0) -> pd.DataFrame:
    """
    每个切分点一行的η_D/ξ/β/γ表，附带换算到比特的数据量。
    """
    bits = 8.0 * bytes_per_param
    rows = []
    for s in profile.split_points:
        layer = profile.layers[s - 1]
        rows.append({
            "split": s,
            "layer": layer.name,
            "device_flops": device_flops(profile, s),
            "server_flops": server_flops(profile, s),
            "device_params": device_params(profile, s),
            "smashed_size": smashed_size(profile, s),
            "gradient_size": gradient_size(profile, s),
            "model_bits": device_params(profile, s) * bits,
            "smashed_bits": smashed_size(profile, s) * bits,
            "gradient_bits": gradient_size(profile, s) * bits,
        })
    return pd.DataFrame(rows)
