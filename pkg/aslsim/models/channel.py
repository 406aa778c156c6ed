"""
瑞利衰落 + 自由空间路径损耗的信道模型与香农速率。
"""
import math
from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from aslsim.utils import logging_utils
from aslsim.utils.error_handling import ConfigError, SimulationError

logger = logging_utils.get_logger(__name__, color="blue")

SPEED_OF_LIGHT = 3.0e8
_LN2 = math.log(2.0)


@dataclass(frozen=True)
class RadioLink:
    """
    单条无线链路的参数，全部为SI单位。

    gain_is_power为True时，衰落增益 g = ρ·ḡ 直接作为信道功率增益进入信噪比；
    为False时在信噪比中使用 g²。
    """

    bandwidth_hz: float
    tx_power_w: float
    antenna_gain: float
    carrier_hz: float
    pathloss_exp: float
    distance_m: float
    noise_psd_w_per_hz: float
    interference_psd_w_per_hz: float = 0.0
    gain_is_power: bool = True

    def __post_init__(self):
        for name in ("bandwidth_hz", "tx_power_w", "antenna_gain", "carrier_hz", "distance_m", "noise_psd_w_per_hz"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ConfigError(f"链路参数 {name} 必须为正: {value}")
        # φ = 0 表示不随距离衰减
        if not math.isfinite(self.pathloss_exp) or self.pathloss_exp < 0:
            raise ConfigError(f"路径损耗指数必须非负: {self.pathloss_exp}")
        if not math.isfinite(self.interference_psd_w_per_hz) or self.interference_psd_w_per_hz < 0:
            raise ConfigError(f"干扰功率谱密度必须非负: {self.interference_psd_w_per_hz}")

    def with_distance(self, distance_m: float) -> "RadioLink":
        return replace(self, distance_m=float(distance_m))


@dataclass(frozen=True)
class ChannelDraw:
    """一个时隙的上行/下行信道增益 (g^D, g^B)。"""

    uplink_gain: float
    downlink_gain: float

    def __post_init__(self):
        for name in ("uplink_gain", "downlink_gain"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise SimulationError(f"信道增益必须为非负有限值: {name}={value}")


def mean_gain(link: RadioLink) -> float:
    """ḡ = A·(c₀/(4π f d))^φ"""
    return link.antenna_gain * (SPEED_OF_LIGHT / (4.0 * math.pi * link.carrier_hz * link.distance_m)) ** link.pathloss_exp


def draw_gain(
    link: RadioLink, rng: np.random.Generator, size: Optional[int] = None
) -> Union[float, np.ndarray]:
    """
    抽取衰落后的增益 ρ·ḡ，ρ ~ Exp(1)。

    Args:
        link: 链路参数
        rng: 已播种的随机数生成器
        size: 为None时返回单个float，否则返回长度为size的数组
    """
    g_bar = mean_gain(link)
    if size is None:
        return float(rng.exponential(1.0)) * g_bar
    return rng.exponential(1.0, size=size) * g_bar


def draw(uplink: RadioLink, downlink: RadioLink, rng: np.random.Generator) -> ChannelDraw:
    """先抽上行 ρ，再抽下行 ρ，两者独立。"""
    uplink_gain = draw_gain(uplink, rng)
    downlink_gain = draw_gain(downlink, rng)
    return ChannelDraw(uplink_gain=uplink_gain, downlink_gain=downlink_gain)


def snr(link: RadioLink, gain: float) -> float:
    """P·|g|² / ((N₀+I)·W)"""
    if gain < 0:
        raise SimulationError(f"信道增益不能为负: {gain}")
    power_gain = gain if link.gain_is_power else gain * gain
    return link.tx_power_w * power_gain / ((link.noise_psd_w_per_hz + link.interference_psd_w_per_hz) * link.bandwidth_hz)


def rate(link: RadioLink, gain: float) -> float:
    """W·log₂(1 + SNR)，单位 bit/s。"""
    return link.bandwidth_hz * math.log1p(snr(link, gain)) / _LN2


def downlink_for(downlink: RadioLink, distance_m: float) -> RadioLink:
    """基站到某个MD的下行链路：沿用基站的射频参数，距离取该MD的距离。"""
    return downlink.with_distance(distance_m)
