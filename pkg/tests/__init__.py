"""
ASL-Sim测试包。
包含对各个模块的功能测试，以及按默认参数跑完整仿真的验收测试。
"""
import math
from functools import lru_cache

import numpy as np

from aslsim.memory.energy_queue import PenaltyConfig
from aslsim.models.channel import ChannelDraw, RadioLink, mean_gain
from aslsim.models.cost import CostUnits, Decision, DeviceSpec, ServerSpec
from aslsim.models.profile import build_profile, load_profile
from aslsim.schedulers.context import SlotContext

# 默认参数
E_TH = 3000.0
KAPPA = 1e-26
NOISE_W_HZ = 10 ** ((-174 - 30) / 10)
INTERFERENCE_W_HZ = 10 ** ((-164 - 30) / 10)
TYPICAL_V = 5e11

# LeNet profile的逐层结构：(名称, 类型, 输入通道, 输出通道, 卷积核, 输入边长)
LENET_LAYERS = [
    ("conv1", "conv", 1, 8, 5, 28),
    ("relu1", "act", 8, 8, 0, 28),
    ("pool1", "pool", 8, 8, 2, 28),
    ("conv2", "conv", 8, 16, 5, 14),
    ("relu2", "act", 16, 16, 0, 14),
    ("pool2", "pool", 16, 16, 2, 14),
    ("conv3", "conv", 16, 32, 3, 7),
    ("relu3", "act", 32, 32, 0, 7),
    ("dropout", "act", 32, 32, 0, 7),
    ("fc1", "fc", 32 * 7 * 7, 512, 0, 1),
    ("relu4", "act", 512, 512, 0, 1),
    ("fc2", "fc", 512, 10, 0, 1),
]
BATCH = 16


def lenet_reference():
    """
    按层几何独立计算LeNet的FLOPs/参数/激活规模。

    训练FLOPs = 3 × 前向FLOPs，前向FLOPs = 2 × MACs，乘以批大小；same卷积保持边长。

    Returns:
        (flops列表, params列表, activation列表)
    """
    flops, params, activations = [], [], []
    for _, kind, c_in, c_out, k, side in LENET_LAYERS:
        if kind == "conv":
            outputs = c_out * side * side
            macs = outputs * c_in * k * k
            flops.append(3 * 2 * macs * BATCH)
            params.append(c_out * c_in * k * k + c_out)
            activations.append(outputs * BATCH)
        elif kind == "fc":
            macs = c_in * c_out
            flops.append(3 * 2 * macs * BATCH)
            params.append(c_in * c_out + c_out)
            activations.append(c_out * BATCH)
        elif kind == "pool":
            flops.append(0)
            params.append(0)
            activations.append(c_out * (side // k) ** 2 * BATCH)
        else:
            flops.append(0)
            params.append(0)
            activations.append(activations[-1])
    return flops, params, activations


def small_profile(flops=(10, 20, 30), params=(5, 5, 5), activations=(100, 50, 10), gradients=None):
    layers = []
    for i, (f, p, a) in enumerate(zip(flops, params, activations), start=1):
        layer = {"index": i, "flops": f, "params": p, "activation_size": a}
        if gradients is not None:
            layer["gradient_size"] = gradients[i - 1]
        layers.append(layer)
    return build_profile(layers, model="small")


@lru_cache(maxsize=1)
def lenet_profile():
    return load_profile("lenet12")


def uplink(distance_m=200.0, **changes):
    params = dict(
        bandwidth_hz=20e6,
        tx_power_w=0.4,
        antenna_gain=4.11,
        carrier_hz=2e9,
        pathloss_exp=1.0,
        distance_m=distance_m,
        noise_psd_w_per_hz=NOISE_W_HZ,
        interference_psd_w_per_hz=INTERFERENCE_W_HZ,
    )
    params.update(changes)
    return RadioLink(**params)


def downlink(distance_m=200.0, **changes):
    params = dict(
        bandwidth_hz=40e6,
        tx_power_w=3.0,
        antenna_gain=8.0,
        carrier_hz=2e9,
        pathloss_exp=1.0,
        distance_m=distance_m,
        noise_psd_w_per_hz=NOISE_W_HZ,
        interference_psd_w_per_hz=INTERFERENCE_W_HZ,
    )
    params.update(changes)
    return RadioLink(**params)


def table1_device(freq_ghz=1.0, cores=4, distance_m=200.0):
    return DeviceSpec(freq_hz=freq_ghz * 1e9, flops_per_cycle=8, cores=cores, uplink=uplink(distance_m))


def table1_server():
    return ServerSpec(freq_hz=3e9, flops_per_cycle=16, cores=32, downlink=downlink(), kappa=KAPPA)


def table1_context(backlog=0.0, v=TYPICAL_V, freq_ghz=1.0, cores=4, gains=None, profile=None):
    dev = table1_device(freq_ghz, cores)
    srv = table1_server()
    if gains is None:
        gains = (mean_gain(dev.uplink), mean_gain(srv.downlink))
    return SlotContext(
        profile=profile or lenet_profile(),
        dev=dev,
        srv=srv,
        draw=ChannelDraw(*gains),
        cfg=PenaltyConfig(v=v, e_th=E_TH),
        backlog=backlog,
    )


def log_uniform(rng, center, decades):
    return center * 10 ** rng.uniform(-decades, decades)


def random_profile(rng):
    """1到8层的随机链式profile，约三分之一的层计算量为0。"""
    size = int(rng.integers(1, 9))
    layers = []
    for i in range(1, size + 1):
        flops = 0.0 if rng.random() < 0.3 else float(log_uniform(rng, 1e7, 2))
        layers.append({
            "index": i,
            "flops": flops,
            "params": int(rng.integers(0, 10 ** 6)),
            "activation_size": int(rng.integers(1, 10 ** 5)),
        })
    return build_profile(layers, model="random")


def random_context(rng, profile=None, zero_backlog_probability=0.05):
    """
    随机时隙上下文，V、Q、κ、功率、带宽等在默认值上下三个数量级内对数均匀取值。
    """
    profile = profile or (lenet_profile() if rng.random() < 0.5 else random_profile(rng))
    kappa = float(log_uniform(rng, KAPPA, 3))
    dev = DeviceSpec(
        freq_hz=float(log_uniform(rng, 1e9, 1)),
        flops_per_cycle=float(rng.choice([4, 8, 16])),
        cores=int(rng.integers(1, 17)),
        uplink=uplink(
            distance_m=float(rng.uniform(50, 2000)),
            bandwidth_hz=float(log_uniform(rng, 20e6, 3)),
            tx_power_w=float(log_uniform(rng, 0.4, 3)),
        ),
        kappa=None if rng.random() < 0.5 else float(log_uniform(rng, KAPPA, 3)),
    )
    srv = ServerSpec(
        freq_hz=float(log_uniform(rng, 3e9, 1)),
        flops_per_cycle=16,
        cores=int(rng.integers(1, 65)),
        downlink=downlink(
            bandwidth_hz=float(log_uniform(rng, 40e6, 3)),
            tx_power_w=float(log_uniform(rng, 3.0, 3)),
        ),
        kappa=kappa,
    )
    gains = ChannelDraw(
        uplink_gain=float(rng.exponential(1.0) * mean_gain(dev.uplink)) + 1e-12,
        downlink_gain=float(rng.exponential(1.0) * mean_gain(srv.downlink)) + 1e-12,
    )
    backlog = 0.0 if rng.random() < zero_backlog_probability else float(log_uniform(rng, 1e4, 3))
    return SlotContext(
        profile=profile,
        dev=dev,
        srv=srv,
        draw=gains,
        cfg=PenaltyConfig(v=float(log_uniform(rng, TYPICAL_V, 3)), e_th=E_TH),
        backlog=backlog,
        units=CostUnits(),
    )


def relative_gap(a, b):
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def split_objective_parts(ctx, s):
    """
    把固定切分点s下的目标拆成 f(c) = K + V·A/c + Q·B·c。

    Returns:
        (K, A, B)，A、B取c = 1时服务器侧的时延与能耗
    """
    cost = ctx.evaluate(Decision(s, 1.0))
    a, b = cost.d_srv_comp, cost.e_srv_comp
    k = ctx.cfg.v * (cost.delay_total - a) + ctx.backlog * (cost.energy_total - b)
    return k, a, b


def grid_objective(ctx, s, grid):
    k, a, b = split_objective_parts(ctx, s)
    if a == 0 and b == 0:
        return np.full_like(grid, k, dtype=float)
    return k + ctx.cfg.v * a / grid + ctx.backlog * b * grid


def is_close(a, b, rel=1e-12):
    return math.isclose(a, b, rel_tol=rel, abs_tol=0.0)
