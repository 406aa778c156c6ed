"""
时延/能耗模型的测试。
"""
import math
import unittest
from dataclasses import replace

import numpy as np

from aslsim.models.channel import ChannelDraw, rate
from aslsim.models.cost import CostUnits, Decision, average_metrics, evaluate
from aslsim.utils.error_handling import EmptyTraceError, InvalidDecisionError, UnreachableLinkError
from tests import lenet_profile, random_context, relative_gap, small_profile, table1_device, table1_server

COST_FIELDS = [
    "d_dev_comp", "d_srv_comp", "d_model_down", "d_smashed_up", "d_grad_down", "d_model_up", "delay_total",
    "e_dev_tx", "e_srv_tx", "e_dev_comp", "e_srv_comp", "energy_total",
]


def straight_line_cost(layers, dev, srv, g_up, g_down, s, c, bytes_per_param, local_updates):
    """不复用任何被测辅助函数的逐式实现。"""
    eta = 0.0
    for layer in layers:
        eta += layer.flops
    eta_d = 0.0
    xi = 0
    for layer in layers[:s]:
        eta_d += layer.flops
        xi += layer.params
    beta = layers[s - 1].activation_size
    gamma = layers[s - 1].gradient_size
    bits_per_param = bytes_per_param * 8

    up = dev.uplink
    down = srv.downlink
    r_up = up.bandwidth_hz * math.log1p(
        up.tx_power_w * g_up / ((up.noise_psd_w_per_hz + up.interference_psd_w_per_hz) * up.bandwidth_hz)
    ) / math.log(2.0)
    r_down = down.bandwidth_hz * math.log1p(
        down.tx_power_w * g_down / ((down.noise_psd_w_per_hz + down.interference_psd_w_per_hz) * down.bandwidth_hz)
    ) / math.log(2.0)

    n = local_updates
    d1 = n * eta_d / (dev.freq_hz * dev.flops_per_cycle * dev.cores)
    d2 = n * (eta - eta_d) / (c * srv.freq_hz * srv.flops_per_cycle * srv.cores) if eta - eta_d > 0 else 0.0
    d3 = xi * bits_per_param / r_down
    d4 = n * beta * bits_per_param / r_up
    d5 = n * gamma * bits_per_param / r_down
    d6 = xi * bits_per_param / r_up
    kappa_d = dev.kappa if dev.kappa is not None else srv.kappa
    e9 = up.tx_power_w * (d4 + d6)
    e10 = down.tx_power_w * (d3 + d5)
    e11 = n * kappa_d * dev.flops_per_cycle * dev.cores * dev.freq_hz * dev.freq_hz * eta_d
    e12 = n * srv.kappa * c * srv.flops_per_cycle * srv.cores * srv.freq_hz * srv.freq_hz * (eta - eta_d)
    return {
        "d_dev_comp": d1, "d_srv_comp": d2, "d_model_down": d3, "d_smashed_up": d4, "d_grad_down": d5,
        "d_model_up": d6, "delay_total": d1 + d2 + d3 + d4 + d5 + d6,
        "e_dev_tx": e9, "e_srv_tx": e10, "e_dev_comp": e11, "e_srv_comp": e12,
        "energy_total": e9 + e10 + e11 + e12,
    }


class TestEvaluate(unittest.TestCase):
    """evaluate的测试用例"""

    def setUp(self):
        self.profile = lenet_profile()
        self.dev = table1_device(freq_ghz=1.0, cores=4)
        self.srv = table1_server()
        self.draw = ChannelDraw(uplink_gain=1e-4, downlink_gain=2e-4)

    def test_full_model_on_device(self):
        s = self.profile.num_splits
        for share in (0.0, 0.3, 1.0):
            cost = evaluate(self.profile, self.dev, self.srv, self.draw, Decision(s, share))
            self.assertEqual(cost.d_srv_comp, 0.0)
            self.assertEqual(cost.e_srv_comp, 0.0)

    def test_device_compute_delay(self):
        profile = small_profile(flops=(1e9, 1e9), params=(1, 1), activations=(1, 1))
        dev = replace(table1_device(), freq_hz=1e9, flops_per_cycle=8, cores=1)
        cost = evaluate(profile, dev, self.srv, self.draw, Decision(1, 1.0))
        self.assertAlmostEqual(cost.d_dev_comp, 0.125, places=15)

    def test_components_sum_exactly(self):
        for s in self.profile.split_points:
            cost = evaluate(self.profile, self.dev, self.srv, self.draw, Decision(s, 0.4))
            delay = cost.d_dev_comp + cost.d_srv_comp + cost.d_model_down + cost.d_smashed_up + cost.d_grad_down + cost.d_model_up
            energy = cost.e_dev_tx + cost.e_srv_tx + cost.e_dev_comp + cost.e_srv_comp
            self.assertEqual(cost.delay_total, delay)
            self.assertEqual(cost.energy_total, energy)
            self.assertAlmostEqual(cost.device_energy + cost.bs_energy, cost.energy_total, delta=1e-12 * cost.energy_total)
            for name in COST_FIELDS:
                self.assertGreaterEqual(getattr(cost, name), 0.0)

    def test_share_monotonicity(self):
        low = evaluate(self.profile, self.dev, self.srv, self.draw, Decision(3, 0.2))
        high = evaluate(self.profile, self.dev, self.srv, self.draw, Decision(3, 0.8))
        self.assertGreater(low.d_srv_comp, high.d_srv_comp)
        self.assertLess(low.e_srv_comp, high.e_srv_comp)

    def test_gradient_size_identity(self):
        r_up = rate(self.dev.uplink, self.draw.uplink_gain)
        r_down = rate(self.srv.downlink, self.draw.downlink_gain)
        for s in self.profile.split_points:
            cost = evaluate(self.profile, self.dev, self.srv, self.draw, Decision(s, 1.0))
            self.assertLess(relative_gap(cost.d_grad_down * r_down, cost.d_smashed_up * r_up), 1e-12)

    def test_invariant_under_bit_and_rate_scaling(self):
        """比特数与速率同比放大时时延与能耗不变"""
        base = evaluate(self.profile, self.dev, self.srv, self.draw, Decision(5, 0.5))
        scaled_dev = replace(self.dev, uplink=replace(self.dev.uplink, bandwidth_hz=self.dev.uplink.bandwidth_hz * 2))
        scaled_srv = replace(self.srv, downlink=replace(self.srv.downlink, bandwidth_hz=self.srv.downlink.bandwidth_hz * 2))
        # 带宽加倍且增益加倍：SNR不变，速率加倍
        scaled_draw = ChannelDraw(self.draw.uplink_gain * 2, self.draw.downlink_gain * 2)
        scaled = evaluate(self.profile, scaled_dev, scaled_srv, scaled_draw, Decision(5, 0.5), CostUnits(bytes_per_param=8))
        self.assertLess(relative_gap(base.delay_total, scaled.delay_total), 1e-12)
        self.assertLess(relative_gap(base.energy_total, scaled.energy_total), 1e-12)

    def test_zero_share_with_server_work(self):
        with self.assertRaises(InvalidDecisionError):
            evaluate(self.profile, self.dev, self.srv, self.draw, Decision(3, 0.0))

    def test_invalid_share(self):
        for share in (-0.1, 1.5, float("nan")):
            with self.assertRaises(InvalidDecisionError):
                Decision(3, share)

    def test_unreachable_link(self):
        with self.assertRaises(UnreachableLinkError):
            evaluate(self.profile, self.dev, self.srv, ChannelDraw(0.0, 1e-4), Decision(3, 1.0))

    def test_local_updates_multiplier(self):
        one = evaluate(self.profile, self.dev, self.srv, self.draw, Decision(4, 0.5), CostUnits(local_updates=1))
        three = evaluate(self.profile, self.dev, self.srv, self.draw, Decision(4, 0.5), CostUnits(local_updates=3))
        for name in ("d_dev_comp", "d_srv_comp", "d_smashed_up", "d_grad_down", "e_dev_comp", "e_srv_comp"):
            self.assertAlmostEqual(getattr(three, name), 3 * getattr(one, name), delta=1e-12 * getattr(three, name))
        self.assertEqual(three.d_model_up, one.d_model_up)
        self.assertEqual(three.d_model_down, one.d_model_down)

    def test_device_kappa_override(self):
        dev = replace(self.dev, kappa=2e-26)
        default = evaluate(self.profile, self.dev, self.srv, self.draw, Decision(4, 0.5))
        override = evaluate(self.profile, dev, self.srv, self.draw, Decision(4, 0.5))
        self.assertAlmostEqual(override.e_dev_comp, 2 * default.e_dev_comp, delta=1e-12 * override.e_dev_comp)

    def test_straight_line_oracle(self):
        """与逐式独立实现在10000组随机输入上一致"""
        rng = np.random.default_rng(2024)
        worst = 0.0
        for _ in range(10000):
            ctx = random_context(rng)
            s = int(rng.integers(1, ctx.profile.num_splits + 1))
            c = float(rng.uniform(1e-3, 1.0))
            units = CostUnits(bytes_per_param=float(rng.choice([2, 4, 8])), local_updates=int(rng.integers(1, 4)))
            cost = evaluate(ctx.profile, ctx.dev, ctx.srv, ctx.draw, Decision(s, c), units)
            expected = straight_line_cost(
                ctx.profile.layers, ctx.dev, ctx.srv, ctx.draw.uplink_gain, ctx.draw.downlink_gain, s, c,
                units.bytes_per_param, units.local_updates,
            )
            for name in COST_FIELDS:
                gap = relative_gap(getattr(cost, name), expected[name])
                worst = max(worst, gap)
                self.assertLess(gap, 1e-12, f"{name}: {getattr(cost, name)} != {expected[name]}")
        print(f"\n最大相对误差: {worst:.3e}")


class TestAverageMetrics(unittest.TestCase):
    """average_metrics的测试用例"""

    def _cost(self, delay, energy):
        profile = lenet_profile()
        base = evaluate(profile, table1_device(), table1_server(), ChannelDraw(1e-4, 1e-4), Decision(12, 0.0))
        return replace(base, delay_total=delay, energy_total=energy)

    def test_single_slot(self):
        cost = self._cost(1.5, 20.0)
        self.assertEqual(average_metrics([cost]), (1.5, 20.0))

    def test_two_slots(self):
        mean_delay, mean_energy = average_metrics([self._cost(1.0, 10.0), self._cost(3.0, 30.0)])
        self.assertEqual(mean_delay, 2.0)
        self.assertEqual(mean_energy, 20.0)

    def test_empty_trace(self):
        with self.assertRaises(EmptyTraceError):
            average_metrics([])


if __name__ == '__main__':
    unittest.main()
