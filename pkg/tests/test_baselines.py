"""
基线调度器与联合oracle的测试。
"""
import unittest

import numpy as np

from aslsim.models.profile import server_flops
from aslsim.schedulers import build_scheduler, build_schedulers
from aslsim.schedulers.baselines import BaselineScheduler, solve_baseline
from aslsim.schedulers.context import SchedulerKind, SolverSettings
from aslsim.schedulers.open import optimal_share, solve_open
from aslsim.schedulers.oracle import candidate_shares, solve_joint_oracle
from aslsim.utils.error_handling import ConfigError
from tests import random_context, small_profile, table1_context

DEVICE_TYPES = ((0.5, 1), (1.0, 4), (2.0, 8), (4.0, 16))
BACKLOGS = (0.0, 1e3, 1e4, 1e5, 1e6)


class TestFixedSplit(unittest.TestCase):
    """固定切分SL基线的测试用例"""

    def test_always_nine_with_full_share(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            ctx = random_context(rng, profile=table1_context().profile)
            result = solve_baseline(ctx, SchedulerKind.FIXED_SL)
            self.assertEqual(result.decision.split, 9)
            self.assertEqual(result.decision.share, 1.0)
            self.assertEqual(result.kind, "fixed-sl")

    def test_split_outside_profile(self):
        ctx = table1_context(profile=small_profile())
        with self.assertRaises(ConfigError):
            solve_baseline(ctx, "fixed-sl")
        result = solve_baseline(ctx, "fixed-sl", SolverSettings(fixed_split=2))
        self.assertEqual(result.decision.split, 2)


class TestOptimalBaselines(unittest.TestCase):
    """时延最优与能耗最优基线的测试用例"""

    def test_delay_opt_lower_bounds_open_delay(self):
        for freq_ghz, cores in DEVICE_TYPES:
            for backlog in BACKLOGS:
                ctx = table1_context(backlog=backlog, freq_ghz=freq_ghz, cores=cores)
                delay_opt = solve_baseline(ctx, SchedulerKind.DELAY_OPT)
                self.assertEqual(delay_opt.decision.share, 1.0)
                self.assertLessEqual(delay_opt.cost.delay_total, solve_open(ctx).cost.delay_total)

    def test_energy_opt_lower_bounds_open_energy(self):
        for freq_ghz, cores in DEVICE_TYPES:
            for backlog in BACKLOGS:
                ctx = table1_context(backlog=backlog, freq_ghz=freq_ghz, cores=cores)
                energy_opt = solve_baseline(ctx, SchedulerKind.ENERGY_OPT)
                open_result = solve_open(ctx)
                self.assertLessEqual(energy_opt.cost.energy_total, open_result.cost.energy_total)

    def test_energy_opt_share_floor(self):
        ctx = table1_context(backlog=1e4)
        result = solve_baseline(ctx, SchedulerKind.ENERGY_OPT, SolverSettings(share_floor=0.01))
        expected = 0.01 if server_flops(ctx.profile, result.decision.split) > 0 else 0.0
        self.assertEqual(result.decision.share, expected)

    def test_oracle_is_not_a_baseline(self):
        with self.assertRaises(ConfigError):
            solve_baseline(table1_context(), SchedulerKind.ORACLE)
        with self.assertRaises(ConfigError):
            BaselineScheduler("open")

    def test_unknown_kind(self):
        with self.assertRaises(ConfigError):
            SchedulerKind.parse("greedy")
        self.assertIs(SchedulerKind.parse(" Delay-Opt "), SchedulerKind.DELAY_OPT)


class TestJointOracle(unittest.TestCase):
    """联合oracle的测试用例"""

    def test_candidates(self):
        ctx = table1_context(backlog=3e4)
        candidates = candidate_shares(ctx, 3)
        c0 = optimal_share(ctx, 3)
        self.assertIn(c0, candidates)
        self.assertIn(1.0, candidates)
        self.assertEqual(len(candidates), 8)
        self.assertTrue(all(0.0 < c <= 1.0 for c in candidates))
        self.assertEqual(candidate_shares(ctx, ctx.profile.num_splits), [0.0])

    def test_candidates_clamped_at_one(self):
        ctx = table1_context(backlog=0.0)
        candidates = candidate_shares(ctx, 3)
        self.assertEqual(max(candidates), 1.0)
        self.assertEqual(len(candidates), 4)

    def test_lower_bounds_every_scheduler(self):
        schedulers = build_schedulers()
        for freq_ghz, cores in DEVICE_TYPES:
            ctx = table1_context(backlog=2e4, freq_ghz=freq_ghz, cores=cores)
            best = solve_joint_oracle(ctx).objective
            for kind, scheduler in schedulers.items():
                self.assertLessEqual(best, scheduler.solve(ctx).objective * (1 + 1e-12), kind)

    def test_registry(self):
        schedulers = build_schedulers()
        self.assertEqual(set(schedulers), {k.value for k in SchedulerKind})
        self.assertEqual(build_scheduler("oracle").get_id(), "oracle")
        self.assertEqual(build_scheduler(SchedulerKind.FIXED_SL).get_id(), "fixed-sl")


if __name__ == '__main__':
    unittest.main()
