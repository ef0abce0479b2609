import numpy as np
import pytest

from clickbandit.env import StrategyProfile, new_instance
from clickbandit.mech import MechanismKind
from clickbandit.sim import (
    Trace,
    arm_clicks,
    per_arm_regret_gaps,
    regret_curve,
    run_episode,
    strategic_regret,
)
from clickbandit.utility import desired_strategy, greedy, penalized
from oracles import exact_expected_regret

LAM5 = penalized(5.0)

HEADLINE_MUS = [0.75, 0.725, 0.7, 0.675]


def headline_profile(offset=0.0):
    return StrategyProfile(
        tuple(min(desired_strategy(LAM5, m) + offset, 1.0) for m in HEADLINE_MUS)
    )


class TestRunEpisode:
    def test_profile_instance_mismatch(self):
        inst = new_instance([0.5, 0.6], 100)
        with pytest.raises(ValueError):
            run_episode(inst, MechanismKind.UCB, StrategyProfile((0.5,)), LAM5, 0)

    def test_unknown_record_granularity(self):
        inst = new_instance([0.5], 100)
        with pytest.raises(ValueError):
            run_episode(inst, MechanismKind.UCB, StrategyProfile((0.5,)), LAM5, 0, record="rows")

    def test_summary_trace_has_no_rounds(self):
        inst = new_instance([0.5], 100)
        trace = run_episode(inst, MechanismKind.UCB, StrategyProfile((0.5,)), LAM5, 0)
        assert not trace.is_full
        with pytest.raises(ValueError):
            list(trace.records())
        with pytest.raises(ValueError):
            regret_curve(trace, inst, StrategyProfile((0.5,)), LAM5)

    def test_full_trace_shapes(self):
        inst = new_instance([0.5, 0.6], 500)
        trace = run_episode(
            inst, MechanismKind.UCB, StrategyProfile((0.5, 0.5)), LAM5, 0, record="full"
        )
        assert trace.is_full
        assert trace.arms.shape == (500,)
        records = list(trace.records())
        assert len(records) == 500
        assert all((r.reward is not None) == r.clicked for r in records)

    def test_deterministic_in_seed(self):
        inst = new_instance(HEADLINE_MUS, 3000)
        a = run_episode(inst, MechanismKind.UCBS, headline_profile(), LAM5, 99, record="full")
        b = run_episode(inst, MechanismKind.UCBS, headline_profile(), LAM5, 99, record="full")
        np.testing.assert_array_equal(a.arms, b.arms)
        np.testing.assert_array_equal(a.rewards, b.rewards)

    def test_summary_matches_full(self):
        inst = new_instance(HEADLINE_MUS, 3000)
        a = run_episode(inst, MechanismKind.UCBS, headline_profile(), LAM5, 99)
        b = run_episode(inst, MechanismKind.UCBS, headline_profile(), LAM5, 99, record="full")
        np.testing.assert_array_equal(a.n_final, b.n_final)
        np.testing.assert_array_equal(a.m_final, b.m_final)
        np.testing.assert_array_equal(a.elimination_round, b.elimination_round)

    def test_click_rate_zero_yields_no_clicks(self):
        inst = new_instance([0.9], 2000)
        trace = run_episode(inst, MechanismKind.UCB, StrategyProfile((0.0,)), LAM5, 1)
        assert trace.m_final[0] == 0
        assert trace.reward_sum[0] == 0.0


class TestRegretGaps:
    def test_desired_profile_gaps(self):
        # u*(0.75) - u(s_i, mu_i) with every arm playing its own optimum
        inst = new_instance(HEADLINE_MUS, 100)
        gaps = per_arm_regret_gaps(inst, headline_profile(), LAM5)
        ustar = 0.75**2 * 1.05
        expected = [ustar - m**2 * 1.05 for m in HEADLINE_MUS]
        np.testing.assert_allclose(gaps, expected, atol=1e-12)
        assert gaps[0] == pytest.approx(0.0, abs=1e-12)

    def test_all_ones_profile_beta_gap(self):
        # best arm playing s=1 loses exactly beta per round
        inst = new_instance([0.75, 0.7], 100)
        gaps = per_arm_regret_gaps(inst, StrategyProfile((1.0, 1.0)), LAM5)
        assert gaps[0] == pytest.approx(0.153125, abs=1e-12)

    def test_greedy_gaps_are_mu_gaps(self):
        inst = new_instance([0.8, 0.5], 100)
        gaps = per_arm_regret_gaps(inst, StrategyProfile((1.0, 1.0)), greedy())
        np.testing.assert_allclose(gaps, [0.0, 0.3], atol=1e-12)


class TestStrategicRegret:
    def test_single_arm_all_ones(self):
        # every pull of the only arm at s=1 costs beta = 0.153125
        inst = new_instance([0.75], 1000)
        profile = StrategyProfile((1.0,))
        trace = run_episode(inst, MechanismKind.UNIFORM, profile, LAM5, 0)
        assert strategic_regret(trace, inst, profile, LAM5) == pytest.approx(
            153.125, abs=1e-9
        )

    def test_manual_counts(self):
        # hand-built trace: 3 pulls of arm 0 (gap 0) and 2 of arm 1
        inst = new_instance(HEADLINE_MUS, 5)
        profile = headline_profile()
        gaps = per_arm_regret_gaps(inst, profile, LAM5)
        trace = Trace(
            k=4,
            horizon=5,
            n_final=np.array([3, 2, 0, 0]),
            m_final=np.zeros(4, dtype=np.int64),
            reward_sum=np.zeros(4),
            elimination_round=np.full(4, -1),
        )
        expected = 2 * gaps[1]
        assert expected == pytest.approx(2 * (0.5625 - 0.525625) * 1.05, abs=1e-9)
        assert strategic_regret(trace, inst, profile, LAM5) == pytest.approx(expected)

    def test_shape_mismatch(self):
        inst = new_instance([0.5], 100)
        trace = run_episode(inst, MechanismKind.UCB, StrategyProfile((0.5,)), LAM5, 0)
        with pytest.raises(ValueError):
            strategic_regret(trace, new_instance([0.5, 0.6], 100), headline_profile(), LAM5)

    def test_curve_last_point_matches_total(self):
        inst = new_instance(HEADLINE_MUS, 2000)
        profile = headline_profile(0.05)
        trace = run_episode(inst, MechanismKind.UCBS, profile, LAM5, 17, record="full")
        curve = regret_curve(trace, inst, profile, LAM5)
        assert curve.shape == (2000,)
        assert (np.diff(curve) >= -1e-12).all()
        assert curve[-1] == pytest.approx(strategic_regret(trace, inst, profile, LAM5))

    def test_matches_enumeration_oracle(self):
        # exact expectation over all outcome sequences vs Monte Carlo
        inst = new_instance([0.7, 0.4], 6)
        profile = StrategyProfile((0.8, 0.6))
        for kind in (MechanismKind.UCB, MechanismKind.UCBS, MechanismKind.MUS_ORACLE):
            exact = exact_expected_regret(inst, kind, profile, LAM5)
            reps = 4000
            mc = np.mean(
                [
                    strategic_regret(run_episode(inst, kind, profile, LAM5, r), inst, profile, LAM5)
                    for r in range(reps)
                ]
            )
            # per-round gaps < 0.6 over 6 rounds: 4 sigma band
            assert abs(mc - exact) < 4 * 0.6 * 6 / np.sqrt(reps), kind

    def test_mu_oracle_exact_expected_regret(self):
        # deterministic arm choice: regret = T * gap of the best-mu arm
        inst = new_instance([0.7, 0.4], 6)
        profile = StrategyProfile((0.8, 0.6))
        gaps = per_arm_regret_gaps(inst, profile, LAM5)
        assert exact_expected_regret(inst, MechanismKind.MU_ORACLE, profile, LAM5) == (
            pytest.approx(6 * gaps[0], abs=1e-12)
        )


class TestArmClicks:
    def test_counts_realized_clicks(self):
        inst = new_instance([0.5, 0.5], 4000)
        trace = run_episode(inst, MechanismKind.UNIFORM, StrategyProfile((1.0, 0.0)), LAM5, 2)
        assert arm_clicks(trace, 0) == trace.n_final[0]
        assert arm_clicks(trace, 1) == 0

    def test_out_of_range(self):
        inst = new_instance([0.5], 100)
        trace = run_episode(inst, MechanismKind.UCB, StrategyProfile((0.5,)), LAM5, 0)
        with pytest.raises(IndexError):
            arm_clicks(trace, 1)
