"""Episode runner, traces, and learner/arm-side metrics.

Per-round strategic regret only depends on the selected arm (the
benchmark and the deviation are in expectation over the round), so the
total regret is computable from the final per-arm pull counts; the full
per-round curve needs a trace recorded at "full" granularity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from clickbandit import _kernel
from clickbandit.env import Instance, SeedLike, StrategyProfile, rng_from_seed
from clickbandit.mech import MechanismKind, mus_oracle_choice
from clickbandit.utility import UtilitySpec, max_utility, sstar_params, utility

_KIND_CODE = {
    MechanismKind.UCBS: _kernel.KIND_UCBS,
    MechanismKind.UCB: _kernel.KIND_UCB,
    MechanismKind.MU_ORACLE: _kernel.KIND_MU_ORACLE,
    MechanismKind.MUS_ORACLE: _kernel.KIND_MUS_ORACLE,
    MechanismKind.UNIFORM: _kernel.KIND_UNIFORM,
}

RECORD_FULL = "full"
RECORD_SUMMARY = "summary"


@dataclass(frozen=True)
class RoundRecord:
    t: int
    arm: int
    clicked: bool
    reward: Optional[float]
    active_count: int


@dataclass
class Trace:
    """Episode outcome. Per-round arrays are present only at full granularity."""

    k: int
    horizon: int
    n_final: np.ndarray
    m_final: np.ndarray
    reward_sum: np.ndarray
    elimination_round: np.ndarray  # -1 for arms still active at T
    arms: Optional[np.ndarray] = None
    clicked: Optional[np.ndarray] = None
    rewards: Optional[np.ndarray] = None
    active_count: Optional[np.ndarray] = None

    @property
    def is_full(self) -> bool:
        return self.arms is not None

    def eliminated(self, arm: int) -> bool:
        return self.elimination_round[arm] >= 0

    def records(self):
        if not self.is_full:
            raise ValueError("trace was recorded at summary granularity")
        for t in range(self.horizon):
            clicked = bool(self.clicked[t])
            yield RoundRecord(
                t=t,
                arm=int(self.arms[t]),
                clicked=clicked,
                reward=float(self.rewards[t]) if clicked else None,
                active_count=int(self.active_count[t]),
            )


def run_episode(
    instance: Instance,
    kind: MechanismKind,
    profile: StrategyProfile,
    utility_spec: UtilitySpec,
    seed: SeedLike,
    record: str = RECORD_SUMMARY,
) -> Trace:
    """Run exactly T rounds of select -> sample -> observe; deterministic in seed."""
    if profile.k != instance.k:
        raise ValueError(f"profile has {profile.k} arms, instance has {instance.k}")
    if record not in (RECORD_FULL, RECORD_SUMMARY):
        raise ValueError(f"unknown record granularity {record!r}")
    mus = instance.mus_array()
    s = profile.s_array()
    fixed_arm = -1
    if kind is MechanismKind.MU_ORACLE:
        fixed_arm = int(np.argmax(mus))
    elif kind is MechanismKind.MUS_ORACLE:
        fixed_arm = mus_oracle_choice(utility_spec, s, mus)
    greedy, slope = sstar_params(utility_spec)

    rng = rng_from_seed(seed)
    uniforms = rng.random((instance.horizon, 3))
    arm_seq, clicked_seq, reward_seq, active_count, n, m, reward_sum, elim = _kernel.episode(
        _KIND_CODE[kind], instance.horizon, mus, s, greedy, slope, fixed_arm, uniforms
    )
    trace = Trace(
        k=instance.k,
        horizon=instance.horizon,
        n_final=n,
        m_final=m,
        reward_sum=reward_sum,
        elimination_round=elim,
    )
    if record == RECORD_FULL:
        trace.arms = arm_seq
        trace.clicked = clicked_seq
        trace.rewards = reward_seq
        trace.active_count = active_count
    return trace


def per_arm_regret_gaps(
    instance: Instance, profile: StrategyProfile, utility_spec: UtilitySpec
) -> np.ndarray:
    """Per-round regret of selecting each arm: u(s*, mu*) - u(s_i, mu_i)."""
    benchmark = max_utility(utility_spec, instance.mu_star())
    return np.array(
        [benchmark - utility(utility_spec, si, mi) for si, mi in zip(profile.s, instance.mus)]
    )


def strategic_regret(
    trace: Trace,
    instance: Instance,
    profile: StrategyProfile,
    utility_spec: UtilitySpec,
) -> float:
    """Total strategic regret of the trace (expectation over each round given i_t)."""
    if trace.k != instance.k or trace.k != profile.k:
        raise ValueError("trace, instance, and profile disagree on the number of arms")
    gaps = per_arm_regret_gaps(instance, profile, utility_spec)
    return float(np.dot(trace.n_final, gaps))


def regret_curve(
    trace: Trace,
    instance: Instance,
    profile: StrategyProfile,
    utility_spec: UtilitySpec,
) -> np.ndarray:
    """Cumulative per-round regret; the last element equals strategic_regret."""
    if not trace.is_full:
        raise ValueError("regret_curve needs a full-granularity trace")
    gaps = per_arm_regret_gaps(instance, profile, utility_spec)
    return np.cumsum(gaps[trace.arms])


def arm_clicks(trace: Trace, arm: int) -> int:
    """Realized number of clicks on the arm (the arm's utility for the episode)."""
    if not (0 <= arm < trace.k):
        raise IndexError(f"arm {arm} out of range")
    return int(trace.m_final[arm])
