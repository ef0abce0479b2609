"""Sequential mechanisms: UCB with screening, plain UCB, oracles, uniform.

All mechanisms share the select/observe interface. UCB-S additionally
screens the just-pulled arm: if the click-rate confidence interval lies
entirely outside the image of the reward confidence interval under the
desired-strategy map, the arm is eliminated for the rest of the episode.
Once every arm is eliminated, UCB-S selects uniformly at random.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from clickbandit.env import ClickOutcome
from clickbandit.utility import UtilitySpec, desired_strategy, utility

_TIE_EPS = 1e-12


class MechanismKind(str, enum.Enum):
    UCBS = "ucbs"
    UCB = "ucb"
    MU_ORACLE = "mu-oracle"
    MUS_ORACLE = "mus-oracle"
    UNIFORM = "uniform"

    @classmethod
    def parse(cls, token: str) -> "MechanismKind":
        try:
            return cls(token)
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown mechanism {token!r}, expected one of: {valid}") from None

    @property
    def is_oracle(self) -> bool:
        return self in (MechanismKind.MU_ORACLE, MechanismKind.MUS_ORACLE)


@dataclass(frozen=True)
class ConfidenceBounds:
    s_lo: float
    s_hi: float
    mu_lo: float
    mu_hi: float


@dataclass
class MechState:
    """Per-episode mechanism state: counters, estimates, and the active set."""

    kind: MechanismKind
    k: int
    horizon: int
    utility_spec: UtilitySpec
    pulls: np.ndarray          # n_t(i)
    click_observations: np.ndarray  # m_t(i), rounds with an observed reward
    click_sum: np.ndarray      # total clicks per arm (== click_observations here)
    reward_sum: np.ndarray
    active: np.ndarray
    t: int = 0
    fixed_arm: Optional[int] = None  # precomputed choice for oracle kinds

    def s_hat(self, arm: int) -> float:
        n = self.pulls[arm]
        return self.click_sum[arm] / n if n > 0 else math.nan

    def mu_hat(self, arm: int) -> float:
        m = self.click_observations[arm]
        return self.reward_sum[arm] / m if m > 0 else math.nan


def init(
    kind: MechanismKind,
    k: int,
    horizon: int,
    utility_spec: UtilitySpec,
    mus: Optional[Sequence[float]] = None,
    profile: Optional[Sequence[float]] = None,
) -> MechState:
    """Fresh state: all counters zero, every arm active.

    Oracle kinds need their privileged data up front: the mu-oracle needs
    the true means, the (mu, s)-oracle additionally the true click-rates.
    """
    if k < 1:
        raise ValueError("need at least one arm")
    if horizon < 2:
        raise ValueError("horizon must be >= 2")
    fixed_arm = None
    if kind is MechanismKind.MU_ORACLE:
        if mus is None:
            raise ValueError("mu-oracle requires the true post-click means")
        fixed_arm = _argmax_lowest(np.asarray(mus, dtype=float))
    elif kind is MechanismKind.MUS_ORACLE:
        if mus is None or profile is None:
            raise ValueError("mus-oracle requires the true means and click-rates")
        fixed_arm = mus_oracle_choice(utility_spec, np.asarray(profile, float), np.asarray(mus, float))
    return MechState(
        kind=kind,
        k=k,
        horizon=horizon,
        utility_spec=utility_spec,
        pulls=np.zeros(k, dtype=np.int64),
        click_observations=np.zeros(k, dtype=np.int64),
        click_sum=np.zeros(k, dtype=np.int64),
        reward_sum=np.zeros(k, dtype=np.float64),
        active=np.ones(k, dtype=bool),
        fixed_arm=fixed_arm,
    )


def _argmax_lowest(values: np.ndarray) -> int:
    # np.argmax already breaks ties toward the lowest index.
    return int(np.argmax(values))


def mus_oracle_choice(spec: UtilitySpec, s: np.ndarray, mus: np.ndarray) -> int:
    """argmax_i u(s_i, mu_i); ties go to the larger mu, then the lowest index."""
    utils = np.array([utility(spec, float(si), float(mi)) for si, mi in zip(s, mus)])
    best_u = utils.max()
    tied = np.flatnonzero(utils >= best_u - _TIE_EPS)
    best_mu = mus[tied].max()
    tied = tied[mus[tied] >= best_mu - _TIE_EPS]
    return int(tied[0])


def confidence_bounds(state: MechState, arm: int) -> ConfidenceBounds:
    """Hoeffding bounds with radius sqrt(2 ln(T) / count); infinite at count 0."""
    r2 = 2.0 * math.log(state.horizon)
    n = state.pulls[arm]
    m = state.click_observations[arm]
    if n > 0:
        s_hat = state.click_sum[arm] / n
        rs = math.sqrt(r2 / n)
        s_lo, s_hi = s_hat - rs, s_hat + rs
    else:
        s_lo, s_hi = -math.inf, math.inf
    if m > 0:
        mu_hat = state.reward_sum[arm] / m
        rm = math.sqrt(r2 / m)
        mu_lo, mu_hi = mu_hat - rm, mu_hat + rm
    else:
        mu_lo, mu_hi = -math.inf, math.inf
    return ConfidenceBounds(s_lo=s_lo, s_hi=s_hi, mu_lo=mu_lo, mu_hi=mu_hi)


def screening_rule(
    spec: UtilitySpec, s_lo: float, s_hi: float, mu_lo: float, mu_hi: float
) -> bool:
    """The elimination test on raw confidence bounds.

    True iff the click-rate interval misses the image of the mu-interval
    under s*. The mu-interval is clamped to [0, 1] before applying s*;
    since s* is nondecreasing for both built-in kinds, its min/max over
    the interval are attained at the clamped endpoints.
    """
    mu_lo = min(max(mu_lo, 0.0), 1.0)
    mu_hi = min(max(mu_hi, 0.0), 1.0)
    sstar_min = desired_strategy(spec, mu_lo)
    sstar_max = desired_strategy(spec, mu_hi)
    return s_hi < sstar_min or s_lo > sstar_max


def screening_triggered(state: MechState, arm: int) -> bool:
    """Evaluate the elimination test on the arm's current confidence bounds."""
    b = confidence_bounds(state, arm)
    return screening_rule(state.utility_spec, b.s_lo, b.s_hi, b.mu_lo, b.mu_hi)


def _ucb_index(state: MechState, arm: int) -> float:
    m = state.click_observations[arm]
    if m == 0:
        return math.inf
    return state.reward_sum[arm] / m + math.sqrt(2.0 * math.log(state.horizon) / m)


def select(state: MechState, rng: np.random.Generator) -> int:
    """Pick this round's arm.

    UCB-S/UCB use the optimistic post-click estimate (UCB-S over the
    active set, falling back to uniform over all arms when it is empty);
    oracles use their precomputed choice; uniform is uniform.
    """
    kind = state.kind
    if kind in (MechanismKind.MU_ORACLE, MechanismKind.MUS_ORACLE):
        return state.fixed_arm
    if kind is MechanismKind.UNIFORM:
        return min(int(rng.random() * state.k), state.k - 1)
    if kind is MechanismKind.UCBS:
        candidates = np.flatnonzero(state.active)
        if len(candidates) == 0:
            return min(int(rng.random() * state.k), state.k - 1)
    else:
        candidates = np.arange(state.k)
    best_arm = int(candidates[0])
    best_val = -math.inf
    for i in candidates:
        v = _ucb_index(state, int(i))
        if v > best_val:
            best_val = v
            best_arm = int(i)
    return best_arm


def observe(state: MechState, arm: int, outcome: ClickOutcome) -> MechState:
    """Record the round's feedback, run UCB-S screening, advance the clock."""
    if not (0 <= arm < state.k):
        raise IndexError(f"arm {arm} out of range")
    state.pulls[arm] += 1
    if outcome.clicked:
        state.click_sum[arm] += 1
        state.click_observations[arm] += 1
        state.reward_sum[arm] += outcome.reward
    if state.kind is MechanismKind.UCBS and state.active[arm]:
        if screening_triggered(state, arm):
            state.active[arm] = False
    state.t += 1
    return state
