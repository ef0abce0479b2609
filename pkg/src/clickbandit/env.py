"""Problem instances and the stochastic click/reward environment.

An instance holds the hidden per-arm post-click means and the horizon.
Each round, the recommended arm is clicked with probability equal to its
chosen click-rate; only on a click does the learner observe a post-click
reward with the arm's hidden mean.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

REWARD_MODELS = ("bernoulli",)

SeedLike = Union[int, Sequence[int], np.random.SeedSequence]


def flatten_key(seed) -> tuple:
    """Flatten a possibly nested stream key into a tuple of ints."""
    if isinstance(seed, (list, tuple)):
        out = []
        for part in seed:
            out.extend(flatten_key(part))
        return tuple(out)
    return (int(seed),)


def rng_from_seed(seed: SeedLike) -> np.random.Generator:
    """Build a generator from an int, a (possibly nested) tuple key, or a SeedSequence."""
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    if isinstance(seed, (list, tuple)):
        return np.random.default_rng(np.random.SeedSequence(list(flatten_key(seed))))
    return np.random.default_rng(int(seed))


@dataclass(frozen=True)
class Instance:
    """Hidden environment: K post-click means, horizon, reward model."""

    mus: tuple
    horizon: int
    reward_model: str = "bernoulli"

    def __post_init__(self):
        if len(self.mus) == 0:
            raise ValueError("instance needs at least one arm")
        if any(not (0.0 <= m <= 1.0) for m in self.mus):
            raise ValueError(f"post-click means must lie in [0, 1], got {self.mus}")
        if self.horizon < 2:
            raise ValueError(f"horizon must be >= 2 (log T must be positive), got {self.horizon}")
        if self.reward_model not in REWARD_MODELS:
            raise ValueError(f"unknown reward model {self.reward_model!r}, expected one of {REWARD_MODELS}")

    @property
    def k(self) -> int:
        return len(self.mus)

    def mu_star(self) -> float:
        return max(self.mus)

    def mus_array(self) -> np.ndarray:
        return np.asarray(self.mus, dtype=np.float64)


def new_instance(mus: Sequence[float], horizon: int, reward_model: str = "bernoulli") -> Instance:
    """Validate and build an Instance."""
    return Instance(mus=tuple(float(m) for m in mus), horizon=int(horizon), reward_model=reward_model)


@dataclass(frozen=True)
class StrategyProfile:
    """Pure strategy profile: one click-rate per arm."""

    s: tuple

    def __post_init__(self):
        if len(self.s) == 0:
            raise ValueError("profile needs at least one arm")
        if any(not (0.0 <= x <= 1.0) for x in self.s):
            raise ValueError(f"click-rates must lie in [0, 1], got {self.s}")

    @property
    def k(self) -> int:
        return len(self.s)

    def s_array(self) -> np.ndarray:
        return np.asarray(self.s, dtype=np.float64)

    def replace(self, arm: int, value: float) -> "StrategyProfile":
        s = list(self.s)
        s[arm] = float(value)
        return StrategyProfile(tuple(s))


def profile(s: Sequence[float]) -> StrategyProfile:
    return StrategyProfile(tuple(float(x) for x in s))


@dataclass(frozen=True)
class ClickOutcome:
    """One round's feedback: click indicator and, iff clicked, the reward."""

    clicked: bool
    reward: Optional[float] = None

    def __post_init__(self):
        if self.clicked and self.reward is None:
            raise ValueError("clicked outcome must carry a reward")
        if not self.clicked and self.reward is not None:
            raise ValueError("unclicked outcome cannot carry a reward")


def sample_round(
    instance: Instance,
    profile: StrategyProfile,
    arm: int,
    rng: np.random.Generator,
) -> ClickOutcome:
    """Sample one round for the given arm: Bernoulli click, then reward if clicked.

    Draws one uniform for the click and, only when clicked, one uniform
    for the Bernoulli reward. This call order is the deterministic-replay
    contract shared with the fast episode kernel.
    """
    if not (0 <= arm < instance.k):
        raise IndexError(f"arm {arm} out of range for K={instance.k}")
    if profile.k != instance.k:
        raise ValueError(f"profile has {profile.k} arms, instance has {instance.k}")
    clicked = rng.random() < profile.s[arm]
    if not clicked:
        return ClickOutcome(clicked=False)
    reward = 1.0 if rng.random() < instance.mus[arm] else 0.0
    return ClickOutcome(clicked=True, reward=reward)
