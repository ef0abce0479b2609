"""Learner utility family, the desired-strategy map, and instance gaps.

Two built-in utility kinds:

  greedy:     u(s, mu) = s * mu
  penalized:  u(s, mu) = s * mu - lam * (s - mu)^2

The penalized kind's unconstrained maximizer over s is (1 + 1/(2*lam)) * mu,
clipped to [0, 1]; the greedy kind is maximized at s = 1 for every mu.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from clickbandit.env import Instance

GREEDY = "greedy"
PENALIZED = "penalized"


@dataclass(frozen=True)
class UtilitySpec:
    kind: str
    lam: float = 0.0
    lipschitz_L: float = 0.0
    lipschitz_H: float = 0.0

    def __post_init__(self):
        if self.kind not in (GREEDY, PENALIZED):
            raise ValueError(f"unknown utility kind {self.kind!r}")
        if self.kind == PENALIZED and self.lam <= 0:
            raise ValueError("penalized utility needs lam > 0")


def greedy() -> UtilitySpec:
    # |du/ds| = mu <= 1, |du/dmu| = s <= 1; s* is constant.
    return UtilitySpec(kind=GREEDY, lipschitz_L=1.0, lipschitz_H=0.0)


def penalized(lam: float) -> UtilitySpec:
    # Partials are bounded by 1 + 2*lam on [0,1]^2; s* has slope 1 + 1/(2*lam).
    lam = float(lam)
    return UtilitySpec(
        kind=PENALIZED,
        lam=lam,
        lipschitz_L=1.0 + 2.0 * lam,
        lipschitz_H=1.0 + 1.0 / (2.0 * lam),
    )


def _check_domain(x: float, name: str) -> None:
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {x}")


def utility(spec: UtilitySpec, s: float, mu: float) -> float:
    """Evaluate u(s, mu)."""
    _check_domain(s, "s")
    _check_domain(mu, "mu")
    if spec.kind == GREEDY:
        return s * mu
    return s * mu - spec.lam * (s - mu) ** 2


def desired_strategy(spec: UtilitySpec, mu: float) -> float:
    """Click-rate maximizing u(., mu) over [0, 1]."""
    _check_domain(mu, "mu")
    if spec.kind == GREEDY:
        return 1.0
    return min((1.0 + 1.0 / (2.0 * spec.lam)) * mu, 1.0)


def sstar_params(spec: UtilitySpec) -> tuple:
    """(is_greedy, slope) parametrization of s*(mu) = min(slope*mu, 1) or 1."""
    if spec.kind == GREEDY:
        return True, 0.0
    return False, 1.0 + 1.0 / (2.0 * spec.lam)


def max_utility(spec: UtilitySpec, mu: float) -> float:
    """u*(mu) = max over s of u(s, mu)."""
    return utility(spec, desired_strategy(spec, mu), mu)


def gap_beta(spec: UtilitySpec, instance: Instance) -> float:
    """Cost of the best arm playing s = 1 instead of the desired strategy."""
    mu_star = instance.mu_star()
    return max_utility(spec, mu_star) - utility(spec, 1.0, mu_star)


def gap_eta(spec: UtilitySpec, instance: Instance) -> float:
    """Gap between the maximal utility and the second-best arm's best utility.

    Requires K >= 2 and a unique best arm.
    """
    if instance.k < 2:
        raise ValueError("gap_eta needs at least two arms")
    mus = instance.mus
    mu_star = max(mus)
    if sum(1 for m in mus if m == mu_star) > 1:
        raise ValueError("gap_eta needs a unique maximizer of the post-click means")
    runner_up = max(max_utility(spec, m) for m in mus if m != mu_star)
    return max_utility(spec, mu_star) - runner_up


def optimality_gaps(instance: Instance) -> np.ndarray:
    """Delta_i = mu* - mu_i, elementwise."""
    mus = instance.mus_array()
    return mus.max() - mus


@dataclass(frozen=True)
class AssumptionReport:
    """Grid estimates of the regularity constants and monotonicity flags."""

    L_hat: float
    H_hat: float
    ustar_monotone: bool
    sstar_min: float
    L_declared: float
    H_declared: float
    L_violated: bool
    H_violated: bool
    grid_step: float

    def lines(self):
        return [
            f"L_hat={self.L_hat:.9g}",
            f"L_declared={self.L_declared:.9g}",
            f"L_violated={int(self.L_violated)}",
            f"H_hat={self.H_hat:.9g}",
            f"H_declared={self.H_declared:.9g}",
            f"H_violated={int(self.H_violated)}",
            f"ustar_monotone={int(self.ustar_monotone)}",
            f"sstar_min={self.sstar_min:.9g}",
            f"grid_step={self.grid_step:.9g}",
        ]


def validate_assumptions(spec: UtilitySpec, grid_step: float = 1e-3) -> AssumptionReport:
    """Numerically check the regularity assumptions on a uniform grid.

    Estimates the largest finite-difference slope of u (separately in s
    and mu, matching l1-Lipschitzness) and of s*, checks that u* is
    nondecreasing on the grid, and reports min s*. Violations of the
    declared constants are flagged, not raised.
    """
    if not (0.0 < grid_step <= 0.05):
        raise ValueError("grid_step must lie in (0, 0.05]")
    grid = np.arange(0.0, 1.0 + grid_step / 2, grid_step)
    grid = np.clip(grid, 0.0, 1.0)
    s_col = grid[:, None]
    mu_row = grid[None, :]
    if spec.kind == GREEDY:
        u = s_col * mu_row
    else:
        u = s_col * mu_row - spec.lam * (s_col - mu_row) ** 2
    du_ds = np.abs(np.diff(u, axis=0)) / grid_step
    du_dmu = np.abs(np.diff(u, axis=1)) / grid_step
    L_hat = float(max(du_ds.max(), du_dmu.max()))

    sstar = np.array([desired_strategy(spec, m) for m in grid])
    if len(grid) > 1:
        H_hat = float(np.abs(np.diff(sstar)).max() / grid_step)
    else:
        H_hat = 0.0

    ustar = np.array([max_utility(spec, m) for m in grid])
    ustar_monotone = bool(np.all(np.diff(ustar) >= -1e-12))

    tol = 1e-9
    return AssumptionReport(
        L_hat=L_hat,
        H_hat=H_hat,
        ustar_monotone=ustar_monotone,
        sstar_min=float(sstar.min()),
        L_declared=spec.lipschitz_L,
        H_declared=spec.lipschitz_H,
        L_violated=L_hat > spec.lipschitz_L + tol,
        H_violated=H_hat > spec.lipschitz_H + tol,
        grid_step=float(grid_step),
    )
