"""Strategic arm behavior.

Monte-Carlo estimation of an arm's expected clicks, finite-difference
gradient ascent across epochs (all arms update simultaneously between
episodes), grid best responses, iterated best response, and epsilon-Nash
certification of pure strategy profiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from clickbandit.env import Instance, StrategyProfile
from clickbandit.mech import MechanismKind
from clickbandit.sim import arm_clicks, run_episode, strategic_regret
from clickbandit.utility import UtilitySpec


@dataclass(frozen=True)
class GradientConfig:
    epochs: int = 20
    mc_reps: int = 10
    fd_delta: float = 0.05
    step_scale: float = 1.0
    init_strategy: float = 1.0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.mc_reps < 1:
            raise ValueError("mc_reps must be >= 1")
        if not (0.0 < self.fd_delta <= 0.25):
            raise ValueError("fd_delta must lie in (0, 0.25]")
        if not (0.0 <= self.init_strategy <= 1.0):
            raise ValueError("init_strategy must lie in [0, 1]")


def mc_arm_utility(
    instance: Instance,
    kind: MechanismKind,
    profile: StrategyProfile,
    arm: int,
    utility_spec: UtilitySpec,
    mc_reps: int,
    seed,
    stream_tag: int = 0,
) -> Tuple[float, float]:
    """Mean clicks for the arm over mc_reps seeded episodes, with std error.

    Replicate r uses the stream key (seed, stream_tag, arm, r), so serial
    and parallel evaluation produce identical estimates.
    """
    clicks = np.empty(mc_reps)
    for r in range(mc_reps):
        trace = run_episode(instance, kind, profile, utility_spec, (seed, stream_tag, arm, r))
        clicks[r] = arm_clicks(trace, arm)
    mean = float(clicks.mean())
    if mc_reps > 1:
        se = float(clicks.std(ddof=1) / math.sqrt(mc_reps))
    else:
        se = 0.0
    return mean, se


def estimate_gradient(
    instance: Instance,
    kind: MechanismKind,
    profile: StrategyProfile,
    arm: int,
    utility_spec: UtilitySpec,
    config: GradientConfig,
    seed,
) -> float:
    """Finite-difference estimate of d(expected clicks)/d(s_arm).

    Central difference with evaluation points clipped to [0, 1] (one-sided
    at the boundaries). Both evaluations reuse the same replicate seeds
    (common random numbers), which collapses the variance of the
    difference for small mc_reps.
    """
    s = profile.s[arm]
    lo = max(s - config.fd_delta, 0.0)
    hi = min(s + config.fd_delta, 1.0)
    if hi <= lo:
        return 0.0
    v_hi, _ = mc_arm_utility(
        instance, kind, profile.replace(arm, hi), arm, utility_spec, config.mc_reps, seed, stream_tag=1
    )
    v_lo, _ = mc_arm_utility(
        instance, kind, profile.replace(arm, lo), arm, utility_spec, config.mc_reps, seed, stream_tag=1
    )
    return (v_hi - v_lo) / (hi - lo)


@dataclass
class EpochResult:
    epoch: int
    profile: StrategyProfile  # strategies played during this epoch's episode
    regret: float
    clicks: np.ndarray
    elimination_round: np.ndarray
    gradients: np.ndarray


def gradient_ascent_run(
    instance: Instance,
    kind: MechanismKind,
    utility_spec: UtilitySpec,
    config: GradientConfig,
    seed,
) -> List[EpochResult]:
    """Epoch-wise gradient ascent of all arms against the mechanism.

    Every epoch runs one full episode with the current profile (recording
    regret and clicks), then every arm simultaneously takes the step
    s_i <- clip(s_i + step_scale * g_i / T). Gradients are normalized by
    the horizon so step_scale is a horizon-free knob.
    """
    profile = StrategyProfile(tuple(config.init_strategy for _ in range(instance.k)))
    results: List[EpochResult] = []
    for epoch in range(config.epochs):
        trace = run_episode(instance, kind, profile, utility_spec, (seed, epoch, 0, 0))
        regret = strategic_regret(trace, instance, profile, utility_spec)
        grads = np.zeros(instance.k)
        for arm in range(instance.k):
            grads[arm] = estimate_gradient(
                instance, kind, profile, arm, utility_spec, config, (seed, epoch, arm + 1)
            )
        results.append(
            EpochResult(
                epoch=epoch,
                profile=profile,
                regret=regret,
                clicks=trace.m_final.copy(),
                elimination_round=trace.elimination_round.copy(),
                gradients=grads,
            )
        )
        stepped = [
            min(max(profile.s[i] + config.step_scale * grads[i] / instance.horizon, 0.0), 1.0)
            for i in range(instance.k)
        ]
        profile = StrategyProfile(tuple(stepped))
    return results


def _strategy_grid(grid_step: float) -> np.ndarray:
    n_steps = int(round(1.0 / grid_step))
    return np.linspace(0.0, 1.0, n_steps + 1)


def best_response(
    instance: Instance,
    kind: MechanismKind,
    profile: StrategyProfile,
    arm: int,
    utility_spec: UtilitySpec,
    grid_step: float = 0.01,
    mc_reps: int = 10,
    seed=0,
) -> Tuple[float, float, float]:
    """Grid argmax of the arm's expected clicks, holding the others fixed.

    Returns (s_best, v_best, std_error of v_best). Ties go to the larger s.
    """
    if not (0.0 < grid_step <= 0.1):
        raise ValueError("grid_step must lie in (0, 0.1]")
    grid = _strategy_grid(grid_step)
    best_s, best_v, best_se = 0.0, -math.inf, 0.0
    for gi, sval in enumerate(grid):
        v, se = mc_arm_utility(
            instance,
            kind,
            profile.replace(arm, float(sval)),
            arm,
            utility_spec,
            mc_reps,
            (seed, gi),
        )
        if v >= best_v:  # >= implements the larger-s tie-break (grid is increasing)
            best_s, best_v, best_se = float(sval), v, se
    return best_s, best_v, best_se


def iterated_best_response(
    instance: Instance,
    kind: MechanismKind,
    utility_spec: UtilitySpec,
    init_profile: StrategyProfile,
    max_iters: int = 10,
    grid_step: float = 0.01,
    mc_reps: int = 10,
    seed=0,
) -> Tuple[StrategyProfile, bool]:
    """Round-robin best responses until no arm moves by more than grid_step."""
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    profile = init_profile
    for it in range(max_iters):
        max_move = 0.0
        for arm in range(instance.k):
            s_best, _, _ = best_response(
                instance, kind, profile, arm, utility_spec, grid_step, mc_reps, (seed, it, arm)
            )
            max_move = max(max_move, abs(s_best - profile.s[arm]))
            profile = profile.replace(arm, s_best)
        if max_move <= grid_step:
            return profile, True
    return profile, False


@dataclass
class NECertificate:
    """Per-arm best-response gains for a pure profile, in expected clicks.

    certified holds iff max gain <= epsilon + 2 * max std error, i.e. no
    arm can improve by more than epsilon (absolute clicks) up to MC noise.
    """

    profile: StrategyProfile
    epsilon: float
    per_arm_gain: np.ndarray
    best_responses: np.ndarray
    current_values: np.ndarray
    std_errors: np.ndarray
    grid_step: float
    mc_reps: int
    certified: bool


def certify_epsilon_ne(
    instance: Instance,
    kind: MechanismKind,
    utility_spec: UtilitySpec,
    profile: StrategyProfile,
    epsilon: float,
    grid_step: float = 0.01,
    mc_reps: int = 10,
    seed=0,
) -> NECertificate:
    """Check that no arm gains more than epsilon expected clicks by deviating.

    epsilon is in absolute clicks (pass eps * T to use a per-round rate).
    """
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    k = instance.k
    gains = np.zeros(k)
    bests = np.zeros(k)
    currents = np.zeros(k)
    ses = np.zeros(k)
    for arm in range(k):
        v_cur, se_cur = mc_arm_utility(
            instance, kind, profile, arm, utility_spec, mc_reps, (seed, arm, 0)
        )
        s_best, v_best, se_best = best_response(
            instance, kind, profile, arm, utility_spec, grid_step, mc_reps, (seed, arm, 1)
        )
        currents[arm] = v_cur
        bests[arm] = s_best
        ses[arm] = math.sqrt(se_cur**2 + se_best**2)
        gains[arm] = v_best - v_cur
    certified = bool(gains.max() <= epsilon + 2.0 * ses.max())
    return NECertificate(
        profile=profile,
        epsilon=float(epsilon),
        per_arm_gain=gains,
        best_responses=bests,
        current_values=currents,
        std_errors=ses,
        grid_step=float(grid_step),
        mc_reps=int(mc_reps),
        certified=certified,
    )
