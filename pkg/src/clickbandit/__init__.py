"""Strategic click-bandit simulator.

Arms choose click-rates strategically; the learner runs an online
mechanism (incentive-aware UCB with screening, or incentive-unaware
baselines) and we measure strategic regret, simulate gradient-ascent
arm dynamics, and certify approximate Nash equilibria.
"""

from clickbandit.env import ClickOutcome, Instance, StrategyProfile, new_instance, sample_round
from clickbandit.utility import (
    UtilitySpec,
    desired_strategy,
    gap_beta,
    gap_eta,
    max_utility,
    optimality_gaps,
    utility,
    validate_assumptions,
)
from clickbandit.mech import ConfidenceBounds, MechanismKind, MechState
from clickbandit.sim import Trace, arm_clicks, regret_curve, run_episode, strategic_regret

__all__ = [
    "ClickOutcome",
    "ConfidenceBounds",
    "Instance",
    "MechanismKind",
    "MechState",
    "StrategyProfile",
    "Trace",
    "UtilitySpec",
    "arm_clicks",
    "desired_strategy",
    "gap_beta",
    "gap_eta",
    "max_utility",
    "new_instance",
    "optimality_gaps",
    "regret_curve",
    "run_episode",
    "sample_round",
    "strategic_regret",
    "utility",
    "validate_assumptions",
]

__version__ = "0.1.0"
