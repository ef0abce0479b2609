"""Experiment orchestration: configs, seed derivation, runs, CSV output.

Config files are line-oriented ``key=value`` with dotted sections, e.g.::

    instance.mus=0.75,0.725,0.7,0.675
    instance.horizon=50000
    utility.kind=penalized
    utility.lam=5
    mechanism=ucbs
    arms.mode=gradient
    gradient.epochs=20
    runs=10
    base_seed=2024
    output=fig2.csv

The ``paper-fig2`` preset embeds this protocol so the headline experiment
is one command. All floats are serialized with 9 significant digits and
the determinism contract is at the serialized-text level.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from clickbandit.arms import GradientConfig, gradient_ascent_run
from clickbandit.env import Instance, StrategyProfile, new_instance
from clickbandit.mech import MechanismKind
from clickbandit.sim import run_episode, strategic_regret
from clickbandit.utility import UtilitySpec, desired_strategy, greedy, penalized

EPOCH_HEADER = "run,epoch,arm,strategy,desired_strategy,cum_regret,clicks,eliminated,elimination_round"
SUMMARY_HEADER = (
    "epoch,arm,strategy_mean,strategy_std,clicks_mean,clicks_std,regret_mean,regret_std"
)

_ROLE_TAGS = {
    "episode": 1,
    "equilibrate": 2,
    "best-response": 3,
    "certify": 4,
    "sweep": 5,
}

def derive_seed(base_seed: int, run: int, epoch: int, role_tag: str) -> tuple:
    """Injective stream key for (base_seed, run, epoch, role)."""
    if base_seed < 0 or run < 0 or epoch < 0:
        raise ValueError("seed components must be non-negative")
    if role_tag not in _ROLE_TAGS:
        raise ValueError(f"unknown role tag {role_tag!r}, expected one of {sorted(_ROLE_TAGS)}")
    return (base_seed, _ROLE_TAGS[role_tag], run, epoch)

def fmt(x: float) -> str:
    return f"{float(x):.9g}"

@dataclass(frozen=True)
class ExperimentConfig:
    mus: tuple
    horizon: int
    utility_kind: str = "penalized"
    lam: float = 5.0
    mechanism: str = "ucbs"
    arms_mode: str = "gradient"          # gradient | fixed
    profile: Optional[tuple] = None      # fixed mode only; None means desired
    profile_offset: float = 0.0          # offset applied to the desired profile
    epochs: int = 20
    mc_reps: int = 10
    fd_delta: float = 0.05
    step_scale: float = 1.0
    init_strategy: float = 1.0
    runs: int = 10
    base_seed: int = 2024
    output: str = "experiment.csv"
    record: str = "summary"
    reward_model: str = "bernoulli"

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.arms_mode not in ("gradient", "fixed"):
            raise ValueError(f"unknown arms.mode {self.arms_mode!r}")
        MechanismKind.parse(self.mechanism)
        # these raise early on bad values
        self.instance()
        self.utility_spec()

    def instance(self) -> Instance:
        return new_instance(self.mus, self.horizon, self.reward_model)

    def utility_spec(self) -> UtilitySpec:
        if self.utility_kind == "greedy":
            return greedy()
        if self.utility_kind == "penalized":
            return penalized(self.lam)
        raise ValueError(f"unknown utility kind {self.utility_kind!r}")

    def mechanism_kind(self) -> MechanismKind:
        return MechanismKind.parse(self.mechanism)

    def gradient_config(self) -> GradientConfig:
        return GradientConfig(
            epochs=self.epochs,
            mc_reps=self.mc_reps,
            fd_delta=self.fd_delta,
            step_scale=self.step_scale,
            init_strategy=self.init_strategy,
        )

    def fixed_profile(self) -> StrategyProfile:
        spec = self.utility_spec()
        if self.profile is not None:
            return StrategyProfile(self.profile)
        s = [
            min(max(desired_strategy(spec, mu) + self.profile_offset, 0.0), 1.0)
            for mu in self.mus
        ]
        return StrategyProfile(tuple(s))

PRESETS: Dict[str, dict] = {
    # Headline gradient-ascent protocol: K=4, penalized utility with lam=5,
    # 50k-round episodes, 20 epochs, 10 runs, strategies initialized at 1.
    "paper-fig2": dict(
        mus=(0.75, 0.725, 0.7, 0.675),
        horizon=50000,
        utility_kind="penalized",
        lam=5.0,
        mechanism="ucbs",
        arms_mode="gradient",
        epochs=20,
        mc_reps=10,
        fd_delta=0.05,
        # Tuned so the per-epoch jumps stay small relative to the cliff in
        # the arms' utility near the elimination threshold; larger steps
        # oscillate instead of settling.
        step_scale=0.02,
        init_strategy=1.0,
        runs=10,
        base_seed=2024,
    ),
}

def preset_config(name: str, **overrides) -> ExperimentConfig:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}, expected one of {sorted(PRESETS)}")
    params = dict(PRESETS[name])
    params.update(overrides)
    return ExperimentConfig(**params)

_KEY_MAP = {
    "instance.mus": "mus",
    "instance.horizon": "horizon",
    "instance.reward_model": "reward_model",
    "utility.kind": "utility_kind",
    "utility.lam": "lam",
    "mechanism": "mechanism",
    "arms.mode": "arms_mode",
    "arms.profile": "profile",
    "arms.profile_offset": "profile_offset",
    "gradient.epochs": "epochs",
    "gradient.mc_reps": "mc_reps",
    "gradient.fd_delta": "fd_delta",
    "gradient.step_scale": "step_scale",
    "gradient.init_strategy": "init_strategy",
    "runs": "runs",
    "base_seed": "base_seed",
    "output": "output",
    "record": "record",
}

_INT_FIELDS = {"horizon", "epochs", "mc_reps", "runs", "base_seed"}
_FLOAT_FIELDS = {"lam", "fd_delta", "step_scale", "init_strategy", "profile_offset"}

def _parse_value(field_name: str, raw: str, lineno: int):
    try:
        if field_name == "mus" or field_name == "profile":
            return tuple(float(x) for x in raw.split(","))
        if field_name in _INT_FIELDS:
            return int(raw)
        if field_name in _FLOAT_FIELDS:
            return float(raw)
        return raw
    except ValueError as exc:
        raise ValueError(f"line {lineno}: bad value for {field_name!r}: {raw!r}") from exc

def load_config(path: str) -> ExperimentConfig:
    """Parse a key=value config file; unknown keys are rejected with context."""
    params: dict = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected key=value, got {line!r}")
            key, _, raw = line.partition("=")
            key = key.strip()
            raw = raw.strip()
            if key == "preset":
                params.update(PRESETS[raw] if raw in PRESETS else _unknown_preset(raw, lineno))
                continue
            if key not in _KEY_MAP:
                raise ValueError(f"line {lineno}: unknown key {key!r}")
            field_name = _KEY_MAP[key]
            params[field_name] = _parse_value(field_name, raw, lineno)
    return ExperimentConfig(**params)

def _unknown_preset(name: str, lineno: int):
    raise ValueError(f"line {lineno}: unknown preset {name!r}")

@dataclass
class EpochRow:
    run: int
    epoch: int
    arm: int
    strategy: float
    desired_strategy: float
    cum_regret: float
    clicks: int
    eliminated: int
    elimination_round: int

    def serialize(self) -> str:
        return ",".join(
            [
                str(self.run),
                str(self.epoch),
                str(self.arm),
                fmt(self.strategy),
                fmt(self.desired_strategy),
                fmt(self.cum_regret),
                str(self.clicks),
                str(self.eliminated),
                str(self.elimination_round),
            ]
        )

@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: List[EpochRow]
    csv_path: str
    summary_path: str
    summary_lines: List[str]

    def final_epoch_mean_strategy(self) -> np.ndarray:
        last = max(r.epoch for r in self.rows)
        k = len(self.config.mus)
        means = np.zeros(k)
        for arm in range(k):
            vals = [r.strategy for r in self.rows if r.epoch == last and r.arm == arm]
            means[arm] = float(np.mean(vals))
        return means

    def final_epoch_mean_regret(self) -> float:
        last = max(r.epoch for r in self.rows)
        vals = [r.cum_regret for r in self.rows if r.epoch == last and r.arm == 0]
        return float(np.mean(vals))

def _experiment_rows(config: ExperimentConfig) -> List[EpochRow]:
    instance = config.instance()
    spec = config.utility_spec()
    kind = config.mechanism_kind()
    desired = [desired_strategy(spec, mu) for mu in config.mus]
    rows: List[EpochRow] = []
    if config.arms_mode == "gradient":
        gconf = config.gradient_config()
        for run in range(config.runs):
            seed = derive_seed(config.base_seed, run, 0, "equilibrate")
            for res in gradient_ascent_run(instance, kind, spec, gconf, seed):
                for arm in range(instance.k):
                    rows.append(
                        EpochRow(
                            run=run,
                            epoch=res.epoch,
                            arm=arm,
                            strategy=res.profile.s[arm],
                            desired_strategy=desired[arm],
                            cum_regret=res.regret,
                            clicks=int(res.clicks[arm]),
                            eliminated=int(res.elimination_round[arm] >= 0),
                            elimination_round=int(res.elimination_round[arm]),
                        )
                    )
    else:
        profile = config.fixed_profile()
        for run in range(config.runs):
            seed = derive_seed(config.base_seed, run, 0, "episode")
            trace = run_episode(instance, kind, profile, spec, seed)
            regret = strategic_regret(trace, instance, profile, spec)
            for arm in range(instance.k):
                rows.append(
                    EpochRow(
                        run=run,
                        epoch=0,
                        arm=arm,
                        strategy=profile.s[arm],
                        desired_strategy=desired[arm],
                        cum_regret=regret,
                        clicks=int(trace.m_final[arm]),
                        eliminated=int(trace.elimination_round[arm] >= 0),
                        elimination_round=int(trace.elimination_round[arm]),
                    )
                )
    return rows

def summarize_rows(rows: Sequence[EpochRow], k: int) -> List[str]:
    """Per-(epoch, arm) means/stds across runs, computed from serialized values.

    Values are re-parsed from their serialized form so that an independent
    reader of the CSV reproduces the summary exactly. Stds are population
    stds (ddof=0).
    """
    by_epoch_arm: Dict[Tuple[int, int], List[EpochRow]] = {}
    for row in rows:
        by_epoch_arm.setdefault((row.epoch, row.arm), []).append(row)
    lines = [SUMMARY_HEADER]
    for (epoch, arm) in sorted(by_epoch_arm):
        group = by_epoch_arm[(epoch, arm)]
        strategies = np.array([float(fmt(r.strategy)) for r in group])
        clicks = np.array([float(r.clicks) for r in group])
        regrets = np.array([float(fmt(r.cum_regret)) for r in group])
        lines.append(
            ",".join(
                [
                    str(epoch),
                    str(arm),
                    fmt(strategies.mean()),
                    fmt(strategies.std()),
                    fmt(clicks.mean()),
                    fmt(clicks.std()),
                    fmt(regrets.mean()),
                    fmt(regrets.std()),
                ]
            )
        )
    return lines

def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run all configured runs and persist the epoch CSV plus a summary CSV."""
    rows = _experiment_rows(config)
    csv_path = config.output
    summary_path = _summary_path(csv_path)
    lines = [EPOCH_HEADER] + [r.serialize() for r in rows]
    summary_lines = summarize_rows(rows, len(config.mus))
    try:
        _write_lines(csv_path, lines)
        _write_lines(summary_path, summary_lines)
    except OSError as exc:
        raise IOError(f"cannot write experiment output to {csv_path!r}: {exc}") from exc
    return ExperimentResult(
        config=config,
        rows=rows,
        csv_path=csv_path,
        summary_path=summary_path,
        summary_lines=summary_lines,
    )

def _summary_path(csv_path: str) -> str:
    root, ext = os.path.splitext(csv_path)
    return f"{root}.summary{ext or '.csv'}"

def _write_lines(path: str, lines: Sequence[str]) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
