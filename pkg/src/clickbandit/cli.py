"""Command-line interface.

Subcommands: simulate (single episode), equilibrate (gradient-ascent
epochs), certify-ne, validate-utility, sweep (regret scaling over
horizons). Exit codes: 0 success, 1 validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional


from clickbandit.arms import certify_epsilon_ne
from clickbandit.env import StrategyProfile, new_instance
from clickbandit.exp import (
    ExperimentConfig,
    derive_seed,
    fmt,
    load_config,
    preset_config,
    run_experiment,
)
from clickbandit.mech import MechanismKind
from clickbandit.sim import run_episode, strategic_regret
from clickbandit.utility import desired_strategy, greedy, penalized, validate_assumptions


def _utility_spec(args):
    if args.utility == "greedy":
        return greedy()
    return penalized(args.lam)


def _parse_mus(raw: str):
    return [float(x) for x in raw.split(",")]


def _parse_profile(raw: str, mus, spec):
    """Comma floats, or 'desired' optionally with an offset like 'desired+0.01'."""
    if raw.startswith("desired"):
        offset = float(raw[len("desired"):]) if len(raw) > len("desired") else 0.0
        return StrategyProfile(
            tuple(min(max(desired_strategy(spec, mu) + offset, 0.0), 1.0) for mu in mus)
        )
    return StrategyProfile(tuple(float(x) for x in raw.split(",")))


def _write_lines(path: Optional[str], lines: List[str]) -> None:
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def _add_instance_flags(p):
    p.add_argument("--mus", required=True, help="comma-separated post-click means")
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--utility", choices=["penalized", "greedy"], default="penalized")
    p.add_argument("--lam", type=float, default=5.0)
    p.add_argument(
        "--mechanism",
        default="ucbs",
        choices=[k.value for k in MechanismKind],
    )


def cmd_simulate(args) -> int:
    spec = _utility_spec(args)
    mus = _parse_mus(args.mus)
    instance = new_instance(mus, args.horizon)
    profile = _parse_profile(args.profile, mus, spec)
    kind = MechanismKind.parse(args.mechanism)
    trace = run_episode(instance, kind, profile, spec, args.seed, record=args.record)
    regret = strategic_regret(trace, instance, profile, spec)
    lines: List[str] = []
    if args.record == "full":
        lines.append("t,arm,clicked,reward,active_count")
        for rec in trace.records():
            reward = fmt(rec.reward) if rec.reward is not None else ""
            lines.append(f"{rec.t},{rec.arm},{int(rec.clicked)},{reward},{rec.active_count}")
    else:
        lines.append("arm,strategy,desired_strategy,pulls,clicks,eliminated,elimination_round")
        for arm in range(instance.k):
            lines.append(
                ",".join(
                    [
                        str(arm),
                        fmt(profile.s[arm]),
                        fmt(desired_strategy(spec, mus[arm])),
                        str(int(trace.n_final[arm])),
                        str(int(trace.m_final[arm])),
                        str(int(trace.elimination_round[arm] >= 0)),
                        str(int(trace.elimination_round[arm])),
                    ]
                )
            )
    _write_lines(args.out, lines)
    print(f"strategic_regret={fmt(regret)}", file=sys.stderr)
    return 0


def cmd_equilibrate(args) -> int:
    if args.config:
        config = load_config(args.config)
    elif args.preset:
        overrides = {}
        if args.mechanism:
            overrides["mechanism"] = args.mechanism
        if args.runs is not None:
            overrides["runs"] = args.runs
        if args.epochs is not None:
            overrides["epochs"] = args.epochs
        if args.base_seed is not None:
            overrides["base_seed"] = args.base_seed
        if args.horizon is not None:
            overrides["horizon"] = args.horizon
        config = preset_config(args.preset, **overrides)
    else:
        raise ValueError("equilibrate needs --config or --preset")
    if args.out:
        config = ExperimentConfig(**{**config.__dict__, "output": args.out})
    result = run_experiment(config)
    print(f"wrote {result.csv_path} and {result.summary_path}", file=sys.stderr)
    return 0


def cmd_certify_ne(args) -> int:
    spec = _utility_spec(args)
    mus = _parse_mus(args.mus)
    instance = new_instance(mus, args.horizon)
    profile = _parse_profile(args.profile, mus, spec)
    kind = MechanismKind.parse(args.mechanism)
    cert = certify_epsilon_ne(
        instance,
        kind,
        spec,
        profile,
        epsilon=args.epsilon,
        grid_step=args.grid_step,
        mc_reps=args.mc_reps,
        seed=args.seed,
    )
    report = [
        f"certified={int(cert.certified)}",
        f"epsilon={fmt(cert.epsilon)}",
        f"max_gain={fmt(cert.per_arm_gain.max())}",
        f"grid_step={fmt(cert.grid_step)}",
        f"mc_reps={cert.mc_reps}",
    ]
    print("\n".join(report))
    lines = ["arm,strategy,best_response,current_value,gain,std_error"]
    for arm in range(instance.k):
        lines.append(
            ",".join(
                [
                    str(arm),
                    fmt(profile.s[arm]),
                    fmt(cert.best_responses[arm]),
                    fmt(cert.current_values[arm]),
                    fmt(cert.per_arm_gain[arm]),
                    fmt(cert.std_errors[arm]),
                ]
            )
        )
    _write_lines(args.out, lines)
    return 0


def cmd_validate_utility(args) -> int:
    spec = _utility_spec(args)
    report = validate_assumptions(spec, grid_step=args.grid_step)
    print("\n".join(report.lines()))
    return 0


def cmd_sweep(args) -> int:
    spec = _utility_spec(args)
    mus = _parse_mus(args.mus)
    profile_raw = args.profile
    kind = MechanismKind.parse(args.mechanism)
    horizons = [int(x) for x in args.horizons.split(",")]
    lines = ["horizon,run,regret"]
    for horizon in horizons:
        instance = new_instance(mus, horizon)
        profile = _parse_profile(profile_raw, mus, spec)
        for run in range(args.runs):
            seed = derive_seed(args.base_seed, run, horizon, "sweep")
            trace = run_episode(instance, kind, profile, spec, seed)
            regret = strategic_regret(trace, instance, profile, spec)
            lines.append(f"{horizon},{run},{fmt(regret)}")
    _write_lines(args.out, lines)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clickbandit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a single fixed-profile episode")
    _add_instance_flags(p)
    p.add_argument("--profile", default="desired", help="comma floats or desired[+offset]")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--record", choices=["summary", "full"], default="summary")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("equilibrate", help="gradient-ascent arm dynamics over epochs")
    p.add_argument("--config", default=None)
    p.add_argument("--preset", default=None)
    p.add_argument("--mechanism", default=None, choices=[k.value for k in MechanismKind])
    p.add_argument("--runs", type=int, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--base-seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_equilibrate)

    p = sub.add_parser("certify-ne", help="epsilon-Nash certification of a pure profile")
    _add_instance_flags(p)
    p.add_argument("--profile", required=True)
    p.add_argument("--epsilon", type=float, required=True, help="in absolute expected clicks")
    p.add_argument("--grid-step", type=float, default=0.01)
    p.add_argument("--mc-reps", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_certify_ne)

    p = sub.add_parser("validate-utility", help="numerical check of utility assumptions")
    p.add_argument("--utility", choices=["penalized", "greedy"], default="penalized")
    p.add_argument("--lam", type=float, default=5.0)
    p.add_argument("--grid-step", type=float, default=1e-3)
    p.set_defaults(func=cmd_validate_utility)

    p = sub.add_parser("sweep", help="fixed-profile regret across horizons")
    _add_instance_flags(p)
    p.add_argument("--profile", default="desired")
    p.add_argument("--horizons", required=True, help="comma-separated horizons")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
