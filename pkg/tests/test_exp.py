import itertools

import numpy as np
import pytest

from clickbandit.cli import main
from clickbandit.exp import (
    EPOCH_HEADER,
    SUMMARY_HEADER,
    ExperimentConfig,
    derive_seed,
    fmt,
    load_config,
    preset_config,
    run_experiment,
    summarize_rows,
)

SMALL = dict(
    mus=(0.75, 0.7),
    horizon=500,
    epochs=2,
    mc_reps=2,
    runs=3,
    base_seed=7,
)


def small_config(tmp_path, **overrides):
    params = dict(SMALL)
    params["output"] = str(tmp_path / "out.csv")
    params.update(overrides)
    return ExperimentConfig(**params)


class TestDeriveSeed:
    def test_role_tags_distinct(self):
        keys = {derive_seed(1, 2, 3, tag) for tag in ("episode", "equilibrate", "sweep")}
        assert len(keys) == 3

    def test_rejects_unknown_role(self):
        with pytest.raises(ValueError):
            derive_seed(1, 0, 0, "warmup")

    def test_rejects_negative_components(self):
        with pytest.raises(ValueError):
            derive_seed(-1, 0, 0, "episode")

    def test_injective_over_component_grid(self):
        # 10^6 (base, run, epoch, role)-ish combinations, all distinct keys
        keys = set()
        count = 0
        for base, run, epoch, tag in itertools.product(
            range(40), range(40), range(25), ("episode", "equilibrate", "certify")
        ):
            keys.add(derive_seed(base, run, epoch, tag))
            count += 1
        assert len(keys) == count


class TestFmt:
    def test_nine_significant_digits(self):
        assert fmt(1 / 3) == "0.333333333"
        assert fmt(153.125) == "153.125"
        assert fmt(0.0) == "0"

    def test_round_trips_through_float(self):
        for x in (0.153125, 1e-9, 12345.6789):
            assert float(fmt(float(fmt(x)))) == float(fmt(x))


class TestExperimentConfig:
    def test_validation_happens_at_construction(self):
        with pytest.raises(ValueError):
            ExperimentConfig(mus=(1.3,), horizon=100)
        with pytest.raises(ValueError):
            ExperimentConfig(mus=(0.5,), horizon=100, mechanism="thompson")
        with pytest.raises(ValueError):
            ExperimentConfig(mus=(0.5,), horizon=100, runs=0)
        with pytest.raises(ValueError):
            ExperimentConfig(mus=(0.5,), horizon=100, arms_mode="static")

    def test_fixed_profile_defaults_to_desired(self):
        cfg = ExperimentConfig(mus=(0.75, 0.7), horizon=100, arms_mode="fixed")
        assert cfg.fixed_profile().s == pytest.approx((0.825, 0.77))

    def test_fixed_profile_offset_clips(self):
        cfg = ExperimentConfig(
            mus=(0.95, 0.7), horizon=100, arms_mode="fixed", profile_offset=0.5
        )
        assert cfg.fixed_profile().s == pytest.approx((1.0, 1.0))

    def test_explicit_profile_wins(self):
        cfg = ExperimentConfig(
            mus=(0.75, 0.7), horizon=100, arms_mode="fixed", profile=(0.4, 0.5)
        )
        assert cfg.fixed_profile().s == (0.4, 0.5)


class TestPreset:
    def test_headline_preset_protocol(self):
        cfg = preset_config("paper-fig2")
        assert cfg.mus == (0.75, 0.725, 0.7, 0.675)
        assert cfg.horizon == 50000
        assert cfg.utility_kind == "penalized" and cfg.lam == 5.0
        assert cfg.mechanism == "ucbs"
        assert cfg.epochs == 20
        assert cfg.runs == 10
        assert cfg.init_strategy == 1.0

    def test_overrides(self):
        cfg = preset_config("paper-fig2", mechanism="ucb", runs=2)
        assert cfg.mechanism == "ucb"
        assert cfg.runs == 2

    def test_unknown_preset(self):
        with pytest.raises(ValueError):
            preset_config("fig9")


class TestLoadConfig:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text(
            "# headline protocol, shrunk\n"
            "instance.mus=0.75,0.7\n"
            "instance.horizon=500\n"
            "utility.kind=penalized\n"
            "utility.lam=5\n"
            "mechanism=ucbs\n"
            "arms.mode=gradient\n"
            "gradient.epochs=2\n"
            "gradient.mc_reps=2\n"
            "runs=3\n"
            "base_seed=7\n"
            "output=out.csv\n"
        )
        cfg = load_config(str(path))
        assert cfg.mus == (0.75, 0.7)
        assert cfg.horizon == 500
        assert cfg.epochs == 2
        assert cfg.output == "out.csv"

    def test_preset_line_with_override(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text("preset=paper-fig2\nruns=1\ninstance.horizon=1000\n")
        cfg = load_config(str(path))
        assert cfg.mus == (0.75, 0.725, 0.7, 0.675)
        assert cfg.runs == 1
        assert cfg.horizon == 1000

    def test_unknown_key_reports_line(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text("instance.horizon=500\nbogus.key=1\n")
        with pytest.raises(ValueError, match="line 2"):
            load_config(str(path))

    def test_bad_value_reports_line(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text("instance.horizon=soon\n")
        with pytest.raises(ValueError, match="line 1"):
            load_config(str(path))

    def test_missing_equals_rejected(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text("instance.horizon 500\n")
        with pytest.raises(ValueError, match="key=value"):
            load_config(str(path))


class TestRunExperiment:
    def test_row_count_and_header(self, tmp_path):
        cfg = small_config(tmp_path)
        result = run_experiment(cfg)
        # runs * epochs * arms
        assert len(result.rows) == 3 * 2 * 2
        text = (tmp_path / "out.csv").read_text()
        lines = text.strip().split("\n")
        assert lines[0] == EPOCH_HEADER
        assert len(lines) == 1 + len(result.rows)

    def test_byte_identical_rerun(self, tmp_path):
        cfg = small_config(tmp_path)
        run_experiment(cfg)
        first = (tmp_path / "out.csv").read_bytes()
        first_summary = (tmp_path / "out.summary.csv").read_bytes()
        run_experiment(cfg)
        assert (tmp_path / "out.csv").read_bytes() == first
        assert (tmp_path / "out.summary.csv").read_bytes() == first_summary

    def test_base_seed_changes_output(self, tmp_path):
        a = run_experiment(small_config(tmp_path))
        b = run_experiment(small_config(tmp_path, base_seed=8, output=str(tmp_path / "b.csv")))
        assert [r.cum_regret for r in a.rows] != [r.cum_regret for r in b.rows]

    def test_fixed_mode_single_epoch(self, tmp_path):
        cfg = small_config(tmp_path, arms_mode="fixed", profile_offset=0.01)
        result = run_experiment(cfg)
        assert {r.epoch for r in result.rows} == {0}
        assert len(result.rows) == 3 * 2

    def test_summary_recomputable_from_csv(self, tmp_path):
        # an independent reader of the epoch CSV reproduces the summary file
        cfg = small_config(tmp_path)
        result = run_experiment(cfg)
        rows = {}
        for line in (tmp_path / "out.csv").read_text().strip().split("\n")[1:]:
            parts = line.split(",")
            epoch, arm = int(parts[1]), int(parts[2])
            rows.setdefault((epoch, arm), []).append(
                (float(parts[3]), float(parts[6]), float(parts[5]))
            )
        expected = [SUMMARY_HEADER]
        for (epoch, arm) in sorted(rows):
            s, c, g = (np.array(col) for col in zip(*rows[(epoch, arm)]))
            expected.append(
                ",".join(
                    [str(epoch), str(arm), fmt(s.mean()), fmt(s.std()), fmt(c.mean()),
                     fmt(c.std()), fmt(g.mean()), fmt(g.std())]
                )
            )
        assert (tmp_path / "out.summary.csv").read_text().strip().split("\n") == expected

    def test_regret_identical_across_arms_within_run_epoch(self, tmp_path):
        result = run_experiment(small_config(tmp_path))
        for row in result.rows:
            twin = next(
                r for r in result.rows if r.run == row.run and r.epoch == row.epoch and r.arm == 0
            )
            assert row.cum_regret == twin.cum_regret

    def test_final_epoch_accessors(self, tmp_path):
        result = run_experiment(small_config(tmp_path))
        means = result.final_epoch_mean_strategy()
        assert means.shape == (2,)
        assert np.isfinite(result.final_epoch_mean_regret())

    def test_unwritable_output_raises_oserror(self, tmp_path):
        cfg = small_config(tmp_path, output="/proc/definitely/not/writable.csv")
        with pytest.raises(OSError):
            run_experiment(cfg)


class TestSummarizeRows:
    def test_population_std(self, tmp_path):
        result = run_experiment(small_config(tmp_path))
        lines = summarize_rows(result.rows, 2)
        assert lines[0] == SUMMARY_HEADER
        # epoch 0, arm 0 strategy is 1.0 in every run -> std exactly 0
        first = lines[1].split(",")
        assert first[0] == "0" and first[1] == "0"
        assert first[2] == "1" and first[3] == "0"


class TestCli:
    def test_simulate_summary(self, tmp_path, capsys):
        out = tmp_path / "sim.csv"
        code = main(
            [
                "simulate",
                "--mus", "0.75,0.7",
                "--horizon", "500",
                "--profile", "desired",
                "--seed", "3",
                "--out", str(out),
            ]
        )
        assert code == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "arm,strategy,desired_strategy,pulls,clicks,eliminated,elimination_round"
        assert len(lines) == 3
        pulls = sum(int(line.split(",")[3]) for line in lines[1:])
        assert pulls == 500
        assert "strategic_regret=" in capsys.readouterr().err

    def test_simulate_full_deterministic(self, tmp_path):
        args = [
            "simulate",
            "--mus", "0.75,0.7",
            "--horizon", "300",
            "--record", "full",
            "--seed", "3",
        ]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert a.read_text().startswith("t,arm,clicked,reward,active_count\n")

    def test_equilibrate_preset_overrides(self, tmp_path):
        out = tmp_path / "eq.csv"
        code = main(
            [
                "equilibrate",
                "--preset", "paper-fig2",
                "--runs", "1",
                "--epochs", "2",
                "--horizon", "500",
                "--out", str(out),
            ]
        )
        assert code == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0] == EPOCH_HEADER
        assert len(lines) == 1 + 1 * 2 * 4
        assert (tmp_path / "eq.summary.csv").exists()

    def test_equilibrate_config_file(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        out = tmp_path / "eq.csv"
        cfg.write_text(
            "instance.mus=0.75,0.7\ninstance.horizon=400\n"
            "gradient.epochs=2\ngradient.mc_reps=2\nruns=2\n"
            f"output={out}\n"
        )
        assert main(["equilibrate", "--config", str(cfg)]) == 0
        assert out.exists()

    def test_equilibrate_without_source_is_validation_error(self):
        assert main(["equilibrate"]) == 1

    def test_certify_ne(self, tmp_path, capsys):
        out = tmp_path / "cert.csv"
        code = main(
            [
                "certify-ne",
                "--mus", "0.7,0.5",
                "--horizon", "500",
                "--mechanism", "mu-oracle",
                "--profile", "1.0,1.0",
                "--epsilon", "5",
                "--grid-step", "0.1",
                "--mc-reps", "2",
                "--out", str(out),
            ]
        )
        assert code == 0
        report = capsys.readouterr().out
        assert "certified=1" in report
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "arm,strategy,best_response,current_value,gain,std_error"
        assert len(lines) == 3

    def test_validate_utility(self, capsys):
        assert main(["validate-utility", "--lam", "5"]) == 0
        out = capsys.readouterr().out
        assert "H_hat=" in out

    def test_sweep(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(
            [
                "sweep",
                "--mus", "0.75,0.7",
                "--horizon", "0",
                "--horizons", "200,400",
                "--runs", "2",
                "--profile", "desired+0.01",
                "--out", str(out),
            ]
        )
        assert code == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "horizon,run,regret"
        assert len(lines) == 5
        assert {line.split(",")[0] for line in lines[1:]} == {"200", "400"}

    def test_validation_error_exit_code(self, capsys):
        code = main(
            ["simulate", "--mus", "1.4", "--horizon", "100", "--profile", "desired"]
        )
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_io_error_exit_code(self, capsys):
        code = main(
            [
                "simulate",
                "--mus", "0.5",
                "--horizon", "100",
                "--out", "/proc/definitely/not/writable.csv",
            ]
        )
        assert code == 2
