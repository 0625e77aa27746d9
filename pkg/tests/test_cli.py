"""Configuration parsing, the run loop, output files, and exit codes."""

import subprocess
import sys

import numpy as np
import pytest

from fracburgers.cli import (
    EXIT_CODES,
    UsageError,
    main,
    parse_config,
    run_simulation,
    write_outputs,
)
from fracburgers.oracles import InitialCondition, linear_decay_solution
from fracburgers.spectral import NodalField, forward_dft, inverse_dft, make_grid

NUMERIC_FAILURE_ARGS = [
    "--gamma", "1", "--alpha", "2", "--n", "64", "--dt", "1", "--t-final", "40",
    "--snapshot-every", "1", "--linear-only", "--detect-blowup", "false",
]
RESOLUTION_LOSS_ARGS = [
    "--n", "32", "--t-final", "2", "--tail-limit", "0.01", "--slope-limit", "10000",
]


def config(*extra, out="unused"):
    return parse_config([*extra, "--output", str(out)])


class TestParseConfig:
    def test_defaults(self):
        cfg = parse_config([])
        assert cfg.n == 256
        assert cfg.params.gamma == 0.0 and cfg.params.alpha == 1.0
        assert cfg.params.dt == "auto" and cfg.params.t_final == 1.0
        assert cfg.params.dealias_rule == "off" and not cfg.params.linear_only
        assert cfg.ic.label() == "neg-sine"
        assert cfg.snapshot_every == 0.1
        assert str(cfg.output_dir) == "out"
        assert cfg.detect_blowup is True
        assert cfg.thresholds.slope_limit == 100.0
        assert cfg.thresholds.tail_limit == 0.1

    def test_flags_parsed(self):
        cfg = parse_config(["--n", "128", "--gamma", "0.5", "--alpha", "1.5",
                            "--dt", "0.001", "--t-final", "2", "--dealias", "two-thirds",
                            "--snapshot-every", "0.5", "--detect-blowup", "false",
                            "--slope-limit", "50", "--tail-limit", "0.2",
                            "--linear-only", "--output", "results"])
        assert cfg.n == 128 and cfg.params.gamma == 0.5 and cfg.params.alpha == 1.5
        assert cfg.params.dt == 0.001 and cfg.params.t_final == 2.0
        assert cfg.params.dealias_rule == "two_thirds" and cfg.params.linear_only
        assert cfg.snapshot_every == 0.5 and cfg.detect_blowup is False
        assert cfg.thresholds.slope_limit == 50.0 and cfg.thresholds.tail_limit == 0.2
        assert str(cfg.output_dir) == "results"

    def test_ic_selector_grammar(self):
        assert config("--ic", "scaled-neg-sine:2.0").ic.params == (2.0,)
        assert config("--ic", "gaussian:0.5").ic.params == (0.5,)
        random = config("--ic", "random:8:42").ic
        assert random.params == (8, 42) and random.seed == 42

    @pytest.mark.parametrize("flag,value,key", [
        ("--n", "255", "n"),
        ("--n", "2", "n"),
        ("--n", "many", "n"),
        ("--gamma", "-1", "gamma"),
        ("--alpha", "0", "alpha"),
        ("--alpha", "2.5", "alpha"),
        ("--dt", "-0.1", "dt"),
        ("--dt", "fast", "dt"),
        ("--t-final", "0", "t_final"),
        ("--dealias", "half", "dealias"),
        ("--snapshot-every", "0", "snapshot_every"),
        ("--detect-blowup", "maybe", "detect_blowup"),
        ("--slope-limit", "0", "slope_limit"),
        ("--tail-limit", "1.5", "tail_limit"),
        ("--ic", "unknown:1", "ic"),
        ("--ic", "random:8", "ic"),
        ("--ic", "gaussian:wide", "ic"),
    ])
    def test_invalid_values_name_their_key(self, flag, value, key):
        with pytest.raises(UsageError, match=key):
            parse_config([flag, value])

    def test_snapshot_interval_cannot_exceed_t_final(self):
        with pytest.raises(UsageError, match="snapshot_every"):
            parse_config(["--t-final", "0.5", "--snapshot-every", "1"])

    def test_unknown_flag_rejected(self):
        with pytest.raises(UsageError):
            parse_config(["--bogus", "1"])

    def test_config_file_supplies_values(self, tmp_path):
        cfgfile = tmp_path / "run.cfg"
        cfgfile.write_text(
            "# reference shock run\n"
            "n = 64\n"
            "gamma = 0.5   # mid-strength\n"
            "t_final = 2\n",
            encoding="utf-8",
        )
        cfg = parse_config(["--config", str(cfgfile)])
        assert cfg.n == 64 and cfg.params.gamma == 0.5 and cfg.params.t_final == 2.0

    def test_flags_override_config_file(self, tmp_path):
        cfgfile = tmp_path / "run.cfg"
        cfgfile.write_text("gamma = 0.5\n", encoding="utf-8")
        cfg = parse_config(["--config", str(cfgfile), "--gamma", "0.25"])
        assert cfg.params.gamma == 0.25

    def test_config_file_unknown_key_is_located(self, tmp_path):
        cfgfile = tmp_path / "run.cfg"
        cfgfile.write_text("n = 64\nviscosity = 1\n", encoding="utf-8")
        with pytest.raises(UsageError, match=r"run\.cfg:2.*viscosity"):
            parse_config(["--config", str(cfgfile)])

    def test_config_file_malformed_line_is_located(self, tmp_path):
        cfgfile = tmp_path / "run.cfg"
        cfgfile.write_text("just some words\n", encoding="utf-8")
        with pytest.raises(UsageError, match=r"run\.cfg:1"):
            parse_config(["--config", str(cfgfile)])

    def test_missing_config_file(self, tmp_path):
        with pytest.raises(UsageError, match="cannot read config file"):
            parse_config(["--config", str(tmp_path / "absent.cfg")])


class TestRunSimulation:
    def test_zero_profile_stays_zero(self):
        res = run_simulation(config("--ic", "random:0:1"))
        assert res.status == "completed"
        assert len(res.records) == 11  # stable_dt is huge, so steps land on snapshots
        assert [r.t for r in res.records] == pytest.approx(np.arange(11) * 0.1, abs=1e-12)
        for r in res.records:
            assert r.mass == 0.0 and r.l2 == 0.0 and r.h3 == 0.0
        assert len(res.snapshots) == 11
        assert not res.report.detected and res.report.predicted_t_star is None

    def test_snapshots_land_on_exact_multiples(self):
        res = run_simulation(config("--n", "64", "--gamma", "0.1", "--t-final", "0.5"))
        times = [t for t, _ in res.snapshots]
        assert times == [0.0, 0.1, 0.2, 0.30000000000000004, 0.4, 0.5]
        assert all(t == i * 0.1 for i, t in enumerate(times))
        assert np.array_equal(res.snapshots[0][1].values, -np.sin(make_grid(64).nodes))

    def test_record_times_are_increasing_and_bounded(self):
        res = run_simulation(config("--n", "64", "--t-final", "0.5"))
        ts = [r.t for r in res.records]
        assert ts[0] == 0.0 and ts[-1] == 0.5
        assert all(b > a for a, b in zip(ts, ts[1:]))

    def test_neg_sine_prediction_recorded(self):
        res = run_simulation(config("--n", "64", "--t-final", "0.2"))
        assert res.report.predicted_t_star == pytest.approx(1.0, rel=1e-9)

    def test_blowup_detected_by_slope_threshold(self):
        res = run_simulation(config("--n", "64", "--t-final", "1.2", "--slope-limit", "10"))
        assert res.status == "blowup_detected"
        assert res.report.detection_cause == "slope_threshold"
        # slope law: |m| crosses 10 at t = 1 - 1/10
        assert 0.85 <= res.report.detected_t <= 1.0
        assert res.records[-1].t == res.report.detected_t

    def test_resolution_loss_detected(self):
        res = run_simulation(config(*RESOLUTION_LOSS_ARGS))
        assert res.status == "resolution_lost"
        assert res.report.detection_cause == "resolution_loss"
        assert res.records[-1].tail_fraction > 0.01

    def test_numeric_failure_keeps_finite_snapshots(self):
        res = run_simulation(config(*NUMERIC_FAILURE_ARGS))
        assert res.status == "numeric_failure"
        assert res.report.detection_cause == "non_finite"
        for _, field in res.snapshots:
            assert np.all(np.isfinite(field.values))

    def test_positive_profile_warns_about_extrema_hypotheses(self):
        res = run_simulation(config("--ic", "gaussian:1.0", "--n", "32", "--t-final", "0.2"))
        assert res.warnings and "maximum-principle" in res.warnings[0]

    def test_linear_run_matches_decay_oracle(self):
        """End to end against the exact semigroup, not just one step."""
        cfg = config("--gamma", "1", "--alpha", "2", "--n", "64",
                     "--t-final", "0.5", "--linear-only")
        res = run_simulation(cfg)
        g = make_grid(64)
        s0 = forward_dft(NodalField(-np.sin(g.nodes)), g)
        exact = inverse_dft(linear_decay_solution(s0, 0.5, 1.0, 2.0), g)
        final = res.snapshots[-1][1]
        assert np.max(np.abs(final.values - exact.values)) <= 1e-8

    def test_detection_can_be_disabled(self):
        args = ["--n", "64", "--t-final", "1.2", "--slope-limit", "10",
                "--detect-blowup", "false"]
        res = run_simulation(config(*args))
        assert res.status == "completed" and not res.report.detected


class TestWriteOutputs:
    def test_file_set_and_header(self, tmp_path):
        cfg = config("--n", "16", "--t-final", "0.3", out=tmp_path)
        paths = write_outputs(run_simulation(cfg), cfg)
        assert {p.name for p in paths} == {
            "diagnostics.csv", "report.txt",
            "snapshot_0.csv", "snapshot_0.1.csv", "snapshot_0.2.csv", "snapshot_0.3.csv",
        }
        lines = (tmp_path / "diagnostics.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "t,mass,l2,max_u,min_u,min_slope,bkm_integral,h3,tail_fraction"

    def test_diagnostics_rows_match_records(self, tmp_path):
        cfg = config("--n", "16", "--t-final", "0.2", out=tmp_path)
        res = run_simulation(cfg)
        write_outputs(res, cfg)
        lines = (tmp_path / "diagnostics.csv").read_text(encoding="utf-8").splitlines()
        assert len(lines) == len(res.records) + 1
        first = [float(cell) for cell in lines[1].split(",")]
        assert first == list(res.records[0].astuple())

    def test_zero_run_serializes_plain_zeros(self, tmp_path):
        """-0.0 is normalized, so a quiescent run is all literal "0" cells."""
        cfg = config("--ic", "random:0:1", "--n", "16", out=tmp_path)
        write_outputs(run_simulation(cfg), cfg)
        lines = (tmp_path / "diagnostics.csv").read_text(encoding="utf-8").splitlines()
        for line in lines[1:]:
            assert line.split(",")[1:] == ["0"] * 8

    def test_snapshot_columns(self, tmp_path):
        cfg = config("--n", "16", "--t-final", "0.2", out=tmp_path)
        write_outputs(run_simulation(cfg), cfg)
        lines = (tmp_path / "snapshot_0.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "x,u"
        g = make_grid(16)
        xs = np.array([float(l.split(",")[0]) for l in lines[1:]])
        us = np.array([float(l.split(",")[1]) for l in lines[1:]])
        assert np.array_equal(xs, g.nodes)
        assert np.allclose(us, -np.sin(g.nodes), rtol=0, atol=1e-16)

    def test_report_for_seeded_profile(self, tmp_path):
        cfg = config("--ic", "random:4:42", "--n", "32", "--t-final", "0.2", out=tmp_path)
        write_outputs(run_simulation(cfg), cfg)
        text = (tmp_path / "report.txt").read_text(encoding="utf-8")
        assert "status: completed" in text
        assert "ic: random:4:42" in text
        assert "rng: pcg64" in text
        assert "seed: 42" in text
        assert "detection_cause: none" in text

    def test_report_marks_viscous_prediction_as_inviscid_estimate(self, tmp_path):
        cfg = config("--gamma", "0.5", "--n", "16", "--t-final", "0.2", out=tmp_path)
        write_outputs(run_simulation(cfg), cfg)
        text = (tmp_path / "report.txt").read_text(encoding="utf-8")
        assert "(inviscid prediction)" in text

    def test_warnings_echoed_into_report(self, tmp_path):
        cfg = config("--ic", "gaussian:1.0", "--n", "16", "--t-final", "0.2", out=tmp_path)
        write_outputs(run_simulation(cfg), cfg)
        text = (tmp_path / "report.txt").read_text(encoding="utf-8")
        assert "warning: maximum-principle" in text

    def test_reruns_are_byte_identical(self, tmp_path):
        args = ("--ic", "random:6:9", "--n", "64", "--gamma", "0.1", "--t-final", "0.4")
        a, b = tmp_path / "a", tmp_path / "b"
        write_outputs(run_simulation(config(*args, out=a)), config(*args, out=a))
        write_outputs(run_simulation(config(*args, out=b)), config(*args, out=b))
        for name in ("diagnostics.csv", "report.txt", "snapshot_0.2.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes(), name

    def test_nested_output_directory_created(self, tmp_path):
        target = tmp_path / "deep" / "er" / "out"
        cfg = config("--n", "16", "--t-final", "0.2", out=target)
        write_outputs(run_simulation(cfg), cfg)
        assert (target / "diagnostics.csv").exists()

    def test_output_path_collision_raises_oserror(self, tmp_path):
        blocker = tmp_path / "taken"
        blocker.write_text("file, not a directory", encoding="utf-8")
        cfg = config("--n", "16", "--t-final", "0.2", out=blocker)
        with pytest.raises(OSError):
            write_outputs(run_simulation(cfg), cfg)


class TestMain:
    def test_completed_run_exits_zero(self, tmp_path, capsys):
        code = main(["--n", "16", "--t-final", "0.3", "--output", str(tmp_path / "o")])
        assert code == 0
        out = capsys.readouterr().out
        assert out.startswith("completed after ")
        assert (tmp_path / "o" / "diagnostics.csv").exists()

    def test_usage_error_exits_64(self, tmp_path, capsys):
        code = main(["--n", "255", "--output", str(tmp_path)])
        assert code == 64
        assert "n" in capsys.readouterr().err

    def test_blowup_exit_code(self, tmp_path, capsys):
        code = main(["--n", "64", "--t-final", "1.2", "--slope-limit", "10",
                     "--output", str(tmp_path / "o")])
        assert code == EXIT_CODES["blowup_detected"] == 2
        assert capsys.readouterr().out.startswith("blowup_detected")

    def test_resolution_loss_exit_code(self, tmp_path):
        code = main([*RESOLUTION_LOSS_ARGS, "--output", str(tmp_path / "o")])
        assert code == EXIT_CODES["resolution_lost"] == 3

    def test_numeric_failure_exit_code(self, tmp_path):
        code = main([*NUMERIC_FAILURE_ARGS, "--output", str(tmp_path / "o")])
        assert code == EXIT_CODES["numeric_failure"] == 4

    def test_unwritable_output_exits_one(self, tmp_path, capsys):
        blocker = tmp_path / "taken"
        blocker.write_text("in the way", encoding="utf-8")
        code = main(["--n", "16", "--t-final", "0.2", "--output", str(blocker)])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_warnings_go_to_stderr(self, tmp_path, capsys):
        code = main(["--ic", "gaussian:1.0", "--n", "16", "--t-final", "0.2",
                     "--output", str(tmp_path / "o")])
        assert code == 0
        assert "warning:" in capsys.readouterr().err

    def test_module_entry_point(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "fracburgers", "--n", "5", "--output", str(tmp_path)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 64
        assert "n" in proc.stderr
