"""End-to-end command-line pipeline checks."""

import json
import subprocess
import sys

import pytest

from stickslip.cli import main
from stickslip.experiment import load_results
from stickslip.friction import FrictionParams, Phase
from stickslip.traces import load_trajectory

ANOVA_CSV = (
    "cond_a,cond_b,cond_c,cond_d\n"
    "8,7,1,6\n9,5,2,5\n6,2,3,8\n5,3,1,9\n8,4,5,8\n7,5,6,7\n")


def run(*argv) -> int:
    return main([str(a) for a in argv])


def synth(tmp_path, velocity=50.0, duration=2.0, name="trace.jsonl"):
    path = tmp_path / name
    assert run("synth", "--velocity", velocity, "--duration", duration,
               "--out", path) == 0
    return path


def robot_jnd(tmp_path, seed=0, participant=0, with_string=True,
              behavior="ideal-logistic(A=4,B=0.5)", name=None):
    path = tmp_path / (name or f"jnd_{seed}_{participant}_{with_string}.jsonl")
    assert run("robot-session", "--study", 1, "--seed", seed,
               "--participant", participant,
               "--with-string", "true" if with_string else "false",
               "--behavior", behavior, "--out", path) == 0
    return path


def robot_magnitude(tmp_path, seed=0, participant=0,
                    behavior="power-law(k=1.12,beta=0.204)", name=None):
    path = tmp_path / (name or f"mag_{seed}_{participant}.jsonl")
    assert run("robot-session", "--study", 2, "--seed", seed,
               "--participant", participant,
               "--behavior", behavior, "--out", path) == 0
    return path


class TestSynth:
    def test_writes_trace_and_manifest(self, tmp_path):
        path = synth(tmp_path, velocity=35.0, duration=1.0)
        lines = path.read_text().splitlines()
        assert len(lines) == 101
        manifest = json.loads((tmp_path / "trace.jsonl.manifest.json").read_text())
        assert manifest["subcommand"] == "synth"
        assert manifest["velocity"] == 35.0

    def test_bad_duration_exits_2(self, tmp_path, capsys):
        assert run("synth", "--velocity", 10, "--duration", -1,
                   "--out", tmp_path / "x.jsonl") == 2
        assert "error:" in capsys.readouterr().err


class TestSimulate:
    def test_pipeline_shows_breakaway(self, tmp_path):
        trace_path = synth(tmp_path)
        out = tmp_path / "run.csv"
        assert run("simulate", "--trace", trace_path, "--out", out) == 0
        trajectory = load_trajectory(out)
        assert len(trajectory.rows) == 201
        first_slip = next(i for i, r in enumerate(trajectory.rows)
                          if r.phase is Phase.SLIP)
        elongation = abs(trajectory.rows[first_slip].q
                         - trajectory.rows[first_slip - 1].p)
        breakaway = FrictionParams(mu_s=0.7).breakaway_elongation
        assert abs(elongation - breakaway) <= 0.5  # one tick of travel
        manifest = json.loads((tmp_path / "run.csv.manifest.json").read_text())
        assert manifest["params"]["mu_s"] == 0.7

    def test_params_file_changes_the_run(self, tmp_path):
        trace_path = synth(tmp_path)
        params_path = tmp_path / "softer.params"
        params_path.write_text("mu_s = 0.2  # glassy surface\nk = 0.25\n")
        default_out, soft_out = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run("simulate", "--trace", trace_path, "--out", default_out) == 0
        assert run("simulate", "--trace", trace_path, "--params", params_path,
                   "--out", soft_out) == 0
        assert default_out.read_text() != soft_out.read_text()

    def test_missing_trace_exits_2(self, tmp_path, capsys):
        assert run("simulate", "--trace", tmp_path / "absent.jsonl",
                   "--out", tmp_path / "run.csv") == 2
        assert "error:" in capsys.readouterr().err

    def test_unknown_param_key_exits_2(self, tmp_path, capsys):
        trace_path = synth(tmp_path)
        params_path = tmp_path / "bad.params"
        params_path.write_text("stiffness = 0.5\n")
        assert run("simulate", "--trace", trace_path, "--params", params_path,
                   "--out", tmp_path / "run.csv") == 2
        assert "stiffness" in capsys.readouterr().err


class TestSchedule:
    def test_balanced_and_deterministic(self, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        assert run("schedule", "--study", 1, "--seed", 5, "--out", a) == 0
        assert run("schedule", "--study", 1, "--seed", 5, "--out", b) == 0
        assert a.read_bytes() == b.read_bytes()
        records = load_results(a)
        assert len(records) == 60
        for lv in (0.0, 0.2, 0.4, 0.6, 0.8, 1.0):
            assert sum(1 for r in records
                       if r.trial.comparison_mu_s == lv) == 10

    def test_participant_changes_order(self, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        assert run("schedule", "--study", 1, "--seed", 5, "--out", a) == 0
        assert run("schedule", "--study", 1, "--seed", 5, "--participant", 1,
                   "--out", b) == 0
        assert a.read_bytes() != b.read_bytes()

    def test_config_file_with_overrides(self, tmp_path):
        config_path = tmp_path / "session.conf"
        config_path.write_text(
            "study = magnitude\nstandard_mu_s = 0.7\n"
            "comparison_levels = 0.4, 0.7, 1.0\nreps = 2\n"
            "with_string = true\nseed = 1\nparticipant_index = 0\n")
        out = tmp_path / "sched.jsonl"
        assert run("schedule", "--config", config_path, "--seed", 9,
                   "--out", out) == 0
        records = load_results(out)
        assert len(records) == 6
        manifest = json.loads((tmp_path / "sched.jsonl.manifest.json").read_text())
        assert manifest["config"]["seed"] == 9  # override echoed

    def test_needs_config_or_study(self, tmp_path, capsys):
        assert run("schedule", "--out", tmp_path / "x.jsonl") == 2
        assert "--study" in capsys.readouterr().err


class TestRobotSession:
    def test_discrimination_session_runs_and_reruns_identically(self, tmp_path):
        a = robot_jnd(tmp_path, seed=3, name="a.jsonl")
        b = robot_jnd(tmp_path, seed=3, name="b.jsonl")
        assert a.read_bytes() == b.read_bytes()
        records = load_results(a)
        assert len(records) == 60
        assert all(r.trial.response in ("standard", "comparison")
                   for r in records)

    def test_magnitude_session(self, tmp_path):
        path = robot_magnitude(tmp_path, seed=2)
        records = load_results(path)
        assert len(records) == 35
        assert all(isinstance(r.trial.response, float) for r in records)

    def test_behavior_study_mismatch_exits_2(self, tmp_path, capsys):
        assert run("robot-session", "--study", 2, "--behavior",
                   "ideal-logistic(A=4,B=0.5)",
                   "--out", tmp_path / "x.jsonl") == 2
        assert "error:" in capsys.readouterr().err

    def test_malformed_behavior_exits_2(self, tmp_path, capsys):
        assert run("robot-session", "--study", 1, "--behavior", "wobble(x=1)",
                   "--out", tmp_path / "x.jsonl") == 2
        assert "wobble" in capsys.readouterr().err


class TestFit:
    def test_psychometric_report(self, tmp_path):
        results = robot_jnd(tmp_path, seed=0)
        out = tmp_path / "fit.json"
        assert run("fit", "--kind", "psychometric", "--results", results,
                   "--out", out) == 0
        report = json.loads(out.read_text())
        assert report["kind"] == "psychometric"
        assert report["identifiable"] is True
        assert report["n_trials"] == 60
        assert report["jnd"] > 0
        assert report["pse"] == report["midpoint"]
        assert len(report["levels"]) == 6
        assert report["manifest"]["subcommand"] == "fit"

    def test_constant_responder_is_non_identifiable(self, tmp_path):
        results = robot_jnd(tmp_path, seed=1,
                            behavior="constant(answer=comparison)")
        out = tmp_path / "fit.json"
        assert run("fit", "--kind", "psychometric", "--results", results,
                   "--out", out) == 0
        report = json.loads(out.read_text())
        assert report["identifiable"] is False
        assert report["jnd"] is None
        assert report["midpoint"] is None
        assert report["slope"] == 0.0

    def test_power_fit_recovers_rule(self, tmp_path):
        results = robot_magnitude(tmp_path, seed=4)
        out = tmp_path / "fit.json"
        assert run("fit", "--kind", "power", "--results", results,
                   "--out", out) == 0
        report = json.loads(out.read_text())
        assert report["kind"] == "power"
        assert report["n_points"] == 35
        # Noiseless rule dialed in integer hundredths: recovery is tight
        # up to the rounding quantum.
        assert abs(report["scale"] - 1.12) < 0.02
        assert abs(report["exponent"] - 0.204) < 0.03
        assert report["r_squared"] > 0.98

    def test_psychometric_curve_out(self, tmp_path):
        results = robot_jnd(tmp_path, seed=0)
        curve_path = tmp_path / "curve.csv"
        assert run("fit", "--kind", "psychometric", "--results", results,
                   "--out", tmp_path / "fit.json",
                   "--curve-out", curve_path) == 0
        lines = curve_path.read_text().splitlines()
        assert lines[0] == "fit_id,x,y"
        assert len(lines) == 101
        assert all(line.startswith("psychometric,") for line in lines[1:])

    def test_anova_from_csv_matrix(self, tmp_path):
        matrix_path = tmp_path / "matrix.csv"
        matrix_path.write_text(ANOVA_CSV)
        out = tmp_path / "anova.json"
        assert run("fit", "--kind", "anova", "--results", matrix_path,
                   "--out", out) == 0
        report = json.loads(out.read_text())
        assert report["kind"] == "anova"
        assert (report["df1"], report["df2"]) == (3, 15)
        assert abs(report["f_value"] - 2365 / 289) < 1e-9
        assert report["n_subjects"] == 6
        assert len(report["pairs"]) == 6
        assert "levels" not in report

    def test_anova_from_results_file(self, tmp_path):
        paths = [robot_magnitude(tmp_path, seed=11, participant=i,
                                 behavior="power-law(k=1.12,beta=0.204,noise=0.08)")
                 for i in range(3)]
        merged = tmp_path / "all.jsonl"
        merged.write_bytes(b"".join(p.read_bytes() for p in paths))
        out = tmp_path / "anova.json"
        assert run("fit", "--kind", "anova", "--results", merged,
                   "--out", out) == 0
        report = json.loads(out.read_text())
        assert report["n_subjects"] == 3
        assert report["levels"] == [0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]
        assert report["pairs"][0]["first_level"] == 0.4

    def test_anova_needs_two_participants(self, tmp_path, capsys):
        results = robot_magnitude(tmp_path, seed=11)
        assert run("fit", "--kind", "anova", "--results", results,
                   "--out", tmp_path / "x.json") == 2
        assert "2 subjects" in capsys.readouterr().err

    def test_anova_has_no_curve(self, tmp_path, capsys):
        matrix_path = tmp_path / "matrix.csv"
        matrix_path.write_text(ANOVA_CSV)
        assert run("fit", "--kind", "anova", "--results", matrix_path,
                   "--curve-out", tmp_path / "curve.csv") == 2
        assert "curve" in capsys.readouterr().err

    def test_ragged_matrix_exits_2(self, tmp_path, capsys):
        matrix_path = tmp_path / "matrix.csv"
        matrix_path.write_text("1,2,3\n4,5\n")
        assert run("fit", "--kind", "anova", "--results", matrix_path) == 2
        assert "ragged" in capsys.readouterr().err

    def test_wrong_study_exits_2(self, tmp_path, capsys):
        results = robot_magnitude(tmp_path, seed=0)
        assert run("fit", "--kind", "psychometric", "--results", results) == 2
        assert "no jnd records" in capsys.readouterr().err

    def test_report_goes_to_stdout_without_out(self, tmp_path, capsys):
        results = robot_jnd(tmp_path, seed=0)
        assert run("fit", "--kind", "psychometric", "--results", results) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["kind"] == "psychometric"


class TestReport:
    def test_aggregates_both_studies(self, tmp_path):
        parts = []
        for participant in (0, 1):
            for with_string in (True, False):
                parts.append(robot_jnd(
                    tmp_path, seed=6, participant=participant,
                    with_string=with_string))
            parts.append(robot_magnitude(
                tmp_path, seed=6, participant=participant,
                behavior="power-law(k=1.12,beta=0.204,noise=0.05)"))
        merged = tmp_path / "all.jsonl"
        merged.write_bytes(b"".join(p.read_bytes() for p in parts))
        out = tmp_path / "report.json"
        curve_path = tmp_path / "curves.csv"
        assert run("report", "--results", merged, "--out", out,
                   "--curve-out", curve_path) == 0
        report = json.loads(out.read_text())

        sessions = report["jnd"]["sessions"]
        assert len(sessions) == 4
        assert {(s["participant_index"], s["with_string"]) for s in sessions} \
            == {(0, True), (0, False), (1, True), (1, False)}
        assert all(s["n_trials"] == 60 for s in sessions)
        by_condition = {b["with_string"]: b for b in report["jnd"]["by_condition"]}
        assert set(by_condition) == {True, False}
        assert all(b["mean_jnd"] > 0 for b in by_condition.values())

        magnitude = report["magnitude"]
        assert magnitude["pooled_power"]["n_points"] == 70
        assert len(magnitude["per_participant"]) == 2
        assert magnitude["anova"]["n_subjects"] == 2
        assert magnitude["anova"]["levels"] == [0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]

        curve_lines = curve_path.read_text().splitlines()
        fit_ids = {line.split(",")[0] for line in curve_lines[1:]}
        assert "power_pooled" in fit_ids
        assert "psychometric_p0_string" in fit_ids

    def test_jnd_only_file_omits_magnitude(self, tmp_path):
        results = robot_jnd(tmp_path, seed=0)
        out = tmp_path / "report.json"
        assert run("report", "--results", results, "--out", out) == 0
        report = json.loads(out.read_text())
        assert "jnd" in report and "magnitude" not in report

    def test_empty_results_exits_2(self, tmp_path, capsys):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        assert run("report", "--results", empty) == 2
        assert "no records" in capsys.readouterr().err


class TestEntryPoint:
    def test_module_invocation(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "stickslip.cli", "synth",
             "--velocity", "10", "--duration", "0.5",
             "--out", str(tmp_path / "t.jsonl")],
            capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        assert (tmp_path / "t.jsonl").exists()

    def test_module_invocation_error_path(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "stickslip", "simulate",
             "--trace", str(tmp_path / "absent.jsonl"),
             "--out", str(tmp_path / "r.csv")],
            capture_output=True, text=True)
        assert proc.returncode == 2
        assert "error:" in proc.stderr
