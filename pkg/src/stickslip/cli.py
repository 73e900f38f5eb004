"""Command-line entry point.

Subcommands cover the whole headless pipeline: synthesize input traces,
simulate them through the friction model, build session schedules, run
robot-participant sessions, and fit/report statistics over results
files. Every run leaves a manifest echo of the exact parameters used
(a sidecar JSON next to file outputs, or embedded in JSON reports), so
any artifact can be regenerated from its manifest alone.

Exit codes: 0 on success, 2 on any validation or input error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, replace

import numpy as np

from .analysis import (
    AnovaResult,
    fit_power_law,
    fit_psychometric,
    jnd,
    logistic,
    pse,
    rm_anova,
    tukey_hsd,
)
from .exceptions import InvalidParameterError, StickSlipError
from .experiment import (
    RESPONSE_COMPARISON,
    RESPONSE_STANDARD,
    SessionConfig,
    SessionRecord,
    Study,
    TrialRecord,
    build_schedule,
    discrimination_config,
    load_results,
    magnitude_config,
    read_session_config,
    record_line,
    tally_jnd_proportions,
    write_results,
)
from .friction import FrictionParams
from .robot import parse_behavior, run_robot_session
from .traces import load_trace, save_trace, save_trajectory, simulate_trace, synth_constant_velocity

__all__ = ["main", "build_parser", "read_params_file", "DEFAULT_MU_S"]

# Demo-friendly default surface: the magnitude study's standard stimulus.
DEFAULT_MU_S = 0.7

_PARAM_KEYS = ("mu_s", "mu_k", "k", "c", "g", "string_scale", "sim_rate",
               "travel_target")


def read_params_file(path: str) -> FrictionParams:
    """Parse a key = value friction parameter file. All keys optional;
    absent keys keep their defaults. Unknown keys are errors."""
    overrides: dict[str, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise InvalidParameterError(
                    f"{path}:{lineno}: expected key = value, got {text!r}")
            key, _, value = text.partition("=")
            key = key.strip()
            if key not in _PARAM_KEYS:
                raise InvalidParameterError(f"{path}:{lineno}: unknown parameter {key!r}")
            try:
                overrides[key] = float(value.strip())
            except ValueError as e:
                raise InvalidParameterError(f"{path}:{lineno}: {e}") from e
    return FrictionParams(mu_s=overrides.pop("mu_s", DEFAULT_MU_S), **overrides)


def _load_params(args) -> FrictionParams:
    if getattr(args, "params", None):
        return read_params_file(args.params)
    return FrictionParams(mu_s=DEFAULT_MU_S)


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def _write_manifest(out_path: str, manifest: dict) -> None:
    with open(out_path + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def _emit_report(report: dict, args) -> None:
    text = json.dumps(report, indent=2) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _session_config(args) -> SessionConfig:
    if getattr(args, "config", None):
        config = read_session_config(args.config)
        if args.seed is not None:
            config = replace(config, seed=args.seed)
        if args.participant is not None:
            config = replace(config, participant_index=args.participant)
        if args.with_string is not None:
            config = replace(config, with_string=args.with_string)
        return config
    if getattr(args, "study", None) is None:
        raise InvalidParameterError("need either --config or --study")
    seed = args.seed if args.seed is not None else 0
    participant = args.participant if args.participant is not None else 0
    with_string = args.with_string if args.with_string is not None else True
    if args.study == 1:
        return discrimination_config(with_string=with_string, seed=seed,
                                     participant_index=participant)
    return magnitude_config(with_string=with_string, seed=seed,
                            participant_index=participant)


def _config_manifest(config: SessionConfig) -> dict:
    return {
        "study": config.study.value,
        "standard_mu_s": config.standard_mu_s,
        "comparison_levels": list(config.comparison_levels),
        "reps": config.reps,
        "with_string": config.with_string,
        "seed": config.seed,
        "participant_index": config.participant_index,
    }


# --- subcommands -------------------------------------------------------------

def cmd_synth(args) -> int:
    samples = synth_constant_velocity(args.velocity, args.duration, args.rate)
    save_trace(samples, args.out)
    _write_manifest(args.out, {
        "subcommand": "synth",
        "velocity": args.velocity,
        "duration": args.duration,
        "rate": args.rate,
        "out": args.out,
    })
    return 0


def cmd_simulate(args) -> int:
    params = _load_params(args)
    samples = load_trace(args.trace)
    trace = simulate_trace(samples, params)
    save_trajectory(trace, args.out)
    _write_manifest(args.out, {
        "subcommand": "simulate",
        "trace": args.trace,
        "params": asdict(params),
        "out": args.out,
    })
    return 0


def cmd_schedule(args) -> int:
    config = _session_config(args)
    stubs = build_schedule(config)
    with open(args.out, "w", encoding="utf-8") as fh:
        for stub in stubs:
            fh.write(record_line(config.study, config.participant_index,
                                 config.with_string, config.standard_mu_s, stub) + "\n")
    _write_manifest(args.out, {
        "subcommand": "schedule",
        "config": _config_manifest(config),
        "out": args.out,
    })
    return 0


def cmd_robot_session(args) -> int:
    config = _session_config(args)
    params = _load_params(args)
    responder = parse_behavior(args.behavior)
    records = run_robot_session(config, params, responder)
    write_results(args.out, config, records)
    _write_manifest(args.out, {
        "subcommand": "robot-session",
        "config": _config_manifest(config),
        "params": asdict(params),
        "behavior": args.behavior,
        "out": args.out,
    })
    return 0


def _results_records(path: str, study: Study) -> list[SessionRecord]:
    records = load_results(path)
    picked = [r for r in records if r.study is study]
    if not picked:
        raise InvalidParameterError(
            f"{path} holds no {study.value} records")
    return picked


def _read_matrix(path: str) -> np.ndarray:
    """Numeric CSV matrix (rows = subjects), optional non-numeric header."""
    rows: list[list[float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            cells = [c.strip() for c in text.split(",")]
            try:
                rows.append([float(c) for c in cells])
            except ValueError:
                if lineno == 1:
                    continue  # header line
                raise InvalidParameterError(
                    f"{path}:{lineno}: non-numeric matrix cell") from None
    if not rows:
        raise InvalidParameterError(f"{path} holds no matrix rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise InvalidParameterError(f"{path}: ragged matrix rows {sorted(widths)}")
    return np.array(rows, dtype=float)


def _magnitude_matrix(records: list[SessionRecord]) -> tuple[np.ndarray, list[float]]:
    """Participants x levels matrix of mean reported ratios."""
    levels = sorted({r.trial.comparison_mu_s for r in records})
    participants = sorted({r.participant_index for r in records})
    cells: dict[tuple[int, float], list[float]] = {}
    for r in records:
        if not isinstance(r.trial.response, (int, float)):
            raise InvalidParameterError(
                f"trial {r.trial.trial_index} of participant "
                f"{r.participant_index} has no ratio response")
        cells.setdefault((r.participant_index, r.trial.comparison_mu_s),
                         []).append(float(r.trial.response))
    matrix = np.empty((len(participants), len(levels)))
    for i, p in enumerate(participants):
        for j, lv in enumerate(levels):
            got = cells.get((p, lv))
            if not got:
                raise InvalidParameterError(
                    f"participant {p} has no trials at level {lv}; "
                    "repeated-measures ANOVA needs a complete matrix")
            matrix[i, j] = float(np.mean(got))
    return matrix, levels


def _pairs_json(pairs, labels=None) -> list[dict]:
    out = []
    for pair in pairs:
        entry = {
            "first": pair.first,
            "second": pair.second,
            "difference": pair.difference,
            "q_value": pair.q_value,
            "significant_05": pair.significant_05,
            "significant_01": pair.significant_01,
        }
        if labels is not None:
            entry["first_level"] = labels[pair.first]
            entry["second_level"] = labels[pair.second]
        out.append(entry)
    return out


def _anova_json(anova: AnovaResult, pairs, labels=None) -> dict:
    return {
        "f_value": anova.f_value,
        "df1": anova.df1,
        "df2": anova.df2,
        "p_value": anova.p_value,
        "ms_error": anova.ms_error,
        "n_subjects": anova.n_subjects,
        "condition_means": list(anova.condition_means),
        "pairs": _pairs_json(pairs, labels),
    }


def _write_curves(path: str, curves: list[tuple[str, np.ndarray, np.ndarray]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("fit_id,x,y\n")
        for fit_id, xs, ys in curves:
            for x, y in zip(xs, ys):
                fh.write(f"{fit_id},{x:.6f},{y:.6f}\n")


def _psychometric_report(records: list[SessionRecord]) -> tuple[dict, list]:
    trials = [r.trial for r in records]
    proportions = tally_jnd_proportions(trials)
    levels = sorted(proportions)
    fit = fit_psychometric([(lv, proportions[lv]) for lv in levels])
    block = {
        "n_trials": len(trials),
        "levels": levels,
        "proportions": [proportions[lv] for lv in levels],
        "slope": fit.slope,
        "midpoint": None if math.isnan(fit.midpoint) else fit.midpoint,
        "sse": fit.sse,
        "identifiable": fit.identifiable,
        "pse": None if math.isnan(pse(fit)) else pse(fit),
    }
    try:
        block["jnd"] = jnd(fit)
    except StickSlipError:
        block["jnd"] = None
    curves = []
    if fit.identifiable:
        xs = np.linspace(min(levels), max(levels), 100)
        curves.append(("psychometric", xs, logistic(xs, fit.slope, fit.midpoint)))
    return block, curves


def _power_report(records: list[SessionRecord]) -> tuple[dict, list]:
    points = []
    for r in records:
        if not isinstance(r.trial.response, (int, float)):
            raise InvalidParameterError(
                f"trial {r.trial.trial_index} has no ratio response")
        points.append((r.trial.comparison_mu_s, float(r.trial.response)))
    fit = fit_power_law(points)
    block = {
        "n_points": len(points),
        "scale": fit.scale,
        "exponent": fit.exponent,
        "r_squared": fit.r_squared,
    }
    xs = np.linspace(min(p[0] for p in points), max(p[0] for p in points), 100)
    curves = [("power", xs, fit.scale * xs ** fit.exponent)]
    return block, curves


def cmd_fit(args) -> int:
    manifest = {
        "subcommand": "fit",
        "kind": args.kind,
        "results": args.results,
        "out": args.out,
        "curve_out": args.curve_out,
    }
    curves: list = []
    if args.kind == "psychometric":
        block, curves = _psychometric_report(_results_records(args.results, Study.JND))
        report = {"kind": "psychometric", **block, "manifest": manifest}
    elif args.kind == "power":
        block, curves = _power_report(_results_records(args.results, Study.MAGNITUDE))
        report = {"kind": "power", **block, "manifest": manifest}
    else:
        with open(args.results, "r", encoding="utf-8") as fh:
            head = fh.read(1)
        if head == "{":
            records = _results_records(args.results, Study.MAGNITUDE)
            matrix, levels = _magnitude_matrix(records)
        else:
            matrix = _read_matrix(args.results)
            levels = None
        anova = rm_anova(matrix)
        pairs = tukey_hsd(matrix, anova)
        report = {"kind": "anova", **_anova_json(anova, pairs, levels)}
        if levels is not None:
            report["levels"] = levels
        report["manifest"] = manifest
    if args.curve_out:
        if not curves:
            raise InvalidParameterError(f"kind {args.kind!r} emits no fitted curve")
        _write_curves(args.curve_out, curves)
    _emit_report(report, args)
    return 0


def cmd_report(args) -> int:
    records = load_results(args.results)
    if not records:
        raise InvalidParameterError(f"{args.results} holds no records")
    report: dict = {"kind": "report"}
    curves: list = []

    jnd_records = [r for r in records if r.study is Study.JND]
    if jnd_records:
        sessions = []
        for key in sorted({(r.participant_index, r.with_string) for r in jnd_records}):
            participant, with_string = key
            group = [r for r in jnd_records
                     if (r.participant_index, r.with_string) == key]
            block, fit_curves = _psychometric_report(group)
            block = {"participant_index": participant,
                     "with_string": with_string, **block}
            sessions.append(block)
            tag = "string" if with_string else "nostring"
            for _, xs, ys in fit_curves:
                curves.append((f"psychometric_p{participant}_{tag}", xs, ys))
        by_condition = []
        for with_string in (True, False):
            jnds = [s["jnd"] for s in sessions
                    if s["with_string"] == with_string and s["jnd"] is not None]
            if jnds:
                by_condition.append({
                    "with_string": with_string,
                    "n_sessions": len(jnds),
                    "mean_jnd": float(np.mean(jnds)),
                })
        report["jnd"] = {"sessions": sessions, "by_condition": by_condition}

    magnitude_records = [r for r in records if r.study is Study.MAGNITUDE]
    if magnitude_records:
        block, fit_curves = _power_report(magnitude_records)
        curves.extend(("power_pooled", xs, ys) for _, xs, ys in fit_curves)
        magnitude: dict = {"pooled_power": block}
        participants = sorted({r.participant_index for r in magnitude_records})
        per_participant = []
        for participant in participants:
            group = [r for r in magnitude_records
                     if r.participant_index == participant]
            fit_block, _ = _power_report(group)
            per_participant.append({"participant_index": participant, **fit_block})
        magnitude["per_participant"] = per_participant
        if len(participants) >= 2:
            matrix, levels = _magnitude_matrix(magnitude_records)
            anova = rm_anova(matrix)
            pairs = tukey_hsd(matrix, anova)
            magnitude["anova"] = _anova_json(anova, pairs, levels)
            magnitude["anova"]["levels"] = levels
        report["magnitude"] = magnitude

    report["manifest"] = {
        "subcommand": "report",
        "results": args.results,
        "out": args.out,
        "curve_out": args.curve_out,
    }
    if args.curve_out:
        _write_curves(args.curve_out, curves)
    _emit_report(report, args)
    return 0


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stickslip",
        description="Stick-slip pseudo-haptic friction engine and "
                    "psychophysics pipeline.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("synth", help="synthesize a constant-velocity input trace")
    p.add_argument("--velocity", type=float, required=True, help="px/s")
    p.add_argument("--duration", type=float, required=True, help="seconds")
    p.add_argument("--rate", type=float, default=100.0, help="sample rate, Hz")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("simulate", help="run an input trace through the friction model")
    p.add_argument("--trace", required=True, help="input trace (JSON lines)")
    p.add_argument("--params", help="friction parameter file (key = value)")
    p.add_argument("--out", required=True, help="trajectory CSV")
    p.set_defaults(func=cmd_simulate)

    for name, helptext in (("schedule", "build a session's trial schedule"),
                           ("robot-session", "run a full session with a simulated participant")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", help="session config file (key = value)")
        p.add_argument("--study", type=int, choices=(1, 2),
                       help="canonical study preset (1 = discrimination, 2 = magnitude)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--participant", type=int, default=None)
        p.add_argument("--with-string", dest="with_string", type=_parse_bool,
                       default=None, metavar="BOOL")
        p.add_argument("--out", required=True)
        if name == "robot-session":
            p.add_argument("--behavior", required=True,
                           help='e.g. "ideal-logistic(A=4,B=0.5)", '
                                '"power-law(k=1.12,beta=0.204,noise=0.05)", '
                                '"constant(answer=comparison)"')
            p.add_argument("--params", help="friction parameter file")
            p.set_defaults(func=cmd_robot_session)
        else:
            p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("fit", help="fit one model to a results file")
    p.add_argument("--kind", choices=("psychometric", "power", "anova"), required=True)
    p.add_argument("--results", required=True,
                   help="results JSON lines (or CSV matrix for --kind anova)")
    p.add_argument("--out", help="report JSON path (default: stdout)")
    p.add_argument("--curve-out", dest="curve_out",
                   help="CSV of the fitted curve sampled at 100 points")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("report", help="aggregate report over a results file")
    p.add_argument("--results", required=True)
    p.add_argument("--out", help="report JSON path (default: stdout)")
    p.add_argument("--curve-out", dest="curve_out")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (StickSlipError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
