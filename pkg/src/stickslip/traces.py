"""Input traces, trajectory traces, and their file formats.

Input traces are JSON-lines files, one object per sample:

    {"t_ms": 0, "x_px": 0.0, "contact": 1}

with strictly increasing integer millisecond timestamps. Trajectory
traces are CSV with header ``t,q,p,phase,spring_force,string_len`` and
six decimal places on every numeric column, one row per simulation
tick.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

from .display import string_length
from .exceptions import InputError, TraceParseError, TraceValidationError
from .friction import FrictionParams, InputSample, Phase, SimState, initial_state, step

__all__ = [
    "TraceRow",
    "TrajectoryTrace",
    "synth_constant_velocity",
    "load_trace",
    "save_trace",
    "simulate_trace",
    "save_trajectory",
    "load_trajectory",
]


@dataclass(frozen=True)
class TraceRow:
    t: float
    q: float
    p: float
    phase: Phase
    spring_force: float
    string_len: float


@dataclass(frozen=True)
class TrajectoryTrace:
    """Simulated pointer trajectory, one row per tick."""

    rows: tuple[TraceRow, ...]

    def __len__(self) -> int:
        return len(self.rows)


def synth_constant_velocity(velocity: float, duration: float,
                            sim_rate: float = 100.0) -> list[InputSample]:
    """Synthesize a constant-velocity stroke starting at the origin.

    Produces ``duration * sim_rate + 1`` samples on the tick grid, all
    in contact. Timestamps are computed by division, not accumulation,
    so they stay exact on the millisecond grid at the default rate.
    """
    if not (duration > 0.0 and math.isfinite(duration)):
        raise InputError(f"duration must be positive, got {duration}")
    if not (sim_rate > 0.0 and math.isfinite(sim_rate)):
        raise InputError(f"sim_rate must be positive, got {sim_rate}")
    if not math.isfinite(velocity):
        raise InputError(f"velocity must be finite, got {velocity}")
    n = int(round(duration * sim_rate))
    return [InputSample(t=i / sim_rate, q=velocity * (i / sim_rate), contact=True)
            for i in range(n + 1)]


def load_trace(path: str | os.PathLike) -> list[InputSample]:
    """Read an input trace, enforcing the format rules.

    Raises
    ------
    TraceParseError
        On a malformed line, with its 1-based line number.
    TraceValidationError
        On a non-monotone timestamp, naming the offending line.
    """
    samples: list[InputSample] = []
    last_ms: int | None = None
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read trace file {os.fspath(path)}: {e}") from e
    with fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                obj = json.loads(text)
            except json.JSONDecodeError as e:
                raise TraceParseError(lineno, f"invalid JSON: {e.msg}") from e
            if not isinstance(obj, dict):
                raise TraceParseError(lineno, "expected an object per line")
            try:
                t_ms = obj["t_ms"]
                x_px = obj["x_px"]
                contact = obj["contact"]
            except KeyError as e:
                raise TraceParseError(lineno, f"missing field {e.args[0]!r}") from e
            if not isinstance(t_ms, int) or isinstance(t_ms, bool):
                raise TraceParseError(lineno, f"t_ms must be an integer, got {t_ms!r}")
            if isinstance(x_px, bool) or not isinstance(x_px, (int, float)):
                raise TraceParseError(lineno, f"x_px must be a number, got {x_px!r}")
            if contact not in (0, 1):
                raise TraceParseError(lineno, f"contact must be 0 or 1, got {contact!r}")
            if not math.isfinite(float(x_px)):
                raise TraceValidationError(lineno, f"x_px must be finite, got {x_px!r}")
            if last_ms is not None and t_ms <= last_ms:
                raise TraceValidationError(
                    lineno, f"t_ms must be strictly increasing, got {t_ms} after {last_ms}")
            last_ms = t_ms
            samples.append(InputSample(t=t_ms / 1000.0, q=float(x_px), contact=bool(contact)))
    if not samples:
        raise InputError(f"{os.fspath(path)}: trace file holds no samples")
    return samples


def save_trace(samples: list[InputSample], path: str | os.PathLike) -> None:
    """Write an input trace. Timestamps are quantized to whole ms."""
    with open(path, "w", encoding="utf-8") as fh:
        for s in samples:
            obj = {"t_ms": int(round(s.t * 1000.0)), "x_px": s.q,
                   "contact": 1 if s.contact else 0}
            fh.write(json.dumps(obj, separators=(",", ":")) + "\n")


def _interp_position(samples: list[InputSample], t: float, hint: int) -> tuple[float, bool, int]:
    # Linear interpolation of position onto the tick grid; contact is a
    # left-continuous step function of the bracketing sample.
    i = hint
    n = len(samples)
    while i + 1 < n and samples[i + 1].t <= t:
        i += 1
    if i + 1 >= n:
        return samples[-1].q, samples[-1].contact, i
    a, b = samples[i], samples[i + 1]
    span = b.t - a.t
    w = (t - a.t) / span if span > 0 else 0.0
    return a.q + w * (b.q - a.q), a.contact, i


def simulate_trace(samples: list[InputSample], params: FrictionParams,
                   initial: SimState | None = None) -> TrajectoryTrace:
    """Run the simulator over an input trace resampled to the tick grid.

    The pointer starts stuck on the first sample unless an explicit
    initial state is given. Row 0 is the initial state; each later row
    is the state after one tick.

    Raises
    ------
    InputError
        If the trace is empty.
    TraceValidationError
        If timestamps are not strictly increasing.
    """
    if not samples:
        raise InputError("input trace is empty")
    for i in range(1, len(samples)):
        if samples[i].t <= samples[i - 1].t:
            raise TraceValidationError(
                i + 1, f"timestamps must be strictly increasing, got "
                f"{samples[i].t} after {samples[i - 1].t}")
    dt = params.dt
    t0 = samples[0].t
    n_ticks = int(math.floor((samples[-1].t - t0) / dt + 1e-9))
    state = initial if initial is not None else initial_state(samples[0].q, t0)

    def row_of(state: SimState) -> TraceRow:
        force = params.k * abs(state.p - state.q)
        return TraceRow(t=state.t, q=state.q, p=state.p, phase=state.phase,
                        spring_force=force,
                        string_len=string_length(force, params.string_scale))

    rows = [row_of(state)]
    hint = 0
    for i in range(1, n_ticks + 1):
        t = t0 + i * dt
        q, contact, hint = _interp_position(samples, t, hint)
        state = step(state, params, InputSample(t=t, q=q, contact=contact))
        rows.append(row_of(state))
    return TrajectoryTrace(rows=tuple(rows))


def save_trajectory(trace: TrajectoryTrace, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("t,q,p,phase,spring_force,string_len\n")
        for r in trace.rows:
            fh.write(f"{r.t:.6f},{r.q:.6f},{r.p:.6f},{r.phase.value},"
                     f"{r.spring_force:.6f},{r.string_len:.6f}\n")


def load_trajectory(path: str | os.PathLike) -> TrajectoryTrace:
    """Read a trajectory CSV written by :func:`save_trajectory`."""
    rows: list[TraceRow] = []
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read trajectory file {os.fspath(path)}: {e}") from e
    with fh:
        header = fh.readline().strip()
        if header != "t,q,p,phase,spring_force,string_len":
            raise TraceParseError(1, f"unexpected header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            text = line.strip()
            if not text:
                continue
            parts = text.split(",")
            if len(parts) != 6:
                raise TraceParseError(lineno, f"expected 6 columns, got {len(parts)}")
            try:
                phase = Phase(parts[3])
                rows.append(TraceRow(
                    t=float(parts[0]), q=float(parts[1]), p=float(parts[2]),
                    phase=phase, spring_force=float(parts[4]),
                    string_len=float(parts[5])))
            except ValueError as e:
                raise TraceParseError(lineno, str(e)) from e
    return TrajectoryTrace(rows=tuple(rows))
