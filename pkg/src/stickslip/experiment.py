"""Two-interval psychophysics sessions over the friction renderer.

A session presents pairs of strokes that differ only in the static
friction coefficient. In a discrimination (JND) session the participant
strokes the standard and the comparison and reports which felt more
frictional; in a magnitude session the participant dials in a perceived
intensity ratio with six increment buttons and confirms. Trials advance
automatically once the displayed pointer has moved ``travel_target``
pixels from its starting point, and the pointer resets to the center
between stimuli.

Results are JSON-lines files, one self-describing record per trial,
append-only while a session runs.
"""

from __future__ import annotations

import json
import math
import os
import warnings
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .exceptions import InputError, InvalidParameterError, TraceParseError

__all__ = [
    "Study",
    "StimulusOrder",
    "Stage",
    "Press",
    "SessionConfig",
    "TrialPhase",
    "TrialRecord",
    "SessionRecord",
    "PointerTick",
    "Choice",
    "Adjust",
    "Confirm",
    "RESPONSE_STANDARD",
    "RESPONSE_COMPARISON",
    "discrimination_config",
    "magnitude_config",
    "shuffle_rng",
    "build_schedule",
    "advance_trial",
    "apply_adjustment",
    "tally_jnd_proportions",
    "record_line",
    "write_results",
    "append_results",
    "load_results",
    "write_session_config",
    "read_session_config",
]

RESPONSE_STANDARD = "standard"
RESPONSE_COMPARISON = "comparison"


class Study(Enum):
    JND = "jnd"
    MAGNITUDE = "magnitude"


class StimulusOrder(Enum):
    STANDARD_FIRST = "standard_first"
    COMPARISON_FIRST = "comparison_first"


class Stage(Enum):
    PRESENT_STANDARD = "present_standard"
    PRESENT_COMPARISON = "present_comparison"
    AWAIT_RESPONSE = "await_response"
    DONE = "done"


class Press(Enum):
    """Magnitude adjustment buttons, valued in exact hundredths."""

    DOWN_10 = -10
    DOWN_5 = -5
    DOWN_1 = -1
    UP_1 = 1
    UP_5 = 5
    UP_10 = 10

    @property
    def hundredths(self) -> int:
        return self.value


@dataclass(frozen=True)
class SessionConfig:
    study: Study
    standard_mu_s: float
    comparison_levels: tuple[float, ...]
    reps: int
    with_string: bool
    seed: int
    participant_index: int = 0

    def __post_init__(self):
        if not isinstance(self.study, Study):
            raise InvalidParameterError(f"study must be a Study, got {self.study!r}")
        if not (self.standard_mu_s >= 0.0 and math.isfinite(self.standard_mu_s)):
            raise InvalidParameterError(f"standard_mu_s must be >= 0, got {self.standard_mu_s}")
        if not self.comparison_levels:
            raise InvalidParameterError("comparison_levels must be non-empty")
        for lv in self.comparison_levels:
            if not (lv >= 0.0 and math.isfinite(lv)):
                raise InvalidParameterError(f"comparison level must be >= 0, got {lv}")
        if self.reps < 1:
            raise InvalidParameterError(f"reps must be >= 1, got {self.reps}")
        if self.seed < 0:
            raise InvalidParameterError(f"seed must be >= 0, got {self.seed}")
        if self.participant_index < 0:
            raise InvalidParameterError(
                f"participant_index must be >= 0, got {self.participant_index}")


def discrimination_config(*, with_string: bool, seed: int,
                          participant_index: int = 0) -> SessionConfig:
    """Canonical 2AFC discrimination session: standard surface mu_s = 0,
    six comparison levels spanning 0..1, ten repetitions (60 trials)."""
    return SessionConfig(
        study=Study.JND,
        standard_mu_s=0.0,
        comparison_levels=(0.0, 0.2, 0.4, 0.6, 0.8, 1.0),
        reps=10,
        with_string=with_string,
        seed=seed,
        participant_index=participant_index,
    )


def magnitude_config(*, with_string: bool = True, seed: int,
                     participant_index: int = 0) -> SessionConfig:
    """Canonical magnitude-estimation session: standard mu_s = 0.7,
    seven comparison levels 0.4..1.0, five repetitions (35 trials)."""
    return SessionConfig(
        study=Study.MAGNITUDE,
        standard_mu_s=0.7,
        comparison_levels=(0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0),
        reps=5,
        with_string=with_string,
        seed=seed,
        participant_index=participant_index,
    )


@dataclass(frozen=True)
class TrialRecord:
    """Everything one trial produced.

    ``press_log`` holds the magnitude adjustments as signed integer
    hundredths so the final ratio ``1 + sum/100`` is exact. ``response``
    is a choice string for discrimination trials, the final ratio for
    magnitude trials, and None for unrun schedule stubs.
    """

    trial_index: int
    comparison_mu_s: float
    stimulus_order: StimulusOrder = StimulusOrder.STANDARD_FIRST
    direction: int = 1
    response: str | float | None = None
    press_log: tuple[int, ...] = ()
    duration_standard_s: float = 0.0
    duration_comparison_s: float = 0.0
    duration_response_s: float = 0.0


@dataclass(frozen=True)
class SessionRecord:
    """A trial record plus the session context it was collected in."""

    study: Study
    participant_index: int
    with_string: bool
    standard_mu_s: float
    trial: TrialRecord


def shuffle_rng(seed: int, participant_index: int) -> np.random.Generator:
    # Distinct participants get independent, reproducible streams.
    return np.random.default_rng([seed, participant_index])


def build_schedule(config: SessionConfig) -> list[TrialRecord]:
    """Balanced, seeded trial order: every comparison level exactly
    ``reps`` times, shuffled by the per-participant stream."""
    items = [lv for lv in config.comparison_levels for _ in range(config.reps)]
    rng = shuffle_rng(config.seed, config.participant_index)
    order = rng.permutation(len(items))
    return [TrialRecord(trial_index=i, comparison_mu_s=items[j])
            for i, j in enumerate(order)]


# --- trial state machine ---------------------------------------------------

@dataclass(frozen=True)
class PointerTick:
    """One simulation tick's displayed pointer position."""

    p: float


@dataclass(frozen=True)
class Choice:
    answer: str


@dataclass(frozen=True)
class Adjust:
    press: Press


@dataclass(frozen=True)
class Confirm:
    pass


@dataclass(frozen=True)
class TrialPhase:
    """Progress of the trial currently on screen."""

    stage: Stage = Stage.PRESENT_STANDARD
    p_start: float = 0.0
    progress: float = 0.0
    press_log: tuple[int, ...] = ()
    response: str | float | None = None


def advance_trial(phase: TrialPhase, event, *, study: Study,
                  travel_target: float) -> TrialPhase:
    """Advance the trial state machine by one event.

    Pointer ticks accumulate travel progress as displacement from the
    stimulus start; a presentation completes only once progress reaches
    ``travel_target``. Response events arriving during presentation are
    rejected by returning the phase unchanged.
    """
    stage = phase.stage
    if isinstance(event, PointerTick):
        if stage in (Stage.PRESENT_STANDARD, Stage.PRESENT_COMPARISON):
            progress = abs(event.p - phase.p_start)
            if progress >= travel_target:
                if stage is Stage.PRESENT_STANDARD:
                    # Next stimulus begins recentered.
                    return replace(phase, stage=Stage.PRESENT_COMPARISON,
                                   progress=0.0, p_start=0.0)
                return replace(phase, stage=Stage.AWAIT_RESPONSE, progress=0.0)
            return replace(phase, progress=progress)
        return phase
    if isinstance(event, Choice):
        if stage is Stage.AWAIT_RESPONSE and study is Study.JND:
            if event.answer not in (RESPONSE_STANDARD, RESPONSE_COMPARISON):
                raise InputError(f"unknown answer {event.answer!r}")
            return replace(phase, stage=Stage.DONE, response=event.answer)
        return phase
    if isinstance(event, Adjust):
        if stage is Stage.AWAIT_RESPONSE and study is Study.MAGNITUDE:
            return replace(phase, press_log=phase.press_log + (event.press.hundredths,))
        return phase
    if isinstance(event, Confirm):
        if stage is Stage.AWAIT_RESPONSE and study is Study.MAGNITUDE:
            ratio = (100 + sum(phase.press_log)) / 100.0
            return replace(phase, stage=Stage.DONE, response=ratio)
        return phase
    raise InputError(f"unknown trial event {event!r}")


def apply_adjustment(ratio: float, press: Press) -> float:
    """Apply one button press to an intensity ratio.

    Accumulates in integer hundredths, so repeated presses stay exact:
    ten DOWN_1 presses from 1.0 give 0.90, not 0.8999...
    """
    hundredths = round(ratio * 100.0) + press.hundredths
    return hundredths / 100.0


def tally_jnd_proportions(records: list[TrialRecord],
                          levels: tuple[float, ...] | None = None) -> dict[float, float]:
    """Fraction of trials judged more frictional than the standard,
    per comparison level.

    Levels with no responded trials are excluded with a warning rather
    than reported as zero.
    """
    if levels is None:
        levels = tuple(sorted({r.comparison_mu_s for r in records}))
    out: dict[float, float] = {}
    for lv in levels:
        answered = [r for r in records
                    if r.comparison_mu_s == lv
                    and r.response in (RESPONSE_STANDARD, RESPONSE_COMPARISON)]
        if not answered:
            warnings.warn(f"comparison level {lv} has no responded trials; excluded",
                          stacklevel=2)
            continue
        hits = sum(1 for r in answered if r.response == RESPONSE_COMPARISON)
        out[lv] = hits / len(answered)
    return out


# --- results files ----------------------------------------------------------

def record_line(study: Study, participant_index: int, with_string: bool,
                standard_mu_s: float, record: TrialRecord) -> str:
    """Canonical one-line JSON encoding of a trial record.

    Key order and compact separators are part of the format so that
    independently produced files can be compared byte for byte.
    """
    obj = {
        "study": study.value,
        "participant_index": participant_index,
        "with_string": with_string,
        "standard_mu_s": standard_mu_s,
        "trial_index": record.trial_index,
        "comparison_mu_s": record.comparison_mu_s,
        "stimulus_order": record.stimulus_order.value,
        "direction": record.direction,
        "response": record.response,
        "press_log": list(record.press_log),
        "duration_standard_s": record.duration_standard_s,
        "duration_comparison_s": record.duration_comparison_s,
        "duration_response_s": record.duration_response_s,
    }
    return json.dumps(obj, separators=(",", ":"))


def write_results(path: str | os.PathLike, config: SessionConfig,
                  records: list[TrialRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(record_line(config.study, config.participant_index,
                                 config.with_string, config.standard_mu_s, r) + "\n")


def append_results(path: str | os.PathLike, config: SessionConfig,
                   records: list[TrialRecord]) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        for r in records:
            fh.write(record_line(config.study, config.participant_index,
                                 config.with_string, config.standard_mu_s, r) + "\n")


def load_results(path: str | os.PathLike) -> list[SessionRecord]:
    out: list[SessionRecord] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                obj = json.loads(text)
            except json.JSONDecodeError as e:
                raise TraceParseError(lineno, f"invalid JSON: {e.msg}") from e
            try:
                trial = TrialRecord(
                    trial_index=obj["trial_index"],
                    comparison_mu_s=obj["comparison_mu_s"],
                    stimulus_order=StimulusOrder(obj["stimulus_order"]),
                    direction=obj["direction"],
                    response=obj["response"],
                    press_log=tuple(obj["press_log"]),
                    duration_standard_s=obj["duration_standard_s"],
                    duration_comparison_s=obj["duration_comparison_s"],
                    duration_response_s=obj["duration_response_s"],
                )
                out.append(SessionRecord(
                    study=Study(obj["study"]),
                    participant_index=obj["participant_index"],
                    with_string=obj["with_string"],
                    standard_mu_s=obj["standard_mu_s"],
                    trial=trial,
                ))
            except (KeyError, ValueError) as e:
                raise TraceParseError(lineno, f"bad record: {e}") from e
    return out


# --- session config files ---------------------------------------------------

def write_session_config(config: SessionConfig, path: str | os.PathLike) -> None:
    levels = ", ".join(repr(lv) for lv in config.comparison_levels)
    text = (
        f"study = {config.study.value}\n"
        f"standard_mu_s = {config.standard_mu_s!r}\n"
        f"comparison_levels = {levels}\n"
        f"reps = {config.reps}\n"
        f"with_string = {'true' if config.with_string else 'false'}\n"
        f"seed = {config.seed}\n"
        f"participant_index = {config.participant_index}\n"
    )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def read_session_config(path: str | os.PathLike) -> SessionConfig:
    """Parse a key = value session config file. Unknown keys and missing
    fields are errors; '#' starts a comment."""
    fields: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise TraceParseError(lineno, f"expected key = value, got {text!r}")
            key, _, value = text.partition("=")
            fields[key.strip()] = value.strip()
    required = {"study", "standard_mu_s", "comparison_levels", "reps",
                "with_string", "seed", "participant_index"}
    unknown = set(fields) - required
    if unknown:
        raise InvalidParameterError(f"unknown config keys: {sorted(unknown)}")
    missing = required - set(fields)
    if missing:
        raise InvalidParameterError(f"missing config keys: {sorted(missing)}")
    try:
        study = Study(fields["study"])
        levels = tuple(float(part.strip())
                       for part in fields["comparison_levels"].split(",") if part.strip())
        flag = fields["with_string"].lower()
        if flag not in ("true", "false"):
            raise ValueError(f"with_string must be true or false, got {flag!r}")
        return SessionConfig(
            study=study,
            standard_mu_s=float(fields["standard_mu_s"]),
            comparison_levels=levels,
            reps=int(fields["reps"]),
            with_string=(flag == "true"),
            seed=int(fields["seed"]),
            participant_index=int(fields["participant_index"]),
        )
    except ValueError as e:
        raise InvalidParameterError(str(e)) from e
