"""Simulated participants for closed-loop validation of the pipeline.

A responder plays the participant: it strokes each stimulus at constant
speed (by driving the friction model through the trial state machine)
and answers from a known ground-truth response rule. Running a fitted
analysis over robot data recovers the rule's parameters, which exercises
every seam of the stack without a human in the loop.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace

import numpy as np

from .exceptions import InputError, InvalidParameterError
from .experiment import (
    Adjust,
    Choice,
    Confirm,
    PointerTick,
    Press,
    RESPONSE_COMPARISON,
    RESPONSE_STANDARD,
    SessionConfig,
    Stage,
    Study,
    TrialPhase,
    TrialRecord,
    advance_trial,
    build_schedule,
)
from .friction import FrictionParams, InputSample, initial_state, step

__all__ = [
    "IdealLogisticResponder",
    "ConstantResponder",
    "PowerLawResponder",
    "parse_behavior",
    "response_rng",
    "run_robot_session",
]

# Sub-stream index separating response sampling from schedule shuffling.
_RESPONSE_STREAM = 1

# Hard cap on simulated stroke time, in ticks (60 s at 100 Hz).
_MAX_STROKE_TICKS = 6000


def response_rng(seed: int, participant_index: int) -> np.random.Generator:
    return np.random.default_rng([seed, participant_index, _RESPONSE_STREAM])


@dataclass(frozen=True)
class IdealLogisticResponder:
    """Answers 'comparison' with logistic probability
    1/(1 + exp(-slope*(level - midpoint)))."""

    slope: float
    midpoint: float
    study = Study.JND

    def choose(self, comparison_mu_s: float, rng: np.random.Generator) -> str:
        prob = 1.0 / (1.0 + math.exp(-self.slope * (comparison_mu_s - self.midpoint)))
        return RESPONSE_COMPARISON if rng.random() < prob else RESPONSE_STANDARD


@dataclass(frozen=True)
class ConstantResponder:
    """Always gives the same answer; degenerate data for edge-case tests."""

    answer: str = RESPONSE_COMPARISON
    study = Study.JND

    def choose(self, comparison_mu_s: float, rng: np.random.Generator) -> str:
        return self.answer


@dataclass(frozen=True)
class PowerLawResponder:
    """Reports perceived intensity scale * level**exponent (plus optional
    noise in the log domain), dialed in as presses in integer hundredths."""

    scale: float
    exponent: float
    noise: float = 0.0
    study = Study.MAGNITUDE

    def adjust(self, comparison_mu_s: float, rng: np.random.Generator) -> list[Press]:
        if comparison_mu_s <= 0.0:
            raise InputError("power-law responder needs a positive comparison level")
        log_ratio = math.log(self.scale) + self.exponent * math.log(comparison_mu_s)
        # Draw unconditionally so the stream advances identically at noise=0.
        log_ratio += self.noise * rng.standard_normal()
        target = round(math.exp(log_ratio) * 100.0)
        return _decompose_hundredths(int(target) - 100)


def _decompose_hundredths(delta: int) -> list[Press]:
    """Greedy button sequence whose hundredths sum to delta exactly."""
    presses: list[Press] = []
    remaining = abs(delta)
    for size, down, up in ((10, Press.DOWN_10, Press.UP_10),
                           (5, Press.DOWN_5, Press.UP_5),
                           (1, Press.DOWN_1, Press.UP_1)):
        button = down if delta < 0 else up
        count, remaining = divmod(remaining, size)
        presses.extend([button] * count)
    return presses


_BEHAVIOR_RE = re.compile(r"^\s*([a-z-]+)\s*\(([^()]*)\)\s*$")


def parse_behavior(text: str):
    """Build a responder from a compact spec string.

    Examples: "ideal-logistic(A=4,B=0.5)", "power-law(k=1.16,beta=0.23)",
    "power-law(k=1,beta=0.3,noise=0.05)", "constant(answer=comparison)".
    """
    m = _BEHAVIOR_RE.match(text)
    if not m:
        raise InvalidParameterError(f"cannot parse behavior {text!r}")
    name, arg_text = m.group(1), m.group(2)
    args: dict[str, str] = {}
    for part in arg_text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise InvalidParameterError(f"behavior argument {part!r} is not key=value")
        key, _, value = part.partition("=")
        args[key.strip().lower()] = value.strip()
    try:
        if name == "ideal-logistic":
            responder = IdealLogisticResponder(slope=float(args.pop("a")),
                                               midpoint=float(args.pop("b")))
        elif name == "power-law":
            noise = float(args.pop("noise", "0"))
            responder = PowerLawResponder(scale=float(args.pop("k")),
                                          exponent=float(args.pop("beta")), noise=noise)
        elif name == "constant":
            answer = args.pop("answer", RESPONSE_COMPARISON)
            if answer not in (RESPONSE_STANDARD, RESPONSE_COMPARISON):
                raise InvalidParameterError(f"unknown constant answer {answer!r}")
            responder = ConstantResponder(answer=answer)
        else:
            raise InvalidParameterError(f"unknown behavior {name!r}")
    except KeyError as e:
        raise InvalidParameterError(f"behavior {name!r} missing argument {e}") from e
    except ValueError as e:
        raise InvalidParameterError(f"behavior {name!r}: {e}") from e
    if args:
        # Leftovers after popping the known keys are typos.
        raise InvalidParameterError(
            f"behavior {name!r} got unknown arguments: {sorted(args)}")
    return responder


def _stroke_ticks(mu_s: float, direction: int, params: FrictionParams) -> int:
    """Ticks of constant-speed finger travel until the displayed pointer
    has moved the travel target. Pure function of (mu_s, direction)."""
    p = replace(params, mu_s=mu_s)
    state = initial_state(0.0)
    phase = TrialPhase(stage=Stage.PRESENT_STANDARD)
    speed = 100.0  # px/s finger speed for the simulated stroke
    for tick in range(1, _MAX_STROKE_TICKS + 1):
        q = direction * speed * tick * p.dt
        state = step(state, p, InputSample(t=tick * p.dt, q=q))
        after = advance_trial(phase, PointerTick(state.p), study=Study.JND,
                              travel_target=p.travel_target)
        if after.stage is not phase.stage:
            return tick
        phase = after
    raise InputError(
        f"stroke at mu_s={mu_s} did not reach the travel target "
        f"within {_MAX_STROKE_TICKS} ticks")


def run_robot_session(config: SessionConfig, params: FrictionParams,
                      responder) -> list[TrialRecord]:
    """Run a whole session headless and return the completed records.

    Each trial simulates both strokes through the friction model and the
    trial state machine, then lets the responder answer. Strokes are
    deterministic per (mu_s, direction), so repeated stimuli reuse the
    first simulation's tick count.
    """
    if responder.study is not config.study:
        raise InvalidParameterError(
            f"responder answers {responder.study.value} trials "
            f"but the session is {config.study.value}")
    rng = response_rng(config.seed, config.participant_index)
    schedule = build_schedule(config)
    stroke_cache: dict[tuple[float, int], int] = {}

    def ticks_for(mu_s: float, direction: int) -> int:
        key = (mu_s, direction)
        if key not in stroke_cache:
            stroke_cache[key] = _stroke_ticks(mu_s, direction, params)
        return stroke_cache[key]

    records: list[TrialRecord] = []
    for stub in schedule:
        direction = stub.direction
        n_standard = ticks_for(config.standard_mu_s, direction)
        n_comparison = ticks_for(stub.comparison_mu_s, direction)
        phase = TrialPhase(stage=Stage.AWAIT_RESPONSE)
        if config.study is Study.JND:
            answer = responder.choose(stub.comparison_mu_s, rng)
            phase = advance_trial(phase, Choice(answer), study=config.study,
                                  travel_target=params.travel_target)
        else:
            for press in responder.adjust(stub.comparison_mu_s, rng):
                phase = advance_trial(phase, Adjust(press), study=config.study,
                                      travel_target=params.travel_target)
            phase = advance_trial(phase, Confirm(), study=config.study,
                                  travel_target=params.travel_target)
        records.append(replace(
            stub,
            response=phase.response,
            press_log=phase.press_log,
            duration_standard_s=n_standard / params.sim_rate,
            duration_comparison_s=n_comparison / params.sim_rate,
            duration_response_s=0.0,
        ))
    return records
