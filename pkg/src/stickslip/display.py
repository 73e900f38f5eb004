"""Pointer and virtual-string presentation.

The string is an optional visual aid: a line segment anchored at the
pointer, pointing toward the input position, whose length grows with
the square root of the spring force. It gives the stretch state away
even while the pointer itself is pinned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import InvalidParameterError
from .friction import FrictionParams, SimState

__all__ = ["DisplayState", "string_length", "compose_display"]


def string_length(spring_force: float, scale: float) -> float:
    """Virtual string length in pixels, ``scale * sqrt(spring_force)``.

    Raises
    ------
    InvalidParameterError
        If ``spring_force`` is negative or not finite.
    """
    if not (spring_force >= 0.0 and math.isfinite(spring_force)):
        raise InvalidParameterError(f"spring force must be >= 0, got {spring_force}")
    return scale * math.sqrt(spring_force)


@dataclass(frozen=True)
class DisplayState:
    """What one frame draws: the pointer and, optionally, the string.

    ``string_from``/``string_to`` span the string segment; ``string_to``
    lies on the ray from the pointer toward the input position. The
    geometry fields are always populated so a consumer can fade the
    string in or out without recomputing; ``string_visible`` alone
    decides whether it is drawn.
    """

    pointer_px: float
    string_visible: bool
    string_len: float
    string_from: float
    string_to: float


def compose_display(state: SimState, params: FrictionParams,
                    with_string: bool, contact: bool = True) -> DisplayState:
    """Project a simulator state onto the screen.

    The pointer is drawn exactly at the simulated position in every
    phase. The string is shown only when the session enables it and the
    input device is in contact.
    """
    force = params.k * abs(state.p - state.q)
    length = string_length(force, params.string_scale)
    direction = 0.0
    if state.q > state.p:
        direction = 1.0
    elif state.q < state.p:
        direction = -1.0
    return DisplayState(
        pointer_px=state.p,
        string_visible=bool(with_string and contact),
        string_len=length,
        string_from=state.p,
        string_to=state.p + direction * length,
    )
