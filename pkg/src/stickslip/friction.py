"""Coulomb stick-slip dynamics for a spring-dragged screen pointer.

The displayed pointer is a virtual mass resting on the screen plane and
coupled to the input position (finger or stylus) through a linear spring
and viscous damper of natural length zero. Static friction pins the
pointer in place until the spring force exceeds the breakaway threshold
``mu_s * m * g``; during the ensuing slide kinetic friction of constant
magnitude ``mu_k * m * g`` resists the motion. The mass is derived from
the damping coefficient and stiffness so the pair is critically damped,
which makes the pointer snap toward the input without oscillating.

All positions are 1-D screen coordinates in pixels, time is in seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .exceptions import InputError, InvalidParameterError

__all__ = [
    "Phase",
    "FrictionParams",
    "InputSample",
    "SimState",
    "derived_mass",
    "initial_state",
    "step",
]


class Phase(Enum):
    STICK = "stick"
    SLIP = "slip"


def derived_mass(k: float, c: float) -> float:
    """Mass that makes a spring-damper pair critically damped.

    Solves ``c = 2*sqrt(m*k)`` for ``m``, so ``m = c**2 / (4*k)``.

    Raises
    ------
    InvalidParameterError
        If ``k`` or ``c`` is not strictly positive.
    """
    if not (k > 0.0) or not math.isfinite(k):
        raise InvalidParameterError(f"stiffness k must be positive and finite, got {k}")
    if not (c > 0.0) or not math.isfinite(c):
        raise InvalidParameterError(f"damping c must be positive and finite, got {c}")
    return c * c / (4.0 * k)


@dataclass(frozen=True)
class FrictionParams:
    """Friction model parameters.

    ``mu_s < mu_k`` is permitted; a zero static coefficient renders a
    surface that never holds the pointer.

    Attributes
    ----------
    mu_s : float
        Static friction coefficient (dimensionless, >= 0).
    mu_k : float
        Kinetic friction coefficient (dimensionless, >= 0).
    k : float
        Spring stiffness, force units per pixel (> 0).
    c : float
        Damping coefficient (> 0). The mass is derived from ``c`` and ``k``.
    g : float
        Gravitational acceleration scaling the normal load.
    string_scale : float
        Multiplier for the virtual string length, pixels per sqrt(force).
    sim_rate : float
        Simulation tick rate in Hz.
    travel_target : float
        Pointer displacement in pixels that completes a stimulus stroke.
    """

    mu_s: float
    mu_k: float = 0.1
    k: float = 0.1
    c: float = 0.2
    g: float = 9.8
    string_scale: float = 2000.0
    sim_rate: float = 100.0
    travel_target: float = 70.0

    def __post_init__(self):
        if not (self.mu_s >= 0.0 and math.isfinite(self.mu_s)):
            raise InvalidParameterError(f"mu_s must be >= 0, got {self.mu_s}")
        if not (self.mu_k >= 0.0 and math.isfinite(self.mu_k)):
            raise InvalidParameterError(f"mu_k must be >= 0, got {self.mu_k}")
        derived_mass(self.k, self.c)
        if not (self.g > 0.0 and math.isfinite(self.g)):
            raise InvalidParameterError(f"g must be positive, got {self.g}")
        if not (self.string_scale >= 0.0 and math.isfinite(self.string_scale)):
            raise InvalidParameterError(f"string_scale must be >= 0, got {self.string_scale}")
        if not (self.sim_rate > 0.0 and math.isfinite(self.sim_rate)):
            raise InvalidParameterError(f"sim_rate must be positive, got {self.sim_rate}")
        if not (self.travel_target > 0.0 and math.isfinite(self.travel_target)):
            raise InvalidParameterError(f"travel_target must be positive, got {self.travel_target}")
        # Integration stability: the critically damped pair decays at
        # omega = c/(2m) = 2k/c, and the stepper is only stable while
        # omega*dt stays clear of its stability boundary near 2.8.
        if self.c * self.sim_rate < self.k:
            raise InvalidParameterError(
                f"sim_rate {self.sim_rate} Hz cannot resolve the decay rate of "
                f"k={self.k}, c={self.c}; need c * sim_rate >= k")

    @property
    def m(self) -> float:
        """Derived pointer mass, ``c**2 / (4*k)``."""
        return derived_mass(self.k, self.c)

    @property
    def f_smax(self) -> float:
        """Breakaway force, ``mu_s * m * g``."""
        return self.mu_s * self.m * self.g

    @property
    def f_k(self) -> float:
        """Kinetic friction magnitude, ``mu_k * m * g``."""
        return self.mu_k * self.m * self.g

    @property
    def dt(self) -> float:
        return 1.0 / self.sim_rate

    @property
    def breakaway_elongation(self) -> float:
        """Spring stretch in pixels at which stick gives way, ``f_smax / k``."""
        return self.f_smax / self.k


@dataclass(frozen=True)
class InputSample:
    """One input-device sample: time (s), position (px), contact flag."""

    t: float
    q: float
    contact: bool = True


@dataclass(frozen=True)
class SimState:
    """Simulator state at one tick.

    ``p`` and ``v`` are the pointer's world position and velocity, ``q``
    is the input position last applied. ``phase == STICK`` implies
    ``v == 0.0`` exactly.
    """

    phase: Phase
    p: float
    v: float
    q: float
    t: float


def initial_state(q0: float, t0: float = 0.0) -> SimState:
    """Pointer at rest on the input point, stuck."""
    if not math.isfinite(q0):
        raise InputError(f"initial position must be finite, got {q0}")
    return SimState(phase=Phase.STICK, p=q0, v=0.0, q=q0, t=t0)


# Slip-phase integration works in the frame of the input point:
# x = p - q, u = dx/dt with the input velocity held constant over the
# tick. The ODE there is m*x'' + c*x' + k*x = -sign(x')*f_k. A relative
# zero crossing re-sticks the pointer only if static friction can hold
# the current spring force; otherwise the slide continues with the
# friction sign following the motion. Because the critically damped
# catch-up approaches relative rest asymptotically, a pointer is also
# arrested once one tick of kinetic-friction impulse can absorb its
# remaining relative momentum (|u| <= f_k*dt/m) and the hold condition
# is met. Without that capture rule the model would never re-stick
# under steady dragging and no stick-slip cycling could occur.

_MAX_EVENTS_PER_TICK = 8


def _accel(x: float, u: float, s: float, m: float, c: float, k: float, f_k: float) -> float:
    return (-k * x - c * u - s * f_k) / m


def _rk4(x: float, u: float, s: float, h: float,
         m: float, c: float, k: float, f_k: float) -> tuple[float, float]:
    # One classical Runge-Kutta step of the constant-forcing linear ODE.
    a1 = _accel(x, u, s, m, c, k, f_k)
    x2 = x + 0.5 * h * u
    u2 = u + 0.5 * h * a1
    a2 = _accel(x2, u2, s, m, c, k, f_k)
    x3 = x + 0.5 * h * u2
    u3 = u + 0.5 * h * a2
    a3 = _accel(x3, u3, s, m, c, k, f_k)
    x4 = x + h * u3
    u4 = u + h * a3
    a4 = _accel(x4, u4, s, m, c, k, f_k)
    x_new = x + h * (u + 2.0 * u2 + 2.0 * u3 + u4) / 6.0
    u_new = u + h * (a1 + 2.0 * a2 + 2.0 * a3 + a4) / 6.0
    return x_new, u_new


def _step_raw(stick: bool, p: float, v: float, q_old: float, q_new: float,
              m: float, c: float, k: float, f_smax: float, f_k: float,
              dt: float) -> tuple[bool, float, float]:
    """Advance one tick on plain floats. Returns (stick, p, v)."""
    if stick:
        # Pointer pinned; only the spring loads as the input moves away.
        return (k * abs(p - q_new) <= f_smax, p, 0.0)

    vq = (q_new - q_old) / dt
    x = p - q_old
    u = v - vq
    h = dt
    for _ in range(_MAX_EVENTS_PER_TICK):
        if u == 0.0:
            force = k * abs(x)
            if force <= f_smax:
                # Static friction holds at the crossing. The pointer
                # froze at elapsed dt - h into the tick; the input
                # finishes its motion, and if that reloads the spring
                # past breakaway the hold is already gone by tick end.
                p_end = q_old + vq * (dt - h) + x
                return (k * abs(p_end - q_new) <= f_smax, p_end, 0.0)
            if force <= f_k:
                # Spring cannot beat kinetic friction: relative rest
                # persists and the pointer comoves with the input.
                # Reachable only when mu_s < mu_k.
                return (False, q_new + x, vq)
            s = -1.0 if x > 0.0 else 1.0
        else:
            s = 1.0 if u > 0.0 else -1.0
        x1, u1 = _rk4(x, u, s, h, m, c, k, f_k)
        crossed = (u > 0.0 and u1 <= 0.0) or (u < 0.0 and u1 >= 0.0)
        if not crossed:
            if abs(u1) <= f_k * dt / m and k * abs(x1) <= f_smax:
                return (True, q_new + x1, 0.0)
            return (False, q_new + x1, u1 + vq)
        # Locate the crossing by linear back-interpolation of the
        # velocity, land there, and resolve the rest state next pass.
        theta = u / (u - u1)
        x = x + theta * h * u * 0.5
        h = h - theta * h
        u = 0.0
    # Event cascade did not settle within the cap; hold relative rest.
    return (False, q_new + x, vq)


def step(state: SimState, params: FrictionParams, sample: InputSample) -> SimState:
    """Advance the simulation one tick toward a new input sample.

    The input position moves linearly from ``state.q`` to ``sample.q``
    over the tick. During stick the pointer stays put and the phase
    flips to slip once the spring force exceeds the breakaway
    threshold. During slip the relative motion is integrated with one
    RK4 step per tick; zero crossings of the relative velocity are
    located within the step and resolved into restick, comoving hold,
    or a friction sign change.

    The sample's timestamp becomes the new state clock, which keeps long
    runs on the exact tick grid instead of accumulating additive drift.

    Raises
    ------
    InputError
        If the new input position or timestamp is not finite.
    """
    if not math.isfinite(sample.q):
        raise InputError(f"input position must be finite, got {sample.q}")
    if not math.isfinite(sample.t):
        raise InputError(f"input timestamp must be finite, got {sample.t}")
    stick, p, v = _step_raw(
        state.phase is Phase.STICK, state.p, state.v, state.q, sample.q,
        params.m, params.c, params.k, params.f_smax, params.f_k, params.dt,
    )
    return SimState(
        phase=Phase.STICK if stick else Phase.SLIP,
        p=p,
        v=v,
        q=sample.q,
        t=sample.t,
    )
