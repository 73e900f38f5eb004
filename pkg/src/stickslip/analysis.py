"""Model fitting and statistics for session results.

Covers the standard desk analyses for the two study designs: logistic
psychometric fits with PSE and JND, Stevens power-law fits on magnitude
ratios, one-way repeated-measures ANOVA, and Tukey HSD post-hoc pairs
against studentized-range critical values from the sibling module.

Reference outcomes from the original user studies of this technique,
kept here for context when eyeballing robot-session reports: JND of the
static friction coefficient was about 0.29 with the string and 0.77
without it; the magnitude study gave a Stevens fit of scale 1.12 and
exponent 0.204 with F(6, 54) = 4.22, p = 0.0012 across levels. Those
numbers come from human participants and are not recomputable here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import betainc, expit

from . import srange
from .exceptions import InvalidParameterError, UndefinedJndError

__all__ = [
    "PsychometricFit",
    "PowerLawFit",
    "AnovaResult",
    "TukeyPair",
    "fit_psychometric",
    "logistic",
    "jnd",
    "pse",
    "fit_power_law",
    "rm_anova",
    "tukey_hsd",
]

_GRID_SIZE = 16
_SLOPE_GRID = (0.1, 20.0)


@dataclass(frozen=True)
class PsychometricFit:
    """Least-squares logistic fit 1/(1 + exp(-slope*(x - midpoint))).

    The midpoint is the PSE; the model passes through 0.5 there by
    construction. ``identifiable`` is False when the data cannot pin the
    curve down (all proportions equal), in which case midpoint is nan.
    """

    slope: float
    midpoint: float
    sse: float
    identifiable: bool = True


@dataclass(frozen=True)
class PowerLawFit:
    """Power function ratio = scale * level**exponent, fit in log space."""

    scale: float
    exponent: float
    r_squared: float


@dataclass(frozen=True)
class TukeyPair:
    """One post-hoc comparison between two condition columns."""

    first: int
    second: int
    difference: float
    q_value: float
    significant_05: bool
    significant_01: bool


@dataclass(frozen=True)
class AnovaResult:
    f_value: float
    df1: int
    df2: int
    p_value: float
    ms_error: float
    n_subjects: int
    condition_means: tuple[float, ...]
    pairs: tuple[TukeyPair, ...] = ()


def logistic(x, slope: float, midpoint: float):
    return expit(slope * (np.asarray(x, dtype=float) - midpoint))


def _as_points(points, name: str) -> tuple[np.ndarray, np.ndarray]:
    pts = list(points)
    if not pts:
        raise InvalidParameterError(f"{name} got no points")
    xs = np.array([p[0] for p in pts], dtype=float)
    ys = np.array([p[1] for p in pts], dtype=float)
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise InvalidParameterError(f"{name} requires finite points")
    return xs, ys


def fit_psychometric(points) -> PsychometricFit:
    """Fit the logistic to (level, proportion) pairs by least squares.

    Deterministic: the objective is evaluated on a fixed 16 x 16 grid of
    starting values (slopes log-spaced over 0.1..20, midpoints spanning
    the level range) and the best cell seeds a Nelder-Mead refinement.
    """
    xs, ys = _as_points(points, "fit_psychometric")
    if np.any(ys < 0.0) or np.any(ys > 1.0):
        raise InvalidParameterError("proportions must lie in [0, 1]")
    if len(np.unique(xs)) < 3:
        raise InvalidParameterError("need at least 3 distinct levels to fit")
    if np.ptp(ys) == 0.0:
        # Flat data: any midpoint fits equally well once the slope is 0.
        return PsychometricFit(slope=0.0, midpoint=math.nan, sse=0.0,
                               identifiable=False)

    def sse_of(params) -> float:
        resid = logistic(xs, params[0], params[1]) - ys
        return float(resid @ resid)

    slopes = np.geomspace(_SLOPE_GRID[0], _SLOPE_GRID[1], _GRID_SIZE)
    midpoints = np.linspace(float(xs.min()), float(xs.max()), _GRID_SIZE)
    best = min(((s, b) for s in slopes for b in midpoints), key=sse_of)
    result = minimize(sse_of, x0=np.array(best), method="Nelder-Mead",
                      options={"xatol": 1e-10, "fatol": 1e-16,
                               "maxiter": 20000, "maxfev": 20000})
    slope, midpoint = (float(v) for v in result.x)
    return PsychometricFit(slope=slope, midpoint=midpoint, sse=float(result.fun))


def jnd(fit: PsychometricFit) -> float:
    """Just noticeable difference: level gap between the 75% point and
    the PSE, which for the logistic is ln(3)/slope exactly."""
    if not fit.identifiable:
        raise UndefinedJndError("JND undefined for a non-identifiable fit")
    if fit.slope <= 0.0:
        raise UndefinedJndError(f"JND undefined for slope {fit.slope}")
    return math.log(3.0) / fit.slope


def pse(fit: PsychometricFit) -> float:
    """Point of subjective equality: the fitted midpoint (nan when the
    fit is non-identifiable)."""
    return fit.midpoint


def fit_power_law(points) -> PowerLawFit:
    """Fit ratio = scale * level**exponent by linear regression in
    log-log space. All levels and ratios must be positive."""
    xs, ys = _as_points(points, "fit_power_law")
    if np.any(xs <= 0.0) or np.any(ys <= 0.0):
        raise InvalidParameterError("power-law fit needs positive levels and ratios")
    if len(xs) < 2:
        raise InvalidParameterError("need at least 2 points to fit")
    if np.ptp(xs) == 0.0:
        raise InvalidParameterError("levels are all equal; exponent is undefined")
    lx, ly = np.log(xs), np.log(ys)
    dx = lx - lx.mean()
    exponent = float(dx @ (ly - ly.mean()) / (dx @ dx))
    intercept = float(ly.mean() - exponent * lx.mean())
    resid = ly - (intercept + exponent * lx)
    ss_res = float(resid @ resid)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return PowerLawFit(scale=math.exp(intercept), exponent=exponent,
                       r_squared=r_squared)


def _check_matrix(data) -> np.ndarray:
    m = np.asarray(data, dtype=float)
    if m.ndim != 2:
        raise InvalidParameterError(f"expected a 2-D matrix, got shape {m.shape}")
    n, k = m.shape
    if n < 2 or k < 2:
        raise InvalidParameterError(
            f"need at least 2 subjects and 2 conditions, got {n} x {k}")
    if not np.all(np.isfinite(m)):
        raise InvalidParameterError("matrix has missing or non-finite cells")
    return m


def rm_anova(data) -> AnovaResult:
    """One-way repeated-measures ANOVA on a subjects x conditions matrix.

    F is the condition mean square over the condition-by-subject
    interaction mean square; the p-value comes from the regularized
    incomplete beta form of the F distribution's survival function.
    """
    m = _check_matrix(data)
    n, k = m.shape
    grand = m.mean()
    cond_means = m.mean(axis=0)
    subj_means = m.mean(axis=1)
    ss_cond = n * float(np.sum((cond_means - grand) ** 2))
    ss_subj = k * float(np.sum((subj_means - grand) ** 2))
    ss_total = float(np.sum((m - grand) ** 2))
    ss_err = ss_total - ss_cond - ss_subj
    df1, df2 = k - 1, (k - 1) * (n - 1)
    ms_err = ss_err / df2
    if ss_cond == 0.0:
        f_value, p_value = 0.0, 1.0
    elif ss_err <= 0.0:
        f_value, p_value = math.inf, 0.0
    else:
        f_value = (ss_cond / df1) / ms_err
        p_value = float(betainc(0.5 * df2, 0.5 * df1,
                                df2 / (df2 + df1 * f_value)))
    return AnovaResult(f_value=f_value, df1=df1, df2=df2, p_value=p_value,
                       ms_error=ms_err, n_subjects=n,
                       condition_means=tuple(float(v) for v in cond_means))


def tukey_hsd(data, anova: AnovaResult) -> tuple[TukeyPair, ...]:
    """All pairwise Tukey HSD comparisons for the ANOVA's conditions.

    q = |mean_i - mean_j| / sqrt(MS_error / n), judged against
    studentized-range critical values at the 0.05 and 0.01 levels.
    """
    m = _check_matrix(data)
    n, k = m.shape
    if (n, k) != (anova.n_subjects, len(anova.condition_means)):
        raise InvalidParameterError("matrix shape does not match the ANOVA result")
    crit_05 = srange.critical_value(0.95, k, anova.df2)
    crit_01 = srange.critical_value(0.99, k, anova.df2)
    denom = math.sqrt(anova.ms_error / n) if anova.ms_error > 0.0 else 0.0
    pairs = []
    for i in range(k):
        for j in range(i + 1, k):
            diff = anova.condition_means[j] - anova.condition_means[i]
            if denom > 0.0:
                q = abs(diff) / denom
            else:
                q = 0.0 if diff == 0.0 else math.inf
            pairs.append(TukeyPair(first=i, second=j, difference=diff,
                                   q_value=q,
                                   significant_05=q > crit_05,
                                   significant_01=q > crit_01))
    return tuple(pairs)
