"""Bounded sigmoidal decision rules and their fixed-point structure.

Two families map a mental state m in [0, 1] to a production probability
P(s = 1):

* ``clog``: a probability-to-probability sigmoid whose fixed points are
  pinned at (0, 0) and (1, 1) for every temperature.  It interpolates
  between probability matching (the identity map) and an absolute
  threshold (a step function).
* ``logistic``: the two-choice softmax applied directly to probabilities,
  kept for comparison; its attractors drift away from the corners, so a
  lost variant is never truly extinct under iteration.

Curves are parametrized by the slope angle ``phi_deg`` at the inflection
point rather than by temperature tau.  The angle is bounded, degree sweeps
are natural, and the boundary angles become exact code branches (identity,
step) instead of overflow-prone limits of the exponential form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FAMILIES",
    "STABLE",
    "UNSTABLE",
    "MARGINAL",
    "DecisionParams",
    "FixedPoint",
    "FixedPointContinuum",
    "IDENTITY_CONTINUUM",
    "phi_to_tau",
    "clog_eval",
    "logistic_eval",
    "production_rule",
    "find_fixed_points",
    "tabulate_curve",
]

FAMILIES = ("clog", "logistic")

STABLE = "stable"
UNSTABLE = "unstable"
MARGINAL = "marginal"

# Fixed-point search constants.  All crossings of these maps are simple at
# these scales, so a sign-change scan plus bisection finds every root.
SCAN_INTERVALS = 10_000
BISECT_TOL = 1e-12
SLOPE_TOL = 1e-6
_DIFF_H = 1e-6


def _check_family(family: str) -> None:
    if family not in FAMILIES:
        raise ValueError(f"unknown decision family {family!r}; expected one of {FAMILIES}")


@dataclass(frozen=True)
class DecisionParams:
    """Decision-rule parameters for one individual.

    phi_deg: categoriality, the slope angle in degrees at the curve's
        inflection point.  45 is probability matching and 90 an absolute
        threshold; the logistic family additionally admits angles below 45
        (down to 0, the constant coin flip).
    beta: bias.  Shifts the interior unstable fixed point to 0.5 + beta;
        negative values favor the innovative variant.
    """

    phi_deg: float
    beta: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.phi_deg) and 0.0 <= self.phi_deg <= 90.0):
            raise ValueError(f"phi_deg must lie in [0, 90], got {self.phi_deg!r}")
        if not (math.isfinite(self.beta) and -0.5 <= self.beta <= 0.5):
            raise ValueError(f"beta must lie in [-0.5, 0.5], got {self.beta!r}")


@dataclass(frozen=True)
class FixedPoint:
    """A solution of f(m) = m with its local stability."""

    location: float
    stability: str
    derivative: float


@dataclass(frozen=True)
class FixedPointContinuum:
    """Marker result: the map is the identity, so every m is a fixed point.

    Returned by :func:`find_fixed_points` for the clog at phi = 45 deg,
    where a finite list would be misleading.
    """

    derivative: float = 1.0


IDENTITY_CONTINUUM = FixedPointContinuum()


def phi_to_tau(phi_deg: float, family: str = "clog") -> float:
    """Temperature equivalent of the inflection angle ``phi_deg``.

    clog:     tan(phi) = 1 + 1/(2 tau),  45 <= phi <= 90
    logistic: tan(phi) = 1/(2 tau),       0 <= phi <= 90

    The lower endpoint maps to +inf (identity / constant limit) and 90 deg
    maps to 0 (step limit).
    """
    _check_family(family)
    lo = 45.0 if family == "clog" else 0.0
    if not (lo <= phi_deg <= 90.0):
        raise ValueError(f"{family} angle must lie in [{lo:g}, 90], got {phi_deg!r}")
    if phi_deg == lo:
        return math.inf
    if phi_deg == 90.0:
        return 0.0
    t = math.tan(math.radians(phi_deg))
    return 1.0 / (2.0 * (t - 1.0)) if family == "clog" else 1.0 / (2.0 * t)


def _as_prob(m) -> np.ndarray:
    arr = np.asarray(m, dtype=np.float64)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError("mental state m must be a finite probability in [0, 1]")
    return arr


def _sigmoid(x: np.ndarray) -> np.ndarray:
    # Split at 0 so neither branch exponentiates a large positive argument.
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _clog_kernel(m: np.ndarray, tau: float, beta) -> np.ndarray:
    # Log-odds form L = ln(m/(1-m)) + (2m - 1 - 2 beta)/tau: the direct
    # exponential form overflows once tau is small.  Endpoints pass through
    # exactly, which pins the fixed points at (0,0) and (1,1).
    out = np.array(m, copy=True)
    interior = (m > 0.0) & (m < 1.0)
    mi = m[interior]
    bi = beta[interior] if np.ndim(beta) else beta
    L = np.log(mi / (1.0 - mi)) + (2.0 * mi - 1.0 - 2.0 * bi) / tau
    out[interior] = _sigmoid(L)
    return out


def _step_kernel(m: np.ndarray, beta, at_threshold) -> np.ndarray:
    thr = 0.5 + np.asarray(beta, dtype=np.float64)
    return np.where(m < thr, 0.0, np.where(m > thr, 1.0, at_threshold))


def _clog_values(m: np.ndarray, phi_deg: float, beta) -> np.ndarray:
    if not 45.0 <= phi_deg <= 90.0:
        raise ValueError(f"clog angle must lie in [45, 90], got {phi_deg!r}")
    if phi_deg == 45.0:
        return np.array(m, copy=True)
    if phi_deg == 90.0:
        # Pointwise limit of the clog: the threshold itself stays fixed at
        # 0.5 + beta for every tau, hence also in the limit.
        thr = 0.5 + np.asarray(beta, dtype=np.float64)
        return _step_kernel(m, beta, thr)
    return _clog_kernel(m, phi_to_tau(phi_deg, "clog"), beta)


def _logistic_values(m: np.ndarray, phi_deg: float, beta) -> np.ndarray:
    if not 0.0 <= phi_deg <= 90.0:
        raise ValueError(f"logistic angle must lie in [0, 90], got {phi_deg!r}")
    if phi_deg == 0.0:
        return np.full_like(m, 0.5)
    if phi_deg == 90.0:
        # Unlike the clog, the logistic limit takes the value 0.5 at the
        # threshold (both exponentials tie).
        return _step_kernel(m, beta, 0.5)
    tau = phi_to_tau(phi_deg, "logistic")
    return _sigmoid((2.0 * m - 1.0 - 2.0 * np.asarray(beta, dtype=np.float64)) / tau)


def clog_eval(m, params: DecisionParams):
    """clog production probability for mental state ``m``.

    Interior angles evaluate m e^((m-beta)/tau) / (m e^((m-beta)/tau)
    + (1-m) e^((1-m+beta)/tau)) in a numerically stable log-odds form;
    phi = 45 returns m exactly and phi = 90 the step limit.  ``m`` may be
    a scalar or an array; the result matches.
    """
    arr = _as_prob(m)
    out = _clog_values(arr, params.phi_deg, params.beta)
    return float(out) if np.ndim(m) == 0 else out


def logistic_eval(m, params: DecisionParams):
    """Two-choice softmax probability for mental state ``m``.

    Equivalent to 1 / (1 + e^((1 - 2m + 2 beta)/tau)); phi = 0 is the
    constant 0.5 and phi = 90 the step at 0.5 + beta with value 0.5 at the
    threshold.
    """
    arr = _as_prob(m)
    out = _logistic_values(arr, params.phi_deg, params.beta)
    return float(out) if np.ndim(m) == 0 else out


def production_rule(phi_deg: float, beta):
    """Vectorized m -> P(s = 1) closure for the clog, angle resolved once.

    ``beta`` may be a scalar or a per-node array.  The returned callable
    assumes its argument is already a valid probability vector (the
    simulation maintains that invariant) and skips revalidation; it is the
    per-cycle hot path.
    """
    if not 45.0 <= phi_deg <= 90.0:
        raise ValueError(f"clog angle must lie in [45, 90], got {phi_deg!r}")
    if phi_deg == 45.0:
        return lambda m: m
    if phi_deg == 90.0:
        thr = 0.5 + np.asarray(beta, dtype=np.float64)
        return lambda m: np.where(m < thr, 0.0, np.where(m > thr, 1.0, thr))
    tau = phi_to_tau(phi_deg, "clog")
    return lambda m: _clog_kernel(m, tau, beta)


def _scalar_map(family: str, params: DecisionParams):
    values = _clog_values if family == "clog" else _logistic_values
    return lambda x: float(values(np.float64(x), params.phi_deg, params.beta))


def _bisect_root(g, a: float, b: float) -> float:
    # g has opposite signs at a and b.  The width floor handles maps with a
    # jump crossing (phi = 90), where |g| never gets small.
    ga = g(a)
    for _ in range(200):
        mid = 0.5 * (a + b)
        gm = g(mid)
        if abs(gm) < BISECT_TOL or (b - a) < 1e-15:
            return mid
        if (gm < 0.0) == (ga < 0.0):
            a, ga = mid, gm
        else:
            b = mid
    return 0.5 * (a + b)


def _map_derivative(f, x: float) -> float:
    h = _DIFF_H
    if x - h < 0.0:
        return (f(x + h) - f(x)) / h
    if x + h > 1.0:
        return (f(x) - f(x - h)) / h
    return (f(x + h) - f(x - h)) / (2.0 * h)


def _classify(derivative: float) -> str:
    if abs(derivative) < 1.0 - SLOPE_TOL:
        return STABLE
    if abs(derivative) > 1.0 + SLOPE_TOL:
        return UNSTABLE
    return MARGINAL


def find_fixed_points(family: str, params: DecisionParams):
    """All solutions of f(m) = m on [0, 1], with stability.

    Roots are located by a sign-change scan of f(m) - m on a uniform grid
    of ``SCAN_INTERVALS`` cells followed by bisection; derivatives use a
    central finite difference (one-sided at the endpoints).  A fixed point
    is stable when |f'| < 1 - SLOPE_TOL and unstable when |f'| >
    1 + SLOPE_TOL; in the dead band it is reported as marginal.

    For the clog at phi = 45 every point is fixed; the distinguished
    :data:`IDENTITY_CONTINUUM` is returned instead of a list.
    """
    _check_family(family)
    if family == "clog" and params.phi_deg == 45.0:
        return IDENTITY_CONTINUUM

    values = _clog_values if family == "clog" else _logistic_values
    grid = np.arange(SCAN_INTERVALS + 1) / SCAN_INTERVALS
    g = values(grid, params.phi_deg, params.beta) - grid

    f = _scalar_map(family, params)
    roots: list[float] = []
    for k in np.flatnonzero(g == 0.0):
        roots.append(float(grid[k]))
    sign = np.sign(g)
    for k in np.flatnonzero(sign[:-1] * sign[1:] < 0.0):
        roots.append(_bisect_root(lambda x: f(x) - x, float(grid[k]), float(grid[k + 1])))

    roots.sort()
    merged: list[float] = []
    for r in roots:
        if not merged or r - merged[-1] > 1e-9:
            merged.append(r)

    out = []
    for r in merged:
        d = _map_derivative(f, r)
        out.append(FixedPoint(location=r, stability=_classify(d), derivative=d))
    return out


def tabulate_curve(family: str, params: DecisionParams, n_points: int) -> np.ndarray:
    """(m, f(m)) table on a uniform inclusive grid over [0, 1].

    Returns an array of shape (n_points, 2), ready for CSV export.
    """
    _check_family(family)
    if n_points < 2:
        raise ValueError(f"n_points must be at least 2, got {n_points!r}")
    grid = np.arange(n_points) / (n_points - 1)
    values = _clog_values if family == "clog" else _logistic_values
    return np.column_stack([grid, values(grid, params.phi_deg, params.beta)])
