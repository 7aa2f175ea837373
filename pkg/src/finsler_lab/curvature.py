"""Mean curvature of geodesic spheres and its horosphere limit.

The mean curvature of the sphere of radius t is the logarithmic derivative
of the polar volume density, evaluated here by central differences. The
r -> infinity limit is extracted by an exponential-approach fit on H^n and
by Richardson extrapolation in 1/t on R^n.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from .base_space import ModelSpace, riemannian_density, sphere_directions
from .errors import DomainError, NumericError, UnsupportedOperationError
from .harmonic import DensityProfile, FinslerConstruction, finsler_density

__all__ = [
    "CurvatureReport",
    "mean_curvature",
    "riemannian_mean_curvature",
    "extrapolate_limit",
    "horosphere_limit",
    "RESIDUAL_THRESHOLD",
]

RESIDUAL_THRESHOLD = 1e-6
# Tail variation below this (relative) is indistinguishable from difference noise.
_FLAT_TAIL = 1e-9


@dataclass
class CurvatureReport:
    t_values: list[float]
    pi_values: list[float]
    pi_infinity: float | None
    extrapolation: str  # "none" | "richardson" | "exponential-fit"
    residual: float
    diagnostic: str = ""
    extra: dict = field(default_factory=dict)


def default_step(t: float) -> float:
    return 1e-4 * max(1.0, t)


def _profile_log_diff(profile: DensityProfile, t: float, h: float, column: int) -> float:
    radii = profile.radii
    lo = np.flatnonzero(np.isclose(radii, t - h, rtol=0, atol=1e-12 * max(1.0, t)))
    hi = np.flatnonzero(np.isclose(radii, t + h, rtol=0, atol=1e-12 * max(1.0, t)))
    if lo.size == 0 or hi.size == 0:
        raise DomainError(f"profile has no samples at t -/+ h = {t - h!r}, {t + h!r}")
    a, b = profile.values[lo[0], column], profile.values[hi[0], column]
    if not (a > 0 and b > 0):
        raise NumericError(f"non-positive density near t={t!r}")
    return (math.log(b) - math.log(a)) / (2 * h)


def mean_curvature(
    density: Callable[[float], float] | DensityProfile,
    t: float,
    h: float | None = None,
    column: int = 0,
) -> float:
    """[log sigma(t + h) - log sigma(t - h)] / (2h).

    ``density`` is either a callable r -> sigma(r) or a sampled
    :class:`DensityProfile`, in which case t - h and t + h must be sample
    radii and ``column`` picks the direction.
    """
    h = default_step(t) if h is None else h
    if not h > 0:
        raise DomainError(f"step must be positive, got {h!r}")
    if t - h <= 0:
        raise DomainError(f"step h={h!r} reaches past r=0 at t={t!r}")
    if isinstance(density, DensityProfile):
        return _profile_log_diff(density, t, h, column)
    a, b = density(t - h), density(t + h)
    if not (a > 0 and b > 0) or not (math.isfinite(a) and math.isfinite(b)):
        raise NumericError(f"density must be positive and finite near t={t!r}, got {a!r}, {b!r}")
    return (math.log(b) - math.log(a)) / (2 * h)


def riemannian_mean_curvature(space: ModelSpace, t: float, h: float | None = None) -> float:
    return mean_curvature(lambda r: riemannian_density(space, r), t, h)


def _exp_model(t, pi_inf, amp, lam, t0):
    return pi_inf + amp * np.exp(-lam * (t - t0))


def _exponential_limit(t: np.ndarray, pi: np.ndarray) -> tuple[float | None, str, float, str]:
    k = max(3, len(t) // 3)
    tt, pp = t[-k:], pi[-k:]
    spread = float(np.ptp(pp))
    if spread <= _FLAT_TAIL * max(1.0, abs(float(pp[-1]))):
        return float(pp[-1]), "none", spread, "tail flat to difference noise"
    t0 = float(tt[0])
    p0 = (float(pp[-1]), float(pp[0] - pp[-1]), 1.0)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OptimizeWarning)
            popt, _ = curve_fit(
                lambda x, a, b, c: _exp_model(x, a, b, c, t0),
                tt,
                pp,
                p0=p0,
                bounds=([-np.inf, -np.inf, 1e-3], [np.inf, np.inf, 50.0]),
                maxfev=20000,
                x_scale="jac",
                ftol=1e-15,
                xtol=1e-15,
                gtol=1e-15,
            )
    except (RuntimeError, ValueError) as exc:
        return None, "exponential-fit", math.inf, f"fit failed: {exc}"
    resid = float(np.abs(_exp_model(tt, *popt, t0) - pp).max())
    return float(popt[0]), "exponential-fit", resid, f"rate {popt[2]:.6g}"


def _richardson_limit(pi_of_t: Callable[[float], float], r_min: float, r_max: float):
    """Richardson table in u = 1/t with u halving from 1/r_min toward 1/r_max."""
    ts = [r_max]
    while ts[-1] / 2 >= r_min:
        ts.append(ts[-1] / 2)
    if len(ts) < 3:
        return None, "richardson", math.inf, "window too narrow for three levels", ts
    ts.reverse()  # coarse (small t, large u) to fine
    table = [[pi_of_t(t) for t in ts]]
    while len(table[-1]) > 1:
        prev, p = table[-1], len(table)
        factor = 2.0**p
        table.append([(factor * prev[i + 1] - prev[i]) / (factor - 1) for i in range(len(prev) - 1)])
    best = table[-1][0]
    resid = abs(best - table[-2][-1])
    return best, "richardson", resid, f"{len(ts)} levels", ts


def extrapolate_limit(
    kappa: int,
    pi_of_t: Callable[[float], float],
    t: np.ndarray,
    pi: np.ndarray,
) -> tuple[float | None, str, float, str]:
    """Extract lim_{t -> inf} Pi(t); returns (limit or None, method, residual, diagnostic)."""
    if kappa == 1:
        raise UnsupportedOperationError("horospheres do not exist on the compact sphere model")
    if kappa == -1:
        value, method, resid, diag = _exponential_limit(t, pi)
    else:
        value, method, resid, diag, _ = _richardson_limit(pi_of_t, float(t[0]), float(t[-1]))
    if value is None or not resid < RESIDUAL_THRESHOLD:
        return None, method, resid, f"no stable limit ({diag}; residual {resid:.3g})"
    return value, method, resid, diag


def horosphere_limit(
    c: FinslerConstruction, r_min: float = 1.0, r_max: float = 20.0, samples: int = 60
) -> CurvatureReport:
    """Mean curvature of geodesic spheres on [r_min, r_max] and its extrapolated limit.

    Both the Finsler curvature and the Riemannian one of the base are
    computed; the latter is stored under ``extra``.
    """
    space = c.space
    if space.compact:
        raise UnsupportedOperationError(f"{space.name} is compact; horosphere limit undefined")
    if not (0 < r_min < r_max <= space.max_radius - default_step(r_max)):
        raise DomainError(f"need 0 < r_min < r_max within the chart-safe range, got [{r_min}, {r_max}]")
    if samples < 3:
        raise DomainError("samples must be >= 3")
    direction = sphere_directions(space.n, 1)[0]

    def pi_f(t: float) -> float:
        return mean_curvature(lambda r: finsler_density(c, r, direction), t)

    def pi_a(t: float) -> float:
        return riemannian_mean_curvature(space, t)

    t = np.linspace(r_min, r_max, samples)
    pf = np.array([pi_f(x) for x in t])
    pa = np.array([pi_a(x) for x in t])
    value, method, resid, diag = extrapolate_limit(space.kappa, pi_f, t, pf)
    a_value, a_method, a_resid, _ = extrapolate_limit(space.kappa, pi_a, t, pa)
    return CurvatureReport(
        t_values=t.tolist(),
        pi_values=pf.tolist(),
        pi_infinity=value,
        extrapolation=method,
        residual=resid,
        diagnostic=diag,
        extra={
            "pi_alpha_values": pa.tolist(),
            "pi_alpha_infinity": a_value,
            "pi_alpha_residual": a_resid,
            "pi_alpha_extrapolation": a_method,
        },
    )
