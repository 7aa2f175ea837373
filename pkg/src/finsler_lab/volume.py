"""Busemann-Hausdorff and Holmes-Thompson volume factors of (alpha, beta)-metrics.

Both measures are constant multiples of the Riemannian volume of alpha at each
point, with a factor depending only on ``b = ||beta||_alpha``::

    f_BH(b) = I_n / int_0^pi sin^(n-2) t / phi(b cos t)^n dt
    f_HT(b) = int_0^pi T(b cos t) sin^(n-2) t dt / I_n

where ``I_n = int_0^pi sin^(n-2) t dt``. Integrals use composite
Gauss-Legendre with node doubling until successive estimates agree to
``rel_tol``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .metric_family import PhiFamily, T_values, validity_check

__all__ = [
    "QuadratureSpec",
    "VolumeFactorResult",
    "MEASURES",
    "sin_power_integral",
    "f_BH",
    "f_HT",
    "factor",
]

MEASURES = ("BH", "HT")
# Consecutive refinements growing by this factor count toward divergence.
_GROWTH = 10.0
_GROWTH_STREAK = 2


@dataclass(frozen=True)
class QuadratureSpec:
    nodes: int = 64
    max_refinements: int = 6
    rel_tol: float = 1e-12
    clip_epsilon: float = 1e-8  # relative to b; singular families only

    def __post_init__(self) -> None:
        if self.nodes < 8:
            raise DomainError(f"nodes must be >= 8, got {self.nodes}")
        if self.max_refinements < 1:
            raise DomainError("max_refinements must be >= 1")
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be positive")
        if self.clip_epsilon < 0:
            raise DomainError("clip_epsilon must be non-negative")


@dataclass(frozen=True)
class VolumeFactorResult:
    """A volume factor with its refinement diagnostics.

    When ``diverged`` is set, ``value`` is the last finite partial estimate
    and ``est_error`` is ``inf``.
    """

    value: float
    est_error: float
    refinements_used: int
    clipped: bool
    diverged: bool
    converged: bool = True


def sin_power_integral(n: int) -> float:
    """Exact int_0^pi sin^(n-2) t dt by the Wallis recursion."""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    k = n - 2
    value = math.pi if k % 2 == 0 else 2.0
    for j in range(2 if k % 2 == 0 else 3, k + 1, 2):
        value *= (j - 1) / j
    return value


@lru_cache(maxsize=64)
def _gauss_legendre(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(nodes)


def _panel_rule(panels: tuple[tuple[float, float], ...], nodes: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = _gauss_legendre(nodes)
    ts, ws = [], []
    for a, c in panels:
        half = 0.5 * (c - a)
        ts.append(a + half * (x + 1.0))
        ws.append(half * w)
    return np.concatenate(ts), np.concatenate(ws)


def _panels(family: PhiFamily) -> tuple[tuple[float, float], ...]:
    # For singular phi the integrand switches off at t = pi/2 (b cos t = 0).
    if family.singular:
        return ((0.0, 0.5 * math.pi), (0.5 * math.pi, math.pi))
    return ((0.0, math.pi),)


def _s_mask(family: PhiFamily, s: np.ndarray, b: float, quad: QuadratureSpec) -> np.ndarray:
    if not family.singular:
        return np.ones_like(s, dtype=bool)
    return s > quad.clip_epsilon * b


def _check_inputs(family: PhiFamily, n: int, b: float) -> None:
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    report = validity_check(family, n, b)
    if not report.passed:
        raise DomainError(
            f"{family.name} is not an admissible (alpha, beta)-metric at n={n}, b={b} "
            f"(min of validity expression {report.min_value:.6g})"
        )


def _refine(integrand, family: PhiFamily, quad: QuadratureSpec) -> tuple[float, float, int, bool, bool]:
    """Node-doubling driver. ``integrand(t)`` returns (numerator, denominator) sample arrays.

    Returns (ratio, est_error, refinements_used, converged, diverged). Either
    integral growing by more than 10x on two consecutive doublings flags
    divergence.
    """
    panels = _panels(family)

    def estimate(nodes: int) -> tuple[float, float]:
        t, w = _panel_rule(panels, nodes)
        num, den = integrand(t)
        return float(w @ num), float(w @ den)

    nodes = quad.nodes
    prev = estimate(nodes)
    streak = 0
    last_finite = prev
    err = math.inf
    for k in range(1, quad.max_refinements + 1):
        nodes *= 2
        cur = estimate(nodes)
        if not all(map(math.isfinite, cur)):
            return _ratio(last_finite), math.inf, k, False, True
        last_finite = cur
        grew = any(abs(c) > _GROWTH * abs(p) and abs(p) > 0 for c, p in zip(cur, prev))
        streak = streak + 1 if grew else 0
        if streak >= _GROWTH_STREAK:
            return _ratio(cur), math.inf, k, False, True
        value, old = _ratio(cur), _ratio(prev)
        err = abs(value - old)
        if err <= quad.rel_tol * abs(value):
            return value, err, k, True, False
        prev = cur
    return _ratio(prev), err, quad.max_refinements, False, False


def _ratio(pair: tuple[float, float]) -> float:
    num, den = pair
    if den == 0.0:
        return math.inf
    return num / den


def f_BH(family: PhiFamily, n: int, b: float, quad: QuadratureSpec | None = None) -> VolumeFactorResult:
    """Busemann-Hausdorff factor: Euclidean unit-ball volume over the F-unit-ball volume."""
    quad = quad or QuadratureSpec()
    _check_inputs(family, n, b)

    def integrand(t: np.ndarray):
        w = np.sin(t) ** (n - 2)
        s = b * np.cos(t)
        mask = _s_mask(family, s, b, quad)
        inv = np.zeros_like(s)
        inv[mask] = family.phi(s[mask]) ** (-float(n))
        return w, w * inv

    value, err, used, converged, diverged = _refine(integrand, family, quad)
    if not diverged and not math.isfinite(value):
        diverged, err = True, math.inf
    return VolumeFactorResult(value, err, used, family.singular, diverged, converged)


def f_HT(family: PhiFamily, n: int, b: float, quad: QuadratureSpec | None = None) -> VolumeFactorResult:
    """Holmes-Thompson factor: mean of T(b cos t) against sin^(n-2) t."""
    quad = quad or QuadratureSpec()
    _check_inputs(family, n, b)

    def integrand(t: np.ndarray):
        w = np.sin(t) ** (n - 2)
        s = b * np.cos(t)
        mask = _s_mask(family, s, b, quad)
        T = np.zeros_like(s)
        T[mask] = T_values(family, n, b, s[mask])
        return w * T, w

    value, err, used, converged, diverged = _refine(integrand, family, quad)
    return VolumeFactorResult(value, err, used, family.singular, diverged, converged)


def factor(measure: str, family: PhiFamily, n: int, b: float, quad: QuadratureSpec | None = None) -> VolumeFactorResult:
    m = measure.upper()
    if m == "BH":
        return f_BH(family, n, b, quad)
    if m == "HT":
        return f_HT(family, n, b, quad)
    raise DomainError(f"unknown measure {measure!r}; expected one of {MEASURES}")

