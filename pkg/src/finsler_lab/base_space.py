"""Constant-curvature model spaces and 1-forms on them.

Charts:

* ``kappa = 0``: Cartesian coordinates, ``alpha_ij = delta_ij``.
* ``kappa = -1``: Poincare ball of radius 1, ``alpha_ij = 4 / (1 - |x|^2)^2 delta_ij``;
  distance from the origin ``r = 2 artanh |x|``.
* ``kappa = +1``: stereographic projection from the south pole,
  ``alpha_ij = 4 / (1 + |x|^2)^2 delta_ij``; ``r = 2 arctan |x|``.

Geodesics through the origin are coordinate rays in all three charts, so the
exponential map at the origin is available in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import DomainError, NumericError

__all__ = [
    "ModelSpace",
    "OneForm",
    "KillingReport",
    "RadialNormResult",
    "euclidean",
    "hyperbolic",
    "sphere",
    "constant_form",
    "chart_form",
    "radial_form",
    "riemannian_density",
    "norm_beta",
    "norm_at_distance",
    "christoffel",
    "covariant_derivative",
    "killing_check",
    "radial_norm_check",
    "sphere_directions",
]

DEFAULT_STEP = 1e-5
# Beyond this geodesic radius the Poincare chart loses too many digits (1 - |x| ~ 1e-10).
HYPERBOLIC_SAFE_RADIUS = 24.0


@dataclass(frozen=True)
class ModelSpace:
    """Simply connected space form of dimension ``n`` and curvature ``kappa``."""

    n: int
    kappa: int

    def __post_init__(self) -> None:
        if self.n < 2:
            raise DomainError(f"dimension must be >= 2, got {self.n}")
        if self.kappa not in (-1, 0, 1):
            raise DomainError(f"kappa must be -1, 0 or +1, got {self.kappa}")

    @property
    def compact(self) -> bool:
        return self.kappa == 1

    @property
    def name(self) -> str:
        return {0: f"R^{self.n}", -1: f"H^{self.n}", 1: f"S^{self.n}"}[self.kappa]

    @property
    def max_radius(self) -> float:
        """Largest geodesic radius from the origin the chart can represent safely."""
        return {0: math.inf, -1: HYPERBOLIC_SAFE_RADIUS, 1: math.pi}[self.kappa]

    def _point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DomainError(f"expected a point with {self.n} coordinates, got shape {x.shape}")
        if self.kappa == -1 and x @ x >= 1.0:
            raise DomainError(f"point {x.tolist()} lies outside the Poincare ball")
        return x

    def conformal_factor(self, x) -> float:
        x = self._point(x)
        q = float(x @ x)
        if self.kappa == 0:
            return 1.0
        if self.kappa == -1:
            return 2.0 / (1.0 - q)
        return 2.0 / (1.0 + q)

    def chart_metric(self, x) -> np.ndarray:
        """alpha_ij at chart point ``x``."""
        c = self.conformal_factor(x)
        return c * c * np.eye(self.n)

    def inverse_metric(self, x) -> np.ndarray:
        g = self.chart_metric(x)
        try:
            inv = np.linalg.inv(g)
        except np.linalg.LinAlgError as exc:
            raise NumericError(f"chart metric singular at {np.asarray(x).tolist()}") from exc
        if not np.all(np.isfinite(inv)):
            raise NumericError(f"chart metric singular at {np.asarray(x).tolist()}")
        return inv

    def chart_radius(self, r: float) -> float:
        """Euclidean chart norm of the point at geodesic distance ``r`` from the origin."""
        self._check_radius(r)
        if self.kappa == 0:
            return float(r)
        if self.kappa == -1:
            return math.tanh(r / 2.0)
        return math.tan(r / 2.0)

    def distance_from_origin(self, x) -> float:
        x = self._point(x)
        rho = float(np.linalg.norm(x))
        if self.kappa == 0:
            return rho
        if self.kappa == -1:
            return 2.0 * math.atanh(rho)
        return 2.0 * math.atan(rho)

    def distance_gradient(self, x) -> np.ndarray:
        """Chart components of dr at ``x`` (undefined at the origin)."""
        x = self._point(x)
        rho = float(np.linalg.norm(x))
        if rho == 0.0:
            raise DomainError("distance function is not differentiable at the origin")
        if self.kappa == 0:
            scale = 1.0
        elif self.kappa == -1:
            scale = 2.0 / (1.0 - rho * rho)
        else:
            scale = 2.0 / (1.0 + rho * rho)
        return scale * x / rho

    def exp_origin(self, r: float, direction) -> np.ndarray:
        """Chart point reached by the unit-speed geodesic from the origin along ``direction``."""
        d = np.asarray(direction, dtype=float)
        norm = np.linalg.norm(d)
        if d.shape != (self.n,) or norm == 0:
            raise DomainError("direction must be a non-zero vector of the space dimension")
        return self.chart_radius(r) * d / norm

    def _check_radius(self, r: float) -> None:
        if not (r >= 0 and r <= self.max_radius) or (self.kappa == 1 and r >= math.pi):
            raise DomainError(f"radius {r!r} outside the chart-safe range of {self.name}")


def euclidean(n: int) -> ModelSpace:
    return ModelSpace(n, 0)


def hyperbolic(n: int) -> ModelSpace:
    return ModelSpace(n, -1)


def sphere(n: int) -> ModelSpace:
    return ModelSpace(n, 1)


@dataclass(frozen=True, eq=False)
class OneForm:
    """A 1-form beta, given by chart components or by a radial profile.

    For ``kind == "radial_profile"`` the form is ``beta = h(r) dr`` with ``r``
    the distance from the chart origin, so ``||beta||_alpha = |h(r)|``.
    """

    kind: str
    components: Callable[[np.ndarray], np.ndarray] | None = None
    profile: Callable[[float], float] | None = None
    label: str = ""

    def __post_init__(self) -> None:
        if self.kind == "chart_components" and self.components is None:
            raise DomainError("chart_components form needs a components map")
        if self.kind == "radial_profile" and self.profile is None:
            raise DomainError("radial_profile form needs a profile h(r)")
        if self.kind not in ("chart_components", "radial_profile"):
            raise DomainError(f"unknown 1-form kind {self.kind!r}")

    def chart_components(self, space: ModelSpace, x) -> np.ndarray:
        """b_i at chart point ``x`` (pull-back through dr for radial profiles)."""
        x = space._point(x)
        if self.kind == "chart_components":
            b = np.asarray(self.components(x), dtype=float)
        elif not np.any(x):
            b = np.zeros(space.n)
        else:
            b = float(self.profile(space.distance_from_origin(x))) * space.distance_gradient(x)
        if b.shape != (space.n,) or not np.all(np.isfinite(b)):
            raise NumericError(f"1-form components invalid at {x.tolist()}: {b!r}")
        return b


def constant_form(coefficients, label: str = "") -> OneForm:
    c = np.array(coefficients, dtype=float)
    return OneForm("chart_components", components=lambda x: c.copy(), label=label or f"const{c.tolist()}")


def chart_form(func: Callable[[np.ndarray], np.ndarray], label: str = "") -> OneForm:
    return OneForm("chart_components", components=func, label=label)


def radial_form(h: Callable[[float], float], label: str = "") -> OneForm:
    return OneForm("radial_profile", profile=h, label=label)


def riemannian_density(space: ModelSpace, r: float) -> float:
    """Polar volume density l(r) = S_kappa(r)^(n-1)."""
    if not r > 0 or (space.kappa == 1 and r >= math.pi):
        raise DomainError(f"density requires 0 < r{' < pi' if space.kappa == 1 else ''}, got {r!r}")
    if space.kappa == 0:
        s = r
    elif space.kappa == -1:
        s = math.sinh(r)
    else:
        s = math.sin(r)
    return s ** (space.n - 1)


def norm_beta(space: ModelSpace, beta: OneForm, x) -> float:
    """||beta||_alpha = sqrt(alpha^ij b_i b_j) at chart point ``x``."""
    x = space._point(x)
    if beta.kind == "radial_profile" and not np.any(x):
        return abs(float(beta.profile(0.0)))
    b = beta.chart_components(space, x)
    value = float(b @ space.inverse_metric(x) @ b)
    return math.sqrt(max(value, 0.0))


def norm_at_distance(space: ModelSpace, beta: OneForm, r: float, direction) -> float:
    """||beta||_alpha at exp(r * direction); exact |h(r)| for radial profiles."""
    if beta.kind == "radial_profile":
        space._check_radius(r)
        return abs(float(beta.profile(r)))
    return norm_beta(space, beta, space.exp_origin(r, direction))


def _fd_step(x: np.ndarray, step: float | None) -> float:
    base = DEFAULT_STEP if step is None else step
    if not base > 0:
        raise DomainError(f"finite-difference step must be positive, got {step!r}")
    return base * max(1.0, float(np.max(np.abs(x))))


def _partials(func: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: float, richardson: bool):
    """Stack of central-difference partials d func / d x^k along axis 0."""

    def central(hh: float) -> np.ndarray:
        out = []
        for k in range(x.size):
            e = np.zeros_like(x)
            e[k] = hh
            out.append((np.asarray(func(x + e)) - np.asarray(func(x - e))) / (2 * hh))
        return np.stack(out)

    d = central(h)
    if richardson:
        d = (4.0 * central(h / 2) - d) / 3.0
    return d


def christoffel(space: ModelSpace, x, step: float | None = None, richardson: bool = False) -> np.ndarray:
    """Levi-Civita symbols Gamma[k, i, j] from central differences of the chart metric."""
    x = space._point(x)
    h = _fd_step(x, step)
    dg = _partials(space.chart_metric, x, h, richardson)  # dg[l, i, j] = d_l alpha_ij
    ginv = space.inverse_metric(x)
    # Gamma^k_ij = 1/2 alpha^kl (d_i alpha_lj + d_j alpha_li - d_l alpha_ij)
    lower = 0.5 * (np.einsum("ilj->lij", dg) + np.einsum("jli->lij", dg) - dg)
    gamma = np.einsum("kl,lij->kij", ginv, lower)
    if not np.all(np.isfinite(gamma)):
        raise NumericError(f"non-finite Christoffel symbols at {x.tolist()}")
    return gamma


def covariant_derivative(
    space: ModelSpace, beta: OneForm, x, step: float | None = None, richardson: bool = False
) -> np.ndarray:
    """Matrix D[i, j] = b_{i|j} = d_j b_i - Gamma^k_ij b_k."""
    x = space._point(x)
    h = _fd_step(x, step)
    db = _partials(lambda p: beta.chart_components(space, p), x, h, richardson)  # db[j, i]
    gamma = christoffel(space, x, step, richardson)
    b = beta.chart_components(space, x)
    return db.T - np.einsum("kij,k->ij", gamma, b)


@dataclass(frozen=True)
class KillingReport:
    max_sym: float
    max_antisym: float
    norm_spread: float
    samples: int
    step: float

    def is_killing(self, tol: float = 1e-8) -> bool:
        return self.max_sym < tol

    def is_constant_killing(self, tol: float = 1e-8) -> bool:
        return self.max_sym < tol and self.norm_spread < tol


def killing_check(
    space: ModelSpace, beta: OneForm, samples, step: float | None = None
) -> KillingReport:
    """Symmetric and antisymmetric parts of b_{i|j} and the spread of ||beta|| over samples.

    Both parts are reported: the symmetric part vanishes for Killing forms,
    the antisymmetric part for closed ones.
    """
    pts = [np.asarray(p, dtype=float) for p in samples]
    if not pts:
        raise DomainError("killing_check needs at least one sample point")
    max_sym = max_anti = 0.0
    norms = []
    for p in pts:
        try:
            d = covariant_derivative(space, beta, p, step)
            norms.append(norm_beta(space, beta, p))
        except NumericError as exc:
            raise NumericError(f"at sample {p.tolist()}: {exc}") from exc
        max_sym = max(max_sym, float(np.abs(0.5 * (d + d.T)).max()))
        max_anti = max(max_anti, float(np.abs(0.5 * (d - d.T)).max()))
    return KillingReport(
        max_sym=max_sym,
        max_antisym=max_anti,
        norm_spread=float(max(norms) - min(norms)),
        samples=len(pts),
        step=DEFAULT_STEP if step is None else step,
    )


def sphere_directions(n: int, count: int) -> np.ndarray:
    """Deterministic, roughly uniform unit vectors in R^n (rows)."""
    if count < 1:
        raise DomainError("direction count must be positive")
    if n == 2:
        a = 2 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(a), np.sin(a)])
    if n == 3:
        # Fibonacci lattice
        k = np.arange(count) + 0.5
        z = 1 - 2 * k / count
        phi = np.pi * (1 + 5**0.5) * k
        rho = np.sqrt(1 - z * z)
        return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    rng = np.random.default_rng(20240601 + n)
    v = rng.standard_normal((count, n))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


class RadialNormResult(NamedTuple):
    passed: bool
    spread: float


def radial_norm_check(
    space: ModelSpace, beta: OneForm, r: float, directions: int = 32, tol: float = 1e-8
) -> RadialNormResult:
    """Is ||beta||_alpha constant over the geodesic sphere of radius ``r`` about the origin?"""
    if directions < 2:
        raise DomainError("radial_norm_check needs at least 2 directions")
    space._check_radius(r)
    norms = [norm_beta(space, beta, space.exp_origin(r, d)) for d in sphere_directions(space.n, directions)]
    spread = float(max(norms) - min(norms))
    return RadialNormResult(spread < tol, spread)
