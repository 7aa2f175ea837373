"""phi-function families defining (alpha, beta)-metrics F = alpha * phi(beta / alpha).

Each family carries phi together with its first two derivatives, supplied
analytically. A finite-difference check runs at construction so that a
mistyped derivative closure is caught immediately, including for
user-defined families built through :class:`PhiFamily` directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import CatalogError, DomainError, NumericError, UnsupportedOperationError

__all__ = [
    "PhiFamily",
    "ValidityReport",
    "CATALOG",
    "builtin_family",
    "validity_check",
    "validity_expression",
    "T_eval",
    "T_values",
    "odd_defect",
    "clip_epsilon",
]

ArrayFunc = Callable[[np.ndarray], np.ndarray]

# Relative offset below which singular (s > 0 only) families are clipped.
CLIP_RELATIVE = 1e-8
_FD_STEP = 1e-5
_FD_RTOL = 1e-6


def clip_epsilon(b: float) -> float:
    """Lower end of the s-grid used for singular families."""
    return CLIP_RELATIVE * b


@dataclass(frozen=True, eq=False)
class PhiFamily:
    """A phi-function with analytic derivatives and its admissible range of b.

    ``phi``, ``dphi`` and ``d2phi`` must accept numpy arrays. ``b_max`` is the
    supremum of admissible ``||beta||_alpha``; ``singular`` marks families
    defined only for ``s > 0`` (Kropina).
    """

    name: str
    phi: ArrayFunc
    dphi: ArrayFunc
    d2phi: ArrayFunc
    b_max: float
    singular: bool = False
    description: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if not self.b_max > 0:
            raise DomainError(f"{self.name}: b_max must be positive, got {self.b_max}")
        s = self._sample_points()
        values = np.asarray(self.phi(s), dtype=float)
        if not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise DomainError(f"{self.name}: phi must be positive and finite on its domain")
        err = self.derivative_error(s)
        if err >= _FD_RTOL:
            raise NumericError(
                f"{self.name}: analytic derivatives disagree with finite differences "
                f"(relative error {err:.3g})"
            )

    def _sample_points(self) -> np.ndarray:
        m = min(self.b_max, 1.0)
        if self.singular:
            return np.linspace(0.1 * m, 0.9 * m, 9)
        return np.linspace(-0.9 * m, 0.9 * m, 9)

    def derivative_error(self, s: np.ndarray | None = None) -> float:
        """Largest relative disagreement of dphi/d2phi with central differences."""
        if s is None:
            s = self._sample_points()
        s = np.asarray(s, dtype=float)
        h = _FD_STEP * np.maximum(1.0, np.abs(s))
        fd1 = (self.phi(s + h) - self.phi(s - h)) / (2 * h)
        fd2 = (self.dphi(s + h) - self.dphi(s - h)) / (2 * h)
        d1 = np.broadcast_to(self.dphi(s), s.shape)
        d2 = np.broadcast_to(self.d2phi(s), s.shape)
        e1 = np.abs(d1 - fd1) / np.maximum(1.0, np.abs(fd1))
        e2 = np.abs(d2 - fd2) / np.maximum(1.0, np.abs(fd2))
        return float(max(e1.max(), e2.max()))

    def in_domain(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if self.singular:
            return s > 0
        return np.abs(s) < self.b_max


@dataclass(frozen=True)
class ValidityReport:
    family: str
    n: int
    b: float
    min_value: float
    passed: bool
    grid_size: int
    clip_epsilon: float = 0.0


def _const(c: float) -> ArrayFunc:
    return lambda s: np.full_like(np.asarray(s, dtype=float), c)


def _make_catalog() -> dict[str, Callable[[], PhiFamily]]:
    return {
        "riemannian": lambda: PhiFamily(
            "riemannian", _const(1.0), _const(0.0), _const(0.0), b_max=1.0,
            description="phi = 1",
        ),
        "randers": lambda: PhiFamily(
            "randers",
            lambda s: 1.0 + np.asarray(s, dtype=float),
            _const(1.0),
            _const(0.0),
            b_max=1.0,
            description="phi = 1 + s",
        ),
        "kropina": lambda: PhiFamily(
            "kropina",
            lambda s: 1.0 / np.asarray(s, dtype=float),
            lambda s: -1.0 / np.asarray(s, dtype=float) ** 2,
            lambda s: 2.0 / np.asarray(s, dtype=float) ** 3,
            b_max=math.inf,
            singular=True,
            description="phi = 1/s, s > 0",
        ),
        "matsumoto": lambda: PhiFamily(
            "matsumoto",
            lambda s: 1.0 / (1.0 - np.asarray(s, dtype=float)),
            lambda s: 1.0 / (1.0 - np.asarray(s, dtype=float)) ** 2,
            lambda s: 2.0 / (1.0 - np.asarray(s, dtype=float)) ** 3,
            b_max=0.5,
            description="phi = 1/(1 - s)",
        ),
        "square": lambda: PhiFamily(
            "square",
            lambda s: (1.0 + np.asarray(s, dtype=float)) ** 2,
            lambda s: 2.0 * (1.0 + np.asarray(s, dtype=float)),
            _const(2.0),
            b_max=1.0,
            description="phi = (1 + s)^2",
        ),
    }


_BUILDERS = _make_catalog()
CATALOG: tuple[str, ...] = tuple(_BUILDERS)
_CACHE: dict[str, PhiFamily] = {}


def builtin_family(name: str) -> PhiFamily:
    """Return the catalog family called ``name`` (case-insensitive)."""
    key = name.strip().lower()
    if key not in _BUILDERS:
        raise CatalogError(f"unknown family {name!r}; valid names: {', '.join(CATALOG)}")
    if key not in _CACHE:
        _CACHE[key] = _BUILDERS[key]()
    return _CACHE[key]


def _check_b(family: PhiFamily, b: float) -> None:
    if not (0 < b < family.b_max):
        raise DomainError(f"b={b!r} outside (0, {family.b_max}) for family {family.name}")


def _s_grid(family: PhiFamily, b: float, grid_size: int) -> np.ndarray:
    if family.singular:
        return np.linspace(clip_epsilon(b), b, grid_size)
    return np.linspace(-b, b, grid_size)


def validity_expression(family: PhiFamily, b: float, s: np.ndarray) -> np.ndarray:
    """phi(s) - s phi'(s) + (b^2 - s^2) phi''(s)."""
    s = np.asarray(s, dtype=float)
    return family.phi(s) - s * family.dphi(s) + (b * b - s * s) * family.d2phi(s)


def _require_finite(values: np.ndarray, s: np.ndarray, what: str) -> None:
    bad = ~np.isfinite(values)
    if np.any(bad):
        raise NumericError(f"non-finite {what} at s={float(np.atleast_1d(s)[np.argmax(bad)])!r}")


def validity_check(family: PhiFamily, n: int, b: float, grid_size: int = 101) -> ValidityReport:
    """Evaluate the (alpha, beta)-metric positivity condition on an s-grid.

    For singular families the grid is ``[eps, b]`` with ``eps = 1e-8 * b``;
    the clipping offset is returned in the report.
    """
    _check_b(family, b)
    if grid_size < 3:
        raise DomainError("grid_size must be at least 3")
    s = _s_grid(family, b, grid_size)
    values = validity_expression(family, b, s)
    _require_finite(values, s, "validity expression")
    m = float(values.min())
    return ValidityReport(
        family=family.name,
        n=n,
        b=b,
        min_value=m,
        passed=m > 0,
        grid_size=grid_size,
        clip_epsilon=clip_epsilon(b) if family.singular else 0.0,
    )


def T_values(family: PhiFamily, n: int, b: float, s: np.ndarray) -> np.ndarray:
    """Vectorised T(s) = phi (phi - s phi')^(n-2) [(phi - s phi') + (b^2 - s^2) phi'']."""
    s = np.asarray(s, dtype=float)
    p = family.phi(s)
    q = p - s * family.dphi(s)
    return p * q ** (n - 2) * (q + (b * b - s * s) * family.d2phi(s))


def T_eval(family: PhiFamily, n: int, b: float, s: float) -> float:
    _check_b(family, b)
    if n < 2:
        raise DomainError(f"dimension must be >= 2, got {n}")
    if abs(s) > b or not bool(family.in_domain(s)):
        raise DomainError(f"s={s!r} outside the domain of {family.name} for b={b!r}")
    value = float(T_values(family, n, b, s))
    _require_finite(np.array([value]), np.array([s]), "T")
    return value


def odd_defect(family: PhiFamily, n: int, b: float, grid_size: int = 201) -> float:
    """Max over s in (0, b] of |(T(s) - 1) + (T(-s) - 1)|.

    A value at round-off level certifies that T - 1 is odd on the sampled grid.
    """
    if family.singular:
        raise UnsupportedOperationError(
            f"{family.name} is defined only for s > 0; oddness needs both signs of s"
        )
    _check_b(family, b)
    s = b * np.arange(1, grid_size + 1) / grid_size
    even = (T_values(family, n, b, s) - 1.0) + (T_values(family, n, b, -s) - 1.0)
    _require_finite(even, s, "T")
    return float(np.abs(even).max())
