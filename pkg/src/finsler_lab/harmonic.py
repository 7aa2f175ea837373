"""Finsler constructions F = alpha * phi(beta / alpha) and radiality of their volume density.

The Finsler volume form of an (alpha, beta)-metric is ``f(b(x)) dmu_alpha``
with ``f`` the Busemann-Hausdorff or Holmes-Thompson factor. In geodesic
polar coordinates about the chart origin the density is therefore
``f(b(exp(r theta))) * l(r)``. It is radial when it does not depend on the
direction ``theta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .base_space import ModelSpace, OneForm, norm_at_distance, riemannian_density, sphere_directions
from .errors import DivergenceError, DomainError
from .metric_family import PhiFamily
from .volume import MEASURES, QuadratureSpec, VolumeFactorResult, factor

__all__ = [
    "FinslerConstruction",
    "DensityProfile",
    "RadialityResult",
    "finsler_density",
    "density_profile",
    "radiality_test",
]

DEFAULT_TOL = 1e-8
FD_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class FinslerConstruction:
    """An (alpha, beta)-metric over a model space together with a volume measure."""

    space: ModelSpace
    beta: OneForm
    family: PhiFamily
    measure: str = "BH"
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    _factors: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        m = self.measure.upper()
        if m not in MEASURES:
            raise DomainError(f"unknown measure {self.measure!r}; expected one of {MEASURES}")
        object.__setattr__(self, "measure", m)

    @property
    def n(self) -> int:
        return self.space.n

    def volume_factor(self, b: float) -> VolumeFactorResult:
        """Factor f(b) of the chosen measure, memoised per b."""
        if b in self._factors:
            return self._factors[b]
        if b >= self.family.b_max:
            raise DomainError(
                f"||beta||={b!r} reaches b_max={self.family.b_max} of family {self.family.name}"
            )
        if b == 0.0:
            # F = phi(0) alpha: the unit ball is a scaled Euclidean ball for both measures.
            if self.family.singular:
                raise DomainError(f"{self.family.name} degenerates where beta vanishes")
            v = float(self.family.phi(0.0)) ** self.n
            result = VolumeFactorResult(v, 0.0, 0, False, False)
        else:
            result = factor(self.measure, self.family, self.n, b, self.quad)
        self._factors[b] = result
        return result

    def describe(self) -> dict[str, Any]:
        return {
            "space": self.space.name,
            "n": self.n,
            "kappa": self.space.kappa,
            "family": self.family.name,
            "measure": self.measure,
            "beta": self.beta.label or self.beta.kind,
            "quadrature": {
                "nodes": self.quad.nodes,
                "max_refinements": self.quad.max_refinements,
                "rel_tol": self.quad.rel_tol,
                "clip_epsilon": self.quad.clip_epsilon,
            },
        }


def _factor_at(c: FinslerConstruction, r: float, direction) -> VolumeFactorResult:
    b = norm_at_distance(c.space, c.beta, r, direction)
    return c.volume_factor(b)


def finsler_density(c: FinslerConstruction, r: float, direction) -> float:
    """f(b(x)) * l(r) at x = exp(r * direction).

    Raises :class:`DivergenceError` when the volume factor does not converge.
    """
    res = _factor_at(c, r, direction)
    if res.diverged:
        raise DivergenceError(
            f"{c.measure} factor of {c.family.name} diverges at r={r!r}", result=res
        )
    return res.value * riemannian_density(c.space, r)


@dataclass
class DensityProfile:
    """Volume density sampled on a (radius, direction) grid; ``values[i, j]`` is at radii[i], directions[j]."""

    radii: np.ndarray
    directions: np.ndarray
    values: np.ndarray
    metadata: dict[str, Any] = field(default_factory=dict)

    def ratios(self) -> np.ndarray:
        """values / values[:, 0], the direction-normalised density."""
        return self.values / self.values[:, :1]

    def rows(self) -> list[tuple[float, int, float, float]]:
        ratio = self.ratios()
        return [
            (float(r), j, float(self.values[i, j]), float(ratio[i, j]))
            for i, r in enumerate(self.radii)
            for j in range(self.directions.shape[0])
        ]


def density_profile(c: FinslerConstruction, radii, directions: int | np.ndarray) -> DensityProfile:
    radii = np.asarray(radii, dtype=float)
    if isinstance(directions, (int, np.integer)):
        dirs = sphere_directions(c.n, int(directions))
    else:
        dirs = np.asarray(directions, dtype=float)
    values = np.empty((radii.size, dirs.shape[0]))
    clipped = diverged = False
    for i, r in enumerate(radii):
        l = riemannian_density(c.space, r)
        for j, d in enumerate(dirs):
            res = _factor_at(c, r, d)
            clipped |= res.clipped
            if res.diverged:
                diverged = True
                values[i, j] = math.nan
            else:
                values[i, j] = res.value * l
    meta = {"construction": c.describe(), "clipped": clipped, "diverged": diverged}
    return DensityProfile(radii, dirs, values, meta)


@dataclass(frozen=True)
class RadialityResult:
    verdict: str  # "harmonic" | "not-harmonic" | "inconclusive"
    deviation: float
    profile: DensityProfile

    @property
    def harmonic(self) -> bool:
        return self.verdict == "harmonic"


def radiality_test(
    c: FinslerConstruction, radii, directions: int = 16, tol: float = DEFAULT_TOL
) -> RadialityResult:
    """Decide whether the volume density is radial about the chart origin.

    The test compares sigma(r, theta) / sigma(r, theta_0) against 1, which
    removes any direction-only normalisation at the base point.
    """
    radii = np.asarray(radii, dtype=float)
    if radii.size < 3:
        raise DomainError("radiality_test needs at least 3 radii")
    if directions < 8:
        raise DomainError("radiality_test needs at least 8 directions")
    profile = density_profile(c, radii, directions)
    if profile.metadata["diverged"]:
        return RadialityResult("inconclusive", math.inf, profile)
    deviation = float(np.abs(profile.ratios() - 1.0).max())
    profile.metadata.update(deviation=deviation, tol=tol)
    verdict = "harmonic" if deviation < tol else "not-harmonic"
    return RadialityResult(verdict, deviation, profile)
