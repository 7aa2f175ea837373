"""Numerical laboratory for harmonic Finsler manifolds of (alpha, beta)-type."""

__version__ = "0.1.0"

from .base_space import (  # noqa: E402
    KillingReport,
    ModelSpace,
    OneForm,
    christoffel,
    covariant_derivative,
    euclidean,
    hyperbolic,
    killing_check,
    norm_beta,
    radial_norm_check,
    riemannian_density,
    sphere,
)
from .curvature import CurvatureReport, horosphere_limit, mean_curvature  # noqa: E402
from .harmonic import DensityProfile, FinslerConstruction, finsler_density, radiality_test  # noqa: E402
from .metric_family import PhiFamily, T_eval, builtin_family, odd_defect, validity_check  # noqa: E402
from .volume import QuadratureSpec, VolumeFactorResult, f_BH, f_HT, factor, sin_power_integral  # noqa: E402
