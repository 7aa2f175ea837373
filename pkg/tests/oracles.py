"""Independent reference computations used only by the tests.

None of these reuse the package's quadrature or curvature code paths.
"""

from __future__ import annotations

import math

import numpy as np
import sympy as sp
from scipy.integrate import solve_ivp

_s, _b = sp.symbols("s b")

PHI_EXPRESSIONS = {
    "riemannian": sp.Integer(1),
    "randers": 1 + _s,
    "kropina": 1 / _s,
    "matsumoto": 1 / (1 - _s),
    "square": (1 + _s) ** 2,
}


def symbolic_T(name: str, n: int) -> sp.Expr:
    phi = PHI_EXPRESSIONS[name]
    q = phi - _s * sp.diff(phi, _s)
    return sp.simplify(phi * q ** (n - 2) * (q + (_b**2 - _s**2) * sp.diff(phi, _s, 2)))


def symbolic_validity(name: str) -> sp.Expr:
    phi = PHI_EXPRESSIONS[name]
    return sp.simplify(phi - _s * sp.diff(phi, _s) + (_b**2 - _s**2) * sp.diff(phi, _s, 2))


def T_numeric(name: str, n: int):
    return sp.lambdify((_s, _b), symbolic_T(name, n), "numpy")


def phi_numeric(name: str):
    return sp.lambdify(_s, PHI_EXPRESSIONS[name], "numpy")


def dense_grid_min(name: str, b: float, points: int = 200_001, singular: bool = False) -> float:
    f = sp.lambdify((_s, _b), symbolic_validity(name), "numpy")
    s = np.linspace(1e-8 * b if singular else -b, b, points)
    return float(np.min(np.broadcast_to(f(s, b), s.shape)))


def trapezoid_HT(name: str, n: int, b: float, points: int = 1_000_001) -> float:
    t = np.linspace(0.0, math.pi, points)
    w = np.sin(t) ** (n - 2)
    T = np.broadcast_to(T_numeric(name, n)(b * np.cos(t), b), t.shape)
    return float(np.trapezoid(T * w, t) / np.trapezoid(w, t))


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def monte_carlo_bh(
    name: str, n: int, b: float, samples: int = 10_000_000, seed: int = 12345, chunk: int = 1_000_000
) -> tuple[float, float]:
    """BH factor as Vol(Euclidean unit ball) / Vol({y : F(y) < 1}) with beta = b dy^1.

    Returns (estimate, standard error). The sampling box [-R, R]^n uses
    R = 1 / min phi on [-b, b] (Kropina: R = b).
    """
    phi = phi_numeric(name)
    if name == "kropina":
        R = b
    else:
        grid = np.linspace(-b, b, 10_001)
        R = 1.0 / float(np.min(np.broadcast_to(phi(grid), grid.shape)))
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        y = rng.uniform(-R, R, size=(m, n))
        norm = np.linalg.norm(y, axis=1)
        s = b * y[:, 0] / np.where(norm == 0, 1.0, norm)
        if name == "kropina":
            inside = (s > 0) & (norm / np.where(s > 0, s, 1.0) < 1.0)
        else:
            inside = norm * phi(s) < 1.0
        hits += int(np.count_nonzero(inside))
        done += m
    box = (2 * R) ** n
    p = hits / samples
    vol = box * p
    se_vol = box * math.sqrt(p * (1 - p) / samples)
    f = unit_ball_volume(n) / vol
    return f, f * se_vol / vol


def jacobi_field(kappa: int, r: float) -> float:
    """Solve J'' = -kappa J, J(0) = 0, J'(0) = 1 numerically."""
    sol = solve_ivp(lambda t, y: [y[1], -kappa * y[0]], (0.0, r), [0.0, 1.0], rtol=1e-12, atol=1e-14)
    return float(sol.y[0, -1])


def conformal_christoffel(kappa: int, x: np.ndarray) -> np.ndarray:
    """Closed form for alpha = e^{2w} delta: Gamma^k_ij = d_i w delta_jk + d_j w delta_ik - d_k w delta_ij."""
    n = x.size
    q = float(x @ x)
    if kappa == 0:
        dw = np.zeros(n)
    elif kappa == -1:
        dw = 2 * x / (1 - q)
    else:
        dw = -2 * x / (1 + q)
    I = np.eye(n)
    return (
        np.einsum("i,jk->kij", dw, I)
        + np.einsum("j,ik->kij", dw, I)
        - np.einsum("k,ij->kij", dw, I)
    )
