"""Named 1-form specifications used by the CLI and the verification pipelines.

Grammar: ``name[:p1[:p2]]``.

========================  =====================================================
``exp:B``                 radial, h(r) = B (1 - exp(-r))
``const-radial:B``        radial, h(r) = B
``osc:B:A``               radial, h(r) = B + A sin(r)
``zero``                  radial, h(r) = 0
``constant:B``            chart, beta = B dx^1
``rotation``              chart, beta = x^1 dx^2 - x^2 dx^1
``x1dx1``                 chart, beta = x^1 dx^1
``nonradial:B``           chart, beta = B (1 + x^1 / (2 (1 + |x|))) dx^1
========================  =====================================================
"""

from __future__ import annotations

import math

import numpy as np

from .base_space import OneForm, chart_form, radial_form
from .errors import ConfigError

__all__ = ["PROFILE_NAMES", "parse_profile"]

PROFILE_NAMES = ("exp", "const-radial", "osc", "zero", "constant", "rotation", "x1dx1", "nonradial")


def _floats(name: str, args: list[str], count: int, defaults: tuple[float, ...]) -> list[float]:
    if len(args) > count:
        raise ConfigError(f"profile {name!r} takes at most {count} parameter(s)")
    try:
        values = [float(a) for a in args]
    except ValueError as exc:
        raise ConfigError(f"profile {name!r}: non-numeric parameter in {args}") from exc
    return values + list(defaults[len(values):])


def _unit(n: int) -> np.ndarray:
    e = np.zeros(n)
    e[0] = 1.0
    return e


def parse_profile(spec: str) -> OneForm:
    name, *args = spec.strip().split(":")
    name = name.lower()
    if name == "exp":
        (b,) = _floats(name, args, 1, (0.5,))
        return radial_form(lambda r: b * (1.0 - math.exp(-r)), label=f"exp:{b:g}")
    if name == "const-radial":
        (b,) = _floats(name, args, 1, (0.5,))
        return radial_form(lambda r: b, label=f"const-radial:{b:g}")
    if name == "osc":
        b, a = _floats(name, args, 2, (0.3, 0.1))
        return radial_form(lambda r: b + a * math.sin(r), label=f"osc:{b:g}:{a:g}")
    if name == "zero":
        _floats(name, args, 0, ())
        return radial_form(lambda r: 0.0, label="zero")
    if name == "constant":
        (b,) = _floats(name, args, 1, (0.5,))
        return chart_form(lambda x: b * _unit(x.size), label=f"constant:{b:g}")
    if name == "rotation":
        _floats(name, args, 0, ())

        def rot(x: np.ndarray) -> np.ndarray:
            out = np.zeros_like(x)
            out[0], out[1] = -x[1], x[0]
            return out

        return chart_form(rot, label="rotation")
    if name == "x1dx1":
        _floats(name, args, 0, ())
        return chart_form(lambda x: x[0] * _unit(x.size), label="x1dx1")
    if name == "nonradial":
        (b,) = _floats(name, args, 1, (0.3,))
        return chart_form(
            lambda x: b * (1.0 + 0.5 * x[0] / (1.0 + np.linalg.norm(x))) * _unit(x.size),
            label=f"nonradial:{b:g}",
        )
    raise ConfigError(f"unknown profile {spec!r}; valid names: {', '.join(PROFILE_NAMES)}")
