"""Command-line entry point: ``finsler-lab <command> [flags]``.

Commands: ``volume-factor``, ``check-killing``, ``harmonicity``,
``mean-curvature``, ``verify-all``.

Configuration is resolved as built-in defaults < ``--config`` file < flags.
The file is flat UTF-8 text with ``key = value`` lines and ``#`` comments;
keys are the flag names with or without the leading dashes.

Exit codes: 0 success (negative controls that fail as expected count as
success), 1 numeric failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from .base_space import ModelSpace, killing_check
from .curvature import horosphere_limit
from .errors import CatalogError, ConfigError, DomainError, FinslerLabError
from .harmonic import FinslerConstruction, radiality_test
from .metric_family import CATALOG, builtin_family, validity_check
from .pipelines import KROPINA_HT_NOTE, LABELS, box_samples, verify_all
from .profiles import parse_profile
from .report import emit
from .volume import MEASURES, QuadratureSpec, f_BH, f_HT

__all__ = ["main", "parse_config_file", "resolve_config"]

COMMANDS = ("volume-factor", "check-killing", "harmonicity", "mean-curvature", "verify-all")
THREADS_ENV = "FINSLER_LAB_THREADS"


def _float_list(text: str) -> list[float]:
    return [float(p) for p in text.replace(";", ",").split(",") if p.strip()]


def _opt_str(text: str) -> str:
    return text.strip()


# key -> (converter, default). A default of None means "command-specific or unset".
OPTIONS: dict[str, tuple[Callable[[str], Any], Any]] = {
    "family": (_opt_str, "randers"),
    "n": (int, 3),
    "kappa": (int, None),
    "b": (float, None),
    "b_min": (float, 0.1),
    "b_max": (float, 0.9),
    "b_steps": (int, 9),
    "measure": (lambda s: s.strip().upper(), "BH"),
    "profile": (_opt_str, None),
    "radii": (_float_list, [0.5, 1.0, 1.5, 2.0]),
    "directions": (int, 16),
    "tol": (float, 1e-8),
    "nodes": (int, 64),
    "max_refinements": (int, 6),
    "rel_tol": (float, 1e-12),
    "clip_epsilon": (float, 1e-8),
    "r_min": (float, 1.0),
    "r_max": (float, 20.0),
    "samples": (int, 60),
    "box_points": (int, 5),
    "step": (float, 1e-5),
    "format": (lambda s: s.strip().lower(), "json"),
    "out": (_opt_str, None),
}

HELP = {
    "family": "catalog name: riemannian, randers, kropina, matsumoto, square",
    "n": "dimension of the base space",
    "kappa": "base curvature: -1, 0 or 1",
    "b": "single value of |beta| (overrides the sweep)",
    "b_min": "first value of the b sweep",
    "b_max": "last value of the b sweep",
    "b_steps": "number of sweep points",
    "measure": "BH or HT",
    "profile": "1-form, e.g. exp:0.5, constant:0.5, rotation, nonradial:0.3",
    "radii": "comma-separated radii for the density profile",
    "directions": "number of sample directions",
    "tol": "radiality / Killing tolerance",
    "nodes": "initial Gauss-Legendre nodes per panel",
    "max_refinements": "maximum node doublings",
    "rel_tol": "quadrature relative tolerance",
    "clip_epsilon": "relative clip for singular families",
    "r_min": "start of the mean-curvature window",
    "r_max": "end of the mean-curvature window",
    "samples": "radii in the mean-curvature window",
    "box_points": "grid points per axis for the Killing box",
    "step": "finite-difference step for Christoffel symbols",
    "format": "json or csv",
    "out": "output path (default: stdout)",
}

COMMAND_DEFAULTS: dict[str, dict[str, Any]] = {
    "volume-factor": {},
    "check-killing": {"kappa": 0, "profile": "constant:0.5"},
    "harmonicity": {"kappa": -1, "profile": "exp:0.5"},
    "mean-curvature": {"kappa": -1, "profile": "exp:0.5", "measure": "HT"},
    "verify-all": {"profile": "exp:0.5"},
}

# Not part of the embedded config: output location only.
_NOT_EMBEDDED = ("out",)


def _convert(key: str, raw: Any) -> Any:
    conv = OPTIONS[key][0]
    if not isinstance(raw, str):
        return raw
    try:
        return conv(raw)
    except ValueError as exc:
        raise ConfigError(f"invalid value for {key}: {raw!r}") from exc


def parse_config_file(path: str | Path) -> dict[str, Any]:
    """Read a ``key = value`` configuration file into converted option values."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    values: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, raw = (p.strip() for p in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in OPTIONS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _convert(key, raw)
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="finsler-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="key = value configuration file")
        for key in OPTIONS:
            p.add_argument("--" + key.replace("_", "-"), dest=key, default=argparse.SUPPRESS, help=HELP[key])
    return parser


def resolve_config(command: str, file_values: dict[str, Any], flag_values: dict[str, Any]) -> dict[str, Any]:
    cfg = {k: default for k, (_, default) in OPTIONS.items()}
    cfg.update(COMMAND_DEFAULTS[command])
    cfg.update(file_values)
    cfg.update({k: _convert(k, v) for k, v in flag_values.items()})
    _validate(command, cfg)
    return cfg


def _quad(cfg: dict[str, Any]) -> QuadratureSpec:
    return QuadratureSpec(cfg["nodes"], cfg["max_refinements"], cfg["rel_tol"], cfg["clip_epsilon"])


def _b_values(cfg: dict[str, Any]) -> list[float]:
    if cfg["b"] is not None:
        return [cfg["b"]]
    if cfg["b_steps"] < 1:
        raise ConfigError("b-steps must be >= 1")
    if cfg["b_steps"] == 1:
        return [cfg["b_min"]]
    return [float(v) for v in np.round(np.linspace(cfg["b_min"], cfg["b_max"], cfg["b_steps"]), 12)]


def _validate(command: str, cfg: dict[str, Any]) -> None:
    """Check every option against the preconditions of the modules it feeds."""
    try:
        family = builtin_family(cfg["family"])
    except CatalogError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg["n"] < 2:
        raise ConfigError(f"n must be >= 2, got {cfg['n']}")
    if cfg["measure"] not in MEASURES:
        raise ConfigError(f"measure must be one of {MEASURES}, got {cfg['measure']!r}")
    if cfg["format"] not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {cfg['format']!r}")
    if not cfg["tol"] > 0:
        raise ConfigError("tol must be positive")
    try:
        _quad(cfg)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg["profile"] is not None:
        parse_profile(cfg["profile"])
    if cfg["kappa"] is not None:
        try:
            space = ModelSpace(cfg["n"], cfg["kappa"])
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc
    if command == "volume-factor":
        for b in _b_values(cfg):
            if not 0 < b < family.b_max:
                raise ConfigError(f"b={b} outside (0, {family.b_max}) for family {family.name}")
            if not validity_check(family, cfg["n"], b).passed:
                raise ConfigError(f"{family.name} is not a valid (alpha, beta)-metric at b={b}")
    if command == "check-killing" and cfg["box_points"] < 1:
        raise ConfigError("box-points must be >= 1")
    if command == "check-killing" and not cfg["step"] > 0:
        raise ConfigError("step must be positive")
    if command == "harmonicity":
        radii = cfg["radii"]
        if len(radii) < 3:
            raise ConfigError("harmonicity needs at least 3 radii")
        if any(not 0 < r <= space.max_radius or (space.compact and r >= math.pi) for r in radii):
            raise ConfigError(f"radii must lie in (0, {space.max_radius}] for {space.name}")
        if cfg["directions"] < 8:
            raise ConfigError("harmonicity needs at least 8 directions")
    if command == "mean-curvature":
        if space.compact:
            raise ConfigError("mean-curvature needs a non-compact base (kappa = -1 or 0)")
        if not 0 < cfg["r_min"] < cfg["r_max"] < space.max_radius:
            raise ConfigError(f"need 0 < r-min < r-max < {space.max_radius}")
        if cfg["samples"] < 3:
            raise ConfigError("samples must be >= 3")


def _meta(command: str, cfg: dict[str, Any], **extra: Any) -> dict[str, Any]:
    embedded = {k: cfg[k] for k in sorted(cfg) if k not in _NOT_EMBEDDED}
    return {"tool": "finsler-lab", "version": __version__, "command": command, "config": embedded, **extra}


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    cap = os.cpu_count() or 1
    if raw is None:
        return cap
    try:
        return max(1, min(cap, int(raw)))
    except ValueError as exc:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def cmd_volume_factor(cfg: dict[str, Any]) -> int:
    family = builtin_family(cfg["family"])
    n, quad = cfg["n"], _quad(cfg)

    def point(b: float):
        return b, f_BH(family, n, b, quad), f_HT(family, n, b, quad)

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(point, _b_values(cfg)))
    rows, diverged_measures, discrepancies = [], set(), []
    for b, bh, ht in results:
        for label, res in (("BH", bh), ("HT", ht)):
            if res.diverged:
                diverged_measures.add(label)
        rows.append([b, bh.value, bh.est_error, ht.value, ht.est_error,
                     bh.clipped or ht.clipped, bh.diverged or ht.diverged])
    warnings = sum(1 for r in rows if r[-1])
    if family.name == "kropina" and "HT" in diverged_measures:
        discrepancies.append(KROPINA_HT_NOTE)
    if warnings:
        _warn(f"{warnings} sweep point(s) diverged ({', '.join(sorted(diverged_measures))})")
    meta = _meta(
        "volume-factor",
        cfg,
        family=family.name,
        n=n,
        quadrature={"nodes": quad.nodes, "max_refinements": quad.max_refinements,
                    "rel_tol": quad.rel_tol, "clip_epsilon": quad.clip_epsilon},
        warnings=warnings,
        diverged_measures=sorted(diverged_measures),
        discrepancies=discrepancies,
    )
    header = ["b", "f_bh", "f_bh_err", "f_ht", "f_ht_err", "clipped", "diverged"]
    emit(cfg["format"], header, rows, meta, cfg["out"])
    return 0


def cmd_check_killing(cfg: dict[str, Any]) -> int:
    space = ModelSpace(cfg["n"], cfg["kappa"])
    beta = parse_profile(cfg["profile"])
    rep = killing_check(space, beta, box_samples(space, cfg["box_points"]), cfg["step"])
    tol = cfg["tol"]
    row = [rep.max_sym, rep.max_antisym, rep.norm_spread, rep.samples, rep.step,
           rep.is_killing(tol), rep.is_constant_killing(tol)]
    header = ["max_sym", "max_antisym", "norm_spread", "samples", "step", "killing", "constant_killing"]
    meta = _meta("check-killing", cfg, space=space.name, beta=beta.label)
    emit(cfg["format"], header, [row], meta, cfg["out"])
    return 0


def _construction(cfg: dict[str, Any]) -> FinslerConstruction:
    return FinslerConstruction(
        ModelSpace(cfg["n"], cfg["kappa"]),
        parse_profile(cfg["profile"]),
        builtin_family(cfg["family"]),
        cfg["measure"],
        _quad(cfg),
    )


def cmd_harmonicity(cfg: dict[str, Any]) -> int:
    c = _construction(cfg)
    res = radiality_test(c, cfg["radii"], cfg["directions"], cfg["tol"])
    prof = res.profile
    notes = []
    if res.verdict == "inconclusive":
        _warn("volume factor diverged; radiality is inconclusive")
        if c.family.name == "kropina" and c.measure == "HT":
            notes.append(KROPINA_HT_NOTE)
    meta = _meta(
        "harmonicity",
        cfg,
        construction=c.describe(),
        verdict=res.verdict,
        deviation=res.deviation,
        tol=cfg["tol"],
        clipped=prof.metadata["clipped"],
        diverged=prof.metadata["diverged"],
        directions=prof.directions.tolist(),
        discrepancies=notes,
    )
    emit(cfg["format"], ["r", "direction", "sigma", "ratio"], prof.rows(), meta, cfg["out"])
    return 0


def cmd_mean_curvature(cfg: dict[str, Any]) -> int:
    c = _construction(cfg)
    rep = horosphere_limit(c, cfg["r_min"], cfg["r_max"], cfg["samples"])
    pa = rep.extra["pi_alpha_values"]
    rows = [[t, pf, a, pf - a] for t, pf, a in zip(rep.t_values, rep.pi_values, pa)]
    if rep.pi_infinity is None:
        _warn(f"no horosphere limit: {rep.diagnostic}")
    meta = _meta(
        "mean-curvature",
        cfg,
        construction=c.describe(),
        pi_infinity=rep.pi_infinity,
        pi_alpha_infinity=rep.extra["pi_alpha_infinity"],
        extrapolation=rep.extrapolation,
        residual=rep.residual,
        diagnostic=rep.diagnostic,
    )
    emit(cfg["format"], ["t", "pi_f", "pi_alpha", "delta"], rows, meta, cfg["out"])
    return 0


def cmd_verify_all(cfg: dict[str, Any]) -> int:
    rows = verify_all(_quad(cfg), cfg["profile"], cfg["n"])
    matrix = {label: all(r.passed for r in rows if r.label == label) for label in LABELS}
    for label, ok in matrix.items():
        print(f"{label:<8} {'PASS' if ok else 'FAIL'}", file=sys.stderr)
    header = ["label", "check", "expected", "observed", "value", "passed", "status"]
    table = [[r.label, r.check, r.expected, r.observed, r.value, r.passed, r.status] for r in rows]
    all_passed = all(matrix.values())
    meta = _meta("verify-all", cfg, matrix=matrix, all_passed=all_passed, notes=[KROPINA_HT_NOTE])
    emit(cfg["format"], header, table, meta, cfg["out"])
    return 0 if all_passed else 1


HANDLERS: dict[str, Callable[[dict[str, Any]], int]] = {
    "volume-factor": cmd_volume_factor,
    "check-killing": cmd_check_killing,
    "harmonicity": cmd_harmonicity,
    "mean-curvature": cmd_mean_curvature,
    "verify-all": cmd_verify_all,
}


def main(argv: list[str] | None = None) -> int:
    args = vars(_build_parser().parse_args(argv))
    command = args.pop("command")
    config_path = args.pop("config")
    try:
        file_values = parse_config_file(config_path) if config_path else {}
        cfg = resolve_config(command, file_values, args)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return HANDLERS[command](cfg)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FinslerLabError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
