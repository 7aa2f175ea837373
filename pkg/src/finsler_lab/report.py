"""Deterministic CSV / JSON report emission.

Floats are written with 17 significant digits; non-finite floats become the
JSON strings ``"inf"``, ``"-inf"`` and ``"nan"`` (and the same bare tokens in
CSV). Key order follows insertion order, so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

__all__ = ["format_float", "format_cell", "dumps_json", "csv_text", "emit"]


def format_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0.0:
        return "0"  # also normalises -0.0
    return f"{x:.17g}"


def format_cell(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    if v is None:
        return ""
    return str(v)


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        s = format_float(obj)
        return f'"{s}"' if s in ("nan", "inf", "-inf") else s
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in seq) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps_json(obj: Any, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def emit(
    fmt: str,
    header: Sequence[str],
    rows: list[Sequence[Any]],
    meta: dict[str, Any],
    out: str | None,
    records_key: str = "rows",
) -> None:
    """Write a report.

    JSON: one document ``{"meta": ..., records_key: [...]}``. CSV: the table,
    with ``meta`` written next to it as ``<out>.meta.json`` (or to stderr when
    writing to stdout).
    """
    if fmt == "json":
        records = [dict(zip(header, row)) for row in rows]
        text = dumps_json({"meta": meta, records_key: records})
        _write(text, out)
        return
    _write(csv_text(header, rows), out)
    meta_text = dumps_json(meta)
    if out:
        Path(out + ".meta.json").write_text(meta_text, encoding="utf-8", newline="\n")
    else:
        sys.stderr.write(meta_text)


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
