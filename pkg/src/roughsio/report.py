"""Deterministic JSON/CSV serialization of reports.

Floats use the shortest repr that round-trips; non-finite values become
the strings ``"inf"``, ``"-inf"``, ``"nan"``; complex numbers become
``{"re": .., "im": ..}``.  Keys are sorted, so identical inputs give
identical bytes.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np

from . import __version__


def to_jsonable(obj: Any) -> Any:
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(obj.to_dict() if hasattr(obj, "to_dict") else dataclasses.asdict(obj))
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def config_hash(config: Mapping) -> str:
    canon = json.dumps(to_jsonable(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def versions() -> dict:
    import scipy

    return {"roughsio": __version__, "numpy": np.__version__, "scipy": scipy.__version__}


def envelope(command: str, config: Mapping, result: Any, checks: Mapping[str, bool]) -> dict:
    """Standard report wrapper with provenance fields."""
    return {
        "command": command,
        "config": dict(config),
        "config_hash": config_hash(config),
        "seed": config.get("seed"),
        "tol": config.get("tol"),
        "versions": versions(),
        "checks": dict(checks),
        "result": result,
    }


def rows_to_csv(rows: Iterable[Mapping], columns: list[str] | None = None) -> str:
    """CSV with rows sorted by the first column (then the rest)."""
    rows = [to_jsonable(dict(r)) for r in rows]
    if not rows:
        return ""
    columns = columns or list(rows[0])

    def key(r):
        return tuple((0, r[c]) if isinstance(r[c], (int, float)) else (1, str(r[c])) for c in columns)

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in sorted(rows, key=key):
        w.writerow([repr(r[c]) if isinstance(r[c], float) else r[c] for c in columns])
    return buf.getvalue()


def emit_report(report: Any, fmt: str = "json", path: str | Path | None = None, rows: list[Mapping] | None = None) -> str:
    """Serialize ``report`` (or ``rows`` for CSV) and write it to ``path`` when given."""
    if fmt == "json":
        text = dumps(report)
    elif fmt == "csv":
        text = rows_to_csv(rows if rows is not None else _default_rows(report))
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        p = Path(path)
        try:
            p.write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {p}: {exc}") from exc
    return text


def _default_rows(report: Any) -> list[dict]:
    data = to_jsonable(report)
    if isinstance(data, list):
        return data
    flat = []

    def walk(prefix, node):
        if isinstance(node, dict):
            for k, v in node.items():
                walk(f"{prefix}.{k}" if prefix else k, v)
        elif isinstance(node, list):
            for i, v in enumerate(node):
                walk(f"{prefix}[{i:06d}]", v)
        else:
            flat.append({"key": prefix, "value": node})

    walk("", data)
    return flat
