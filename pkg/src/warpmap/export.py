"""Bit-stable CSV/JSON export and re-ingestion.

Numbers are written with the shortest round-trip decimal representation
(Python repr), row order is deterministic (ascending t for solutions,
row-major y-outer for grids), and no timestamps or locale-dependent
formatting appear anywhere, so identical configs produce identical bytes.

CSV headers are part of the interchange contract:
    solutions   t,R,Rprime,H,drift
    maps        x,y,t,R,S
    embeddings  x,y,X,Y,Z
    reports     field,value

JSON mirrors the same fields as an object-per-row array under "rows",
with the full resolved run configuration echoed under "meta".
"""

from __future__ import annotations

import json
from typing import Iterable, Optional

import numpy as np

from .errors import ValidationError

SOLUTION_HEADER = ("t", "R", "Rprime", "H", "drift")
MAP_HEADER = ("x", "y", "t", "R", "S")
EMBED_HEADER = ("x", "y", "X", "Y", "Z")
REPORT_HEADER = ("field", "value")


def fmt_number(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def render_csv(header: Iterable[str], rows: Iterable[tuple]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt_number(v) for v in row))
    return "\n".join(lines) + "\n"


def render_json(header: Iterable[str], rows: Iterable[tuple], meta: dict) -> str:
    header = list(header)
    payload = {
        "meta": _jsonable(meta),
        "rows": [dict(zip(header, (_jsonable(v) for v in row))) for row in rows],
    }
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer, int)):
        return int(v)
    return v


def render(header, rows, fmt: str, meta: dict) -> str:
    if fmt == "csv":
        return render_csv(header, rows)
    if fmt == "json":
        return render_json(header, rows, meta)
    raise ValidationError(f"unknown output format {fmt!r}")


def solution_rows(sol):
    H = sol.Hs if sol.Hs is not None else np.zeros_like(sol.ts)
    for i in range(len(sol.ts)):
        yield (sol.ts[i], sol.Rs[i], sol.Rps[i], H[i], sol.drift[i])


def map_rows(ms):
    ny, nx = ms.R.shape
    for j in range(ny):
        for i in range(nx):
            yield (ms.xs[i], ms.ys[j], ms.t[j, i], ms.R[j, i], ms.S[j, i])


def embedding_rows(xs, ys, points):
    ny, nx = points.shape[0], points.shape[1]
    for j in range(ny):
        for i in range(nx):
            X, Y, Z = points[j, i]
            yield (xs[i], ys[j], X, Y, Z)


def report_rows(report: dict):
    for k, v in report.items():
        yield (k, v)


def read_table(path) -> tuple[list[str], dict[str, np.ndarray]]:
    """Read a CSV produced by this package (or the rows of its JSON twin)."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        payload = json.loads(text)
        rows = payload.get("rows", [])
        if not rows:
            raise ValidationError(f"{path}: no rows")
        header = list(rows[0].keys())
        cols = {k: np.array([r[k] for r in rows], dtype=float) for k in header}
        return header, cols
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValidationError(f"{path}: empty file")
    header = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    if data.ndim != 2 or data.shape[1] != len(header):
        raise ValidationError(f"{path}: malformed table")
    return header, {k: data[:, i] for i, k in enumerate(header)}
