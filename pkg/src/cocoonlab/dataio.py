"""Dataset serialization: CSV (bare rows, the primary format) and JSON (with header).

CSV columns are exactly ``q,p,eigen_index,re,im`` for flux datasets and
``g,q,p,eigen_index,re,im`` for g-sweeps, LF line endings, numbers as the
shortest decimal that round-trips.  JSON mirrors the same rows and adds a
header with schema version and the full run-config echo.  Serialization is a
pure function of the data, so identical inputs give identical bytes.
"""

from __future__ import annotations

import json
from typing import Iterable, Sequence

FLUX_COLUMNS = ("q", "p", "eigen_index", "re", "im")
GSWEEP_COLUMNS = ("g", "q", "p", "eigen_index", "re", "im")
TRACE_COLUMNS = ("g", "track", "re", "im")
EVENT_COLUMNS = ("g_lo", "g_hi", "g_critical", "count_before", "count_after",
                 "seed_re", "seed_im", "resolved")
SCHEMA_VERSION = 1


def format_number(x) -> str:
    """Shortest decimal that parses back to the same value; integers lose the '.0'."""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    v = float(x)
    if v != v or v in (float("inf"), float("-inf")):
        raise ValueError(f"non-finite value in dataset: {v}")
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def serialize_rows_csv(columns: Sequence[str], rows: Iterable) -> bytes:
    lines = [",".join(columns)]
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row width {len(row)} does not match {columns}")
        lines.append(",".join(format_number(v) for v in row))
    return ("\n".join(lines) + "\n").encode("ascii")


def parse_rows_csv(data: bytes) -> tuple:
    """Inverse of serialize_rows_csv: (columns, rows) with numeric cells."""
    text = data.decode("ascii")
    lines = [ln for ln in text.split("\n") if ln]
    if not lines:
        raise ValueError("empty CSV dataset")
    columns = tuple(lines[0].split(","))
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != len(columns):
            raise ValueError(f"row width {len(cells)} does not match header {columns}")
        rows.append(tuple(int(c) if _is_int(c) else float(c) for c in cells))
    return columns, rows


def _is_int(cell: str) -> bool:
    try:
        int(cell)
        return True
    except ValueError:
        return False


def serialize_dataset_json(columns: Sequence[str], rows: Iterable, config: dict,
                           *, timestamp: str = "") -> bytes:
    """JSON dataset with header; the timestamp field stays empty unless requested."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        "config": {k: config[k] for k in sorted(config)},
        "columns": list(columns),
        "rows": [list(r) for r in rows],
    }
    if timestamp:
        doc["timestamp"] = timestamp
    return (json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n").encode("ascii")


def parse_dataset_json(data: bytes) -> tuple:
    """Inverse of serialize_dataset_json: (columns, rows, config)."""
    doc = json.loads(data.decode("ascii"))
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema version: {doc.get('schema_version')!r}")
    columns = tuple(doc["columns"])
    rows = [tuple(v) for v in doc["rows"]]
    return columns, rows, doc["config"]


def flux_dataset_rows(dataset) -> list:
    """SweepDataset points as serializable rows (already lexicographic)."""
    return [tuple(pt) for pt in dataset.points]


def gsweep_dataset_rows(dataset) -> list:
    return [tuple(pt) for pt in dataset.points]


def trace_rows(trace) -> list:
    """PitchforkTrace as (g, track, re, im) rows, lexicographic in (g, track)."""
    rows = []
    for gi, g in enumerate(trace.g_grid):
        for t in range(trace.tracks.shape[0]):
            v = trace.tracks[t, gi]
            rows.append((float(g), t, float(v.real), float(v.imag)))
    return rows


def event_rows(events) -> list:
    return [(e.g_lo, e.g_hi, e.g_critical, e.count_before, e.count_after,
             e.seed_eigenvalue.real, e.seed_eigenvalue.imag, int(e.resolved))
            for e in events]
