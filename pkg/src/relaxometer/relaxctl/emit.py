"""CSV/JSON serialization of sweep results.

Floats are written with repr() (shortest round-trip decimal), so files
are byte-stable across runs and parallelism settings.
"""

from __future__ import annotations

import csv
import io
import json
import os
from typing import List

from ..errors import DomainError
from .engine import SweepResult, SweepRow

CSV_HEADER = "scenario,L,L_A,x,t_or_window,metric,value,value_normalized,stderr,seed"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    for r in rows:
        writer.writerow(
            [
                r.scenario,
                str(r.L),
                str(r.L_A),
                repr(r.x),
                r.t_or_window,
                r.metric,
                repr(r.value),
                repr(r.value_normalized),
                _fmt(r.stderr),
                r.seed,
            ]
        )
    return buf.getvalue()


def _row_dict(r: SweepRow) -> dict:
    return {
        "scenario": r.scenario,
        "L": r.L,
        "L_A": r.L_A,
        "x": r.x,
        "t_or_window": r.t_or_window,
        "metric": r.metric,
        "value": r.value,
        "value_normalized": r.value_normalized,
        "stderr": r.stderr,
        "seed": r.seed,
    }


def emit(result: SweepResult, fmt: str, out_dir) -> List[str]:
    """Write sweep.csv or sweep.json under out_dir; returns the paths."""
    if not result.rows:
        raise DomainError("refusing to emit an empty result")
    if fmt not in ("csv", "json"):
        raise DomainError(f"unknown format {fmt!r}")
    os.makedirs(out_dir, exist_ok=True)
    if fmt == "csv":
        path = os.path.join(out_dir, "sweep.csv")
        with open(path, "w", newline="\n") as f:
            f.write(rows_to_csv(result.rows))
        return [path]
    path = os.path.join(out_dir, "sweep.json")
    doc = {
        "config": result.config.to_dict(),
        "rows": [_row_dict(r) for r in result.rows],
    }
    with open(path, "w") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")
    return [path]
