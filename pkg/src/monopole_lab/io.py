"""CSV/JSON writers shared by the CLI.

Floats are written with ``repr`` (shortest round-trip form), so identical
inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, is_dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .spectral import Source, SpectrumLevel

SPECTRUM_COLUMNS = ("value", "multiplicity", "source", "sectors")
TRAJECTORY_COLUMNS = ("t", "x", "y", "z", "vx", "vy", "vz")
UNROLLED_COLUMNS = ("s", "rho_x", "rho_y")


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def level_record(level: SpectrumLevel) -> dict:
    return {
        "value": float(level.value),
        "multiplicity": int(level.multiplicity),
        "source": level.source.value,
        "sectors": [int(m) for m in level.sectors],
    }


def level_from_record(rec: dict) -> SpectrumLevel:
    sectors = rec.get("sectors", ())
    if isinstance(sectors, str):
        sectors = [int(m) for m in sectors.split(";") if m]
    return SpectrumLevel(float(rec["value"]), int(rec["multiplicity"]),
                         Source(rec["source"]), tuple(int(m) for m in sectors))


def write_levels_csv(levels, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SPECTRUM_COLUMNS)
        for lv in levels:
            w.writerow([_fmt(float(lv.value)), lv.multiplicity, lv.source.value,
                        ";".join(str(m) for m in lv.sectors)])


def read_levels_csv(path) -> list[SpectrumLevel]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [level_from_record(r) for r in rows]


def to_jsonable(obj):
    if isinstance(obj, SpectrumLevel):
        return level_record(obj)
    if isinstance(obj, Enum):
        return obj.value
    if is_dataclass(obj):
        return to_jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(obj, path) -> None:
    Path(path).write_text(json.dumps(to_jsonable(obj), indent=2, sort_keys=False) + "\n")


def write_levels(levels, path, fmt: str) -> None:
    if fmt == "csv":
        write_levels_csv(levels, path)
    else:
        write_json([level_record(lv) for lv in levels], path)


def write_rows_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def write_trajectory_csv(tr, path) -> None:
    rows = np.column_stack((tr.times, tr.positions, tr.velocities))
    write_rows_csv(path, TRAJECTORY_COLUMNS, rows)


def write_unrolled_csv(curve, path) -> None:
    seg = np.linalg.norm(np.diff(curve, axis=0), axis=1)
    s = np.concatenate(([0.0], np.cumsum(seg)))
    write_rows_csv(path, UNROLLED_COLUMNS, np.column_stack((s, curve)))
