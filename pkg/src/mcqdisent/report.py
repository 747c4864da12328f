"""File emission: CSV tables, JSON records and the run manifest."""

from __future__ import annotations

import csv
import json
import math
import platform
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

import mcqdisent


def fmt(x) -> str:
    """Shortest round-trip text for a number; '.' decimal, no grouping."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def write_csv(path: Path, header: list[str], columns: list) -> Path:
    # tolist() keeps 64-bit seeds as exact Python ints
    columns = [c.tolist() if isinstance(c, np.ndarray) else list(c) for c in columns]
    n = len(columns[0]) if columns else 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i in range(n):
            w.writerow([fmt(c[i]) for c in columns])
    return path


def read_csv(path: Path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    return {name: np.array([float(r[i]) for r in body]) for i, name in enumerate(header)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else fmt(x)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path: Path, data) -> Path:
    path.write_text(json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n")
    return path


def versions() -> dict:
    return {
        "mcqdisent": mcqdisent.__version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
    }


@dataclass
class OutputBundle:
    """Directory of emitted files plus the manifest describing them.

    Every file except ``timing.json`` is a pure function of the manifest's
    config echo.
    """

    directory: Path
    command: str
    files: list[Path] = field(default_factory=list)
    manifest: dict = field(default_factory=dict)
    errors: list[str] = field(default_factory=list)

    def add(self, path: Path) -> Path:
        self.files.append(Path(path))
        return path

    def path(self, name: str) -> Path:
        return self.directory / name
