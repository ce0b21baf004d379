"""CSV snapshots and refinement reports.

Snapshots have the header ``x,u`` (1D) or ``x,y,u`` (2D); reports have
``resolution,error,order``.  Metadata is written as leading ``#`` lines.
Floats are written with 17 significant digits so files round-trip.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .norms import l2_error, observed_orders

__all__ = [
    "RefinementReport",
    "write_snapshot",
    "read_snapshot",
    "write_report",
    "read_report",
    "snapshot_norm",
]

PathLike = Union[str, Path]


def _fmt(v: float) -> str:
    return "" if v is None or (isinstance(v, float) and math.isnan(v)) else repr(float(v))


def _write(path: PathLike, header: Sequence[str], rows, meta: Optional[Dict[str, object]] = None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        for k, v in (meta or {}).items():
            fh.write(f"# {k}: {v}\n")
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def _read(path: PathLike) -> Tuple[List[str], List[List[str]], Dict[str, str]]:
    meta: Dict[str, str] = {}
    with Path(path).open(newline="") as fh:
        lines = []
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                meta[key.strip()] = value.strip()
            else:
                lines.append(line)
    rows = list(csv.reader(lines))
    if not rows:
        raise ValueError(f"{path} has no header")
    return rows[0], rows[1:], meta


def write_snapshot(path: PathLike, u, x, y=None, meta: Optional[Dict[str, object]] = None) -> Path:
    """Write one time level as ``x,u`` or ``x,y,u``."""
    cols = [np.asarray(x, dtype=float)] + ([] if y is None else [np.asarray(y, dtype=float)])
    cols.append(np.asarray(u, dtype=float))
    if len({c.shape for c in cols}) != 1:
        raise ValueError("snapshot columns must have equal length")
    header = ["x", "u"] if y is None else ["x", "y", "u"]
    return _write(path, header, zip(*cols), meta)


def read_snapshot(path: PathLike) -> Dict[str, np.ndarray]:
    header, rows, _ = _read(path)
    if header not in (["x", "u"], ["x", "y", "u"]):
        raise ValueError(f"unexpected snapshot header {header}")
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    return {name: data[:, k] for k, name in enumerate(header)}


def snapshot_norm(data: Dict[str, np.ndarray]) -> float:
    """Discrete L2 norm of a snapshot's ``u`` column.

    1D snapshots use trapezoid weights in ``x``; 2D snapshots use equal
    weights per row.
    """
    u = np.asarray(data["u"], dtype=float)
    if "y" in data:
        return l2_error(u)
    x = np.asarray(data["x"], dtype=float)
    h = np.diff(x)
    w = np.zeros_like(x)
    w[:-1] += 0.5 * h
    w[1:] += 0.5 * h
    return l2_error(u, weights=w)


@dataclass
class RefinementReport:
    """Errors at a sequence of resolutions with their observed orders.

    ``order_i = log(e_{i-1} / e_i) / log(r_i / r_{i-1})``.  For 1D runs the
    resolution is the cell count ``N``; in 2D it is ``N`` in ``dx / N``.
    """

    resolutions: List[float]
    errors: List[float]
    meta: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.resolutions) != len(self.errors):
            raise ValueError("one error per resolution")

    @property
    def orders(self) -> List[float]:
        return observed_orders(self.resolutions, self.errors)

    def rows(self):
        return list(zip(self.resolutions, self.errors, self.orders))

    def format(self) -> str:
        lines = ["resolution        error      order"]
        for r, e, o in self.rows():
            lines.append(f"{r:>10g}  {e:11.4e}  {'-' if math.isnan(o) else f'{o:7.4f}':>9}")
        return "\n".join(lines)


def write_report(path: PathLike, report: RefinementReport) -> Path:
    return _write(path, ["resolution", "error", "order"], report.rows(), report.meta)


def read_report(path: PathLike) -> RefinementReport:
    header, rows, meta = _read(path)
    if header != ["resolution", "error", "order"]:
        raise ValueError(f"unexpected report header {header}")
    res = [float(r[0]) for r in rows]
    err = [float(r[1]) for r in rows]
    return RefinementReport(res, err, dict(meta))
