"""Diagnostics on coherence and correlation curves.

Linearization: for g(t) = exp(-t^2 / 2 s^2), ln(-ln g) = 2 ln t - ln(2 s^2),
so Gaussian decay gives slope 2 against ln t and exponential decay slope 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from mcqdisent.dynamics import CoherenceSeries
from mcqdisent.errors import DomainError

EPS = 1e-12


@dataclass(frozen=True, eq=False)
class LinearizedSeries:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    valid: np.ndarray
    tau_e: float = math.nan


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    window: tuple[int, int]


@dataclass(frozen=True, eq=False)
class CollapseStats:
    crossing_times: np.ndarray
    dispersion: float


class CrossingError(DomainError):
    def __init__(self, indices):
        self.indices = list(indices)
        super().__init__(f"curves never cross the threshold: {self.indices}")


def linearize(series: CoherenceSeries) -> LinearizedSeries:
    """y = ln(-ln f) against x = ln t; points where this is undefined are masked."""
    t = np.asarray(series.times, dtype=float)
    f = np.asarray(series.f, dtype=float)
    if t.size == 0:
        raise DomainError("empty series")
    valid = (t > 0) & (f > EPS) & (f < 1.0 - EPS)
    x = np.full(t.shape, np.nan)
    y = np.full(t.shape, np.nan)
    x[valid] = np.log(t[valid])
    y[valid] = np.log(-np.log(f[valid]))
    if not valid.any():
        raise DomainError("no valid points to linearize")
    return LinearizedSeries(t, x, y, valid, series.tau_e)


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    xm, ym = float(np.mean(x)), float(np.mean(y))
    dx = x - xm
    slope = float(np.sum(dx * (y - ym)) / np.sum(dx * dx))
    return slope, ym - slope * xm


def early_slope(ls: LinearizedSeries, t_max: float | None = None, window_fraction: float | None = None) -> SlopeFit:
    """OLS slope over the earliest valid points.

    Window is ``t <= t_max`` if given, else the first ``window_fraction`` of
    valid points, else ``t <= tau_E / 4``.
    """
    idx = np.flatnonzero(ls.valid)
    if t_max is None and window_fraction is None:
        if not math.isfinite(ls.tau_e):
            raise DomainError("default window needs tau_E on the series")
        t_max = ls.tau_e / 4.0
    if t_max is not None:
        idx = idx[ls.t[idx] <= t_max]
    else:
        idx = idx[: max(int(math.ceil(window_fraction * idx.size)), 0)]
    # keep the contiguous early run only, so a revival does not leak in
    if idx.size:
        breaks = np.flatnonzero(np.diff(idx) != 1)
        if breaks.size:
            idx = idx[: breaks[0] + 1]
    if idx.size < 2:
        raise DomainError(f"need at least 2 valid points in the early window, have {idx.size}")
    slope, intercept = _ols(ls.x[idx], ls.y[idx])
    return SlopeFit(slope, intercept, (int(idx[0]), int(idx[-1])))


def first_crossing(times, values, threshold: float) -> float:
    """Linearly interpolated time at which ``values`` first reaches ``threshold``.

    Returns NaN if it never does.
    """
    v = np.asarray(values, dtype=float) - threshold
    t = np.asarray(times, dtype=float)
    if v[0] == 0.0:
        return float(t[0])
    side = np.sign(v[0])
    hits = np.flatnonzero(np.sign(v[1:]) != side)
    if hits.size == 0:
        return math.nan
    i = int(hits[0])
    v0, v1 = v[i], v[i + 1]
    return float(t[i] + (t[i + 1] - t[i]) * v0 / (v0 - v1))


def collapse_stats(curves, threshold: float, scale: str = "tau_e") -> CollapseStats:
    """Spread of first-crossing times after scaling each curve by its own time scale.

    ``curves`` holds ``(TimescaleReport, times, values)`` triples; ``scale``
    names the report attribute used as the time unit (``tau_e`` or
    ``tau_geo``).
    """
    crossings = []
    missing = []
    for i, (rep, times, values) in enumerate(curves):
        unit = getattr(rep, scale)
        tc = first_crossing(np.asarray(times) / unit, values, threshold)
        if math.isnan(tc):
            missing.append(i)
        crossings.append(tc)
    if missing:
        raise CrossingError(missing)
    arr = np.array(crossings)
    mean = float(np.mean(arr))
    ddof = 1 if arr.size > 1 else 0
    disp = float(np.std(arr, ddof=ddof) / mean) if mean != 0 else 0.0
    return CollapseStats(arr, disp)


def reference_line(ls: LinearizedSeries, slope: float = 2.0) -> tuple[np.ndarray, np.ndarray]:
    """Line of the given slope through the first valid point."""
    i = int(np.flatnonzero(ls.valid)[0])
    x = ls.x[ls.valid]
    return x, ls.y[i] + slope * (x - ls.x[i])
