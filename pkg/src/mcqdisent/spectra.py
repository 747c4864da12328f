"""Single- and double-bit-flip energy multisets and their statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from mcqdisent.electrostatics import FlipCoefficients
from mcqdisent.errors import CapExceededError

SINGLE_FLIP_A = "single-flip-A"
SINGLE_FLIP_B = "single-flip-B"
DOUBLE_FLIP = "double-flip"
SOURCES = (SINGLE_FLIP_A, SINGLE_FLIP_B, DOUBLE_FLIP)

ENUMERATION_CAP = 24
MAX_DEFAULT_BINS = 101


def relevant_coefficients(coeffs: FlipCoefficients, which: str) -> np.ndarray:
    """Coefficient list whose signed sums form the ``which`` multiset."""
    if which == DOUBLE_FLIP:
        return coeffs.eta
    if which == SINGLE_FLIP_A:
        return coeffs.local_a()
    if which == SINGLE_FLIP_B:
        return coeffs.local_b()
    raise ValueError(f"unknown multiset source {which!r}; expected one of {SOURCES}")


@dataclass(frozen=True, eq=False)
class EnergyMultiset:
    values: np.ndarray
    source: str
    explicit: bool = True

    def __len__(self):
        return self.values.size


@dataclass(frozen=True, eq=False)
class Moments:
    mean: float
    rms: float
    _values: np.ndarray | None = field(default=None, repr=False)

    def raw_moment(self, k: int) -> float:
        if self._values is None:
            raise ValueError("raw moments need an explicit multiset")
        return float(np.mean(self._values**k))


@dataclass(frozen=True, eq=False)
class Histogram:
    bin_edges: np.ndarray
    counts: np.ndarray

    @property
    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    @property
    def bin_widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)


@dataclass(frozen=True)
class GaussianFit:
    amplitude: float
    mean: float
    sigma: float

    def __call__(self, e):
        e = np.asarray(e, dtype=float)
        return self.amplitude * np.exp(-((e - self.mean) ** 2) / (2.0 * self.sigma**2))


def signed_sums(eta: np.ndarray) -> np.ndarray:
    """All 2^W values ``sum_k P(bit k of p) * eta[k]`` indexed by word p.

    Doubling construction: after step k the array holds words of width
    k+1, with the new bit as the most significant. Rounding is symmetric
    under negation, so word p and its complement give exactly opposite
    values.
    """
    vals = np.zeros(1)
    for e in np.asarray(eta, dtype=float):
        vals = np.concatenate([vals - e, vals + e])
    return vals


def enumerate_flip_energies(coeffs: FlipCoefficients, which: str = DOUBLE_FLIP, cap: int = ENUMERATION_CAP) -> EnergyMultiset:
    eta = relevant_coefficients(coeffs, which)
    if eta.size > cap:
        raise CapExceededError(f"{which} enumeration", eta.size, cap)
    return EnergyMultiset(signed_sums(eta), which, explicit=True)


def rms_from_coefficients(coeffs: FlipCoefficients, which: str = DOUBLE_FLIP) -> float:
    """Exact RMS of the full 2^W multiset; the cross terms average to zero."""
    eta = relevant_coefficients(coeffs, which)
    return math.sqrt(float(np.sum(eta * eta)))


def moments(ms: EnergyMultiset, k: int) -> float:
    """k-th raw moment ``<E^k>`` in eV^k."""
    if k < 1:
        raise ValueError("moment order must be >= 1")
    if not ms.explicit:
        raise ValueError("moments need an explicit multiset")
    return float(np.mean(ms.values**k))


def summarize(ms: EnergyMultiset) -> Moments:
    v = ms.values
    return Moments(mean=float(np.mean(v)), rms=math.sqrt(float(np.mean(v * v))), _values=v)


def ordered_half_rms(ms: EnergyMultiset) -> float:
    """RMS from the non-negative half of an antisymmetric multiset.

    Sorts from most positive to most negative and keeps the first half,
    which suffices because complements pair each value with its negative.
    """
    v = np.sort(ms.values)[::-1]
    half = v[: max(v.size // 2, 1)]
    return math.sqrt(float(np.sum(half * half)) / half.size)


def default_bin_count(n_values: int) -> int:
    return max(1, min(MAX_DEFAULT_BINS, math.ceil(math.sqrt(n_values))))


def histogram(ms: EnergyMultiset, n_bins: int | None = None) -> Histogram:
    """Equal-width bins over [min, max], right-most edge inclusive.

    An all-equal multiset goes into one bin centred on its value.
    """
    v = np.asarray(ms.values, dtype=float)
    if n_bins is None:
        n_bins = default_bin_count(v.size)
    if n_bins < 1:
        raise ValueError("n_bins must be >= 1")
    lo, hi = float(v.min()), float(v.max())
    if lo == hi:
        half = 0.5 * abs(lo) if lo != 0.0 else 0.5
        return Histogram(np.array([lo - half, lo + half]), np.array([v.size], dtype=np.int64))
    counts, edges = np.histogram(v, bins=n_bins, range=(lo, hi))
    return Histogram(edges, counts.astype(np.int64))


def gaussian_fit_amplitude(h: Histogram, mean: float, sigma: float) -> GaussianFit:
    """Least-squares amplitude of a Gaussian with fixed centre and width."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    u = np.exp(-((h.bin_centers - mean) ** 2) / (2.0 * sigma**2))
    uu = float(np.sum(u * u))
    if uu == 0.0:
        return GaussianFit(0.0, mean, sigma)
    amp = float(np.sum(h.counts * u)) / uu
    return GaussianFit(max(amp, 0.0), mean, sigma)
