import math

import numpy as np
import pytest
from conftest import make_scene, seeded_scenes
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import brute_multiset, brute_rms, golden_section_min

from mcqdisent.electrostatics import FlipCoefficients, flip_coefficients
from mcqdisent.errors import CapExceededError
from mcqdisent.spectra import (
    DOUBLE_FLIP,
    SINGLE_FLIP_A,
    SINGLE_FLIP_B,
    EnergyMultiset,
    Histogram,
    enumerate_flip_energies,
    gaussian_fit_amplitude,
    histogram,
    moments,
    ordered_half_rms,
    rms_from_coefficients,
    summarize,
)


def ms(values):
    return EnergyMultiset(np.asarray(values, float), DOUBLE_FLIP)


def test_two_coefficient_enumeration():
    got = enumerate_flip_energies(FlipCoefficients.from_values([3.0, 4.0])).values
    assert sorted(got) == [-7.0, -1.0, 1.0, 7.0]
    # bit k of the word index holds molecule k
    assert list(got) == [-7.0, -1.0, 1.0, 7.0]


def test_empty_enumeration():
    assert list(enumerate_flip_energies(FlipCoefficients.from_values([])).values) == [0.0]


def test_enumeration_matches_itertools_oracle():
    eta = np.random.default_rng(1).normal(size=9)
    got = enumerate_flip_energies(FlipCoefficients.from_values(eta)).values
    assert np.allclose(np.sort(got), np.sort(brute_multiset(eta)), atol=1e-13)


def test_enumeration_cap():
    with pytest.raises(CapExceededError, match="cap is 4"):
        enumerate_flip_energies(FlipCoefficients.from_values(np.ones(5)), cap=4)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1.0, 1.0, allow_nan=False), min_size=0, max_size=12))
def test_enumeration_antisymmetric(eta):
    v = enumerate_flip_energies(FlipCoefficients.from_values(eta)).values
    assert np.array_equal(np.sort(v), np.sort(-v))
    assert np.array_equal(v[::-1], -v)
    rms = math.sqrt(np.mean(v * v))
    assert abs(np.mean(v)) <= 1e-12 * max(rms, 1e-300) or rms == 0


def test_rms_from_coefficients_examples():
    co = FlipCoefficients.from_values([3.0, 4.0])
    assert rms_from_coefficients(co) == 5.0
    assert brute_rms([3.0, 4.0]) == pytest.approx(math.sqrt((49 + 49 + 1 + 1) / 4))
    assert rms_from_coefficients(FlipCoefficients.from_values([-2.5])) == 2.5


@pytest.mark.parametrize("N", [1, 5, 10, 16])
def test_rms_matches_enumeration(N):
    eta = np.random.default_rng(N).normal(size=N) * 0.05
    co = FlipCoefficients.from_values(eta)
    full = enumerate_flip_energies(co).values
    assert rms_from_coefficients(co) == pytest.approx(math.sqrt(np.mean(full**2)), rel=1e-12)


def test_moments_examples():
    assert moments(ms([1, -1]), 2) == 1.0
    assert moments(ms([1, -1]), 3) == 0.0
    assert moments(ms([7, -7, 1, -1]), 2) == 25.0
    m = summarize(ms([7, -7, 1, -1]))
    assert m.rms == 5.0 and m.mean == 0.0 and m.raw_moment(2) == m.rms**2


def test_scene_multisets_antisymmetric_and_odd_moments_vanish():
    for s in seeded_scenes(10, 6):
        co = flip_coefficients(s)
        for src in (SINGLE_FLIP_A, SINGLE_FLIP_B, DOUBLE_FLIP):
            v = enumerate_flip_energies(co, src).values
            assert np.array_equal(np.sort(v), np.sort(-v))
            rms = math.sqrt(np.mean(v * v))
            for k in (1, 3):
                assert abs(moments(ms(v), k)) < 1e-12 * rms**k


def test_pythagorean_identity():
    for s in seeded_scenes(10, 5, R_A=4.0, R_B=3.0):
        co = flip_coefficients(s)
        lhs = rms_from_coefficients(co, DOUBLE_FLIP) ** 2
        rhs = rms_from_coefficients(co, SINGLE_FLIP_A) ** 2 + rms_from_coefficients(co, SINGLE_FLIP_B) ** 2
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_ordered_half_matches_full_rms():
    for s in seeded_scenes(5, 6):
        co = flip_coefficients(s)
        for src in (SINGLE_FLIP_A, SINGLE_FLIP_B, DOUBLE_FLIP):
            e = enumerate_flip_energies(co, src)
            assert ordered_half_rms(e) == pytest.approx(summarize(e).rms, rel=1e-12)


def test_histogram_examples():
    assert list(histogram(ms([0, 0, 0]), 1).counts) == [3]
    assert list(histogram(ms([7, -7, 1, -1]), 2).counts) == [2, 2]
    h = histogram(ms([5.0, 5.0]), 4)
    assert list(h.counts) == [2] and h.bin_edges[0] < 5.0 < h.bin_edges[1]


def test_histogram_conserves_counts_and_includes_right_edge():
    v = np.random.default_rng(0).normal(size=1001)
    h = histogram(ms(v))
    assert h.counts.sum() == v.size
    assert h.counts.size == 32  # ceil(sqrt(1001))
    assert np.all(np.diff(h.bin_edges) > 0)
    assert h.counts[-1] >= 1


def test_default_bins_capped():
    h = histogram(ms(np.linspace(-1, 1, 40_000)))
    assert h.counts.size == 101


def test_fit_recovers_exact_amplitude():
    edges = np.linspace(-3, 3, 25)
    c = 0.5 * (edges[1:] + edges[:-1])
    u = np.exp(-((c - 0.2) ** 2) / (2 * 0.9**2))
    fit = gaussian_fit_amplitude(Histogram(edges, 37.5 * u), 0.2, 0.9)
    assert fit.amplitude == pytest.approx(37.5, rel=1e-12)


def test_fit_zero_counts_and_far_mean():
    edges = np.linspace(-1, 1, 5)
    assert gaussian_fit_amplitude(Histogram(edges, np.zeros(4)), 0.0, 1.0).amplitude == 0.0
    assert gaussian_fit_amplitude(Histogram(edges, np.ones(4)), 1e6, 1e-3).amplitude == 0.0


def test_fit_is_least_squares_minimum():
    rng = np.random.default_rng(4)
    edges = np.linspace(-2, 2, 21)
    c = 0.5 * (edges[1:] + edges[:-1])
    u = np.exp(-(c**2) / 2)
    counts = np.maximum(0, np.round(100 * u + rng.normal(scale=5, size=c.size)))
    fit = gaussian_fit_amplitude(Histogram(edges, counts), 0.0, 1.0)
    best = golden_section_min(lambda A: float(np.sum((counts - A * u) ** 2)), 0.0, 300.0)
    assert fit.amplitude == pytest.approx(best, abs=1e-9 * max(1.0, best))
