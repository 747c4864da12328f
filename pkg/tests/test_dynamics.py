import math

import numpy as np
import pytest
from conftest import make_scene, seeded_scenes
from oracles import brute_coherence, PairTable

from mcqdisent.constants import PhysicalConstants
from mcqdisent.electrostatics import FlipCoefficients, flip_coefficients
from mcqdisent.errors import CapExceededError
from mcqdisent.geometry import DqdSpec, Scene, make_rng
from mcqdisent.dynamics import (
    EXACT,
    GAUSSIAN,
    bell_projector,
    coherence_brute,
    coherence_factorized,
    coherence_gaussian,
    coherence_series,
    default_time_grid,
    draw_phases,
    evolve_numerical,
    global_energies,
    init_global_state,
    numerical_coherence,
    omega_rms,
    reduce_to_ab,
    rho_ab,
)
from mcqdisent.timescales import timescales

UNIT = PhysicalConstants(hbar=1.0)


def test_bare_bell_state():
    s = init_global_state(0, [])
    assert np.allclose(s.amplitudes, [1 / math.sqrt(2), 0, 0, 1 / math.sqrt(2)])


def test_initial_state_norm_and_phase():
    st = init_global_state(1, [math.pi / 2])
    assert st.norm() == pytest.approx(1.0, abs=1e-12)
    # s = p + 2^N * 0 for |00>, p = 1
    assert st.amplitudes[1] == pytest.approx(1j / 2, abs=1e-15)
    st = init_global_state(7, draw_phases(make_rng(1), 7))
    assert st.norm() == pytest.approx(1.0, abs=1e-12)


def test_state_vector_cap():
    with pytest.raises(CapExceededError):
        init_global_state(5, np.zeros(5), cap=4)


def test_evolution_identity_and_norm():
    s = make_scene(3, 2)
    st = init_global_state(6, draw_phases(make_rng(2), 6))
    assert np.array_equal(evolve_numerical(st, s, 0.0).amplitudes, st.amplitudes)
    assert evolve_numerical(st, s, 17.3).norm() == pytest.approx(1.0, abs=1e-10)


def test_evolution_phases_match_energy_oracle():
    s = make_scene(1, 8, d=20.0)  # N = 2
    st = init_global_state(2, [0.3, 1.1])
    t = 2.7
    ev = evolve_numerical(st, s, t).blocks()
    oracle = PairTable(s)
    for ab in (0, 3):
        for p in range(4):
            E = oracle.energy(ab >> 1, ab & 1, p)
            expected = st.blocks()[ab, p] * np.exp(-1j * E * t / s.constants.hbar)
            assert ev[ab, p] == pytest.approx(expected, abs=1e-13)


def test_reduced_density_initial_and_populations():
    st = init_global_state(4, draw_phases(make_rng(3), 4))
    assert np.allclose(reduce_to_ab(st).rho, bell_projector(), atol=1e-14)
    rho = reduce_to_ab(evolve_numerical(st, make_scene(2, 3), 9.0)).check().rho
    assert np.allclose(np.diag(rho).real, [0.5, 0, 0, 0.5], atol=1e-14)


def test_numerical_matches_semi_analytic_n8():
    s = make_scene(4, 31)
    co = flip_coefficients(s)
    st = init_global_state(8, draw_phases(make_rng(4), 8))
    E = global_energies(s)
    for t in np.random.default_rng(5).uniform(0, 60, size=10):
        num = reduce_to_ab(evolve_numerical(st, s, t, E)).rho
        assert np.max(np.abs(num - rho_ab(co, t).rho)) < 1e-10


def test_phase_invariance():
    s = make_scene(3, 12)
    E = global_energies(s)
    times = np.linspace(0, 40, 7)
    ref = numerical_coherence(s, np.zeros(6), times, E)
    for seed in range(3):
        got = numerical_coherence(s, draw_phases(make_rng(seed), 6), times, E)
        assert np.max(np.abs(got - ref)) < 1e-12


def test_env_env_terms_cancel():
    s = make_scene(3, 13)
    st = init_global_state(6, draw_phases(make_rng(9), 6))
    with_ee = global_energies(s, include_env_env=True)
    without = global_energies(s, include_env_env=False)
    for t in (3.0, 11.0, 40.0):
        a = reduce_to_ab(evolve_numerical(st, s, t, with_ee)).rho
        b = reduce_to_ab(evolve_numerical(st, s, t, without)).rho
        assert np.max(np.abs(a - b)) < 1e-12


def test_coherence_brute_examples():
    co = FlipCoefficients.from_values([0.3])
    assert coherence_brute(co, 0.0) == 1.0
    assert coherence_brute(co, 5.0) == pytest.approx(math.cos(0.3 * 5.0 / co.hbar), abs=1e-15)
    co = FlipCoefficients.from_values([3.0, 4.0], UNIT)
    assert coherence_brute(co, 1.0) == pytest.approx((math.cos(7) + math.cos(1)) / 2, abs=1e-15)
    assert coherence_brute(co, 1.0) == pytest.approx(math.cos(3) * math.cos(4), abs=1e-15)


def test_brute_matches_itertools_oracle():
    eta = np.random.default_rng(6).normal(size=8) * 0.1
    co = FlipCoefficients.from_values(eta)
    for t in (0.5, 3.0, 20.0):
        z = brute_coherence(eta, t, co.hbar)
        assert abs(z.imag) < 1e-12
        assert coherence_brute(co, t) == pytest.approx(z.real, abs=1e-12)


def test_factorized_matches_brute():
    rng = np.random.default_rng(7)
    for s in seeded_scenes(10, 8):
        co = flip_coefficients(s)
        tau = timescales(co).tau_e
        for t in rng.uniform(0, 4 * tau, size=3):
            assert coherence_factorized(co, t) == pytest.approx(coherence_brute(co, t), abs=1e-10)


def test_factorized_zero_and_empty():
    co = FlipCoefficients.from_values([0.1, 0.02], UNIT)
    assert coherence_factorized(co, math.pi / 2 / 0.1) == pytest.approx(0.0, abs=1e-16)
    empty = FlipCoefficients.from_values([])
    assert np.all(coherence_factorized(empty, np.linspace(0, 100, 5)) == 1.0)


def test_gaussian_definition():
    co = FlipCoefficients.from_values([0.05, -0.12, 0.07])
    w = omega_rms(co)
    assert coherence_gaussian(co, 0.0) == 1.0
    assert coherence_gaussian(co, 1 / w) == pytest.approx(math.exp(-0.5), rel=1e-14)
    assert abs(rho_ab(co, 10 / w, GAUSSIAN).coherence) < 1e-21


@pytest.mark.parametrize("eta", [[1.0], [1.0, 0.01, 0.02], [0.5, 0.5], list(np.linspace(0.01, 0.1, 20))])
def test_gaussian_close_early(eta):
    co = FlipCoefficients.from_values(eta)
    tau = timescales(co).tau_e
    t = np.linspace(0, tau / 4, 300)
    assert np.max(np.abs(coherence_factorized(co, t) - coherence_gaussian(co, t))) <= 0.05


def test_rho_models_at_zero():
    co = flip_coefficients(make_scene(3, 1))
    for model in (EXACT, GAUSSIAN):
        assert np.allclose(rho_ab(co, 0.0, model).rho, bell_projector())


def test_purity_and_revival():
    co = FlipCoefficients.from_values([0.04])
    for t in (0.0, 3.0, 17.0):
        r = rho_ab(co, t)
        c = coherence_factorized(co, t)
        assert r.purity() == pytest.approx(0.5 * (1 + c * c), abs=1e-14)
        assert 0.5 - 1e-14 <= r.purity() <= 1 + 1e-14
    t_rev = 2 * math.pi * co.hbar / 0.04
    assert coherence_factorized(co, t_rev) == pytest.approx(1.0, abs=1e-12)


def test_global_flip_convention_invariance():
    s = make_scene(4, 77)
    flipped = Scene(
        *(DqdSpec(m.center, -m.orientation, m.a) for m in (s.target_a, s.target_b)),
        tuple(DqdSpec(m.center, -m.orientation, m.a) for m in s.env),
        n_group_a=s.n_group_a,
    )
    t = np.linspace(0, 50, 9)
    a = coherence_factorized(flip_coefficients(s), t)
    b = coherence_factorized(flip_coefficients(flipped), t)
    assert np.allclose(a, b, atol=1e-14)


def test_series_and_grid():
    co = flip_coefficients(make_scene(5, 2))
    tau = timescales(co).tau_e
    t = default_time_grid(tau)
    assert t.size == 400 and t[-1] == pytest.approx(4 * tau)
    s = coherence_series(co, t, tau_e=tau)
    assert s.c[0] == 1.0 and np.all(s.f <= 1.0) and np.array_equal(s.f, np.abs(s.c))
