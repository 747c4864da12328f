"""Reduced dynamics of the target pair under pure dephasing.

Three routes to the (00, 11) coherence:

* state-vector evolution of the whole system followed by a partial trace,
* the 2^N-term average of ``exp(-i w_flip t)`` over environment words,
* the product ``prod_k cos(eta_k t / hbar)``, which is the same average
  factorized and is the production path,

plus the Gaussian approximation ``exp(-(w_rms t)^2 / 2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from mcqdisent.electrostatics import FlipCoefficients, total_energies
from mcqdisent.errors import CapExceededError, InvariantViolation
from mcqdisent.geometry import Scene
from mcqdisent.spectra import DOUBLE_FLIP, ENUMERATION_CAP, rms_from_coefficients, signed_sums

STATE_VECTOR_CAP = 22

EXACT = "exact"
GAUSSIAN = "gaussian"
NUMERICAL = "numerical"
MODELS = (NUMERICAL, EXACT, GAUSSIAN)

# basis order of the target pair: index 2*m_A + m_B
AB_LABELS = ("00", "01", "10", "11")


def draw_phases(rng: np.random.Generator, n_env: int) -> np.ndarray:
    """Relative phases of the environment superpositions, uniform on [0, 2pi)."""
    return rng.uniform(0.0, 2.0 * math.pi, size=n_env)


@dataclass(frozen=True, eq=False)
class GlobalState:
    """Amplitudes indexed by ``s = p + 2^N * (2*m_A + m_B)``."""

    amplitudes: np.ndarray
    n_env: int

    def blocks(self) -> np.ndarray:
        """View of shape (4, 2^N); row ``2*m_A + m_B``."""
        return self.amplitudes.reshape(4, 2**self.n_env)

    def norm(self) -> float:
        a = self.amplitudes
        return math.sqrt(float(np.sum(a.real**2 + a.imag**2)))


@dataclass(frozen=True, eq=False)
class ReducedDensity:
    rho: np.ndarray

    @property
    def coherence(self) -> complex:
        """<00|rho|11>."""
        return complex(self.rho[0, 3])

    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))

    def check(self, atol: float = 1e-10) -> "ReducedDensity":
        """Raise InvariantViolation unless rho is a valid density matrix."""
        rho = self.rho
        if np.max(np.abs(rho - rho.conj().T)) > max(atol, 1e-12):
            raise InvariantViolation("reduced density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > atol:
            raise InvariantViolation(f"trace {np.trace(rho)!r} != 1")
        if np.min(np.linalg.eigvalsh(rho)) < -atol:
            raise InvariantViolation("reduced density matrix has a negative eigenvalue")
        return self


def bell_projector() -> np.ndarray:
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = rho[3, 3] = rho[0, 3] = rho[3, 0] = 0.5
    return rho


def dephased_rho(c) -> ReducedDensity:
    """Diagonal (1/2, 0, 0, 1/2) with (00, 11) coherence c/2."""
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = rho[3, 3] = 0.5
    rho[0, 3] = 0.5 * c
    rho[3, 0] = np.conj(rho[0, 3])
    return ReducedDensity(rho)


def init_global_state(n_env: int, phases, cap: int = STATE_VECTOR_CAP) -> GlobalState:
    """Bell pair times the product of equal-weight environment superpositions."""
    if n_env > cap:
        raise CapExceededError("state vector", n_env, cap)
    phases = np.asarray(phases, dtype=float).reshape(-1)
    if phases.size != n_env:
        raise ValueError(f"expected {n_env} phases, got {phases.size}")
    words = np.arange(2**n_env, dtype=np.int64)
    big_phi = np.zeros(words.size)
    for k in range(n_env):
        big_phi += ((words >> k) & 1) * phases[k]
    env = np.exp(1j * big_phi) * 2.0 ** (-n_env / 2)
    amps = np.zeros((4, words.size), dtype=complex)
    amps[0] = amps[3] = env / math.sqrt(2.0)
    return GlobalState(amps.reshape(-1), n_env)


def global_energies(scene: Scene, include_env_env: bool = True, cap: int = STATE_VECTOR_CAP) -> np.ndarray:
    """(4, 2^N) table of E_{m_A m_B}(p) in eV."""
    return np.stack(
        [total_energies(scene, ab >> 1, ab & 1, include_env_env=include_env_env, cap=cap) for ab in range(4)]
    )


def evolve_numerical(
    state: GlobalState,
    scene: Scene,
    t: float,
    energies: np.ndarray | None = None,
    include_env_env: bool = True,
) -> GlobalState:
    """Apply the diagonal propagator exp(-i H t / hbar).

    ``energies`` may carry a precomputed :func:`global_energies` table.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    if energies is None:
        energies = global_energies(scene, include_env_env=include_env_env)
    if t == 0:
        return GlobalState(state.amplitudes.copy(), state.n_env)
    phase = np.exp(-1j * energies * (t / scene.constants.hbar))
    return GlobalState((state.blocks() * phase).reshape(-1), state.n_env)


def reduce_to_ab(state: GlobalState) -> ReducedDensity:
    """Partial trace over the environment."""
    amps = state.blocks()
    rho = np.empty((4, 4), dtype=complex)
    for i in range(4):
        for j in range(i, 4):
            rho[i, j] = np.sum(amps[i] * np.conj(amps[j]))
            rho[j, i] = np.conj(rho[i, j])
    return ReducedDensity(rho)


def coherence_brute(coeffs: FlipCoefficients, t, cap: int = ENUMERATION_CAP):
    """Average of exp(-i E_flip t / hbar) over all 2^N environment words."""
    if coeffs.n_env > cap:
        raise CapExceededError("coherence enumeration", coeffs.n_env, cap)
    energies = signed_sums(coeffs.eta)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty(t_arr.shape)
    for i, ti in enumerate(t_arr):
        z = np.mean(np.exp(-1j * energies * (ti / coeffs.hbar)))
        if abs(z.imag) >= 1e-10:
            raise InvariantViolation(f"coherence sum has imaginary part {z.imag:.3e} at t = {ti}")
        out[i] = z.real
    return out if np.ndim(t) else float(out[0])


def coherence_factorized(coeffs: FlipCoefficients, t):
    """prod_k cos(eta_k t / hbar), exact for any N."""
    t_arr = np.asarray(t, dtype=float)
    c = np.ones_like(t_arr)
    for e in coeffs.eta:
        c = c * np.cos(e * t_arr / coeffs.hbar)
    return c if np.ndim(t) else float(c)


def omega_rms(coeffs: FlipCoefficients) -> float:
    """RMS double-flip angular frequency in rad/fs."""
    return rms_from_coefficients(coeffs, DOUBLE_FLIP) / coeffs.hbar


def coherence_gaussian(coeffs: FlipCoefficients, t):
    w = omega_rms(coeffs)
    t_arr = np.asarray(t, dtype=float)
    c = np.exp(-0.5 * (w * t_arr) ** 2)
    return c if np.ndim(t) else float(c)


def coherence(coeffs: FlipCoefficients, t, model: str = EXACT):
    if model == EXACT:
        return coherence_factorized(coeffs, t)
    if model == GAUSSIAN:
        return coherence_gaussian(coeffs, t)
    raise ValueError(f"model must be {EXACT!r} or {GAUSSIAN!r}, got {model!r}")


def rho_ab(coeffs: FlipCoefficients, t: float, model: str = EXACT) -> ReducedDensity:
    return dephased_rho(coherence(coeffs, float(t), model))


def numerical_coherence(scene: Scene, phases, times, energies: np.ndarray | None = None) -> np.ndarray:
    """Real part of 2<00|rho|11> from full state-vector evolution at each time."""
    if energies is None:
        energies = global_energies(scene)
    state = init_global_state(scene.n_env, phases)
    out = np.empty(len(times))
    for i, t in enumerate(times):
        out[i] = 2.0 * reduce_to_ab(evolve_numerical(state, scene, float(t), energies)).coherence.real
    return out


@dataclass(frozen=True, eq=False)
class CoherenceSeries:
    """Coherence factor c(t) and its magnitude f(t) on a time grid (fs)."""

    times: np.ndarray
    c: np.ndarray
    tau_e: float = math.nan
    model: str = EXACT

    @property
    def f(self) -> np.ndarray:
        return np.abs(self.c)


def default_time_grid(tau_e: float, n_steps: int = 400, span: float = 4.0) -> np.ndarray:
    if not math.isfinite(tau_e):
        raise ValueError("time grid needs a finite tau_E")
    return np.linspace(0.0, span * tau_e, n_steps)


def coherence_series(coeffs: FlipCoefficients, times, model: str = EXACT, tau_e: float = math.nan) -> CoherenceSeries:
    times = np.asarray(times, dtype=float)
    return CoherenceSeries(times, np.asarray(coherence(coeffs, times, model), dtype=float), tau_e, model)
