"""Point-charge Coulomb energies between DQDs and the per-molecule flip
coefficients that generate every bit-flip energy.

Each DQD carries +e/2 on both dots and one mobile electron, so the pair
energy reduces to a quadrupole-free four-term sum whose overall sign is the
product of the two polarizations P(1) = +1, P(0) = -1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from mcqdisent.constants import PhysicalConstants, default_constants
from mcqdisent.errors import CapExceededError, GeometryError
from mcqdisent.geometry import DqdSpec, Scene

MIN_DISTANCE_NM = 1e-9


def polarization(m):
    """P(m) = 2m - 1; works elementwise on arrays."""
    return 2 * m - 1


def coupling(j: DqdSpec, k: DqdSpec, constants: PhysicalConstants) -> float:
    """Pair energy with both molecules in state 1 (eV)."""
    dj = j.dots()
    dk = k.dots()
    diff = dj[:, None, :] - dk[None, :, :]
    r = np.sqrt(np.sum(diff * diff, axis=-1))
    if np.min(r) < MIN_DISTANCE_NM:
        raise GeometryError(f"dot-dot distance {np.min(r):.3e} nm below {MIN_DISTANCE_NM:g} nm")
    bracket = 1.0 / r[0, 0] - 1.0 / r[0, 1] - 1.0 / r[1, 0] + 1.0 / r[1, 1]
    return constants.dipole_prefactor * bracket


def pair_energy(j: DqdSpec, m_j: int, k: DqdSpec, m_k: int, constants: PhysicalConstants | None = None) -> float:
    """Electrostatic energy of molecule ``j`` in state ``m_j`` and ``k`` in ``m_k``."""
    constants = constants or default_constants()
    return polarization(m_j) * polarization(m_k) * coupling(j, k, constants)


def coupling_matrix(scene: Scene) -> np.ndarray:
    """Symmetric (N+2, N+2) matrix of state-11 pair energies.

    Order is A, B, env 0..N-1. Non-interacting pairs (different groups when
    d is infinite) and the diagonal are exactly zero.
    """
    mols = scene.molecules()
    groups = scene.molecule_groups()
    n = len(mols)
    J = np.zeros((n, n))
    for j in range(n):
        for k in range(j + 1, n):
            if scene.interacts(groups[j], groups[k]):
                J[j, k] = J[k, j] = coupling(mols[j], mols[k], scene.constants)
    return J


def _word_polarizations(env_word: int, n_env: int) -> np.ndarray:
    bits = (int(env_word) >> np.arange(n_env)) & 1
    return 2.0 * bits - 1.0


def total_energy(scene: Scene, m_A: int, m_B: int, env_word: int, J: np.ndarray | None = None) -> float:
    """Total electrostatic energy of one global basis state (eV).

    Bit k of ``env_word`` is the state of environment molecule k.
    """
    if not 0 <= env_word < 2**scene.n_env:
        raise ValueError(f"env_word {env_word} out of range for N = {scene.n_env}")
    if J is None:
        J = coupling_matrix(scene)
    s = np.concatenate([[polarization(m_A), polarization(m_B)], _word_polarizations(env_word, scene.n_env)])
    total = 0.0
    n = len(s)
    for j in range(n):
        for k in range(j + 1, n):
            total += s[j] * s[k] * J[j, k]
    return float(total)


def total_energies(scene: Scene, m_A: int, m_B: int, include_env_env: bool = True, cap: int = 22) -> np.ndarray:
    """Energies of all 2^N environment words for fixed target states.

    Built by elementwise accumulation over molecule pairs, so the result
    does not depend on BLAS threading.
    """
    N = scene.n_env
    if N > cap:
        raise CapExceededError("global energy table", N, cap)
    J = coupling_matrix(scene)
    words = np.arange(2**N, dtype=np.int64)
    s_env = [((words >> k) & 1).astype(np.float64) * 2.0 - 1.0 for k in range(N)]
    sA, sB = float(polarization(m_A)), float(polarization(m_B))
    E = np.full(2**N, sA * sB * J[0, 1])
    for k in range(N):
        field_k = sA * J[0, k + 2] + sB * J[1, k + 2]
        if field_k != 0.0:
            E += field_k * s_env[k]
    if include_env_env:
        for j in range(N):
            for k in range(j + 1, N):
                w = J[j + 2, k + 2]
                if w != 0.0:
                    E += w * (s_env[j] * s_env[k])
    return E


@dataclass(frozen=True, eq=False)
class FlipCoefficients:
    """Per-environment-molecule contributions to the bit-flip energies.

    ``eta_a[k]`` is twice the state-11 pair energy between target A and
    environment molecule k (likewise ``eta_b``). A double flip given word p
    costs ``sum_k P(bit k of p) * eta[k]``. Molecules ``0..n_group_a-1``
    form A's local environment.
    """

    eta_a: np.ndarray
    eta_b: np.ndarray
    n_group_a: int
    constants: PhysicalConstants = field(default_factory=default_constants)

    def __post_init__(self):
        ea = np.asarray(self.eta_a, dtype=float).reshape(-1).copy()
        eb = np.asarray(self.eta_b, dtype=float).reshape(-1).copy()
        if ea.shape != eb.shape:
            raise ValueError("eta_a and eta_b must have equal length")
        if not 0 <= self.n_group_a <= ea.size:
            raise ValueError("n_group_a out of range")
        ea.flags.writeable = False
        eb.flags.writeable = False
        object.__setattr__(self, "eta_a", ea)
        object.__setattr__(self, "eta_b", eb)

    @classmethod
    def from_values(cls, eta, constants: PhysicalConstants | None = None) -> "FlipCoefficients":
        """Coefficients with every molecule in A's group and ``eta_b = 0``."""
        eta = np.asarray(eta, dtype=float).reshape(-1)
        return cls(eta, np.zeros_like(eta), eta.size, constants or default_constants())

    @classmethod
    def from_groups(cls, eta_a_local, eta_b_local, constants: PhysicalConstants | None = None) -> "FlipCoefficients":
        """Coefficients of two non-interacting local environments."""
        la = np.asarray(eta_a_local, dtype=float).reshape(-1)
        lb = np.asarray(eta_b_local, dtype=float).reshape(-1)
        ea = np.concatenate([la, np.zeros_like(lb)])
        eb = np.concatenate([np.zeros_like(la), lb])
        return cls(ea, eb, la.size, constants or default_constants())

    @property
    def eta(self) -> np.ndarray:
        return self.eta_a + self.eta_b

    @property
    def n_env(self) -> int:
        return self.eta_a.size

    @property
    def hbar(self) -> float:
        return self.constants.hbar

    def local_a(self) -> np.ndarray:
        return self.eta_a[: self.n_group_a]

    def local_b(self) -> np.ndarray:
        return self.eta_b[self.n_group_a :]

    def scaled(self, s: float) -> "FlipCoefficients":
        return FlipCoefficients(self.eta_a * s, self.eta_b * s, self.n_group_a, self.constants)


def flip_coefficients(scene: Scene) -> FlipCoefficients:
    """Flip coefficients of a scene.

    Environment-environment and A-B terms cancel exactly in E_11 - E_00 and
    are therefore absent.
    """
    N = scene.n_env
    eta_a = np.zeros(N)
    eta_b = np.zeros(N)
    for k, mol in enumerate(scene.env):
        grp = scene.group(k)
        if scene.interacts("A", grp):
            eta_a[k] = 2.0 * coupling(scene.target_a, mol, scene.constants)
        if scene.interacts("B", grp):
            eta_b[k] = 2.0 * coupling(scene.target_b, mol, scene.constants)
    return FlipCoefficients(eta_a, eta_b, scene.n_group_a, scene.constants)
