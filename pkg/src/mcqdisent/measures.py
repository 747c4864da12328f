"""Bell-type correlation functions of the two-qubit reduced state."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from mcqdisent.dynamics import ReducedDensity, dephased_rho
from mcqdisent.errors import DomainError

SQRT2 = math.sqrt(2.0)

BM = "bm"
CHSH = "chsh"
BPRV = "bprv"
MEASURES = (BM, CHSH, BPRV)

BM_BOUND = 1.0
CHSH_BOUND = 2.0
BPRV_BOUND = 7.0


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def _default_chsh():
    z = np.array([0.0, 0.0, 1.0])
    x = np.array([1.0, 0.0, 0.0])
    return (z, x, _unit(z + x), _unit(z - x))


@dataclass(frozen=True, eq=False)
class MeasurementSettings:
    """Bell-Mermin angles and CHSH directions (a, a', b, b') as (x, y, z)."""

    bm_angles: tuple[float, float, float] = (0.0, math.pi / 3, 2 * math.pi / 3)
    chsh_directions: tuple[np.ndarray, ...] = field(default_factory=_default_chsh)
    bm_ordered_pairs: bool = False

    def __post_init__(self):
        dirs = tuple(np.asarray(d, dtype=float) for d in self.chsh_directions)
        if len(dirs) != 4 or any(abs(np.linalg.norm(d) - 1.0) > 1e-12 for d in dirs):
            raise ValueError("chsh_directions must be four unit vectors")
        object.__setattr__(self, "chsh_directions", dirs)


@dataclass(frozen=True)
class CorrelationValue:
    measure: str
    value: float
    violated: bool


def _violated(measure: str, value):
    if measure == BM:
        return value <= BM_BOUND
    if measure == CHSH:
        return value > CHSH_BOUND
    return value > BPRV_BOUND


def _result(measure: str, value) -> CorrelationValue:
    return CorrelationValue(measure, float(value), bool(_violated(measure, value)))


def rotation(theta: float) -> np.ndarray:
    """cos(t)(|0><0| + |1><1|) + sin(t)(|0><1| - |1><0|)."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


def p_same(settings: MeasurementSettings | None = None) -> np.ndarray:
    """Projector sum for equal outcomes in dissimilar bases."""
    settings = settings or MeasurementSettings()
    th = settings.bm_angles
    proj = []
    for theta in th:
        R, Rm = rotation(theta), rotation(-theta)
        proj.append([R @ np.diag([1.0, 0.0]) @ Rm, R @ np.diag([0.0, 1.0]) @ Rm])
    if settings.bm_ordered_pairs:
        pairs = [(i, j) for i in range(3) for j in range(3) if i != j]
    else:
        pairs = [(i, j) for i in range(3) for j in range(i + 1, 3)]
    P = np.zeros((4, 4))
    for i, j in pairs:
        for m in (0, 1):
            P += np.kron(proj[i][m], proj[j][m])
    return P


def s_bm_generic(rho: ReducedDensity, settings: MeasurementSettings | None = None) -> CorrelationValue:
    return _result(BM, np.real(np.trace(rho.rho @ p_same(settings))))


def s_bm_closed(c: float) -> CorrelationValue:
    return _result(BM, 9.0 / 8.0 - 3.0 / 8.0 * c)


_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def _spin(n: np.ndarray) -> np.ndarray:
    return sum(n[i] * _PAULI[i] for i in range(3))


def correlator(rho: ReducedDensity, u, v) -> float:
    """E(u, v) = Tr(rho (u.sigma) x (v.sigma))."""
    op = np.kron(_spin(np.asarray(u, dtype=float)), _spin(np.asarray(v, dtype=float)))
    return float(np.real(np.trace(rho.rho @ op)))


def s_chsh_fixed(rho: ReducedDensity, settings: MeasurementSettings | None = None) -> CorrelationValue:
    settings = settings or MeasurementSettings()
    a, a2, b, b2 = settings.chsh_directions
    s = correlator(rho, a, b) + correlator(rho, a, b2) + correlator(rho, a2, b) - correlator(rho, a2, b2)
    return _result(CHSH, abs(s))


def s_chsh_closed(c: float) -> CorrelationValue:
    return _result(CHSH, SQRT2 * abs(1.0 + c))


def s_bprv_closed(c: float) -> CorrelationValue:
    return _result(BPRV, 6.0 + 1.5 * c)


def closed_form_values(measure: str, c):
    """Vectorized closed form of ``measure`` over coherence factors ``c``."""
    c = np.asarray(c, dtype=float)
    if measure == BM:
        return 9.0 / 8.0 - 3.0 / 8.0 * c
    if measure == CHSH:
        return SQRT2 * np.abs(1.0 + c)
    if measure == BPRV:
        return 6.0 + 1.5 * c
    raise ValueError(f"unknown measure {measure!r}")


def violation_boundary(measure: str) -> float:
    """Coherence factor at which ``measure`` leaves its violation regime."""
    return {BM: 1.0 / 3.0, CHSH: SQRT2 - 1.0, BPRV: 2.0 / 3.0}[measure]


def coherence_ratio(rho_t: ReducedDensity, rho_0: ReducedDensity) -> float:
    c0 = abs(rho_0.rho[0, 3])
    if c0 == 0.0:
        raise DomainError("initial (00, 11) coherence is zero")
    return float(abs(rho_t.rho[0, 3]) / c0)


def measures_from_coherence(c: float, settings: MeasurementSettings | None = None) -> dict[str, CorrelationValue]:
    """Generic-operator BM and CHSH plus closed-form BPRV for coherence c."""
    rho = dephased_rho(c)
    return {BM: s_bm_generic(rho, settings), CHSH: s_chsh_fixed(rho, settings), BPRV: s_bprv_closed(c)}
