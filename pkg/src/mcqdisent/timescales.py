"""Disentanglement time scales.

``tau_X = pi*hbar / E_rms^(X)`` for each qubit in its own shell,
``tau_geo = sqrt(tau_A * tau_B)``, and ``tau_E = pi*hbar / E_rms^flip``.
Since E_flip^2 = E_A^2 + E_B^2, tau_E / tau_geo <= 1/sqrt(2) with equality
only when the two local RMS energies coincide.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from mcqdisent.electrostatics import FlipCoefficients, flip_coefficients
from mcqdisent.geometry import SceneConfig, build_scene, derive_seed
from mcqdisent.spectra import DOUBLE_FLIP, SINGLE_FLIP_A, SINGLE_FLIP_B, rms_from_coefficients


def _tau(hbar: float, e_rms: float) -> float:
    return math.pi * hbar / e_rms if e_rms > 0 else math.inf


@dataclass(frozen=True)
class TimescaleReport:
    tau_a: float
    tau_b: float
    tau_geo: float
    tau_e: float
    e_rms_a: float
    e_rms_b: float
    e_rms_flip: float

    @property
    def degenerate(self) -> bool:
        """True when some time scale is infinite (all-zero coefficients)."""
        return not all(math.isfinite(x) for x in (self.tau_a, self.tau_b, self.tau_e))

    @property
    def ratio(self) -> float:
        """tau_E / tau_geo."""
        return self.tau_e / self.tau_geo

    def as_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["degenerate"] = self.degenerate
        return d


def timescales(coeffs: FlipCoefficients) -> TimescaleReport:
    hbar = coeffs.hbar
    ea = rms_from_coefficients(coeffs, SINGLE_FLIP_A)
    eb = rms_from_coefficients(coeffs, SINGLE_FLIP_B)
    ef = rms_from_coefficients(coeffs, DOUBLE_FLIP)
    tau_a, tau_b = _tau(hbar, ea), _tau(hbar, eb)
    # computed from the energies so an infinite factor never meets a zero one
    tau_geo = math.pi * hbar / math.sqrt(ea * eb) if ea > 0 and eb > 0 else math.inf
    return TimescaleReport(tau_a, tau_b, tau_geo, _tau(hbar, ef), ea, eb, ef)


@dataclass(frozen=True)
class ScatterRow:
    ratio: float
    seed: int
    tau_geo: float
    tau_e: float


def _scatter_member(args) -> ScatterRow:
    cfg, ratio = args
    rep = timescales(flip_coefficients(build_scene(cfg)))
    return ScatterRow(ratio, cfg.seed, rep.tau_geo, rep.tau_e)


def ensemble_configs(base_cfg: SceneConfig, ratios, n_per_ratio: int) -> list[tuple[SceneConfig, float]]:
    """Seeded scene configs: R_A fixed, R_B = R_A / ratio.

    Member ``i * n_per_ratio + j`` (ratio i, draw j) gets
    ``derive_seed(base_cfg.seed, i * n_per_ratio + j)``.
    """
    if n_per_ratio < 1:
        raise ValueError("n_per_ratio must be >= 1")
    out = []
    for i, ratio in enumerate(ratios):
        for j in range(n_per_ratio):
            seed = derive_seed(base_cfg.seed, i * n_per_ratio + j)
            out.append((replace(base_cfg, R_B=base_cfg.R_A / float(ratio), seed=seed), float(ratio)))
    return out


def scatter_ensemble(base_cfg: SceneConfig, ratios, n_per_ratio: int, threads: int = 1) -> list[ScatterRow]:
    jobs = ensemble_configs(base_cfg, ratios, n_per_ratio)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(_scatter_member, jobs))
    return [_scatter_member(j) for j in jobs]
