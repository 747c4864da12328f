"""Physical constants in the nm / eV / fs unit system."""

from __future__ import annotations

from dataclasses import dataclass

HBAR_EV_FS = 0.6582119569
COULOMB_KE2_EV_NM = 1.4399645  # e^2 / (4 pi eps0)


@dataclass(frozen=True)
class PhysicalConstants:
    """Constants injected into every energy and time computation.

    Attributes
    ----------
    hbar : float
        Reduced Planck constant in eV*fs.
    coulomb_ke2 : float
        e^2/(4 pi eps0) in eV*nm.
    """

    hbar: float = HBAR_EV_FS
    coulomb_ke2: float = COULOMB_KE2_EV_NM

    def __post_init__(self):
        if not (self.hbar > 0 and self.coulomb_ke2 > 0):
            from mcqdisent.errors import ConfigError

            raise ConfigError("hbar and coulomb_ke2 must be positive")

    @property
    def dipole_prefactor(self) -> float:
        """e^2/(16 pi eps0): the quarter charges of two half-charged dots."""
        return self.coulomb_ke2 / 4.0


def default_constants() -> PhysicalConstants:
    return PhysicalConstants()
