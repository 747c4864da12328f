"""Scene construction: two target DQDs, each inside a spherical shell of
randomly placed, randomly oriented environment DQDs.

Environment molecules are indexed 0..N-1 in code (molecules 1..N in the
physics notation). Indices 0..M-1 surround target A, M..2M-1 surround B.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from mcqdisent.constants import PhysicalConstants, default_constants
from mcqdisent.errors import ConfigError

logger = logging.getLogger(__name__)

INFINITE = math.inf

# Where target B is placed when d is INFINITE. Cross-group energies are
# zeroed by flag, never computed from this position.
FAR_POINT_NM = 1.0e4

# Re-draw an environment molecule whose dots come closer than this many
# dot separations to any dot of an already-placed interacting molecule.
MIN_DOT_GAP = 0.05

GROUP_A = "A"
GROUP_B = "B"


@dataclass(frozen=True, eq=False)
class DqdSpec:
    """Rigid two-dot molecule.

    Dot 0 sits at ``center - a/2 * orientation``, dot 1 at
    ``center + a/2 * orientation``; state |1> puts the electron on dot 1.
    """

    center: np.ndarray
    orientation: np.ndarray
    a: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float).reshape(3)
        o = np.asarray(self.orientation, dtype=float).reshape(3)
        if not np.all(np.isfinite(c)) or not np.all(np.isfinite(o)):
            raise ConfigError("DQD center and orientation must be finite")
        if abs(np.linalg.norm(o) - 1.0) > 1e-12:
            raise ConfigError(f"orientation must be a unit vector, |o| = {np.linalg.norm(o)!r}")
        if not self.a > 0:
            raise ConfigError("dot separation a must be positive")
        c.flags.writeable = False
        o.flags.writeable = False
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "orientation", o)

    def dots(self) -> np.ndarray:
        """(2, 3) array of dot positions, row m is dot m."""
        return np.stack([dot_position(self, 0), dot_position(self, 1)])


def dot_position(dqd: DqdSpec, m: int) -> np.ndarray:
    if m not in (0, 1):
        raise ValueError(f"dot index must be 0 or 1, got {m!r}")
    return dqd.center + (m - 0.5) * dqd.a * dqd.orientation


@dataclass(frozen=True)
class SceneConfig:
    a: float = 1.0
    R_A: float = 4.0
    R_B: float = 2.0
    M: int = 5
    d: float = INFINITE
    seed: int = 0

    def __post_init__(self):
        if not self.a > 0:
            raise ConfigError("scene.a must be positive")
        for name in ("R_A", "R_B"):
            r = getattr(self, name)
            if not r > self.a:
                raise ConfigError(f"scene.{name} = {r!r} must exceed a = {self.a!r}")
        if int(self.M) != self.M or self.M < 0:
            raise ConfigError(f"scene.M must be a non-negative integer, got {self.M!r}")
        if not (self.d == INFINITE or self.d > 0):
            raise ConfigError("scene.d must be positive or infinite")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("scene.seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True, eq=False)
class Scene:
    target_a: DqdSpec
    target_b: DqdSpec
    env: tuple[DqdSpec, ...]
    d: float = INFINITE
    constants: PhysicalConstants = field(default_factory=default_constants)
    n_group_a: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "env", tuple(self.env))
        if self.n_group_a is None:
            if len(self.env) % 2:
                raise ConfigError("env must hold 2M molecules unless n_group_a is given")
            object.__setattr__(self, "n_group_a", len(self.env) // 2)
        if not 0 <= self.n_group_a <= len(self.env):
            raise ConfigError("n_group_a out of range")

    @property
    def n_env(self) -> int:
        return len(self.env)

    @property
    def infinite_separation(self) -> bool:
        return self.d == INFINITE

    def group(self, k: int) -> str:
        """Group of environment molecule ``k`` (0-based)."""
        return GROUP_A if k < self.n_group_a else GROUP_B

    def group_mask(self, which: str) -> np.ndarray:
        mask = np.zeros(self.n_env, dtype=bool)
        if which == GROUP_A:
            mask[: self.n_group_a] = True
        elif which == GROUP_B:
            mask[self.n_group_a :] = True
        else:
            raise ValueError(which)
        return mask

    def molecules(self) -> list[DqdSpec]:
        """All molecules in the order A, B, env 0..N-1."""
        return [self.target_a, self.target_b, *self.env]

    def molecule_groups(self) -> list[str]:
        return [GROUP_A, GROUP_B, *(self.group(k) for k in range(self.n_env))]

    def interacts(self, group_j: str, group_k: str) -> bool:
        return group_j == group_k or not self.infinite_separation


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator for one scene."""
    return np.random.Generator(np.random.Philox(int(seed)))


def make_phase_rng(seed: int) -> np.random.Generator:
    """Stream for the environment phases: the scene generator's key, jumped
    ahead so it never overlaps the geometry draws."""
    return np.random.Generator(np.random.Philox(int(seed)).jumped())


def derive_seed(base_seed: int, index: int) -> int:
    """Seed of ensemble member ``index``.

    Mixing is ``SeedSequence(base_seed, spawn_key=(index,))`` reduced to one
    64-bit word, so members are reproducible and statistically independent.
    """
    ss = np.random.SeedSequence(int(base_seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def sample_unit_vector(rng: np.random.Generator) -> np.ndarray:
    while True:
        v = rng.standard_normal(3)
        n = math.sqrt(float(v @ v))
        if n > 0.0:
            return v / n


class _DotSet:
    """Placed dot positions in a uniform hash grid with cell size ``gap``,
    so a proximity query only visits the 27 surrounding cells."""

    def __init__(self, gap: float):
        self.gap = gap
        self._cells: dict[tuple[int, int, int], list[np.ndarray]] = {}

    def _key(self, p) -> tuple[int, int, int]:
        return tuple(int(math.floor(x / self.gap)) for x in p)

    def add(self, dots: np.ndarray):
        for p in dots:
            self._cells.setdefault(self._key(p), []).append(p)

    def near(self, p) -> bool:
        cx, cy, cz = self._key(p)
        g2 = self.gap * self.gap
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for dz in (-1, 0, 1):
                    for q in self._cells.get((cx + dx, cy + dy, cz + dz), ()):
                        d = p - q
                        if d @ d < g2:
                            return True
        return False


def _too_close(candidate: DqdSpec, placed: list[_DotSet]) -> bool:
    return any(dots.near(p) for p in candidate.dots() for dots in placed)


def build_scene(cfg: SceneConfig, constants: PhysicalConstants | None = None) -> Scene:
    """Build a seeded random scene.

    Target A sits at the origin and target B at ``(d, 0, 0)`` (or a far
    point when d is infinite), both oriented along +x. For each environment
    molecule in index order the generator draws the position direction, then
    the orientation; a molecule that lands too close to an already-placed
    interacting molecule is redrawn.
    """
    constants = constants or default_constants()
    rng = make_rng(cfg.seed)
    x_hat = np.array([1.0, 0.0, 0.0])
    target_a = DqdSpec(np.zeros(3), x_hat, cfg.a)
    b_x = FAR_POINT_NM if cfg.d == INFINITE else float(cfg.d)
    target_b = DqdSpec(np.array([b_x, 0.0, 0.0]), x_hat, cfg.a)

    M = int(cfg.M)
    min_gap = MIN_DOT_GAP * cfg.a
    placed = {GROUP_A: _DotSet(min_gap), GROUP_B: _DotSet(min_gap)}
    placed[GROUP_A].add(target_a.dots())
    placed[GROUP_B].add(target_b.dots())
    env: list[DqdSpec] = []
    for k in range(2 * M):
        grp = GROUP_A if k < M else GROUP_B
        host, radius = (target_a, cfg.R_A) if grp == GROUP_A else (target_b, cfg.R_B)
        if cfg.d == INFINITE:
            neighbours = [placed[grp]]
        else:
            neighbours = [placed[GROUP_A], placed[GROUP_B]]
        redraws = 0
        while True:
            direction = sample_unit_vector(rng)
            orientation = sample_unit_vector(rng)
            mol = DqdSpec(host.center + radius * direction, orientation, cfg.a)
            if not _too_close(mol, neighbours):
                break
            redraws += 1
        if redraws:
            logger.info("environment molecule %d redrawn %d time(s) (dot gap < %g nm)", k, redraws, min_gap)
        placed[grp].add(mol.dots())
        env.append(mol)

    return Scene(target_a, target_b, tuple(env), d=cfg.d, constants=constants, n_group_a=M)


def scene_to_text(scene: Scene) -> str:
    """Human-readable replay file: one record per molecule."""
    lines = [
        "# mcqdisent scene v1",
        f"d {scene.d!r}",
        f"n_group_a {scene.n_group_a}",
        f"hbar {scene.constants.hbar!r}",
        f"coulomb_ke2 {scene.constants.coulomb_ke2!r}",
        "# index group a cx cy cz ox oy oz",
    ]
    names = ["A", "B", *(str(k + 1) for k in range(scene.n_env))]
    for name, grp, mol in zip(names, scene.molecule_groups(), scene.molecules()):
        vals = " ".join(repr(float(v)) for v in (mol.a, *mol.center, *mol.orientation))
        lines.append(f"{name} {grp} {vals}")
    return "\n".join(lines) + "\n"


def scene_from_text(text: str) -> Scene:
    header: dict[str, str] = {}
    records: list[tuple[str, DqdSpec]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) == 2:
            header[parts[0]] = parts[1]
        elif len(parts) == 9:
            vals = [float(v) for v in parts[2:]]
            records.append((parts[0], DqdSpec(np.array(vals[1:4]), np.array(vals[4:7]), vals[0])))
        else:
            raise ConfigError(f"malformed scene record: {raw!r}")
    try:
        by_name = dict(records)
        env = tuple(mol for name, mol in records if name not in ("A", "B"))
        constants = PhysicalConstants(float(header["hbar"]), float(header["coulomb_ke2"]))
        return Scene(
            by_name["A"],
            by_name["B"],
            env,
            d=float(header["d"]),
            constants=constants,
            n_group_a=int(header["n_group_a"]),
        )
    except KeyError as exc:
        raise ConfigError(f"scene file missing {exc}") from None
