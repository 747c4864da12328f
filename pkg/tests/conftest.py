import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mcqdisent.geometry import SceneConfig, build_scene, derive_seed  # noqa: E402

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_scene(M, seed, R_A=4.0, R_B=2.0, a=1.0, **kw):
    return build_scene(SceneConfig(a=a, R_A=R_A, R_B=R_B, M=M, seed=seed, **kw))


def seeded_scenes(n, M, base=2024, **kw):
    return [make_scene(M, derive_seed(base, i), **kw) for i in range(n)]
