import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from harqjam.params import SystemParams  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture
def ref():
    """Reference setup: sigma2=1, 1/lambda = 1, 0.2, 0.2, P0 = 10 dB, R = 2."""
    return SystemParams()


def random_params(rng: np.random.Generator) -> SystemParams:
    return SystemParams(
        p0=float(10 ** rng.uniform(0, 2)),
        rate=float(rng.uniform(0.25, 4)),
        sigma2=float(rng.uniform(0.5, 2)),
        lambda0=float(10 ** rng.uniform(-0.7, 1)),
        lambda1=float(10 ** rng.uniform(-0.7, 1)),
        lambda2=float(10 ** rng.uniform(-0.7, 1)),
    )


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
