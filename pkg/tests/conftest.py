import numpy as np
import pytest
from hypothesis import settings

from nclab.schwartz import GaussianPacket

settings.register_profile("nclab", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("nclab")

ACCEPTANCE_LINES = []


def random_packet(rng: np.random.Generator) -> GaussianPacket:
    return GaussianPacket(complex(rng.normal(), rng.normal()), rng.uniform(-1, 1, 4),
                          rng.uniform(0.5, 1.5, 4), rng.uniform(-1, 1, 4))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
