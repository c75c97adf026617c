import numpy as np
import pytest

from iqbench.iqcore import Dataset
from iqbench.synthgen import CloudParams, generate


@pytest.fixture(scope="session")
def separable():
    """Two tight, well separated clouds with no decay."""
    return generate(CloudParams(mean0=(0.0, 0.0), mean1=(3.0, 3.0), sigma=0.3, decay_prob=0.0,
                                shots_per_class=100, seed=1))


@pytest.fixture(scope="session")
def calibrated_small():
    """The default benchmark clouds at a size that fits in seconds."""
    return generate(CloudParams(shots_per_class=300, seed=2))


@pytest.fixture(scope="session")
def probe_grid():
    g = np.linspace(-2.0, 4.0, 13)
    return np.array([(i, q) for q in g for i in g])


def xy(data: Dataset):
    return np.asarray(data.points), np.asarray(data.labels)


# acceptance verdicts, echoed in the terminal summary so they survive capture
VERDICTS: list = []


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
