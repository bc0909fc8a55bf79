import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from imbtext.vectorize import Dataset

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def line_dataset(*groups):
    """1-D dataset: group g (1-based) holds the given coordinates."""
    X = np.array([[v] for g in groups for v in g], dtype=float)
    y = np.concatenate([np.full(len(g), i + 1) for i, g in enumerate(groups)])
    return Dataset.from_dense(X, y, len(groups))


def count_dataset(rng, counts, dim, lam=1.0, shift=0.5):
    """Poisson count rows, class c shifted by c * shift."""
    X = np.vstack([rng.poisson(lam + c * shift, (n, dim)) for c, n in enumerate(counts)]).astype(float)
    y = np.repeat(np.arange(1, len(counts) + 1), counts)
    return Dataset.from_dense(X, y, len(counts))


@pytest.fixture
def abline():
    # A = {0.0, 0.1, 0.2, 0.9}, B = {1.0, 1.3}
    return line_dataset([0.0, 0.1, 0.2, 0.9], [1.0, 1.3])


@pytest.fixture
def overlap_pair():
    """Overlapping 2-D minority / majority blocks shared by the hybrid tests."""
    rng = np.random.default_rng(11)
    minority = rng.normal(0.0, 1.0, (15, 2))
    majority = rng.normal(1.2, 1.0, (60, 2))
    return minority, majority


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
