import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bf2p.model import TwoByTwoData


@pytest.fixture
def magee_text() -> TwoByTwoData:
    """Counts as quoted in the trial report (pregnancy loss)."""
    return TwoByTwoData(15, 493, 13, 488)


@pytest.fixture
def magee_corpus() -> TwoByTwoData:
    """Counts as carried by the bundled reanalysis corpus (row 3)."""
    return TwoByTwoData(18, 493, 10, 488)


@pytest.fixture
def aspirin() -> TwoByTwoData:
    return TwoByTwoData(26, 11034, 10, 11037)


def random_small_datasets(count: int, n_max: int, seed: int) -> list[TwoByTwoData]:
    rng = np.random.Generator(np.random.Philox(seed))
    out = []
    while len(out) < count:
        n1 = int(rng.integers(1, n_max + 1))
        n2 = int(rng.integers(1, n_max + 1))
        y1 = int(rng.integers(0, n1 + 1))
        y2 = int(rng.integers(0, n2 + 1))
        out.append(TwoByTwoData(y1, n1, y2, n2))
    return out


def random_null_datasets(count: int, n_max: int, seed: int) -> list[TwoByTwoData]:
    """Counts simulated under a shared rate; effects stay near zero."""
    rng = np.random.Generator(np.random.Philox(seed))
    out = []
    while len(out) < count:
        n1 = int(rng.integers(20, n_max + 1))
        n2 = int(rng.integers(20, n_max + 1))
        theta = float(rng.uniform(0.05, 0.95))
        y1 = int(rng.binomial(n1, theta))
        y2 = int(rng.binomial(n2, theta))
        out.append(TwoByTwoData(y1, n1, y2, n2))
    return out
