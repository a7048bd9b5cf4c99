from pathlib import Path

import numpy as np
import pytest

from zerosum.zeros import ZeroStore, parse_zero_file

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def store():
    """One zero store per session so each height is searched only once."""
    return ZeroStore()


@pytest.fixture(scope="session")
def zeta_reference():
    g, _ = parse_zero_file(DATA / "zeta_zeros_100.txt")
    return g


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
