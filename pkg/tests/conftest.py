import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from catalog import catalog_group  # noqa: E402
from ring import INTEGERS, gf  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def gf2():
    return gf(2)


@pytest.fixture
def gf3():
    return gf(3)


@pytest.fixture
def zz():
    return INTEGERS


@pytest.fixture
def group():
    """Factory: group("S3") -> enumerated catalog group."""
    return catalog_group
