import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from ctnsim import gateclasses

# keep table caches out of the user's home during test runs unless told not to
os.environ.setdefault("CTNSIM_CACHE",
                      os.path.join(os.path.dirname(__file__), "..", ".cache"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


@pytest.fixture(scope="session")
def table2():
    return gateclasses.get_table(2)


@pytest.fixture(scope="session")
def table3():
    return gateclasses.get_table(3)
