import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def h2_fcidump_path():
    return DATA_DIR / "h2_sto3g.fcidump"


@pytest.fixture
def one_orbital_fcidump_path():
    return DATA_DIR / "one_orbital.fcidump"


@pytest.fixture
def h2_integrals(h2_fcidump_path):
    from spinvqe.integrals import load_fcidump

    return load_fcidump(h2_fcidump_path)


@pytest.fixture
def toy4_integrals():
    """4 orbitals, 4 electrons: smallest instance hosting S = 0, 1, 2."""
    from spinvqe.integrals import random_integrals

    return random_integrals(4, 2, 2, np.random.default_rng(7011), scale=0.5)
