import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gns.integrator import get_basis, get_tensor


@pytest.fixture(scope="session")
def basis1():
    return get_basis(1)


@pytest.fixture(scope="session")
def basis2():
    return get_basis(2)


@pytest.fixture(scope="session")
def tensor1():
    return get_tensor(1)


@pytest.fixture(scope="session")
def tensor2():
    return get_tensor(2)


def random_state(basis, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    from gns import CoefficientVector

    return CoefficientVector(scale * rng.standard_normal(basis.n), basis)
