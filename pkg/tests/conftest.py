import math

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_density(rng):
    """Random mixed state from a random Bloch vector inside the unit ball."""
    r = rng.normal(size=3)
    r *= rng.uniform() ** (1 / 3) / np.linalg.norm(r)
    x, y, z = r
    from saw_mzi import DensityMatrix

    return DensityMatrix((1 + z) / 2, (x - 1j * y) / 2, (1 - z) / 2)


def random_unitary(rng):
    from saw_mzi import Unitary2

    z = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    q = q @ np.diag(np.diag(r) / np.abs(np.diag(r)))
    return Unitary2.from_matrix(q)
