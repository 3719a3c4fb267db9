import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def random_density(rng, rank=4):
    """Independent oracle: rho = G G^dagger / Tr, G a complex Ginibre 4 x rank."""
    g = rng.standard_normal((4, rank)) + 1j * rng.standard_normal((4, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_hermitian(rng, scale=1.0):
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    return scale * (a + a.conj().T) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
