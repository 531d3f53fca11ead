import pytest

from jacobi_jost import Geometric, ParityPerturbed, PowerLaw, Stretched


@pytest.fixture
def nsq():
    """a_n = n^2 (floored at 1), b = 0."""
    return PowerLaw(gamma=1.0, p=2.0)


@pytest.fixture
def geo_super():
    """a_n = 2^n with constant beta = -1.1 (discrete spectrum)."""
    return Geometric(gamma=1.0, x=2.0, beta_const=-1.1)


@pytest.fixture
def geo_sub():
    """a_n = 2^n, b = 0."""
    return Geometric(gamma=1.0, x=2.0, beta_const=0.0)


@pytest.fixture
def hermite():
    """a_n = sqrt((n+1)/2), b = 0 (classical growth)."""
    return PowerLaw(gamma=2**-0.5, p=0.5, shift=1)


def builtin_fast_models():
    """Fast-growth models spanning the families (for property sweeps)."""
    return [
        PowerLaw(gamma=1.0, p=2.0),
        PowerLaw(gamma=0.5, p=1.5, delta=0.3, q=0.5),
        Geometric(gamma=1.0, x=2.0, beta_const=0.0),
        Geometric(gamma=2.0, x=3.0, beta_const=-1.1),
        Geometric(gamma=1.0, x=1.5, delta=0.25),
        Stretched(gamma=1.0, x=2.0, q_tilde=0.5, beta_const=0.4),
        ParityPerturbed(p=2.0, c_odd=0.3, c_even=0.3),
    ]
