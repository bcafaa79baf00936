import numpy as np
import pytest

from hybzono.sets import HybridZonotope


def example1_sets():
    """The two hand-built hybrid zonotopes over the shared base zonotope:

    one unconstrained (eight translated copies) and one whose equality
    constraint is shifted by the binary factors (seven nonempty leaves).
    """
    Gz = np.array([[1.5, -1.5, 0.5], [1.0, 0.5, -1.0]])
    cz = np.zeros(2)
    Az = np.array([[1.0, 1.0, 1.0]])
    bz = np.array([1.0])
    Zh1 = HybridZonotope(Gz, 2.0 * Gz, cz)
    Zh2 = HybridZonotope(Gz, 2.0 * Gz, cz, Az, Az, bz)
    return Zh1, Zh2


@pytest.fixture(scope="session")
def zh_pair():
    return example1_sets()


def random_hybrid(rng, n_max=3, ng_max=4, nb_max=3, nc_max=2, force_nonempty=False):
    """Small random hybrid zonotope for property checks.

    With ``force_nonempty`` the constraint right-hand side is generated from
    a feasible factor draw, so the set is nonempty by construction.
    """
    n = int(rng.integers(1, n_max + 1))
    n_g = int(rng.integers(0, ng_max + 1))
    n_b = int(rng.integers(0, nb_max + 1))
    n_c = int(rng.integers(0, nc_max + 1))
    Gc = rng.uniform(-2, 2, size=(n, n_g))
    Gb = rng.uniform(-2, 2, size=(n, n_b))
    c = rng.uniform(-1, 1, size=n)
    Ac = rng.uniform(-1, 1, size=(n_c, n_g))
    Ab = rng.uniform(-1, 1, size=(n_c, n_b))
    if force_nonempty:
        xc = rng.uniform(-1, 1, size=n_g)
        xb = rng.choice([-1.0, 1.0], size=n_b)
        b = Ac @ xc + Ab @ xb
    else:
        b = rng.uniform(-2, 2, size=n_c)
    return HybridZonotope(Gc, Gb, c, Ac, Ab, b)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
