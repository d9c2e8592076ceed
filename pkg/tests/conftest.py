import math

import numpy as np
import pytest

from epslab.elements import ClassicalElements, GravityModel, classical_to_cartesian


@pytest.fixture(scope="session")
def model():
    return GravityModel()


@pytest.fixture(scope="session")
def kepler_model():
    return GravityModel(j2=0.0)


@pytest.fixture(scope="session")
def prisma_coe():
    return ClassicalElements(6878.14, 0.001, math.radians(97.42),
                             math.radians(168.2), math.radians(20.0),
                             math.radians(30.0))


@pytest.fixture(scope="session")
def prisma_x0(prisma_coe, model):
    return classical_to_cartesian(prisma_coe, model)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260811)


def random_bound_elements(rng, n, e_max=0.6, a_range=(6800.0, 42000.0)):
    """Random well-conditioned bound orbits away from chart singularities."""
    out = []
    for _ in range(n):
        a = rng.uniform(*a_range)
        e = rng.uniform(1e-4, e_max)
        inc = rng.uniform(0.05, math.pi - 0.05)
        raan = rng.uniform(-math.pi, math.pi)
        argp = rng.uniform(-math.pi, math.pi)
        m = rng.uniform(-math.pi, math.pi)
        out.append(ClassicalElements(a, e, inc, raan, argp, m))
    return out
