import pytest

from quatlat import QuatAlg, default_maximal_order


@pytest.fixture(scope="session")
def alg():
    return QuatAlg(3, -1)


@pytest.fixture(scope="session")
def mo(alg):
    return default_maximal_order(alg)
