import numpy as np
import pytest
from hypothesis import settings

from frobrane import make_branes, transgress

settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def obj23():
    return transgress(make_branes({"1": 2, "2": 3}))


@pytest.fixture(scope="session")
def obj_weighted():
    return transgress(make_branes({"1": [[1.0, 0.0], [0.0, 2.0]], "2": 1}))


@pytest.fixture(scope="session")
def scalar_obj():
    return transgress(make_branes({"1": 1}))


def random_gram(rng, n):
    B = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return B.conj().T @ B / n + 0.5 * np.eye(n)
