import numpy as np
import pytest

from perfectbell.states import BELL_KINDS, make_bell_state


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=BELL_KINDS)
def bell_kind(request):
    return request.param


@pytest.fixture
def singlet():
    return make_bell_state("psi_minus")


@pytest.fixture
def phi_plus():
    return make_bell_state("phi_plus")


def random_hermitian(rng, n):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (g + g.conj().T) / 2


def random_unit(rng, n=None):
    v = rng.normal(size=(3,) if n is None else (n, 3))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)
