from collections.abc import Callable

import numpy as np
import pytest

from nhsense.core.model import SensorModel, from_hamiltonian


def make_random_htilde(rng: np.random.Generator, m: int, kappa: float = 1.0) -> np.ndarray:
    """Random stable effective Hamiltonian with H~_11 purely imaginary.

    The stability margin is drawn from [0.2, 1] kappa so susceptibilities stay
    moderate.
    """
    a = 0.7 * (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)))
    a -= a[0, 0].real * np.eye(m)
    top = np.max(np.linalg.eigvals(a).imag)
    margin = rng.uniform(0.2, 1.0) * kappa
    return a - 1j * (top + margin) * np.eye(m)


def make_random_model(rng: np.random.Generator, m: int, kappa: float = 1.0) -> SensorModel:
    """Naive realization of a random stable H~ with a random Hermitian V and drive."""
    htilde = make_random_htilde(rng, m, kappa)
    v = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    v = (v + v.conj().T) / 2
    return from_hamiltonian(htilde, kappa, v, Delta=rng.uniform(-1, 1), beta=rng.uniform(0.5, 2))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240607)


@pytest.fixture
def random_htilde() -> Callable[[np.random.Generator, int], np.ndarray]:
    return make_random_htilde


@pytest.fixture
def random_model() -> Callable[[np.random.Generator, int], SensorModel]:
    return make_random_model
