import os
import sys

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

import numpy as np
import pytest

from jacobi.oracles import gaussian_oracle
from jacobi.params import PeriodicEnvelope, PowerPerturbation, make_asymptotically_periodic, make_periodic


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def models_dir():
    return os.path.join(ROOT, "models")


@pytest.fixture
def free_model():
    """a == 1, b == 0: spectrum [-2, 2]"""
    return make_periodic(PeriodicEnvelope([1.0], [0.0]), name="free")


@pytest.fixture
def chebyshev_model():
    """a == 1/2, b == 0: p_n = U_n"""
    return make_periodic(PeriodicEnvelope([0.5], [0.0]), name="chebyshev-u")


@pytest.fixture
def hermite_model():
    return gaussian_oracle().model


@pytest.fixture
def period_two():
    return PeriodicEnvelope([1.0, 1.5], [0.0, 0.5])


@pytest.fixture
def perturbed_model(period_two):
    return make_asymptotically_periodic(period_two, PowerPerturbation(amp_a=0.3, amp_b=-0.2, power=1.5),
                                        name="perturbed")
