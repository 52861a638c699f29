import math

import numpy as np
import pytest

from jacobi.errors import ConfigError
from jacobi.oscsum import (OscSpec, canonical_spec, cosine_sum_average, curved_spec, dirichlet_magnitude,
                           lemma_bound_ratio, normalized_exponential_sum, random_spec, sinc_limit_prediction,
                           sinc_limit_sum, stolz_cesaro_ratio, stolz_cesaro_ratios, taylor_phase_remainder,
                           validate_spec, weighted_exponential_sum)


def _constant_phase(theta):
    return OscSpec(gamma=lambda k: np.ones(np.shape(k)),
                   theta=lambda j, x: np.full(np.shape(j), theta),
                   theta_limit=lambda x: theta, name="constant")


@pytest.mark.parametrize('theta, n', [(0.3, 10), (2.0, 101), (math.pi, 50)])
def test_dirichlet_magnitude(theta, n):
    k = np.arange(n + 1)
    expected = abs(np.sum(np.exp(1j * (k + 1) * theta)))
    assert dirichlet_magnitude(theta, n) == pytest.approx(expected, abs=1e-10)


def test_constant_phase_sum_is_a_dirichlet_kernel():
    for theta in (0.7, 2.5, 5.9):
        S = weighted_exponential_sum(_constant_phase(theta), 300, 0.0)
        assert abs(S) == pytest.approx(dirichlet_magnitude(theta, 300), rel=1e-9, abs=1e-9)


def test_canonical_sum_is_negligible():
    spec = canonical_spec()
    assert normalized_exponential_sum(spec, 10 ** 4, 0.1) < 0.05


@pytest.mark.parametrize('n', [100, 1000, 10000])
def test_summation_by_parts_bound_holds(n):
    lhs, rhs, ratio = lemma_bound_ratio(canonical_spec(), n, -0.2)
    assert lhs >= 0.0
    assert rhs >= 1.0
    assert ratio == pytest.approx(lhs / rhs)
    assert ratio < 10.0


def test_sinc_limit():
    spec = canonical_spec()
    assert sinc_limit_prediction(spec, 0.0, 0.0, 1.0) == pytest.approx(math.sin(1.0) / 2.0)
    assert sinc_limit_prediction(spec, 0.0, 0.3, 0.3) == 0.5
    assert sinc_limit_sum(spec, 10 ** 4, 0.0, 0.0, 1.0) == pytest.approx(math.sin(1.0) / 2.0, rel=0.05)


def test_cosine_average_vanishes():
    assert abs(cosine_sum_average(canonical_spec(), 10 ** 4, 0.1, 0.0, 1.0)) < 0.05


def test_stolz_cesaro():
    gamma = canonical_spec().gamma
    ratios = stolz_cesaro_ratios(gamma, 1000)
    assert ratios.shape == (1001,)
    assert ratios[0] == 1.0
    assert ratios[-1] == pytest.approx(stolz_cesaro_ratio(gamma, 1000))
    assert stolz_cesaro_ratio(gamma, 10 ** 4) < 1e-3


def test_taylor_remainder():
    flat_rem, flat_scaled = taylor_phase_remainder(canonical_spec(), 3, 10 ** 4, 0.1, 0.0, 1.0)
    assert flat_rem < 1e-12
    assert flat_scaled == 0.0
    _, scaled = taylor_phase_remainder(curved_spec(), 3, 10 ** 4, 0.1, 0.0, 1.0)
    assert scaled == pytest.approx(0.5, rel=1e-4)


def test_taylor_remainder_needs_derivatives(rng):
    with pytest.raises(ConfigError):
        taylor_phase_remainder(random_spec(rng), 0, 100, 0.0, 0.0, 1.0)


def test_random_specs_satisfy_hypotheses(rng):
    for _ in range(10):
        report = validate_spec(random_spec(rng), 1000)
        assert report["gamma_positive"]
        assert report["theta_in_range"]
        assert report["uniform_convergence"]


def test_invalid_spec_is_reported(caplog):
    report = validate_spec(_constant_phase(7.0), 10)
    assert not report["theta_in_range"]
    assert "fails its hypotheses" in caplog.text


def test_negative_n_is_rejected():
    with pytest.raises(ConfigError):
        normalized_exponential_sum(canonical_spec(), -1, 0.0)
