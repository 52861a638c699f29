import math

import numpy as np
import pytest

from jacobi.errors import BandEdgeError, ConfigError
from jacobi.params import Growth, PeriodicEnvelope, make_blend, make_modulated, make_periodic, make_tabulated
from jacobi.transfer import (Mat2, associated_product_matrix, blend_limit_matrices, class_limit,
                             envelope_n_step, envelope_traces, n_step, n_step_derivatives, n_step_stack,
                             normalized_phase_derivative, one_step, phase, phase_curvature,
                             phase_derivative_limit, phase_limit, tilde_envelope, transfer_product)


def _random_model(rng, size=40):
    return make_tabulated(rng.uniform(0.1, 10.0, size), rng.uniform(-5.0, 5.0, size))


def test_mat2_algebra():
    A = Mat2(1.0, 2.0, 3.0, 4.0)
    B = Mat2(0.0, 1.0, -1.0, 0.5)
    assert np.allclose((A @ B).to_array(), A.to_array() @ B.to_array())
    assert A.tr == 5.0
    assert A.det == -2.0
    assert A.discr == 25.0 + 8.0
    assert (A - A) == Mat2(0.0, 0.0, 0.0, 0.0)
    assert A.norm() == pytest.approx(np.linalg.norm(A.to_array(), 2))


def test_one_step_uses_envelope_before_zero(period_two):
    model = make_periodic(period_two)
    B0 = one_step(model, 0, 0.2)
    assert B0 == Mat2(0.0, 1.0, -1.5 / 1.0, 0.2 / 1.0)
    with pytest.raises(ConfigError):
        one_step(model, -1, 0.0)


def test_product_equals_associated_matrix(rng):
    for _ in range(20):
        model = _random_model(rng)
        for n in range(1, 12):
            k, x = int(rng.integers(0, 6)), float(rng.uniform(-3.0, 3.0))
            A = transfer_product(model, k, n, x).to_array()
            B = associated_product_matrix(model, k, n, x).to_array()
            assert np.max(np.abs(A - B)) <= 1e-10 * max(1.0, np.max(np.abs(A)))


def test_determinant_telescopes(rng):
    model = _random_model(rng)
    for k in range(4):
        for n in (1, 5, 13):
            X = transfer_product(model, k, n, 0.7)
            expected = model.a(k - 1) / model.a(k + n - 1)
            assert X.det == pytest.approx(expected, rel=1e-10, abs=1e-12 * np.max(np.abs(X.to_array())) ** 2)


def test_stack_matches_single_products(perturbed_model):
    xs = np.array([-1.0, 0.0, 0.8])
    stack = n_step_stack(perturbed_model, [0, 3, 10], xs)
    assert stack.shape == (3, 3, 2, 2)
    for a, start in enumerate([0, 3, 10]):
        for b, x in enumerate(xs):
            assert np.allclose(stack[a, b], n_step(perturbed_model, start, x).to_array(), rtol=1e-14)


def test_derivatives_match_differences(perturbed_model):
    x, h = 0.3, 1e-5
    X, dX, d2X = n_step_derivatives(perturbed_model, 7, x)
    up, down = n_step(perturbed_model, 7, x + h), n_step(perturbed_model, 7, x - h)
    assert np.allclose(dX.to_array(), (up - down).to_array() / (2 * h), rtol=1e-7, atol=1e-9)
    assert np.allclose(d2X.to_array(), (up + down - X - X).to_array() / h ** 2, rtol=1e-3, atol=1e-4)


def test_free_envelope_trace(free_model):
    X = envelope_n_step(free_model.envelope, 0, 0.6)
    assert X == Mat2(0.0, 1.0, -1.0, 0.6)
    doubled = PeriodicEnvelope([1.0, 1.0], [0.0, 0.0])
    xs = np.linspace(-3.0, 3.0, 13)
    assert np.allclose(envelope_traces(doubled, xs), xs ** 2 - 2.0)


def test_single_slot_blend_limit_is_the_inserted_block():
    env = PeriodicEnvelope([1.3], [0.4])
    X = blend_limit_matrices(env, 1, 0.2)
    assert np.allclose(X.to_array(), [[0.0, -1.0], [1.0, (0.4 - 0.4) / 1.3]])
    with pytest.raises(ConfigError):
        blend_limit_matrices(env, 2, 0.2)


@pytest.mark.parametrize('alpha, beta', [([1.3], [0.4]), ([1.0, 1.5], [0.0, 0.5]), ([0.7, 1.2, 2.0], [0.1, -0.4, 0.3])])
def test_blend_limits_match_tilde_envelope(alpha, beta):
    env = PeriodicEnvelope(alpha, beta)
    tilde = tilde_envelope(env)
    xs = np.linspace(-2.5, 2.5, 11)
    traces = envelope_traces(env, xs, blend=True)
    for x, t in zip(xs, traces):
        blend = [blend_limit_matrices(env, i, x) for i in range(1, env.N + 1)]
        assert t == pytest.approx(blend[0].tr, abs=1e-12)
        assert abs(t) == pytest.approx(abs(envelope_n_step(tilde, 0, x).tr), rel=1e-12, abs=1e-12)
        for X in blend:
            assert X.det == pytest.approx(1.0, rel=1e-12)
            assert X.tr == pytest.approx(blend[0].tr, abs=1e-12)


@pytest.mark.parametrize('N', range(1, 9))
@pytest.mark.parametrize('q', [-1.5, 0.0, 0.7, 1.9])
def test_constant_coefficient_trace_at_zero(N, q):
    # N-fold power of [[0, 1], [-1, -q]]
    env = PeriodicEnvelope([1.0] * N, [q] * N)
    X = envelope_n_step(env, 0, 0.0)
    assert X.tr == pytest.approx(2.0 * math.cos(N * math.acos(-q / 2.0)), abs=1e-12)
    assert X.det == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize('alpha, beta', [([1.0, 1.5], [0.0, 0.5]), ([0.7, 1.2, 2.0], [0.1, -0.4, 0.3]),
                                         ([1.1, 0.6, 0.9, 1.4], [0.0, 0.2, -0.3, 0.1])])
def test_first_blend_limit_is_conjugate_to_the_tilde_matrix(alpha, beta):
    # X_1 = -D Y_1 D^{-1} with D = diag(1/sqrt 2, 1), Y_1 the tilde N-step matrix
    env = PeriodicEnvelope(alpha, beta)
    tilde = tilde_envelope(env)
    D = np.diag([1.0 / math.sqrt(2.0), 1.0])
    D_inv = np.diag([math.sqrt(2.0), 1.0])
    for x in np.linspace(-2.0, 2.0, 9):
        X = blend_limit_matrices(env, 1, x).to_array()
        Y = envelope_n_step(tilde, 1, x).to_array()
        assert np.allclose(X, -D @ Y @ D_inv, rtol=1e-12, atol=1e-12)


def test_tilde_envelope_scaling():
    assert tilde_envelope(PeriodicEnvelope([2.0], [1.0])) == PeriodicEnvelope([1.0], [0.5])
    tilde = tilde_envelope(PeriodicEnvelope([1.0, 2.0, 3.0], [1.0, 1.0, 1.0]))
    assert np.allclose(tilde.alpha, [1.0 / math.sqrt(2.0), 2.0, 3.0 / math.sqrt(2.0)])
    assert np.allclose(tilde.beta, [0.5, 1.0, 1.0])


def test_class_limit_by_class(period_two):
    modulated = make_modulated(period_two, Growth())
    assert class_limit(modulated, 0, 0.9) == envelope_n_step(period_two, 0, 0.0)
    periodic = make_periodic(period_two)
    assert class_limit(periodic, 1, 0.9) == envelope_n_step(period_two, 1, 0.9)
    blend = make_blend(periodic, Growth(kind="pow", exponent=0.5))
    assert class_limit(blend, 2, 0.1) == blend_limit_matrices(period_two, 2, 0.1)


def test_free_phase(free_model):
    sample = phase(free_model, 5, 0.8)
    assert sample.theta == pytest.approx(math.acos(0.4))
    assert sample.theta_prime == pytest.approx(-1.0 / math.sqrt(4.0 - 0.64))
    assert abs(sample.lam) == pytest.approx(1.0)
    assert phase_limit(free_model, 0, 0.8) == pytest.approx(math.acos(0.4))
    assert phase_curvature(free_model, 5, 0.8) == pytest.approx(-0.8 / (4.0 - 0.64) ** 1.5)


def test_phase_outside_band_raises(free_model):
    with pytest.raises(BandEdgeError):
        phase(free_model, 0, 2.5)


def test_free_phase_derivative_limit(free_model):
    assert phase_derivative_limit(free_model, 0.8) == pytest.approx(normalized_phase_derivative(free_model, 9, 0.8))


def test_modulated_phase_derivative_converges(period_two):
    model = make_modulated(PeriodicEnvelope([1.0, 1.2], [0.5, 0.5]), Growth(kind="sqrt"))
    limit = phase_derivative_limit(model, 0.0)
    gaps = [abs(normalized_phase_derivative(model, n, 0.0) - limit) for n in (100, 1000, 10000)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 0.05 * abs(limit)
