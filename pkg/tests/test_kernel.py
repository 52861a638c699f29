import math

import numpy as np
import pytest

from jacobi.equilibrium import band_structure
from jacobi.errors import ConfigError, NumericalError, OverflowFlaggedError
from jacobi.kernel import (amplitude_estimate, christoffel_ratio, diagonal_kernel, error_ledger,
                           increment_comparison, kernel, limit_constant, projection_check, rho, rho_sub,
                           scaling_kernel, sinc, subsequence_kernel)
from jacobi.oracles import constant_coefficient_oracle, gaussian_oracle
from jacobi.params import (Growth, PeriodicEnvelope, PowerPerturbation, make_asymptotically_periodic, make_blend,
                           make_modulated, make_periodic, make_tabulated)
from jacobi.poly import eval_poly_sequence
from jacobi.states import DensityOracle

GRID = [-1.0, 0.0, 1.0]


def test_cd_formula_matches_direct_sum(chebyshev_model, perturbed_model):
    for model in (chebyshev_model, perturbed_model):
        report = kernel(model, 50, 0.3, -0.2)
        assert report.K_cd == pytest.approx(report.K_direct, rel=1e-10)
        assert not report.overflow_flag


def test_confluent_branch(perturbed_model):
    report = kernel(perturbed_model, 80, 0.45, 0.45)
    assert report.K_cd == pytest.approx(report.K_direct, rel=1e-9)
    near = kernel(perturbed_model, 80, 0.45, 0.45 + 5e-9)
    assert near.K_cd == pytest.approx(near.K_direct, rel=1e-8)


@pytest.mark.parametrize('x', [4.0, -4.0])
def test_confluent_branch_off_the_band(free_model, perturbed_model, x):
    for model in (free_model, perturbed_model):
        report = kernel(model, 150, x, x)
        assert report.K_direct > (1e20 if model is free_model else 1.0)
        assert report.K_cd == pytest.approx(report.K_direct, rel=1e-9)


def test_confluent_branch_on_growing_models(period_two):
    modulated = make_modulated(period_two, Growth(kind="sqrt"))
    blend = make_blend(make_periodic(period_two), Growth(kind="pow", exponent=0.75))
    for model in (modulated, blend):
        for x in (0.3, 5.0):
            report = kernel(model, 120, x, x)
            assert not report.overflow_flag
            assert report.K_cd == pytest.approx(report.K_direct, rel=1e-9)
            near = kernel(model, 120, x, x + 5e-9)
            assert near.K_cd == pytest.approx(near.K_direct, rel=1e-8)


def test_confluent_branch_on_a_random_table(rng):
    model = make_tabulated(rng.uniform(0.5, 2.0, 210), rng.uniform(-1.0, 1.0, 210))
    for n, x in ((169, 1.6858), (140, -0.217), (200, 1.99)):
        for y in (x, x + 5e-9):
            report = kernel(model, n, x, y)
            assert report.K_cd == pytest.approx(report.K_direct, rel=1e-8)


def test_kernel_is_continuous_across_the_confluent_threshold(perturbed_model):
    below = kernel(perturbed_model, 40, -0.3, -0.3 + 5e-9)
    above = kernel(perturbed_model, 40, -0.3, -0.3 + 2e-8)
    assert above.K_direct == pytest.approx(below.K_direct, rel=1e-6)
    assert above.K_cd == pytest.approx(below.K_cd, rel=1e-6)


def test_overflowing_kernel_drops_cd_value(caplog):
    model = make_tabulated([1e-3], [0.0])
    report = kernel(model, 200, 5.0, 4.0)
    assert report.overflow_flag
    assert report.K_cd is None
    assert "CD value dropped" in caplog.text


def test_negative_degree_is_rejected(free_model):
    with pytest.raises(ConfigError):
        kernel(free_model, -1, 0.0, 0.0)


def test_diagonal_kernel_counts_chebyshev_zeros(chebyshev_model):
    values, flags = diagonal_kernel(chebyshev_model, 1001, [0.0, 0.5])
    assert values[0] == 501.0
    assert not np.any(flags)
    assert values[1] == pytest.approx(kernel(chebyshev_model, 1001, 0.5, 0.5).K_direct, rel=1e-13)


def test_rho(free_model, hermite_model, period_two):
    assert rho(free_model, 9) == pytest.approx(10.0)
    assert rho(hermite_model, 3) == pytest.approx(sum(1.0 / math.sqrt(j + 1.0) for j in range(4)))
    blend = make_blend(make_periodic(period_two), Growth(kind="pow", exponent=1.0))
    # two windows of four: only the bounded slots count
    assert rho(blend, 7) == pytest.approx(4.0)
    with pytest.raises(ConfigError):
        rho(free_model, -1)


@pytest.mark.parametrize('alpha, beta', [([1.0, 1.5], [0.0, 0.5]), ([0.8, 1.2, 1.0], [0.1, -0.2, 0.0])])
def test_blend_rho_grows_like_the_bounded_share(alpha, beta):
    env = PeriodicEnvelope(alpha, beta)
    inner = make_asymptotically_periodic(env, PowerPerturbation(amp_a=0.2, amp_b=0.1, power=1.5))
    blend = make_blend(inner, Growth(kind="pow", exponent=1.0))
    share = env.N / (env.N + 2.0)
    n = 10 ** 5
    assert rho(blend, n) / n == pytest.approx(share, rel=1e-3)
    assert rho(blend, 10 * n) / (10 * n) == pytest.approx(share, rel=1e-4)


def test_rho_sub_reaches_before_zero(period_two):
    model = make_periodic(period_two)
    # j = 0 term is 1/a_{-1} = 1/alpha_1
    assert rho_sub(model, -1, 2) == pytest.approx(3.0 / 1.5)
    assert rho_sub(model, 0, 2) == pytest.approx(3.0)


def test_subsequence_kernel(perturbed_model):
    p = eval_poly_sequence(perturbed_model, 0, 0.2, 21).values
    assert subsequence_kernel(perturbed_model, 1, 10, 0.2, 0.2) == pytest.approx(float(np.sum(p[1::2] ** 2)))
    with pytest.raises(ConfigError):
        subsequence_kernel(perturbed_model, 2, 10, 0.2, 0.2)


def test_chebyshev_christoffel_function(chebyshev_model):
    report = christoffel_ratio(chebyshev_model, "all", 10000, 0.0, oracle=constant_coefficient_oracle())
    assert report.K_direct == 5001.0
    assert report.ratio == pytest.approx(0.5, rel=1e-3)
    assert report.mu_hat == pytest.approx(2.0 / math.pi, rel=1e-3)
    assert report.predicted == pytest.approx(0.5)
    assert abs(report.observed_error) <= 0.5 + 1e-9


def test_chebyshev_subsequence_normalisations(chebyshev_model):
    report = christoffel_ratio(chebyshev_model, 0, 10000, 0.0, oracle=constant_coefficient_oracle())
    assert report.ratio == pytest.approx(0.25, rel=1e-3)
    assert report.ratio_alt == pytest.approx(0.25, rel=1e-3)
    assert report.predicted == pytest.approx(0.25)
    assert limit_constant(chebyshev_model, 0, 0.0) == pytest.approx(1.0 / (2.0 * math.pi))


def test_blend_slots_outside_the_envelope_have_no_alternative(period_two):
    model = make_blend(make_periodic(period_two), Growth(kind="pow", exponent=0.75))
    left, right = band_structure(model).intervals[0]
    x = 0.5 * (left + right)
    assert christoffel_ratio(model, 1, 50, x).ratio_alt is not None
    assert christoffel_ratio(model, 2, 50, x).ratio_alt is None


def test_christoffel_ratio_attaches_ledger(free_model):
    report = christoffel_ratio(free_model, "all", 100, 0.3, ledger_grid=GRID)
    assert report.bound_ledger == 0.0
    assert report.ratio == pytest.approx(kernel(free_model, 100, 0.3, 0.3).K_direct / 101.0)


def test_scaling_kernel_approaches_sinc(chebyshev_model):
    report = scaling_kernel(chebyshev_model, 2000, 0.0, 1.0, 0.0)
    assert report.predicted == pytest.approx(sinc(1.0))
    assert report.ratio == pytest.approx(sinc(1.0), abs=1e-2)
    assert report.u == 1.0 and report.v == 0.0
    assert sinc(0.0) == 1.0


@pytest.mark.parametrize('form', ['full', 'subsequence'])
def test_periodic_ledger_vanishes(free_model, period_two, form):
    assert error_ledger(free_model, 0, 50, GRID, form=form) == 0.0
    assert error_ledger(make_periodic(period_two), 1, 50, GRID, form=form) == 0.0


def test_perturbed_ledger_is_positive(perturbed_model):
    full = error_ledger(perturbed_model, 0, 20, GRID, form="full")
    sub = error_ledger(perturbed_model, 1, 20, GRID, form="subsequence")
    assert full > 0.0 and math.isfinite(full)
    assert sub > 0.0 and math.isfinite(sub)


def test_ledger_rejects_bad_arguments(free_model):
    with pytest.raises(ConfigError):
        error_ledger(free_model, 0, 10, GRID, form="half")
    with pytest.raises(ConfigError):
        error_ledger(free_model, 0, 10, [])
    with pytest.raises(ConfigError):
        error_ledger(free_model, 0, -1, GRID)


def test_ledger_tail_cap_warns(hermite_model, caplog):
    value = error_ledger(hermite_model, 0, 10, [0.0], tail_cap=5)
    assert value > 0.0
    assert "tail truncated at 5 terms" in caplog.text


def test_single_chunk_truncation_makes_no_trend_claim(hermite_model, caplog):
    error_ledger(hermite_model, 0, 10, [0.0], tail_cap=5)
    assert "tail truncated at 5 terms" in caplog.text
    assert "not decreasing" not in caplog.text


def test_overflow_is_refused_by_the_normalized_functions():
    model = make_tabulated([1e-3], [0.0])
    with pytest.raises(OverflowFlaggedError):
        christoffel_ratio(model, "all", 200, 5.0)
    with pytest.raises(OverflowFlaggedError):
        christoffel_ratio(model, 0, 200, 5.0)
    with pytest.raises(OverflowFlaggedError):
        scaling_kernel(model, 200, 5.0, 1.0, 0.0)
    with pytest.raises(NumericalError):
        subsequence_kernel(model, 0, 200, 5.0, 5.0)


def test_increment_comparison(free_model, perturbed_model):
    assert increment_comparison(free_model, 0, 5, GRID, tail=10) == (0.0, 0.0)
    matrix_tail, coeff_tail = increment_comparison(perturbed_model, 0, 10, GRID, tail=20)
    assert matrix_tail > 0.0
    assert coeff_tail > 0.0
    assert matrix_tail <= 10.0 * coeff_tail
    with pytest.raises(ConfigError):
        increment_comparison(perturbed_model, 0, 10, GRID, tail=0)


def test_matrix_and_coefficient_increments_are_comparable(rng):
    for _ in range(10):
        N = int(rng.integers(1, 3))
        env = PeriodicEnvelope(rng.uniform(0.8, 1.25, N), rng.uniform(-0.3, 0.3, N))
        bump = PowerPerturbation(amp_a=float(rng.uniform(0.05, 0.4)), amp_b=float(rng.uniform(-0.3, 0.3)),
                                 power=float(rng.uniform(1.2, 2.0)))
        model = make_asymptotically_periodic(env, bump)
        for i in range(N):
            matrix_tail, coeff_tail = increment_comparison(model, i, 5, GRID, tail=200)
            assert 0.0 < matrix_tail <= 10.0 * coeff_tail


@pytest.mark.parametrize('x', [0.0, 0.3, -0.75])
def test_chebyshev_amplitude_is_exact(chebyshev_model, x):
    sample = amplitude_estimate(chebyshev_model, 0, 20, x, constant_coefficient_oracle())
    assert sample.predicted == pytest.approx(1.0 / (2.0 * (1.0 - x * x)))
    assert sample.observed == pytest.approx(sample.predicted, rel=1e-9)
    assert sample.index == 21


def test_projection_reproduces_polynomials():
    oracle = gaussian_oracle()
    assert projection_check(oracle, 10, 0.4, [1.0, 2.0, 0.5]) < 1e-10
    with pytest.raises(ConfigError):
        projection_check(oracle, 2, 0.4, [1.0, 2.0, 0.5, 0.1])
    bare = DensityOracle(name="bare", support=(-1.0, 1.0), mu_prime=lambda x: 0.5, rule=oracle.rule)
    with pytest.raises(ConfigError):
        projection_check(bare, 10, 0.0, [1.0])
