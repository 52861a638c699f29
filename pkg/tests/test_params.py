import json
import math
import os

import numpy as np
import pytest

from jacobi.errors import ConfigError
from jacobi.params import (ClassTag, Growth, PeriodicEnvelope, PowerPerturbation, carleman_partial_sum,
                           carleman_partial_sums, dr_diagnostic, finite_difference, ignjatovic_conditions,
                           load_model, make_alternating, make_asymptotically_periodic, make_blend,
                           make_modulated, make_periodic, make_tabulated, model_from_json, model_to_json,
                           modulation_diagnostic, theorem_hypotheses)


@pytest.mark.parametrize('alpha, beta', [([], []), ([1.0, 0.0], [0.0, 0.0]), ([1.0], [0.0, 1.0]),
                                         ([float('nan')], [0.0])])
def test_envelope_rejects_bad_entries(alpha, beta):
    with pytest.raises(ConfigError):
        PeriodicEnvelope(alpha, beta)


def test_envelope_wraps_negative_indices(period_two):
    assert period_two.N == 2
    assert period_two.alpha_at(-1) == 1.5
    assert period_two.beta_at(3) == 0.5
    assert np.array_equal(period_two.alpha_at(np.array([-1, 0, 1, 2])), [1.5, 1.0, 1.5, 1.0])


def test_periodic_model(period_two):
    model = make_periodic(period_two)
    assert model.class_tag is ClassTag.EXACT_PERIODIC
    assert model.window == 2
    assert np.array_equal(model.a_seq(0, 6), [1.0, 1.5] * 3)
    assert np.array_equal(model.b_seq(0, 4), [0.0, 0.5] * 2)
    # a_{-1} is alpha_{N-1}
    assert model.a(-1) == 1.5


def test_asymptotically_periodic_values(period_two):
    model = make_asymptotically_periodic(period_two, PowerPerturbation(amp_a=0.5, amp_b=1.0, power=2.0))
    n = np.arange(10)
    assert np.allclose(model.a_seq(0, 10), np.asarray(period_two.alpha_at(n)) + 0.5 / (n + 1.0) ** 2)
    assert np.allclose(model.b_seq(0, 10), np.asarray(period_two.beta_at(n)) + 1.0 / (n + 1.0) ** 2)


def test_asymptotically_periodic_rejects_nonpositive(period_two):
    with pytest.raises(ConfigError):
        make_asymptotically_periodic(period_two, PowerPerturbation(amp_a=-2.0, power=1.0))


def test_modulated_model(period_two):
    model = make_modulated(period_two, Growth(kind="sqrt"))
    assert model.class_tag is ClassTag.PERIODICALLY_MODULATED
    assert model.a(4) == pytest.approx(1.0 * math.sqrt(5.0))
    assert model.b(5) == pytest.approx(0.5 * math.sqrt(6.0))
    assert "modulation-window" not in model.flags
    assert not modulation_diagnostic(model).flagged


def test_modulated_without_growth_is_flagged(period_two, caplog):
    model = make_modulated(period_two, Growth(kind="pow", exponent=0.0))
    assert "modulation-window" in model.flags
    assert "modulation window check failed" in caplog.text


def test_blend_layout():
    inner = make_periodic(PeriodicEnvelope([1.0, 2.0], [0.3, -0.3]))
    c = Growth(kind="pow", exponent=0.75)
    model = make_blend(inner, c)
    assert model.class_tag is ClassTag.PERIODIC_BLEND
    assert model.window == 4
    a = model.a_seq(0, 8)
    assert np.allclose(a[[0, 1, 4, 5]], [1.0, 2.0, 1.0, 2.0])
    assert np.allclose(a[[2, 3, 6, 7]], c(np.arange(4)))
    assert np.array_equal(model.b_seq(0, 8), [0.3, -0.3, 0.0, 0.0] * 2)
    assert np.allclose(model.c(np.arange(3)), c(np.arange(3)))


def test_blend_needs_asymptotically_periodic_inner(period_two):
    with pytest.raises(ConfigError):
        make_blend(make_modulated(period_two, Growth()), Growth())


def test_tabulated_held_past_end():
    model = make_tabulated([1.0, 2.0, 3.0], [0.0, 1.0, 2.0])
    assert np.array_equal(model.a_seq(0, 6), [1.0, 2.0, 3.0, 3.0, 3.0, 3.0])
    assert model.b(10) == 2.0
    with pytest.raises(ConfigError):
        make_tabulated([1.0, -1.0], [0.0, 0.0])


def test_alternating_model():
    model = make_alternating(Growth(kind="sqrt"), [1.0, 0.0])
    assert "unbounded" in model.flags
    assert model.N == 1
    assert np.allclose(model.a_seq(0, 4), np.sqrt([1.0, 2.0, 3.0, 4.0]))
    assert np.array_equal(model.b_seq(0, 4), [1.0, 0.0, 1.0, 0.0])


@pytest.mark.parametrize('name, tag', [('chebyshev-like', ClassTag.EXACT_PERIODIC),
                                       ('ignjatovic', ClassTag.CUSTOM),
                                       ('divergent', ClassTag.CUSTOM),
                                       ('modulated', ClassTag.PERIODICALLY_MODULATED),
                                       ('blend', ClassTag.PERIODIC_BLEND)])
def test_shipped_models_load(models_dir, name, tag):
    model = load_model(os.path.join(models_dir, f"{name}.json"))
    assert model.class_tag is tag
    assert model.name == name
    rebuilt = model_from_json(model_to_json(model))
    assert np.array_equal(rebuilt.a_seq(0, 40), model.a_seq(0, 40))
    assert np.array_equal(rebuilt.b_seq(0, 40), model.b_seq(0, 40))


def test_model_json_uses_class_alias(period_two):
    payload = model_to_json(make_periodic(period_two, name="p2"))
    assert payload["class"] == "ExactPeriodic"
    assert payload["alpha"] == [1.0, 1.5]
    json.dumps(payload)


@pytest.mark.parametrize('payload', [
    '{"class": "ExactPeriodic", "alpha": [1.0], "colour": "red"}',
    '{"class": "ExactPeriodic"}',
    '{"class": "ExactPeriodic", "N": 2, "alpha": [1.0]}',
    '{"class": "PeriodicallyModulated", "alpha": [1.0]}',
    '{"class": "Nonsense", "alpha": [1.0]}',
    'not json',
])
def test_invalid_model_json(payload):
    with pytest.raises(ConfigError):
        model_from_json(payload)


def test_load_model_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_model(str(tmp_path / "missing.json"))


def test_carleman_sums(free_model, hermite_model):
    assert carleman_partial_sum(free_model, 99) == pytest.approx(100.0)
    sums = carleman_partial_sums(hermite_model, 3)
    assert np.allclose(sums, np.cumsum(1.0 / np.sqrt([1.0, 2.0, 3.0, 4.0])))


@pytest.mark.parametrize('n', [10, 1000, 10 ** 5])
def test_carleman_sum_against_the_integral(hermite_model, n):
    # sum_{k<=n} (k+1)^{-1/2} - (2 sqrt(n+2) - 2) lies in [0, 1] and tends to 2 + zeta(1/2)
    gap = carleman_partial_sum(hermite_model, n) - (2.0 * math.sqrt(n + 2.0) - 2.0)
    assert 0.0 <= gap <= 1.0
    if n == 10 ** 5:
        assert gap == pytest.approx(2.0 - 1.4603545088095868, abs=1e-2)


def test_finite_difference():
    assert np.array_equal(finite_difference(np.array([1.0, 4.0, 9.0, 16.0]), 2), [2.0, 2.0])
    assert np.array_equal(finite_difference(np.array([1.0, 2.0]), 0), [1.0, 2.0])


@pytest.mark.parametrize('seq, verdict', [
    (lambda n: 1.0 / (n + 1.0), "converging"),
    (lambda n: np.sqrt(n + 1.0), "diverging"),
    (lambda n: np.ones(n.shape), "converging"),
    (lambda n: (-1.0) ** n, "diverging"),
])
def test_dr_diagnostic_verdicts(seq, verdict):
    diag = dr_diagnostic(seq, 1, 10 ** 4)
    assert diag.bounded_flag == verdict
    assert diag.per_j_partial_sums[1].shape == (10 ** 4,)


def test_telescoping_partial_sums_tend_to_one():
    window = 10 ** 4
    diag = dr_diagnostic(lambda n: 1.0 / (n + 1.0), 1, window)
    sums = diag.per_j_partial_sums[1]
    assert sums[-1] == pytest.approx(1.0 - 1.0 / (window + 1.0), rel=1e-12)
    assert np.all(np.diff(sums) > 0.0)


def test_dr_diagnostic_second_order():
    diag = dr_diagnostic(lambda n: 1.0 / np.sqrt(n + 1.0), 2, 10 ** 4)
    assert set(diag.per_j_partial_sums) == {1, 2}
    assert diag.bounded_flag == "converging"


def test_dr_diagnostic_validates_window():
    with pytest.raises(ConfigError):
        dr_diagnostic(np.ones(10), 1, 2)
    with pytest.raises(ConfigError):
        dr_diagnostic(np.ones(10), 1, 20)


def test_theorem_hypotheses_for_hermite(hermite_model):
    report = theorem_hypotheses(hermite_model, r=1, window=10 ** 4)
    assert set(report) == {"ratio_0", "b_over_a_0", "inverse_a_0"}
    assert all(d.bounded_flag == "converging" for d in report.values())


def test_divergent_hypotheses_are_read_at_period_one():
    model = make_alternating(Growth(kind="sqrt"), [1.0, 0.0], name="divergent")
    report = theorem_hypotheses(model, r=1, window=10 ** 4)
    assert set(report) == {"ratio_0", "b_over_a_0", "inverse_a_0"}
    assert report["b_over_a_0"].bounded_flag == "diverging"
    assert report["ratio_0"].bounded_flag == "converging"
    assert report["inverse_a_0"].bounded_flag == "converging"
    direct = dr_diagnostic(lambda n: model.b_at(n) / model.a_at(n), 1, 10 ** 4)
    assert direct.bounded_flag == "diverging"


def test_growth_conditions_for_hermite(hermite_model):
    conditions = ignjatovic_conditions(hermite_model, window=10 ** 4)
    assert all(conditions.values()), conditions
