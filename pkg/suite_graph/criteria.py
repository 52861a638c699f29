"""
The acceptance battery. Each check returns (passed, detail); every numeric
threshold is multiplied by the run's tolerance.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Tuple

import numpy as np

from jacobi.equilibrium import band_structure, blend_density_forms, normalization, omega_prime, periodic_density_forms
from jacobi.errors import ConfigError
from jacobi.kernel import christoffel_ratio, error_ledger, rho, scaling_kernel, sinc, kernel
from jacobi.oracles import constant_coefficient_oracle, divergent_diagonal_example, gaussian_oracle
from jacobi.oscsum import (canonical_spec, lemma_bound_ratio, normalized_exponential_sum, random_spec,
                           sinc_limit_prediction, sinc_limit_sum)
from jacobi.params import Growth, PeriodicEnvelope, make_modulated, make_tabulated
from jacobi.poly import eval_poly_sequence
from jacobi.states import BandStructure
from jacobi.transfer import associated_product_matrix, normalized_phase_derivative, phase_derivative_limit, transfer_product

from .global_state import EvaluationCache, get_evaluation_cache

logger = logging.getLogger(__name__)

Outcome = Tuple[bool, str]


@dataclass
class RunContext:
    tolerance: float = 1.0
    seed: int = 0
    cache: EvaluationCache = field(default_factory=get_evaluation_cache)

    def rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])


@dataclass(frozen=True)
class Criterion:
    id: str
    title: str
    check: Callable[[RunContext], Outcome]


def _random_tabulated(rng: np.random.Generator, size: int, a_range, b_range, name: str):
    return make_tabulated(rng.uniform(*a_range, size), rng.uniform(*b_range, size), name=name)


def _random_envelope(rng: np.random.Generator, max_period: int = 4) -> PeriodicEnvelope:
    N = int(rng.integers(1, max_period + 1))
    return PeriodicEnvelope(rng.uniform(0.5, 2.0, N), rng.uniform(-1.0, 1.0, N))


def _interior_points(bands: BandStructure, total: int) -> List[float]:
    per_band = max(1, math.ceil(total / bands.count))
    j = np.arange(per_band)
    points = []
    for left, right in bands.intervals:
        mid, half = 0.5 * (left + right), 0.5 * (right - left)
        points.extend((mid + 0.95 * half * np.cos(np.pi * (j + 0.5) / per_band)).tolist())
    return points


def _relative(u: float, v: float) -> float:
    return abs(u - v) / max(abs(u), abs(v), 1e-300)


# --------------------------------------------------------------------------
# Checks
# --------------------------------------------------------------------------

def check_product_identity(ctx: RunContext) -> Outcome:
    rng = ctx.rng(1)
    worst = 0.0
    for m in range(100):
        model = _random_tabulated(rng, 48, (0.1, 10.0), (-5.0, 5.0), f"random-{m}")
        for n in range(1, 21):
            k, x = int(rng.integers(0, 6)), float(rng.uniform(-3.0, 3.0))
            A = transfer_product(model, k, n, x).to_array()
            B = associated_product_matrix(model, k, n, x).to_array()
            worst = max(worst, float(np.max(np.abs(A - B)) / max(1.0, np.max(np.abs(A)))))
    return worst <= 1e-10 * ctx.tolerance, f"max normwise deviation {worst:.2e}"


def check_determinant(ctx: RunContext) -> Outcome:
    rng = ctx.rng(1)
    worst = 0.0
    for m in range(100):
        model = _random_tabulated(rng, 48, (0.1, 10.0), (-5.0, 5.0), f"random-{m}")
        for n in range(1, 21):
            k, x = int(rng.integers(0, 6)), float(rng.uniform(-3.0, 3.0))
            X = transfer_product(model, k, n, x)
            expected = model.a(k - 1) / model.a(k + n - 1)
            scale = max(abs(expected), float(np.max(np.abs(X.to_array()))) ** 2)
            worst = max(worst, abs(X.det - expected) / scale)
    return worst <= 1e-12 * ctx.tolerance, f"max scaled det deviation {worst:.2e}"


def check_cd_formula(ctx: RunContext) -> Outcome:
    rng = ctx.rng(3)
    worst, checked = 0.0, 0
    for m in range(30):
        model = _random_tabulated(rng, 210, (0.5, 2.0), (-1.0, 1.0), f"random-{m}")
        n = int(rng.integers(1, 201))
        x = float(rng.uniform(-2.0, 2.0))
        y = float(rng.uniform(-2.0, 2.0))
        while abs(x - y) < 0.1:
            y = float(rng.uniform(-2.0, 2.0))
        for yy in (y, x, x + 5e-9):
            report = kernel(model, n, x, yy)
            if report.overflow_flag or report.K_cd is None or not math.isfinite(report.K_direct):
                continue
            worst = max(worst, abs(report.K_direct - report.K_cd) / max(1.0, abs(report.K_direct)))
            checked += 1
    return checked > 0 and worst <= 1e-8 * ctx.tolerance, f"{checked} pairs, max relative gap {worst:.2e}"


def check_density_identities(ctx: RunContext) -> Outcome:
    rng = ctx.rng(4)
    worst_periodic = worst_blend = worst_mass = 0.0
    bad_counts = 0
    for _ in range(20):
        env = _random_envelope(rng)
        periodic = band_structure(env)
        for x in _interior_points(periodic, 100):
            worst_periodic = max(worst_periodic, _relative(*periodic_density_forms(env, x)))
        worst_mass = max(worst_mass, abs(normalization(periodic) - 1.0))

        blend = band_structure(env, blend=True)
        bad_counts += blend.count != env.N
        for x in _interior_points(blend, 100):
            worst_blend = max(worst_blend, _relative(*blend_density_forms(env, x)))
        worst_mass = max(worst_mass, abs(normalization(blend) - 1.0))

    tol = ctx.tolerance
    passed = (worst_periodic <= 1e-10 * tol and worst_blend <= 1e-10 * tol
              and worst_mass <= 1e-3 * tol and bad_counts == 0)
    return passed, (f"periodic forms {worst_periodic:.1e}, blend forms {worst_blend:.1e}, "
                    f"mass {worst_mass:.1e}, blend count mismatches {bad_counts}")


def check_constant_coefficient(ctx: RunContext) -> Outcome:
    model = constant_coefficient_oracle().model
    n = 5000
    xs = [0.0, 0.3, -0.3, 0.6, -0.6]
    K = ctx.cache.diagonal(model, n, xs)
    worst = max(_relative(k / (n + 1), 1.0 / (2.0 * (1.0 - x * x))) for k, x in zip(K, xs))

    exact = True
    for m in (0, 1, 2, 3, 10, 11, 1000, 1001):
        values = eval_poly_sequence(model, 0, 0.0, m).values
        exact &= float(np.sum(values ** 2)) == float(m // 2 + 1)
    return worst <= 0.02 * ctx.tolerance and exact, f"max relative gap {worst:.2e}, K_n(0,0) exact: {exact}"


def check_divergent_example(ctx: RunContext) -> Outcome:
    example = divergent_diagonal_example()
    p = eval_poly_sequence(example.model, 0, 0.0, 101).values
    m = np.arange(51)
    even_gap = np.max(np.abs(p[2 * m] - example.even_value(m)) / np.abs(example.even_value(m)))
    odd_gap = np.max(np.abs(p[2 * m + 1] ** 2 - example.odd_square(m)) / example.odd_square(m))

    n = 10 ** 5
    far = eval_poly_sequence(example.model, 0, 0.0, 2 * n + 1).values
    ratio = far[2 * n + 1] ** 2 / math.sqrt(n + 1)
    limit_gap = _relative(ratio, example.odd_square_limit)

    sums = [example.normalized_christoffel_sum(k) for k in (10 ** 3, 10 ** 4, 10 ** 5)]
    growth = [b / a for a, b in zip(sums, sums[1:])]

    tol = ctx.tolerance
    passed = (max(even_gap, odd_gap) <= 1e-8 * tol and limit_gap <= 0.01 * tol
              and all(g > 3.0 / tol for g in growth))
    return passed, (f"closed forms {max(even_gap, odd_gap):.1e}, odd ratio {ratio:.6f} "
                    f"(limit {example.odd_square_limit:.6f}), growth per decade {', '.join(f'{g:.2f}' for g in growth)}")


def check_christoffel_stability(ctx: RunContext) -> Outcome:
    model = gaussian_oracle().model
    xs = [-1.0, -0.5, 0.0, 0.5, 1.0]
    w = omega_prime(model, 0.0)
    estimates = {}
    for n in (5 * 10 ** 4, 10 ** 5):
        K = ctx.cache.diagonal(model, n, xs)
        estimates[n] = w * rho(model, n) / K
    worst = float(np.max(np.abs(estimates[10 ** 5] / estimates[5 * 10 ** 4] - 1.0)))
    return worst <= 0.02 * ctx.tolerance, f"max drift of mu_hat between n=5e4 and 1e5: {worst:.2e}"


def check_universality(ctx: RunContext) -> Outcome:
    model = gaussian_oracle().model
    n = 10 ** 5
    worst = 0.0
    for delta in (0.5, 1.0, 2.0, math.pi):
        report = scaling_kernel(model, n, 0.0, delta / 2.0, -delta / 2.0)
        worst = max(worst, _relative(report.ratio, sinc(delta / 2.0)))
    zero = scaling_kernel(model, n, 0.0, math.pi, -math.pi).ratio
    passed = worst <= 0.03 * ctx.tolerance and abs(zero) <= 0.05 * ctx.tolerance
    return passed, f"max relative gap {worst:.2e}, ratio at the sinc zero {zero:.3e}"


def check_oscillatory_sums(ctx: RunContext) -> Outcome:
    spec = canonical_spec()
    tol = ctx.tolerance
    normalized = normalized_exponential_sum(spec, 10 ** 6, 0.0)

    sinc_ok = True
    parts = []
    for gap in (0.0, 1.0, math.pi):
        value = sinc_limit_sum(spec, 10 ** 5, 0.0, 0.0, gap)
        predicted = sinc_limit_prediction(spec, 0.0, 0.0, gap)
        if abs(predicted) < 1e-12:
            sinc_ok &= abs(value) <= 0.02 * tol
        else:
            sinc_ok &= _relative(value, predicted) <= 0.02 * tol
        parts.append(f"{gap:.3f}->{value:.4f}")

    rng = ctx.rng(9)
    constants = []
    for _ in range(20):
        random = random_spec(rng)
        constants.append(max(lemma_bound_ratio(random, n, 0.0)[2] for n in (10 ** 3, 10 ** 4, 10 ** 5)))
    fitted = max(constants)

    passed = normalized <= 0.01 * tol and sinc_ok and fitted < 10.0 * tol
    return passed, f"normalized sum {normalized:.2e}, sinc sums {'; '.join(parts)}, fitted constant {fitted:.3f}"


def check_error_ledger(ctx: RunContext) -> Outcome:
    grid = np.linspace(-0.5, 0.5, 5)
    ns = (10 ** 3, 10 ** 4, 10 ** 5)

    chebyshev = constant_coefficient_oracle()
    periodic_ledgers, periodic_errors = [], []
    for n in ns:
        report = christoffel_ratio(chebyshev.model, "all", n, 0.0, oracle=chebyshev)
        periodic_errors.append(abs(report.observed_error))
        periodic_ledgers.append(error_ledger(chebyshev.model, 0, n, grid))
    periodic_ok = max(periodic_ledgers) == 0.0 and max(periodic_errors) <= 1.0 * ctx.tolerance

    gaussian = gaussian_oracle()
    model = gaussian.model
    scale = omega_prime(model, 0.0) / gaussian.mu_prime(0.0)
    ratios = []
    for n in ns:
        error = float(ctx.cache.diagonal(model, n, [0.0])[0]) - scale * rho(model, n)
        ratios.append(abs(error) / error_ledger(model, 0, n, grid))
    bounded = ratios[-1] <= 1.5 * ctx.tolerance * max(ratios[:-1])

    return periodic_ok and bounded, (
        f"periodic ledger {max(periodic_ledgers):.1e} with |E_n| <= {max(periodic_errors):.2e}; "
        f"|E_n|/ledger {', '.join(f'{r:.3e}' for r in ratios)}"
    )


def check_phase_derivative(ctx: RunContext) -> Outcome:
    model = make_modulated(PeriodicEnvelope([1.0, 1.2], [0.5, 0.5]), Growth(kind="sqrt"), name="modulated")
    limit = phase_derivative_limit(model, 0.0)
    gaps = [abs(normalized_phase_derivative(model, n, 0.0) - limit) for n in (10 ** 2, 10 ** 3, 10 ** 4)]
    passed = all(b < a for a, b in zip(gaps, gaps[1:]))
    return passed, f"deviations {', '.join(f'{g:.3e}' for g in gaps)} from limit {limit:.6f}"


CRITERIA: List[Criterion] = [
    Criterion("product-identity", "transfer product equals the associated-polynomial matrix", check_product_identity),
    Criterion("determinant", "det X_n telescopes to a_{k-1}/a_{k+n-1}", check_determinant),
    Criterion("cd-formula", "direct kernel sum equals the Christoffel-Darboux formula", check_cd_formula),
    Criterion("density-identities", "closed forms of the equilibrium density agree and integrate to 1",
              check_density_identities),
    Criterion("constant-coefficient", "Christoffel ratio of the constant-coefficient model", check_constant_coefficient),
    Criterion("divergent-example", "closed forms and divergence of the diagonal-perturbation example",
              check_divergent_example),
    Criterion("christoffel-stability", "mu_hat stabilizes for a_n = sqrt(n+1)", check_christoffel_stability),
    Criterion("universality", "sine-kernel universality ratio", check_universality),
    Criterion("oscillatory-sums", "oscillatory sum limits and bound constants", check_oscillatory_sums),
    Criterion("error-ledger", "error ledgers against observed errors", check_error_ledger),
    Criterion("phase-derivative", "normalized phase derivative converges", check_phase_derivative),
]


def resolve(only: List[str]) -> List[Criterion]:
    """Criteria selected by id or 1-based position; all of them when only is empty"""
    if not only:
        return list(CRITERIA)
    by_id = {c.id: c for c in CRITERIA}
    picked = []
    for token in only:
        token = token.strip()
        if token.isdigit() and 1 <= int(token) <= len(CRITERIA):
            picked.append(CRITERIA[int(token) - 1])
        elif token in by_id:
            picked.append(by_id[token])
        else:
            raise ConfigError(f"unknown criterion {token!r}; known: {', '.join(by_id)}")
    return picked
