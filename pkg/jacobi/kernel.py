"""
Christoffel-Darboux kernels and what is measured with them.

    K_n(x, y)     = sum_{j<=n} p_j(x) p_j(y)
    K_{i;n}(x, y) = sum_{j<=n} p_{jW+i}(x) p_{jW+i}(y)

Every check here is phrased through ratios that need no knowledge of mu';
when a DensityOracle is supplied the absolute predictions and the error
terms E_n are filled in as well.
"""
import logging
import math
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from jacobi.equilibrium import omega_prime
from jacobi.errors import ConfigError, OverflowFlaggedError
from jacobi.params import ClassTag, ParameterModel
from jacobi.poly import eval_poly_derivative, eval_poly_sequence
from jacobi.states import AmplitudeSample, DensityOracle, KernelReport
from jacobi.transfer import class_limit, n_step_stack, neg_discriminant, phase
from tools.summation import CompensatedSum, compensated_cumsum, compensated_total, two_prod, two_sum

logger = logging.getLogger(__name__)

CONFLUENT_GAP = 1e-8
LEDGER_FLOOR = 1e-14
CHUNK = 1 << 15

Index = Union[int, str]


# --------------------------------------------------------------------------
# Normalizers
# --------------------------------------------------------------------------

def rho(model: ParameterModel, n: int) -> float:
    """
    sum_{j<=n} alpha_j/a_j; for blends only the N bounded slots of each
    window of N + 2 contribute, with alpha_{m mod (N+2)}.
    """
    if n < 0:
        raise ConfigError(f"n must be >= 0, got {n}")
    m = np.arange(n + 1, dtype=np.int64)
    a = model.a_at(m)
    if model.class_tag is ClassTag.PERIODIC_BLEND:
        slot = m % model.window
        keep = slot < model.N
        return compensated_total(model.envelope.alpha_at(slot[keep]) / a[keep])
    return compensated_total(model.envelope.alpha_at(m) / a)


def rho_sub(model: ParameterModel, i: int, n: int) -> float:
    """sum_{j<=n} 1/a_{jW+i}; i = -1 reaches a_{-1} = alpha_{N-1} at j = 0"""
    if n < 0:
        raise ConfigError(f"n must be >= 0, got {n}")
    idx = np.arange(n + 1, dtype=np.int64) * model.window + i
    return compensated_total(1.0 / model.a_at(idx))


# --------------------------------------------------------------------------
# Kernels
# --------------------------------------------------------------------------

def _values(model: ParameterModel, x: float, n_max: int) -> Tuple[np.ndarray, bool]:
    sample = eval_poly_sequence(model, 0, x, n_max)
    return sample.values, bool(sample.overflow_flag)


def _trusted_values(model: ParameterModel, x: float, n_max: int) -> np.ndarray:
    sample = eval_poly_sequence(model, 0, x, n_max)
    if sample.flagged:
        raise OverflowFlaggedError(model.name, n_max, x, int(sample.valid))
    return sample.values


def _confluent(model: ParameterModel, n: int, x: float) -> Tuple[float, bool]:
    """a_n (p_n(x) p_{n+1}'(x) - p_n'(x) p_{n+1}(x))"""
    sample = eval_poly_derivative(model, x, n + 1)
    p, dp = sample.values, sample.deriv_values
    t1, e1 = two_prod(p[n], dp[n + 1])
    t2, e2 = two_prod(dp[n], p[n + 1])
    s, t = two_sum(t1, -t2)
    return model.a(n) * (s + (t + e1 - e2)), sample.flagged


def kernel(model: ParameterModel, n: int, x: float, y: float) -> KernelReport:
    """K_n(x, y) by the direct sum and by the Christoffel-Darboux formula"""
    if n < 0:
        raise ConfigError(f"n must be >= 0, got {n}")
    x, y = float(x), float(y)
    px, flag_x = _values(model, x, n + 1)
    py, flag_y = (px, flag_x) if y == x else _values(model, y, n + 1)
    flagged = flag_x or flag_y

    K_direct = compensated_total(px[: n + 1] * py[: n + 1])

    K_cd = None
    if abs(x - y) < CONFLUENT_GAP:
        value, flag_c = _confluent(model, n, 0.5 * (x + y))
        flagged = flagged or flag_c
        K_cd = value
    else:
        K_cd = model.a(n) * (px[n + 1] * py[n] - px[n] * py[n + 1]) / (x - y)

    if flagged:
        logger.warning(f"⚠️ {model.name}: overflow below n={n + 1}, CD value dropped")
        K_cd = None

    return KernelReport(n=n, x=x, y=y, K_direct=K_direct, K_cd=K_cd,
                        rho=rho(model, n), overflow_flag=flagged)


def diagonal_kernel(model: ParameterModel, n: int, xs: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """K_n(x, x) for every x in xs in one recurrence pass; returns (values, overflow flags)"""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    sample = eval_poly_sequence(model, 0, xs, n)
    values = np.asarray([compensated_total(sample.column(j) ** 2) for j in range(xs.size)])
    return values, np.atleast_1d(np.asarray(sample.overflow_flag))


def subsequence_kernel(model: ParameterModel, i: int, n: int, x: float, y: float) -> float:
    """K_{i;n}(x, y) = sum_{j<=n} p_{jW+i}(x) p_{jW+i}(y)"""
    W = model.window
    if not 0 <= i < W:
        raise ConfigError(f"subsequence index must be in 0..{W - 1}, got {i}")
    top = n * W + i
    px = _trusted_values(model, x, top)
    py = px if y == x else _trusted_values(model, y, top)
    return compensated_total(px[i::W][: n + 1] * py[i::W][: n + 1])


# --------------------------------------------------------------------------
# Christoffel functions
# --------------------------------------------------------------------------

def limit_constant(model: ParameterModel, i: int, x: float) -> float:
    """|[L]_21| / (pi sqrt(-discr L)) for the class limit L of X_{jW+i}(x)"""
    L = class_limit(model, i, x)
    return abs(L.m21) / (math.pi * math.sqrt(neg_discriminant(L, x)))


def christoffel_ratio(model: ParameterModel, i: Index, n: int, x: float,
                      oracle: Optional[DensityOracle] = None,
                      ledger_grid: Optional[Sequence[float]] = None) -> KernelReport:
    """
    Normalized Christoffel function at x.

    i = "all": K_n(x,x)/rho_n, with mu_hat = omega' rho_n / K_n(x,x).
    i integer: K_{i;n}(x,x)/rho_{i-1;n+1}, plus the alternative
    K_{i;n}(x,x) alpha_{i-1} / (rho_{i;n} alpha_i); both tend to
    |[L]_21|/(pi mu' sqrt(-discr L)).
    """
    x = float(x)
    if i == "all":
        px = _trusted_values(model, x, n)
        K = compensated_total(px ** 2)
        scale = omega_prime(model, x)
        r = rho(model, n)
        report = KernelReport(n=n, x=x, y=x, K_direct=K, K_cd=None, rho=r,
                              ratio=K / r, mu_hat=scale * r / K)
        if ledger_grid is not None:
            report.bound_ledger = error_ledger(model, 0, n, ledger_grid, form="full")
    else:
        i = int(i)
        K = subsequence_kernel(model, i, n, x, x)
        scale = limit_constant(model, i, x)
        r = rho_sub(model, i - 1, n + 1)
        ratio_alt = None
        bounded_slot = not (model.class_tag is ClassTag.PERIODIC_BLEND and i % model.window >= model.N)
        if bounded_slot:
            env = model.envelope
            ratio_alt = K * env.alpha_at(i - 1) / (rho_sub(model, i, n) * env.alpha_at(i))
        report = KernelReport(n=n, x=x, y=x, K_direct=K, K_cd=None, rho=r,
                              ratio=K / r, ratio_alt=ratio_alt, mu_hat=scale * r / K)
        if ledger_grid is not None:
            report.bound_ledger = error_ledger(model, i, n, ledger_grid, form="subsequence")

    if oracle is not None:
        report.predicted = scale / oracle.mu_prime(x)
        report.observed_error = report.K_direct - report.predicted * report.rho
    return report


def sinc(s: float) -> float:
    return 1.0 if s == 0.0 else math.sin(s) / s


def scaling_kernel(model: ParameterModel, n: int, x: float, u: float, v: float) -> KernelReport:
    """
    K_n(x + u/rho_n, x + v/rho_n) and the universality ratio
    R_n(u, v) = K_n(x + u/rho_n, x + v/rho_n) / K_n(x, x), whose limit
    sin((u-v) pi w) / ((u-v) pi w) with w = omega' needs no mu'.
    """
    r = rho(model, n)
    report = kernel(model, n, x + u / r, x + v / r)
    K0 = compensated_total(_trusted_values(model, float(x), n) ** 2)
    if report.overflow_flag:
        raise OverflowFlaggedError(model.name, n, report.x)
    w = omega_prime(model, x)
    predicted = sinc((u - v) * math.pi * w)
    ratio = report.K_direct / K0

    report.x, report.u, report.v = float(x), float(u), float(v)
    report.ratio = ratio
    report.predicted = predicted
    report.observed_error = ratio - predicted
    report.mu_hat = w * r / K0
    return report


# --------------------------------------------------------------------------
# Error ledgers
# --------------------------------------------------------------------------

def _tail_sums(increments: Callable[[int, int], np.ndarray], start: int, cap: int,
               modulus: int, label: str) -> np.ndarray:
    """
    Sums of increments[l] for l >= start grouped by l mod modulus, read in
    chunks until a chunk falls below the floor or the cap is reached.
    """
    sums = [CompensatedSum() for _ in range(modulus)]
    pos, stop = start, start + cap
    first_peak = peak = 0.0
    chunks = 0
    while pos < stop:
        hi = min(pos + CHUNK, stop)
        d = increments(pos, hi)
        residues = np.arange(pos, hi) % modulus
        for r in range(modulus):
            sums[r].add(compensated_total(d[residues == r]))
        peak = float(np.max(d)) if d.size else 0.0
        if peak < LEDGER_FLOOR:
            return np.asarray([s.value for s in sums])
        first_peak = first_peak or peak
        chunks += 1
        pos = hi

    if cap <= 0:
        return np.asarray([s.value for s in sums])
    note = " and increments are not decreasing" if chunks > 1 and peak >= first_peak else ""
    logger.warning(f"⚠️ {label}: tail truncated at {cap} terms{note}")
    return np.asarray([s.value for s in sums])


def step_increments(model: ParameterModel, lo: int, hi: int, grid: Sequence[float]) -> np.ndarray:
    """sup_x ||B_{l+W}(x) - B_l(x)|| for l in [lo, hi); only the second row differs"""
    W = model.window
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    l = np.arange(lo, hi, dtype=np.int64)
    a0, a1 = model.a_at(l), model.a_at(l + W)
    dr = model.a_at(l + W - 1) / a1 - model.a_at(l - 1) / a0
    ds = grid[None, :] * (1.0 / a1 - 1.0 / a0)[:, None] - (model.b_at(l + W) / a1 - model.b_at(l) / a0)[:, None]
    return np.sqrt(dr[:, None] ** 2 + ds ** 2).max(axis=1)


def window_increments(model: ParameterModel, i: int, lo: int, hi: int, grid: Sequence[float]) -> np.ndarray:
    """sup_x ||X_{(j+1)W+i}(x) - X_{jW+i}(x)|| for j in [lo, hi)"""
    W = model.window
    starts = np.arange(lo, hi + 1, dtype=np.int64) * W + i
    P = n_step_stack(model, starts, grid)
    diff = P[1:] - P[:-1]
    return np.linalg.norm(diff, ord=2, axis=(-2, -1)).max(axis=1)


def error_ledger(model: ParameterModel, i: int, n: int, grid: Sequence[float],
                 form: str = "full", tail_cap: Optional[int] = None) -> float:
    """
    Computable right-hand side of the quantitative Christoffel bounds.

    form="full":
        sum_{m<=n+W} (1/a_m) sum_{j>=0} sup_x ||B_{m+(j+1)W} - B_{m+jW}||     (i unused)
    form="subsequence":
        sum_{k<=n} ( |1/a_{(k+1)W+i-1} - 1/a_{kW+i-1}|
                     + (1/a_{(k+1)W+i-1}) sum_{j>=k} sup_x ||X_{(j+1)W+i} - X_{jW+i}|| )

    Inner tails stop once increments fall below 1e-14; otherwise they are
    cut after tail_cap windows (default 4(n+1)) with a warning.
    """
    if n < 0:
        raise ConfigError(f"n must be >= 0, got {n}")
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise ConfigError("ledger grid must be non-empty")
    W = model.window
    cap = 4 * (n + 1) if tail_cap is None else int(tail_cap)

    if form == "full":
        head = n + W + 1
        d = step_increments(model, 0, head, grid)
        tail = _tail_sums(lambda lo, hi: step_increments(model, lo, hi, grid),
                          head, cap * W, W, f"{model.name} step ledger")
        T = np.empty(head)
        for r in range(W):
            T[r::W] = compensated_cumsum(d[r::W][::-1])[::-1] + tail[r]
        return compensated_total(T / model.a_at(np.arange(head, dtype=np.int64)))

    if form == "subsequence":
        e = window_increments(model, i, 0, n + 1, grid)
        tail = _tail_sums(lambda lo, hi: window_increments(model, i, lo, hi, grid),
                          n + 1, cap, 1, f"{model.name} window ledger")[0]
        S = compensated_cumsum(e[::-1])[::-1] + tail
        k = np.arange(n + 2, dtype=np.int64)
        inv = 1.0 / model.a_at(k * W + i - 1)
        terms = np.abs(inv[1:] - inv[:-1]) + inv[1:] * S
        return compensated_total(terms)

    raise ConfigError(f"unknown ledger form {form!r}, expected 'full' or 'subsequence'")


def increment_comparison(model: ParameterModel, i: int, start: int, grid: Sequence[float],
                         tail: int) -> Tuple[float, float]:
    """
    (matrix tail, coefficient tail) over windows j in [start, start + tail):
    sup_x ||X_{(j+1)W+i} - X_{jW+i}|| against the coefficient increments
    |D(a_{l-1}/a_l)| + |D(b_l/a_l)| + sup|x| |D(1/a_l)| summed over each window.
    """
    if tail < 1:
        raise ConfigError(f"tail must be >= 1, got {tail}")
    W = model.window
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    matrix_tail = compensated_total(window_increments(model, i, start, start + tail, grid))

    l = (np.arange(start, start + tail, dtype=np.int64) * W + i)[:, None] + np.arange(W)[None, :]
    a0, a1 = model.a_at(l), model.a_at(l + W)
    coeff = (np.abs(model.a_at(l + W - 1) / a1 - model.a_at(l - 1) / a0)
             + np.abs(model.b_at(l + W) / a1 - model.b_at(l) / a0)
             + float(np.max(np.abs(grid))) * np.abs(1.0 / a1 - 1.0 / a0))
    return matrix_tail, compensated_total(coeff.ravel())


# --------------------------------------------------------------------------
# Amplitudes and reproducing property
# --------------------------------------------------------------------------

def amplitude_estimate(model: ParameterModel, i: int, k: int, x: float,
                       oracle: DensityOracle) -> AmplitudeSample:
    """
    Amplitude of p_{jW+i}(x) read off two consecutive window values
    q_k = p_{kW+i}, q_{k+1} = p_{(k+1)W+i} and the phase theta = theta_{(k+1)W+i}:

        a_{(k+1)W+i-1} (q_k^2 + q_{k+1}^2 - 2 cos(theta) q_k q_{k+1}) / sin(theta)^2

    against 2 |[L]_21| / (pi mu'(x) sqrt(-discr L)).
    """
    W = model.window
    top = (k + 1) * W + i
    p = eval_poly_sequence(model, 0, x, top).values
    q0, q1 = p[k * W + i], p[top]
    theta = phase(model, top, x).theta
    a = model.a(top - 1)
    observed = a * (q0 * q0 + q1 * q1 - 2.0 * math.cos(theta) * q0 * q1) / math.sin(theta) ** 2
    predicted = 2.0 * limit_constant(model, i, x) / oracle.mu_prime(x)
    return AmplitudeSample(k=k, index=top, theta=theta, observed=observed, predicted=predicted)


def projection_check(oracle: DensityOracle, n: int, x: float, coefficients: Sequence[float]) -> float:
    """
    |int K_n(x, y) f(y) dmu(y) - f(x)| for f = sum_j c_j p_j of degree <= n,
    integrated with the oracle's Gauss rule.
    """
    coefficients = np.asarray(coefficients, dtype=float)
    if coefficients.size > n + 1:
        raise ConfigError(f"f has degree {coefficients.size - 1} > n = {n}")
    if oracle.model is None:
        raise ConfigError(f"oracle {oracle.name} carries no recurrence model")
    model = oracle.model
    nodes, weights = oracle.rule(n + coefficients.size + 2)

    P = eval_poly_sequence(model, 0, nodes, n).values          # (n+1, points)
    px = eval_poly_sequence(model, 0, float(x), n).values       # (n+1,)
    f_nodes = coefficients @ P[: coefficients.size]
    f_x = float(coefficients @ px[: coefficients.size])
    K = px @ P
    return abs(compensated_total(K * f_nodes * weights) - f_x)
