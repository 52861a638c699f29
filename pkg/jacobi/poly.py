"""
Orthonormal and associated polynomials by forward three-term recurrence.

    a_{n+k-1} p^{[k]}_{n-1} + b_{n+k} p^{[k]}_n + a_{n+k} p^{[k]}_{n+1} = x p^{[k]}_n,
    p^{[k]}_{-1} = 0,  p^{[k]}_0 = 1.

Values are raw (no rescaling) because the Christoffel-Darboux kernel needs
them as they are. Each step is computed with error-free products and sums,
and a column whose magnitude passes the overflow threshold is cut and
flagged instead of turning into inf/nan.
"""
import logging
import math
from typing import Tuple, Union

import numpy as np
from scipy.special import gammaln

from jacobi.errors import ConfigError
from jacobi.params import ParameterModel
from jacobi.states import PolySample
from tools.summation import compensated_cumsum, two_prod, two_sum
from utils.settings import get_settings

logger = logging.getLogger(__name__)

LOG2 = math.log(2.0)


def _check_x(x) -> Tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"x must be finite, got {x!r}")
    return np.atleast_1d(arr).ravel(), arr.ndim == 0


def _forward_scalar(a: list, b: list, x: float, n_max: int, overflow: float):
    values = [0.0] * (n_max + 1)
    values[0] = 1.0
    p_prev, p_cur = 0.0, 1.0
    valid = n_max + 1
    for n in range(n_max):
        d, dd = two_sum(x, -b[n])
        t1, e1 = two_prod(d, p_cur)
        # a[n - 1] is a_{n+k-1}; at n = 0 it multiplies p_{-1} = 0
        t2, e2 = two_prod(a[n - 1] if n else 0.0, p_prev)
        s, t = two_sum(t1, -t2)
        p_next = (s + (t + e1 - e2 + dd * p_cur)) / a[n]
        if not abs(p_next) <= overflow:
            valid = n + 1
            break
        values[n + 1] = p_next
        p_prev, p_cur = p_cur, p_next
    return np.asarray(values), valid


def _forward_grid(a: np.ndarray, b: np.ndarray, x: np.ndarray, n_max: int, overflow: float):
    G = x.size
    values = np.zeros((n_max + 1, G))
    values[0] = 1.0
    valid = np.full(G, n_max + 1, dtype=np.int64)
    alive = np.ones(G, dtype=bool)
    p_prev = np.zeros(G)
    p_cur = np.ones(G)
    for n in range(n_max):
        d, dd = two_sum(x, -b[n])
        t1, e1 = two_prod(d, p_cur)
        t2, e2 = two_prod(a[n - 1] if n else 0.0, p_prev)
        s, t = two_sum(t1, -t2)
        p_next = (s + (t + e1 - e2 + dd * p_cur)) / a[n]

        bad = alive & ~(np.abs(p_next) <= overflow)
        if np.any(bad):
            valid[bad] = n + 1
            alive &= ~bad
        p_next = np.where(alive, p_next, 0.0)
        p_cur = np.where(alive, p_cur, 0.0)
        values[n + 1] = p_next
        p_prev, p_cur = p_cur, p_next
    return values, valid


def eval_poly_sequence(model: ParameterModel, k: int, x: Union[float, np.ndarray],
                       n_max: int) -> PolySample:
    """p^{[k]}_0(x) .. p^{[k]}_{n_max}(x) at a point or on a grid"""
    if n_max < 0 or k < 0:
        raise ConfigError(f"need n_max >= 0 and k >= 0, got n_max={n_max}, k={k}")
    xs, scalar = _check_x(x)
    overflow = get_settings().overflow

    a = model.a_seq(k, k + n_max)
    b = model.b_seq(k, k + n_max)

    if scalar:
        values, valid = _forward_scalar(a.tolist(), b.tolist(), float(xs[0]), n_max, overflow)
        flag = valid <= n_max
        x_out = float(xs[0])
    else:
        values, valid = _forward_grid(a, b, xs, n_max, overflow)
        flag = valid <= n_max
        x_out = xs

    if np.any(flag):
        logger.warning(
            f"⚠️ {model.name}: |p^[{k}]_n| passed {overflow:.0e}, sample cut at n={int(np.min(valid))}"
        )
    return PolySample(x=x_out, values=values, shift=k, overflow_flag=flag, valid=valid)


def eval_poly_derivative(model: ParameterModel, x: Union[float, np.ndarray], n_max: int) -> PolySample:
    """
    p_n'(x) by the differentiated recurrence

        a_n p'_{n+1} = (x - b_n) p'_n + p_n - a_{n-1} p'_{n-1},   p'_0 = 0,  p'_1 = 1/a_0.

    Rows past the overflow cut of either p or p' hold 0.
    """
    if n_max < 1:
        raise ConfigError(f"n_max must be >= 1 for derivatives, got {n_max}")
    p = eval_poly_sequence(model, 0, x, n_max)
    overflow = get_settings().overflow
    a = model.a_seq(0, n_max)
    b = model.b_seq(0, n_max)

    P = p.values.reshape(n_max + 1, -1)
    xs = np.atleast_1d(np.asarray(p.x, dtype=float))
    valid = np.atleast_1d(np.array(p.valid, dtype=np.int64))
    alive = np.ones(xs.size, dtype=bool)
    D = np.zeros_like(P)
    D[1] = np.where(valid > 1, 1.0 / a[0], 0.0)
    for n in range(1, n_max):
        d_next = ((xs - b[n]) * D[n] + P[n] - a[n - 1] * D[n - 1]) / a[n]
        bad = alive & ~(np.abs(d_next) <= overflow)
        if np.any(bad):
            valid[bad] = np.minimum(valid[bad], n + 1)
            alive &= ~bad
        D[n + 1] = np.where(alive, d_next, 0.0)
    for j, v in enumerate(valid):
        D[v:, j] = 0.0

    flag = valid <= n_max
    if np.any(flag & ~np.atleast_1d(p.overflow_flag)):
        logger.warning(f"⚠️ {model.name}: |p_n'| passed {overflow:.0e}, sample cut at n={int(np.min(valid))}")
    if np.ndim(p.x) == 0:
        return PolySample(x=p.x, values=p.values, shift=0, overflow_flag=bool(flag[0]),
                          deriv_values=D[:, 0], valid=int(valid[0]))
    return PolySample(x=p.x, values=p.values, shift=0, overflow_flag=flag, deriv_values=D, valid=valid)


def associated_derivative(model: ParameterModel, x: float, n_max: int) -> np.ndarray:
    """
    p_0'(x) .. p_{n_max}'(x) from the associated polynomials,

        p_n' = (1/a_0) (p^{[1]}_{n-1} S1_n - p_n S2_n),

    S1_n = sum_{m<n} p_m^2, S2_n = sum_{m<n} p^{[1]}_{m-1} p_m, p^{[1]}_{-1} = 0.
    Only usable where p_n stays bounded (the two products cancel otherwise);
    a cross-check for eval_poly_derivative.
    """
    if n_max < 1:
        raise ConfigError(f"n_max must be >= 1 for derivatives, got {n_max}")
    P = eval_poly_sequence(model, 0, float(x), n_max).values
    Q = np.concatenate([[0.0], eval_poly_sequence(model, 1, float(x), n_max).values[:-1]])
    S1 = np.concatenate([[0.0], compensated_cumsum(P[:-1] ** 2)])
    S2 = np.concatenate([[0.0], compensated_cumsum(Q[:-1] * P[:-1])])
    return (Q * S1 - P * S2) / model.a(0)


def recurrence_residual(model: ParameterModel, sample: PolySample) -> float:
    """Largest scaled residual |a p_{n+1} + (b - x) p_n + a_{n-1} p_{n-1}| over the trustworthy rows"""
    k = sample.shift
    n_max = sample.n_max
    a = model.a_seq(k - 1, k + n_max)  # a[m + 1] = a_{m+k}
    b = model.b_seq(k, k + n_max)
    a_max = float(np.max(np.abs(a)))
    worst = 0.0

    columns = [sample.column()] if sample.values.ndim == 1 else \
        [sample.column(j) for j in range(sample.values.shape[1])]
    xs = np.atleast_1d(sample.x)
    for x, p in zip(xs, columns):
        m = p.size - 2
        if m < 1:
            continue
        n = np.arange(1, m + 1)
        res = np.abs(a[n + 1] * p[n + 1] + (b[n] - x) * p[n] + a[n] * p[n - 1])
        scale = np.maximum.reduce([np.ones(m), np.abs(p[n + 1]), np.abs(p[n]), np.abs(p[n - 1])]) * a_max
        worst = max(worst, float(np.max(res / scale)))
    return worst


def closed_form_p2n_zero(n):
    """
    Closed forms at x = 0 for a_n = sqrt(n+1), b_n = 1 on even n and 0 on odd n:

        p_{2n}(0)      = (-1)^n sqrt((2n)!) / (2^n n!)
        p_{2n+1}(0)^2  = (n+1) (2n+2)! / (((n+1)!)^2 2^(2n+1))

    Evaluated through log-gamma; n may be an int or an integer array.
    Returns (p_{2n}(0), p_{2n+1}(0)^2).
    """
    n_arr = np.asarray(n, dtype=float)
    if np.any(n_arr < 0):
        raise ConfigError("n must be >= 0")
    log_even = 0.5 * gammaln(2 * n_arr + 1) - n_arr * LOG2 - gammaln(n_arr + 1)
    sign = np.where(np.mod(n_arr, 2) == 1, -1.0, 1.0)
    even = sign * np.exp(log_even)
    log_odd_sq = np.log(n_arr + 1) + gammaln(2 * n_arr + 3) - 2 * gammaln(n_arr + 2) - (2 * n_arr + 1) * LOG2
    odd_sq = np.exp(log_odd_sq)
    if np.ndim(n) == 0:
        return float(even), float(odd_sq)
    return even, odd_sq
