"""
Oscillatory sums

    S_n(x) = sum_{k<=n} gamma_k exp(i sum_{j<=k} theta_j(x))

and the double-sine averages built from them. Inner phases are accumulated
mod 2pi with a compensated residual (tools.summation.PhaseAccumulator).
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from jacobi.errors import ConfigError
from tools.summation import TWO_PI, compensated_cumsum, compensated_total, cumulative_phases

logger = logging.getLogger(__name__)

WeightFn = Callable[[np.ndarray], np.ndarray]
PhaseFn = Callable[[np.ndarray, float], np.ndarray]


def _zero(x: float) -> float:
    return 0.0


def _one(x: float) -> float:
    return 1.0


@dataclass(frozen=True)
class OscSpec:
    """
    gamma(k) > 0 weights, theta(j, x) phases in (0, 2pi) tending to
    theta_limit(x), frequency scale psi(x) with gamma_j^{-1} theta_j'(x) -> psi(x),
    offset sigma(x), evaluation interval K. theta_prime/theta_second are the
    exact x-derivatives when known.
    """
    gamma: WeightFn
    theta: PhaseFn
    theta_limit: Callable[[float], float]
    psi: Callable[[float], float] = _one
    sigma: Callable[[float], float] = _zero
    interval: Tuple[float, float] = (-2.0, 2.0)
    theta_prime: Optional[PhaseFn] = None
    theta_second: Optional[PhaseFn] = None
    name: str = "spec"


def _weights(spec: OscSpec, n: int) -> np.ndarray:
    if n < 0:
        raise ConfigError(f"n must be >= 0, got {n}")
    return np.asarray(spec.gamma(np.arange(n + 1, dtype=np.int64)), dtype=float)


def _phases(spec: OscSpec, n: int, x: float) -> np.ndarray:
    """sum_{j<=k} theta_j(x) mod 2pi for k = 0..n"""
    return cumulative_phases(spec.theta(np.arange(n + 1, dtype=np.int64), float(x)))


# --------------------------------------------------------------------------
# Sums
# --------------------------------------------------------------------------

def weighted_exponential_sum(spec: OscSpec, n: int, x: float) -> complex:
    gamma = _weights(spec, n)
    phi = _phases(spec, n, x)
    return complex(compensated_total(gamma * np.cos(phi)), compensated_total(gamma * np.sin(phi)))


def normalized_exponential_sum(spec: OscSpec, n: int, x: float) -> float:
    """|S_n(x)| / sum_{k<=n} gamma_k; tends to 0"""
    return abs(weighted_exponential_sum(spec, n, x)) / compensated_total(_weights(spec, n))


def dirichlet_magnitude(theta: float, n: int) -> float:
    """|sum_{k<=n} exp(i (k+1) theta)| = |sin((n+1)theta/2) / sin(theta/2)|"""
    return abs(math.sin((n + 1) * theta / 2.0) / math.sin(theta / 2.0))


def lemma_bound_ratio(spec: OscSpec, n: int, x: float) -> Tuple[float, float, float]:
    """
    (|S_n(x)|, B_n(x), |S_n(x)|/B_n(x)) with the summation-by-parts bound

        B_n(x) = gamma_0 + sum_{k<n} (|gamma_{k+1} - gamma_k| + gamma_{k+1} |theta_{k+1}(x) - theta(x)|)

    The ratio estimates the constant of the bound; it stays bounded in n.
    """
    lhs = abs(weighted_exponential_sum(spec, n, x))
    gamma = _weights(spec, n)
    theta = np.asarray(spec.theta(np.arange(n + 1, dtype=np.int64), float(x)), dtype=float)
    drift = np.abs(theta[1:] - spec.theta_limit(float(x)))
    rhs = gamma[0] + compensated_total(np.abs(np.diff(gamma)) + gamma[1:] * drift)
    return lhs, rhs, lhs / rhs


def _moving_points(spec: OscSpec, n: int, x: float, a: float, b: float):
    gamma = _weights(spec, n)
    total = compensated_total(gamma)
    return gamma, total, x + a / total, x + b / total


def sinc_limit_sum(spec: OscSpec, n: int, x: float, a: float, b: float) -> float:
    """
    sum_{k<=n} (gamma_k/G_n) sin(Phi_k(x_n) + sigma(x_n)) sin(Phi_k(y_n) + sigma(y_n)),
    G_n = sum gamma_k, x_n = x + a/G_n, y_n = x + b/G_n, Phi_k = sum_{j<=k} theta_j.
    Tends to sin((b-a)psi(x)) / (2(b-a)psi(x)).
    """
    gamma, total, xn, yn = _moving_points(spec, n, x, a, b)
    left = np.sin(_phases(spec, n, xn) + spec.sigma(xn))
    right = np.sin(_phases(spec, n, yn) + spec.sigma(yn))
    return compensated_total(gamma * left * right) / total


def sinc_limit_prediction(spec: OscSpec, x: float, a: float, b: float) -> float:
    s = (b - a) * spec.psi(x)
    return 0.5 if s == 0.0 else math.sin(s) / (2.0 * s)


def cosine_sum_average(spec: OscSpec, n: int, x: float, a: float, b: float) -> float:
    """sum_k (gamma_k/G_n) cos(Phi_k(x_n) + Phi_k(y_n) + sigma(x_n) + sigma(y_n)); tends to 0"""
    gamma, total, xn, yn = _moving_points(spec, n, x, a, b)
    angle = np.mod(_phases(spec, n, xn) + _phases(spec, n, yn) + spec.sigma(xn) + spec.sigma(yn), TWO_PI)
    return compensated_total(gamma * np.cos(angle)) / total


def stolz_cesaro_ratio(gamma: WeightFn, n: int) -> float:
    """gamma_n / sum_{j<=n} gamma_j"""
    g = np.asarray(gamma(np.arange(n + 1, dtype=np.int64)), dtype=float)
    return float(g[-1]) / compensated_total(g)


def stolz_cesaro_ratios(gamma: WeightFn, n: int) -> np.ndarray:
    g = np.asarray(gamma(np.arange(n + 1, dtype=np.int64)), dtype=float)
    return g / compensated_cumsum(g)


def taylor_phase_remainder(spec: OscSpec, j: int, n: int, x: float, a: float, b: float,
                           points: int = 17) -> Tuple[float, float]:
    """
    (|theta_j(y_n) - theta_j(x_n) - (b-a) theta_j'(x)/G_n|, that remainder times
    G_n^2 / sup|theta_j''| over [x_n, y_n]). The second entry stays bounded.
    """
    if spec.theta_prime is None or spec.theta_second is None:
        raise ConfigError(f"{spec.name} has no closed-form theta' and theta''")
    _, total, xn, yn = _moving_points(spec, n, x, a, b)
    jj = np.asarray([j], dtype=np.int64)
    step = float(spec.theta(jj, yn)[0] - spec.theta(jj, xn)[0])
    rem = abs(step - (b - a) * float(spec.theta_prime(jj, x)[0]) / total)
    span = np.linspace(min(xn, yn), max(xn, yn), points)
    curvature = max(abs(float(spec.theta_second(jj, float(t))[0])) for t in span)
    if curvature == 0.0:
        return rem, 0.0
    return rem, rem * total ** 2 / curvature


# --------------------------------------------------------------------------
# Fixtures
# --------------------------------------------------------------------------

def _inverse_sqrt(k: np.ndarray) -> np.ndarray:
    return 1.0 / np.sqrt(np.asarray(k, dtype=float) + 1.0)


def canonical_spec(c0: float = 1.0) -> OscSpec:
    """theta_j(x) = c0 + gamma_j x, gamma_k = 1/sqrt(k+1), sigma = 0, psi = 1"""
    return OscSpec(
        gamma=_inverse_sqrt,
        theta=lambda j, x: c0 + _inverse_sqrt(j) * x,
        theta_limit=lambda x: c0,
        theta_prime=lambda j, x: _inverse_sqrt(j),
        theta_second=lambda j, x: np.zeros(np.shape(j)),
        interval=(-0.5, 0.5),
        name="canonical",
    )


def curved_spec(c0: float = 1.0) -> OscSpec:
    """theta_j(x) = c0 + gamma_j x + gamma_j^2 x^2 / 2, so theta_j'' = gamma_j^2"""
    return OscSpec(
        gamma=_inverse_sqrt,
        theta=lambda j, x: c0 + _inverse_sqrt(j) * x + 0.5 * (_inverse_sqrt(j) * x) ** 2,
        theta_limit=lambda x: c0,
        theta_prime=lambda j, x: _inverse_sqrt(j) + _inverse_sqrt(j) ** 2 * x,
        theta_second=lambda j, x: _inverse_sqrt(j) ** 2,
        interval=(-0.5, 0.5),
        name="curved",
    )


def random_spec(rng: np.random.Generator) -> OscSpec:
    """
    gamma_k = (k+1)^-p, theta_j = theta + A (j+1)^-q sin(j) with theta in
    [1, 2pi - 1], |A| <= 0.3, so every phase stays inside (0, 2pi).
    """
    p = float(rng.uniform(0.3, 1.0))
    q = float(rng.uniform(0.5, 2.0))
    amp = float(rng.uniform(-0.3, 0.3))
    limit = float(rng.uniform(1.0, TWO_PI - 1.0))
    return OscSpec(
        gamma=lambda k: (np.asarray(k, dtype=float) + 1.0) ** -p,
        theta=lambda j, x: limit + amp * (np.asarray(j, dtype=float) + 1.0) ** -q * np.sin(j),
        theta_limit=lambda x: limit,
        interval=(0.0, 0.0),
        name=f"random(p={p:.3f}, q={q:.3f}, A={amp:.3f}, theta={limit:.3f})",
    )


def validate_spec(spec: OscSpec, n: int, points: int = 9) -> Dict[str, object]:
    """Grid check of gamma > 0, theta_j in (0, 2pi) on K, and uniform convergence to theta_limit"""
    gamma = _weights(spec, n)
    left, right = spec.interval
    grid = np.linspace(left, right, points)
    j = np.arange(n + 1, dtype=np.int64)
    thetas = np.asarray([spec.theta(j, float(x)) for x in grid])
    limits = np.asarray([spec.theta_limit(float(x)) for x in grid])
    deviation = np.max(np.abs(thetas - limits[:, None]), axis=0)

    half = (n + 1) // 2
    report = {
        "gamma_positive": bool(np.all(gamma > 0)),
        "theta_in_range": bool(np.all((thetas > 0) & (thetas < TWO_PI))),
        "sup_deviation_half": float(np.max(deviation[half:])) if n else float(deviation[0]),
        "sup_deviation_end": float(deviation[-1]),
    }
    report["uniform_convergence"] = report["sup_deviation_end"] <= report["sup_deviation_half"]
    if not (report["gamma_positive"] and report["theta_in_range"]):
        logger.warning(f"⚠️ {spec.name}: spec fails its hypotheses on {spec.interval}: {report}")
    return report
