import logging
import math
from typing import Callable, Tuple, Type

import numpy as np
from scipy import integrate, special

logger = logging.getLogger(__name__)


def integrate_edge_singular(f: Callable[[float], float], left: float, right: float,
                            limit: int = 200,
                            tolerated: Tuple[Type[BaseException], ...] = (ArithmeticError,)) -> Tuple[float, float]:
    """Integrate f over (left, right) when f blows up like 1/sqrt at both ends.

    Substituting x = mid + half*cos(phi) turns the inverse square-root edge
    singularities into a smooth integrand on (0, pi). Points where f raises
    one of the `tolerated` exceptions (band edges hit by rounding) contribute 0.

    Returns (value, abserr) as scipy.integrate.quad does.
    """
    if not right > left:
        raise ValueError(f"empty interval ({left}, {right})")

    mid = 0.5 * (left + right)
    half = 0.5 * (right - left)

    def integrand(phi: float) -> float:
        try:
            return f(mid + half * math.cos(phi)) * half * math.sin(phi)
        except tolerated:
            return 0.0

    value, abserr = integrate.quad(integrand, 0.0, math.pi, limit=limit)
    logger.debug(f"🔍 quad on ({left:.6g}, {right:.6g}) -> {value:.10g} ± {abserr:.1e}")
    return value, abserr


def chebyshev_u_rule(points: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss nodes/weights for the probability measure (2/pi)sqrt(1-x^2) on [-1, 1]"""
    nodes, weights = special.roots_chebyu(points)
    return nodes, weights * (2.0 / math.pi)


def hermite_rule(points: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss nodes/weights for the standard normal density"""
    nodes, weights = special.roots_hermitenorm(points)
    return nodes, weights / math.sqrt(2.0 * math.pi)
