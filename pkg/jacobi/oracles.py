"""
Closed-form reference data.

Only textbook densities are shipped: a == 1/2, b == 0 gives the Chebyshev
polynomials of the second kind with mu' = (2/pi) sqrt(1 - x^2), and
a_n = sqrt(n+1), b == 0 gives the orthonormal probabilists' Hermite
polynomials with the standard normal density. Everything else is checked
through ratios that need no mu'.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from jacobi.params import Growth, ParameterModel, PeriodicEnvelope, make_alternating, make_periodic
from jacobi.poly import closed_form_p2n_zero, eval_poly_sequence
from jacobi.states import DensityOracle
from tools.quadrature import chebyshev_u_rule, hermite_rule
from tools.summation import compensated_total

# limit of p_{2n+1}(0)^2 / sqrt(n+1) in the divergent example
ODD_SQUARE_LIMIT = 2.0 / math.sqrt(math.pi)


def _semicircle(x: float) -> float:
    return (2.0 / math.pi) * math.sqrt(1.0 - x * x) if -1.0 < x < 1.0 else 0.0


def _normal(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def constant_coefficient_oracle() -> DensityOracle:
    """a == 1/2, b == 0: p_n = U_n, mu' = (2/pi) sqrt(1 - x^2) on [-1, 1]"""
    return DensityOracle(
        name="chebyshev-u",
        support=(-1.0, 1.0),
        mu_prime=_semicircle,
        rule=chebyshev_u_rule,
        model=make_periodic(PeriodicEnvelope([0.5], [0.0]), name="chebyshev-u"),
    )


def gaussian_oracle() -> DensityOracle:
    """a_n = sqrt(n+1), b == 0: orthonormal Hermite polynomials, mu' = exp(-x^2/2)/sqrt(2 pi)"""
    return DensityOracle(
        name="hermite",
        support=(-math.inf, math.inf),
        mu_prime=_normal,
        rule=hermite_rule,
        model=make_alternating(Growth(kind="sqrt"), [0.0], name="hermite"),
    )


def oracle_mass(oracle: DensityOracle) -> float:
    value, _ = integrate.quad(oracle.mu_prime, *oracle.support, epsabs=1e-13, epsrel=1e-13, limit=200)
    return value


def gram_matrix(oracle: DensityOracle, n: int, nodes: int = 64) -> np.ndarray:
    """[int p_j p_k dmu] for j, k <= n by the oracle's Gauss rule"""
    x, w = oracle.rule(nodes)
    P = eval_poly_sequence(oracle.model, 0, x, n).values
    return (P * w) @ P.T


@dataclass(frozen=True)
class DivergentExample:
    """
    a_n = sqrt(n+1), b_n = 1 for even n and 0 for odd n. The normalized
    Christoffel sum at x = 0 diverges there, since p_{2n+1}(0)^2 grows like
    (2/sqrt(pi)) sqrt(n+1).
    """
    model: ParameterModel
    divergence_point: float = 0.0
    odd_square_limit: float = ODD_SQUARE_LIMIT

    @staticmethod
    def even_value(n):
        """p_{2n}(0) = (-1)^n sqrt((2n)!) / (2^n n!)"""
        return closed_form_p2n_zero(n)[0]

    @staticmethod
    def odd_square(n):
        """p_{2n+1}(0)^2 = (n+1)(2n+2)! / (((n+1)!)^2 2^(2n+1))"""
        return closed_form_p2n_zero(n)[1]

    @staticmethod
    def odd_recursion(n_max: int) -> np.ndarray:
        """
        p_{2n+1}(0) for n = 0..n_max from

            x_n = -p_{2n}(0)/sqrt(2n+1) - sqrt(2n/(2n+1)) x_{n-1},   x_0 = -1.
        """
        n = np.arange(n_max + 1)
        even = np.asarray(closed_form_p2n_zero(n)[0])
        out = np.empty(n_max + 1)
        out[0] = -1.0
        for k in range(1, n_max + 1):
            out[k] = -even[k] / math.sqrt(2 * k + 1) - math.sqrt(2 * k / (2 * k + 1)) * out[k - 1]
        return out

    def odd_square_ratio(self, n):
        """p_{2n+1}(0)^2 / sqrt(n+1), tending to 2/sqrt(pi)"""
        return self.odd_square(n) / np.sqrt(np.asarray(n, dtype=float) + 1.0)

    def normalized_christoffel_sum(self, n: int) -> float:
        """(sum_{j<=n} 1/a_j)^-1 sum_{j<=n} p_j(0)^2 by the recurrence"""
        p = eval_poly_sequence(self.model, 0, self.divergence_point, n).values
        return compensated_total(p ** 2) / compensated_total(1.0 / self.model.a_seq(0, n + 1))


def divergent_diagonal_example() -> DivergentExample:
    return DivergentExample(model=make_alternating(Growth(kind="sqrt"), [1.0, 0.0], name="divergent"))
