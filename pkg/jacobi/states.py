from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np


@dataclass(frozen=True)
class DrDiagnostic:
    """
    Finite-window look at sum_n ||Delta^j x_n||^(r/j) for j = 1..r
    """
    r: int
    # j -> running partial sums over the window
    per_j_partial_sums: Dict[int, np.ndarray]
    # j -> fitted log-log slope of the summands over the last decade
    tail_slopes: Dict[int, float]
    # "converging" | "diverging" | "inconclusive"
    bounded_flag: str


@dataclass(frozen=True)
class ModulationDiagnostic:
    """Window check of the periodic-modulation conditions (a)-(c)"""
    window: int
    tol: float
    growing: bool
    ratio_deviation: float
    b_deviation: float

    @property
    def flagged(self) -> bool:
        return (not self.growing) or self.ratio_deviation > self.tol or self.b_deviation > self.tol


@dataclass(frozen=True)
class PolySample:
    """
    p^{[shift]}_n(x) for n = 0..n_max.

    A scalar x gives values of shape (n_max+1,), a grid gives (n_max+1, G).
    Rows at or past `valid` were cut at the overflow threshold and hold 0.
    """
    x: Union[float, np.ndarray]
    values: np.ndarray
    shift: int = 0
    overflow_flag: Union[bool, np.ndarray] = False
    deriv_values: Optional[np.ndarray] = None
    valid: Union[int, np.ndarray] = 0

    @property
    def n_max(self) -> int:
        return self.values.shape[0] - 1

    @property
    def flagged(self) -> bool:
        return bool(np.any(self.overflow_flag))

    def column(self, j: int = 0) -> np.ndarray:
        """Trustworthy p_0..p_m at the j-th x"""
        if self.values.ndim == 1:
            return self.values[: int(self.valid)]
        return self.values[: int(self.valid[j]), j]


@dataclass(frozen=True)
class PhaseSample:
    n: int
    x: float
    theta: float
    theta_prime: float
    lam: complex
    det: float


@dataclass
class KernelReport:
    n: int
    x: float
    y: float
    K_direct: float
    K_cd: Optional[float]
    rho: float
    predicted: Optional[float] = None
    observed_error: Optional[float] = None
    bound_ledger: Optional[float] = None
    overflow_flag: bool = False
    # K / rho, or the universality ratio R_n for scaling reports
    ratio: Optional[float] = None
    # alternative normalisation K alpha_{i-1} / (rho_{i;n} alpha_i) for subsequence kernels
    ratio_alt: Optional[float] = None
    # density-free estimate omega' rho_n / K_n(x, x)
    mu_hat: Optional[float] = None
    u: float = 0.0
    v: float = 0.0

    def as_row(self) -> Dict[str, Optional[float]]:
        return {
            "n": self.n, "x": self.x, "u": self.u, "v": self.v,
            "K_direct": self.K_direct, "K_cd": self.K_cd, "rho": self.rho,
            "predicted": self.predicted, "ratio": self.ratio,
            "error": self.observed_error, "ledger": self.bound_ledger,
        }


@dataclass(frozen=True)
class BandStructure:
    intervals: List[Tuple[float, float]]
    density: Callable[[float], float]
    class_tag: str
    # interior points where two closures touch (|tr| = 2 tangentially)
    touching: List[float] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.intervals)

    def contains(self, x: float) -> bool:
        return any(left < x < right for left, right in self.intervals)

    def to_json(self, samples_per_band: int = 16) -> dict:
        samples = []
        for left, right in self.intervals:
            # interior Chebyshev-spaced points, away from the edges
            k = np.arange(1, samples_per_band + 1)
            xs = 0.5 * (left + right) + 0.5 * (right - left) * np.cos(np.pi * (k - 0.5) / samples_per_band)
            samples.extend([float(x), float(self.density(float(x)))] for x in sorted(xs))
        return {
            "intervals": [[float(l), float(r)] for l, r in self.intervals],
            "samples": samples,
        }


@dataclass(frozen=True)
class AmplitudeSample:
    k: int
    index: int
    theta: float
    observed: float
    predicted: float


@dataclass(frozen=True)
class DensityOracle:
    name: str
    support: Tuple[float, float]
    mu_prime: Callable[[float], float]
    # (points) -> (nodes, weights) Gauss rule for mu
    rule: Callable[[int], Tuple[np.ndarray, np.ndarray]]
    # recurrence whose orthonormal polynomials the density belongs to
    model: object = None
