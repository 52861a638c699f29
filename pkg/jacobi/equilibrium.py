"""
Band sets and equilibrium densities.

For a periodic envelope the band set is {x : |tr X_0(x)| <= 2} with X_0 the
envelope N-step matrix; for a blend it is {x : |tr X_1(x)| < 2} with X_1
the i = 1 blend limit. tr is a degree-N polynomial in x in both cases, so
there are 2N roots of tr^2 - 4 counted with multiplicity; double roots are
points where two band closures touch.
"""
import logging
import math
from functools import partial
from typing import List, Tuple, Union

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import bisect

from jacobi.errors import BandScanError, ConfigError, NumericalError
from jacobi.params import ClassTag, ParameterModel, PeriodicEnvelope
from jacobi.states import BandStructure
from jacobi.transfer import (blend_limit_matrices, envelope_n_step, envelope_traces,
                             neg_discriminant, tilde_envelope)
from tools.quadrature import integrate_edge_singular
from tools.summation import CompensatedSum, compensated_total

logger = logging.getLogger(__name__)

EDGE_XTOL = 1e-13
TOUCH_SLACK = 1e-9
MAX_REFINEMENTS = 8
FORM_MISMATCH = 1e-8


# --------------------------------------------------------------------------
# Trace polynomial
# --------------------------------------------------------------------------

def _poly_matmul(A, B):
    return [
        [A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]],
        [A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]],
    ]


def _poly_step(envelope: PeriodicEnvelope, j: int):
    alpha = envelope.alpha_at(j)
    return [
        [Polynomial([0.0]), Polynomial([1.0])],
        [Polynomial([-envelope.alpha_at(j - 1) / alpha]), Polynomial([-envelope.beta_at(j) / alpha, 1.0 / alpha])],
    ]


def trace_polynomial(envelope: PeriodicEnvelope, blend: bool = False) -> Polynomial:
    """tr X_0(x) (or tr X_1(x) for blends) as a numpy Polynomial of degree N"""
    N = envelope.N
    one, zero = Polynomial([1.0]), Polynomial([0.0])
    P = [[one, zero], [zero, one]]
    for j in range(1 if blend else 0, N):
        P = _poly_matmul(_poly_step(envelope, j), P)
    if blend:
        alpha, beta = envelope.alpha, envelope.beta
        C = [
            [zero, Polynomial([-1.0])],
            [Polynomial([alpha[N - 1] / alpha[0]]), Polynomial([beta[0] / alpha[0], -2.0 / alpha[0]])],
        ]
        P = _poly_matmul(C, P)
    return P[0][0] + P[1][1]


# --------------------------------------------------------------------------
# Band scan
# --------------------------------------------------------------------------

def _bracket(envelope: PeriodicEnvelope, blend: bool) -> Tuple[float, float]:
    """Gershgorin bracket of the periodic Jacobi matrix, padded"""
    env = tilde_envelope(envelope) if blend else envelope
    alpha = np.asarray(env.alpha)
    beta = np.asarray(env.beta)
    reach = np.roll(alpha, 1) + alpha
    lo = float(np.min(beta - reach))
    hi = float(np.max(beta + reach))
    pad = 0.01 * (hi - lo) + 1e-3
    return lo - pad, hi + pad


def _excess(envelope: PeriodicEnvelope, blend: bool, x) -> np.ndarray:
    t = envelope_traces(envelope, x, blend=blend)
    return t * t - 4.0


def band_set(envelope: PeriodicEnvelope, blend: bool = False,
             points_per_band: int = 512) -> Tuple[List[Tuple[float, float]], List[float]]:
    """
    Components of the band set as open intervals, plus the touching points
    where adjacent closures meet.

    Edges are sign changes of tr^2 - 4 on a 512*N grid refined by bisection;
    the grid doubles until the edge count plus twice the tangency count
    reaches 2N, and BandScanError is raised after eight doublings.
    """
    if points_per_band < 8:
        raise ConfigError(f"points_per_band must be >= 8, got {points_per_band}")
    N = envelope.N
    lo, hi = _bracket(envelope, blend)
    width = hi - lo
    for _ in range(60):
        ends = _excess(envelope, blend, [lo, hi])
        if ends[0] > 0 and ends[1] > 0:
            break
        lo, hi = lo - width, hi + width
        width = hi - lo
    else:
        raise BandScanError(f"could not bracket the band set of {envelope}")

    trace = trace_polynomial(envelope, blend)
    crit = [float(c.real) for c in trace.deriv().roots()
            if abs(c.imag) <= 1e-9 and lo < c.real < hi] if N > 1 else []

    h = lambda x: float(_excess(envelope, blend, x)[0])

    for refinement in range(MAX_REFINEMENTS + 1):
        grid = np.linspace(lo, hi, points_per_band * N * 2 ** refinement + 1)
        inside = _excess(envelope, blend, grid) <= 0.0
        flips = np.nonzero(inside[1:] != inside[:-1])[0]

        edges = []
        for j in flips:
            left, right = float(grid[j]), float(grid[j + 1])
            h_left, h_right = h(left), h(right)
            if h_left == 0.0:
                edges.append(left)
            elif h_right == 0.0:
                edges.append(right)
            else:
                edges.append(bisect(h, left, right, xtol=EDGE_XTOL))
        bands = list(zip(edges[0::2], edges[1::2]))

        touching = [c for c in crit
                    if abs(trace(c)) >= 2.0 - TOUCH_SLACK
                    and any(l + TOUCH_SLACK < c < r - TOUCH_SLACK for l, r in bands)]

        if len(edges) + 2 * len(touching) == 2 * N:
            break
        logger.debug(f"🔍 band scan found {len(edges)} edges and {len(touching)} touchings, refining")
    else:
        raise BandScanError(
            f"trace oscillates below the scan resolution: {len(edges)} edges and "
            f"{len(touching)} touchings after {MAX_REFINEMENTS} refinements, expected {2 * N} roots"
        )

    intervals = []
    for left, right in bands:
        cuts = sorted(c for c in touching if left < c < right)
        for l, r in zip([left] + cuts, cuts + [right]):
            intervals.append((l, r))
    return intervals, sorted(touching)


# --------------------------------------------------------------------------
# Densities
# --------------------------------------------------------------------------

def periodic_density_forms(envelope: PeriodicEnvelope, x: float) -> Tuple[float, float]:
    """
    Two closed forms of the periodic equilibrium density:

        (1/N) sum_i |[X_i]_21| / (pi sqrt(-discr X_i)) / alpha_{i-1}
        |tr X_0'| / (pi N sqrt(-discr X_0))
    """
    N = envelope.N
    X0, dX0 = envelope_n_step(envelope, 0, x, order=1)
    root = math.sqrt(neg_discriminant(X0, x))

    total = CompensatedSum()
    for i in range(N):
        Xi = envelope_n_step(envelope, i, x)
        total.add(abs(Xi.m21) / (math.pi * math.sqrt(neg_discriminant(Xi, x))) / envelope.alpha_at(i - 1))
    return total.value / N, abs(dX0.tr) / (math.pi * N * root)


def blend_density_forms(envelope: PeriodicEnvelope, x: float) -> Tuple[float, float]:
    """
    Two closed forms of the blend equilibrium density:

        (sum_{i<N} |[X_i]_21|/alpha_{i-1} + 2|[X_N]_21|/alpha_{N-1}) / (N pi sqrt(-discr X_1))
        |tr X_1'| / (N pi sqrt(-discr X_1))

    with X_i the blend limit matrices.
    """
    N = envelope.N
    X1, dX1 = blend_limit_matrices(envelope, 1, x, order=1)
    scale = N * math.pi * math.sqrt(neg_discriminant(X1, x))

    total = CompensatedSum()
    for i in range(1, N):
        total.add(abs(blend_limit_matrices(envelope, i, x).m21) / envelope.alpha_at(i - 1))
    total.add(2.0 * abs(blend_limit_matrices(envelope, N, x).m21) / envelope.alpha_at(N - 1))
    return total.value / scale, abs(dX1.tr) / scale


def _checked(forms: Tuple[float, float], label: str, x: float) -> float:
    sum_form, trace_form = forms
    if abs(sum_form - trace_form) > FORM_MISMATCH * max(abs(sum_form), abs(trace_form)):
        logger.warning(f"⚠️ {label} density forms disagree at x={x!r}: {sum_form!r} vs {trace_form!r}")
    return sum_form


def omega_prime_periodic(envelope: PeriodicEnvelope, x: float) -> float:
    return _checked(periodic_density_forms(envelope, x), "periodic", x)


def omega_prime_blend(envelope: PeriodicEnvelope, x: float) -> float:
    return _checked(blend_density_forms(envelope, x), "blend", x)


def tilde_density_pair(envelope: PeriodicEnvelope, x: float) -> Tuple[float, float]:
    """(blend density, periodic density of the tilde envelope); equal on the band set"""
    return omega_prime_blend(envelope, x), omega_prime_periodic(tilde_envelope(envelope), x)


def omega_prime(model: ParameterModel, x: float) -> float:
    """Density that enters the Christoffel asymptotics: at x, or at 0 for unbounded parameters"""
    if model.class_tag is ClassTag.PERIODIC_BLEND:
        return omega_prime_blend(model.envelope, x)
    if model.class_tag is ClassTag.PERIODICALLY_MODULATED or "unbounded" in model.flags:
        return omega_prime_periodic(model.envelope, 0.0)
    return omega_prime_periodic(model.envelope, x)


# --------------------------------------------------------------------------
# Band structure
# --------------------------------------------------------------------------

def band_structure(source: Union[ParameterModel, PeriodicEnvelope], blend: bool = False,
                   points_per_band: int = 512) -> BandStructure:
    """
    Band set plus density. A ParameterModel brings its own envelope and class;
    a bare envelope is read as periodic unless blend=True.
    """
    if isinstance(source, ParameterModel):
        envelope = source.envelope
        blend = source.class_tag is ClassTag.PERIODIC_BLEND
    else:
        envelope = source

    intervals, touching = band_set(envelope, blend=blend, points_per_band=points_per_band)
    density = partial(omega_prime_blend if blend else omega_prime_periodic, envelope)
    tag = "blend" if blend else "periodic"
    logger.info(f"✅ {tag} band set with {len(intervals)} interval(s): "
                + ", ".join(f"({l:.6g}, {r:.6g})" for l, r in intervals))
    return BandStructure(intervals=intervals, density=density, class_tag=tag, touching=touching)


def normalization(bands: BandStructure) -> float:
    """Total mass of the density over the band set"""
    pieces = [integrate_edge_singular(bands.density, l, r, tolerated=(NumericalError,))[0]
              for l, r in bands.intervals]
    return compensated_total(pieces)
