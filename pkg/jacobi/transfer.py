"""
Transfer matrices.

    B_n(x) = [[0, 1], [-a_{n-1}/a_n, (x - b_n)/a_n]]
    X_n(x) = B_{n+W-1}(x) ... B_{n+1}(x) B_n(x)

with window W = N, or N + 2 for blends. Envelope matrices use (alpha, beta)
in place of (a, b). Products are accumulated left-multiplying one factor at a
time, together with their exact x-derivatives (dB/dx = [[0, 0], [0, 1/a_n]],
d^2B/dx^2 = 0).
"""
import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from jacobi.errors import BandEdgeError, ConfigError
from jacobi.params import ClassTag, ParameterModel, PeriodicEnvelope
from jacobi.poly import eval_poly_sequence
from jacobi.states import PhaseSample

logger = logging.getLogger(__name__)

BAND_EDGE_GUARD = 1e-14
CLAMP_SLACK = 1e-12
SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class Mat2:
    m11: float
    m12: float
    m21: float
    m22: float

    @classmethod
    def from_array(cls, arr) -> "Mat2":
        arr = np.asarray(arr, dtype=float)
        return cls(float(arr[0, 0]), float(arr[0, 1]), float(arr[1, 0]), float(arr[1, 1]))

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def diag(cls, d1: float, d2: float) -> "Mat2":
        return cls(d1, 0.0, 0.0, d2)

    def to_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    @property
    def tr(self) -> float:
        return self.m11 + self.m22

    @property
    def det(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21

    @property
    def discr(self) -> float:
        return self.tr ** 2 - 4.0 * self.det

    def norm(self) -> float:
        """Operator (spectral) norm"""
        return float(np.linalg.norm(self.to_array(), 2))

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )

    def __add__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.m11 + other.m11, self.m12 + other.m12, self.m21 + other.m21, self.m22 + other.m22)

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.m11 - other.m11, self.m12 - other.m12, self.m21 - other.m21, self.m22 - other.m22)

    def __neg__(self) -> "Mat2":
        return Mat2(-self.m11, -self.m12, -self.m21, -self.m22)


# --------------------------------------------------------------------------
# Accumulation
# --------------------------------------------------------------------------

def _accumulate(r: np.ndarray, s: np.ndarray, da: np.ndarray, order: int = 0):
    """
    Product of [[0, 1], [-r_t, s_t]] over t = 0..W-1 (t = 0 rightmost) and its
    first/second x-derivatives, where ds_t/dx = da_t. Leading axis of the
    inputs is t; the remaining axes are batch axes.
    """
    s = np.asarray(s, dtype=float)
    r = np.broadcast_to(np.asarray(r, dtype=float), s.shape)
    da = np.broadcast_to(np.asarray(da, dtype=float), s.shape)
    batch = s.shape[1:]

    P = np.broadcast_to(np.eye(2), batch + (2, 2)).copy()
    D1 = np.zeros(batch + (2, 2))
    D2 = np.zeros(batch + (2, 2))
    for t in range(s.shape[0]):
        B = np.zeros(batch + (2, 2))
        B[..., 0, 1] = 1.0
        B[..., 1, 0] = -r[t]
        B[..., 1, 1] = s[t]
        if order >= 1:
            dB = np.zeros(batch + (2, 2))
            dB[..., 1, 1] = da[t]
            if order >= 2:
                D2 = B @ D2 + 2.0 * (dB @ D1)
            D1 = dB @ P + B @ D1
        P = B @ P
    return P, D1, D2


def _model_coeffs(model: ParameterModel, idx: np.ndarray, x):
    a_cur = model.a_at(idx)
    r = model.a_at(idx - 1) / a_cur
    s = (x - model.b_at(idx)) / a_cur
    return r, s, 1.0 / a_cur


def _envelope_coeffs(envelope: PeriodicEnvelope, idx: np.ndarray, x):
    alpha = np.asarray(envelope.alpha_at(idx), dtype=float)
    r = np.asarray(envelope.alpha_at(idx - 1), dtype=float) / alpha
    s = (x - np.asarray(envelope.beta_at(idx), dtype=float)) / alpha
    return r, s, 1.0 / alpha


def _wrap(P, D1, D2, order: int):
    if order == 0:
        return Mat2.from_array(P)
    if order == 1:
        return Mat2.from_array(P), Mat2.from_array(D1)
    return Mat2.from_array(P), Mat2.from_array(D1), Mat2.from_array(D2)


# --------------------------------------------------------------------------
# Model matrices
# --------------------------------------------------------------------------

def one_step(model: ParameterModel, n: int, x: float) -> Mat2:
    """B_n(x); at n = 0 the missing a_{-1} is alpha_{N-1}"""
    if n < 0:
        raise ConfigError(f"n must be >= 0, got {n}")
    a_prev, a_cur, b = model.a(n - 1), model.a(n), model.b(n)
    return Mat2(0.0, 1.0, -a_prev / a_cur, (x - b) / a_cur)


def transfer_product(model: ParameterModel, start: int, length: int, x: float, order: int = 0):
    """B_{start+length-1} ... B_start, optionally with x-derivatives"""
    if start < 0 or length < 0:
        raise ConfigError(f"need start >= 0 and length >= 0, got {start}, {length}")
    idx = np.arange(start, start + length, dtype=np.int64)
    r, s, da = _model_coeffs(model, idx, x)
    return _wrap(*_accumulate(r, s, da, order), order)


def n_step(model: ParameterModel, n: int, x: float) -> Mat2:
    """X_n(x) over the class window (N, or N + 2 for blends)"""
    return transfer_product(model, n, model.window, x)


def n_step_derivatives(model: ParameterModel, n: int, x: float) -> Tuple[Mat2, Mat2, Mat2]:
    """(X_n, X_n', X_n'') by the product rule"""
    return transfer_product(model, n, model.window, x, order=2)


def n_step_stack(model: ParameterModel, starts, xs, order: int = 0):
    """
    Batched X_n(x) for every n in starts and x in xs.

    Returns arrays shaped (len(starts), len(xs), 2, 2); with order >= 1 the
    derivative stacks follow in a tuple.
    """
    starts = np.asarray(starts, dtype=np.int64)
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    W = model.window
    idx = starts[None, :, None] + np.arange(W, dtype=np.int64)[:, None, None]
    r, s, da = _model_coeffs(model, idx, xs[None, None, :])
    P, D1, D2 = _accumulate(r, s, da, order)
    if order == 0:
        return P
    return (P, D1) if order == 1 else (P, D1, D2)


def associated_product_matrix(model: ParameterModel, k: int, n: int, x: float) -> Mat2:
    """
    Closed form of B_{n+k-1} ... B_k in associated polynomials:

        [[-(a_{k-1}/a_k) p^{[k+1]}_{n-2}, p^{[k]}_{n-1}],
         [-(a_{k-1}/a_k) p^{[k+1]}_{n-1}, p^{[k]}_n    ]]     with p_{-1} = 0.
    """
    if n < 1:
        raise ConfigError(f"window length must be >= 1, got {n}")
    pk = eval_poly_sequence(model, k, x, n).values
    pk1 = eval_poly_sequence(model, k + 1, x, max(n - 1, 0)).values
    ratio = model.a(k - 1) / model.a(k)
    pk1_nm2 = pk1[n - 2] if n >= 2 else 0.0
    return Mat2(-ratio * pk1_nm2, pk[n - 1], -ratio * pk1[n - 1], pk[n])


# --------------------------------------------------------------------------
# Envelope and limit matrices
# --------------------------------------------------------------------------

def envelope_matrix(envelope: PeriodicEnvelope, n: int, x: float) -> Mat2:
    """Envelope one-step matrix [[0, 1], [-alpha_{n-1}/alpha_n, (x - beta_n)/alpha_n]]"""
    alpha = envelope.alpha_at(n)
    return Mat2(0.0, 1.0, -envelope.alpha_at(n - 1) / alpha, (x - envelope.beta_at(n)) / alpha)


def envelope_product(envelope: PeriodicEnvelope, start: int, length: int, x: float, order: int = 0):
    idx = np.arange(start, start + length, dtype=np.int64)
    r, s, da = _envelope_coeffs(envelope, idx, x)
    return _wrap(*_accumulate(r, s, da, order), order)


def envelope_n_step(envelope: PeriodicEnvelope, n: int, x: float, order: int = 0):
    """Envelope N-step matrix starting at n (with derivatives when order > 0)"""
    return envelope_product(envelope, n, envelope.N, x, order)


def blend_c_matrix(envelope: PeriodicEnvelope, x: float) -> Tuple[Mat2, Mat2]:
    """Limit of the three-factor block across the inserted slots, and its x-derivative"""
    alpha, beta, N = envelope.alpha, envelope.beta, envelope.N
    C = Mat2(0.0, -1.0, alpha[N - 1] / alpha[0], -(2.0 * x - beta[0]) / alpha[0])
    dC = Mat2(0.0, 0.0, 0.0, -2.0 / alpha[0])
    return C, dC


def blend_limit_matrices(envelope: PeriodicEnvelope, i: int, x: float, order: int = 0):
    """
    Blend limit for the subsequence X_{j(N+2)+i}, i in 1..N:

        (envelope B_{i-1} ... B_1) C (envelope B_{N-1} ... B_i)
    """
    N = envelope.N
    if not 1 <= i <= N:
        raise ConfigError(f"blend limit index must be in 1..{N}, got {i}")
    L, dL = envelope_product(envelope, 1, i - 1, x, order=1)
    R, dR = envelope_product(envelope, i, N - i, x, order=1)
    C, dC = blend_c_matrix(envelope, x)
    X = L @ C @ R
    if order == 0:
        return X
    return X, dL @ C @ R + L @ dC @ R + L @ C @ dR


def envelope_traces(envelope: PeriodicEnvelope, xs, blend: bool = False) -> np.ndarray:
    """tr of the envelope N-step matrix (or of the i = 1 blend limit) on a grid"""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    N = envelope.N
    if not blend:
        idx = np.arange(N, dtype=np.int64)[:, None]
        r, s, da = _envelope_coeffs(envelope, idx, xs[None, :])
        P, _, _ = _accumulate(r, s, da)
        return P[..., 0, 0] + P[..., 1, 1]

    idx = np.arange(1, N, dtype=np.int64)[:, None]
    r, s, da = _envelope_coeffs(envelope, idx, np.broadcast_to(xs[None, :], (N - 1, xs.size)))
    R, _, _ = _accumulate(r, s, da)
    alpha, beta = envelope.alpha, envelope.beta
    # C = [[0, -1], [alpha_{N-1}/alpha_0, (beta_0 - 2x)/alpha_0]]
    return -R[..., 1, 0] + alpha[N - 1] / alpha[0] * R[..., 0, 1] + (beta[0] - 2.0 * xs) / alpha[0] * R[..., 1, 1]


def tilde_envelope(envelope: PeriodicEnvelope) -> PeriodicEnvelope:
    """
    Periodic envelope whose N-step matrices are conjugate to the blend limits
    (up to sign): alpha scaled by 1/sqrt(2) at i in {0, N-1} and beta_0 halved;
    for N = 1 this is (alpha_0/2, beta_0/2).
    """
    alpha = list(envelope.alpha)
    beta = list(envelope.beta)
    if envelope.N == 1:
        return PeriodicEnvelope([alpha[0] / 2.0], [beta[0] / 2.0])
    alpha[0] /= SQRT2
    alpha[-1] /= SQRT2
    beta[0] /= 2.0
    return PeriodicEnvelope(alpha, beta)


def class_limit(model: ParameterModel, i: int, x: float, order: int = 0):
    """
    Limit of X_{jW+i}(x) as j grows: the envelope N-step matrix at x
    (periodic classes), at 0 (modulated), or the blend limit (blends, i in 1..N).
    """
    tag = model.class_tag
    if tag is ClassTag.PERIODIC_BLEND:
        return blend_limit_matrices(model.envelope, i, x, order)
    if tag is ClassTag.PERIODICALLY_MODULATED or "unbounded" in model.flags:
        return envelope_n_step(model.envelope, i, 0.0, order)
    return envelope_n_step(model.envelope, i, x, order)


# --------------------------------------------------------------------------
# Phases
# --------------------------------------------------------------------------

def neg_discriminant(X: Mat2, x: float) -> float:
    """-discr X, raising BandEdgeError below the guard"""
    neg = -X.discr
    if not neg >= BAND_EDGE_GUARD:
        raise BandEdgeError(x, neg, BAND_EDGE_GUARD)
    return neg


def phase_from_matrices(X: Mat2, dX: Mat2, n: int, x: float) -> PhaseSample:
    neg = neg_discriminant(X, x)
    det = X.det
    arg = X.tr / (2.0 * math.sqrt(det))
    if abs(arg) > 1.0 + CLAMP_SLACK:
        raise BandEdgeError(x, neg, BAND_EDGE_GUARD)
    theta = math.acos(min(1.0, max(-1.0, arg)))
    root = math.sqrt(neg)
    return PhaseSample(
        n=n,
        x=x,
        theta=theta,
        theta_prime=-dX.tr / root,
        lam=complex(X.tr / 2.0, root / 2.0),
        det=det,
    )


def phase(model: ParameterModel, n: int, x: float) -> PhaseSample:
    """theta_n(x) = arccos(tr X_n / (2 sqrt(det X_n))) with its analytic x-derivative"""
    X, dX = transfer_product(model, n, model.window, x, order=1)
    return phase_from_matrices(X, dX, n, x)


def phase_curvature(model: ParameterModel, n: int, x: float) -> float:
    """theta_n''(x) = -tr X''/sqrt(-discr) - (tr X')^2 tr X / (-discr)^(3/2)"""
    X, dX, d2X = n_step_derivatives(model, n, x)
    neg = neg_discriminant(X, x)
    return -d2X.tr / math.sqrt(neg) - dX.tr ** 2 * X.tr / neg ** 1.5


def phase_limit(model: ParameterModel, i: int, x: float) -> float:
    """arccos(tr/(2 sqrt(det))) of the class limit; theta_{jW+i}(x) tends to it"""
    X = class_limit(model, i, x)
    neg_discriminant(X, x)
    arg = X.tr / (2.0 * math.sqrt(X.det))
    return math.acos(min(1.0, max(-1.0, arg)))


def _unbounded(model: ParameterModel) -> bool:
    return model.class_tag is ClassTag.PERIODICALLY_MODULATED or "unbounded" in model.flags


def phase_derivative_limit(model: ParameterModel, x: float) -> float:
    """
    Limit of the normalized phase derivative (see normalized_phase_derivative):
    -tr L'/sqrt(-discr L), with L the envelope N-step matrix at 0 for
    unbounded (modulated) parameters, at x for periodic classes, and the
    i = 1 blend limit for blends. tr L and so tr L' do not depend on i.
    """
    if model.class_tag is ClassTag.PERIODIC_BLEND:
        X, dX = blend_limit_matrices(model.envelope, 1, x, order=1)
    elif _unbounded(model):
        X, dX = envelope_n_step(model.envelope, 0, 0.0, order=1)
    else:
        X, dX = envelope_n_step(model.envelope, 0, x, order=1)
    return -dX.tr / math.sqrt(neg_discriminant(X, x))


def normalized_phase_derivative(model: ParameterModel, n: int, x: float) -> float:
    """(a_n/alpha_n) theta_n'(x) for unbounded parameters, theta_n'(x) otherwise"""
    theta_prime = phase(model, n, x).theta_prime
    if _unbounded(model):
        return model.a(n) / model.envelope.alpha_at(n) * theta_prime
    return theta_prime
