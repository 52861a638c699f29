"""
Jacobi-parameter classes.

A ParameterModel is a pair of pure, vectorised functions n -> a_n, n -> b_n
plus the periodic envelope (alpha, beta) the class is built around. Nothing
is stored per index, so n in the millions costs only what numpy needs to
evaluate the requested slice.
"""
import json
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from jacobi.errors import ConfigError
from jacobi.states import DrDiagnostic, ModulationDiagnostic
from tools.summation import compensated_cumsum, compensated_total
from utils.settings import get_settings

logger = logging.getLogger(__name__)

SeqFn = Callable[[np.ndarray], np.ndarray]


class ClassTag(str, Enum):
    EXACT_PERIODIC = "ExactPeriodic"
    ASYMPTOTICALLY_PERIODIC = "AsymptoticallyPeriodic"
    PERIODICALLY_MODULATED = "PeriodicallyModulated"
    PERIODIC_BLEND = "PeriodicBlend"
    CUSTOM = "Custom"


# --------------------------------------------------------------------------
# Config-constructible families
# --------------------------------------------------------------------------

class Growth(BaseModel):
    """Named growth family: sqrt -> (n+shift)^(1/2), pow -> (n+shift)^e, log -> log(n+shift+1)^e"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["sqrt", "pow", "log"] = "sqrt"
    exponent: float = 1.0
    shift: float = Field(default=1.0, gt=0)

    def __call__(self, n: np.ndarray) -> np.ndarray:
        n = np.asarray(n, dtype=float)
        if self.kind == "sqrt":
            return np.sqrt(n + self.shift)
        if self.kind == "pow":
            return (n + self.shift) ** self.exponent
        return np.log(n + self.shift + 1.0) ** self.exponent


class PowerPerturbation(BaseModel):
    """a_n = alpha_n + amp_a/(n+1)^power, b_n = beta_n + amp_b/(n+1)^power"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    amp_a: float = 0.0
    amp_b: float = 0.0
    power: float = Field(default=1.0, gt=0)


class BlendSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    inner: "ModelSpec"
    c: Growth


class ModelSpec(BaseModel):
    """JSON form of a ParameterModel (documented in docs/config_schema.md)"""
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    class_: ClassTag = Field(alias="class")
    name: Optional[str] = None
    N: Optional[int] = Field(default=None, ge=1)
    alpha: Optional[List[float]] = None
    beta: Optional[List[float]] = None
    growth: Optional[Growth] = None
    perturbation: Optional[PowerPerturbation] = None
    blend: Optional[BlendSpec] = None
    b_pattern: Optional[List[float]] = None
    a_values: Optional[List[float]] = None
    b_values: Optional[List[float]] = None


BlendSpec.model_rebuild()


# --------------------------------------------------------------------------
# Core types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PeriodicEnvelope:
    alpha: Sequence[float]
    beta: Sequence[float]

    def __post_init__(self):
        alpha = tuple(float(v) for v in np.atleast_1d(np.asarray(self.alpha, dtype=float)))
        beta = tuple(float(v) for v in np.atleast_1d(np.asarray(self.beta, dtype=float)))
        if len(alpha) == 0:
            raise ConfigError("envelope needs period N >= 1")
        if len(alpha) != len(beta):
            raise ConfigError(f"alpha has {len(alpha)} entries but beta has {len(beta)}")
        if not all(np.isfinite(alpha)) or not all(np.isfinite(beta)):
            raise ConfigError("envelope entries must be finite")
        if min(alpha) <= 0:
            raise ConfigError(f"envelope alpha must be positive, got {alpha}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def N(self) -> int:
        return len(self.alpha)

    def alpha_at(self, n):
        """alpha_{n mod N}; Python's % already wraps negative n into 0..N-1"""
        if np.ndim(n) == 0:
            return self.alpha[int(n) % self.N]
        return np.asarray(self.alpha)[np.mod(np.asarray(n, dtype=np.int64), self.N)]

    def beta_at(self, n):
        if np.ndim(n) == 0:
            return self.beta[int(n) % self.N]
        return np.asarray(self.beta)[np.mod(np.asarray(n, dtype=np.int64), self.N)]


@dataclass(frozen=True, eq=False)
class ParameterModel:
    """
    Jacobi parameters (a_n, b_n) with class metadata.

    a_fn and b_fn must be pure and vectorised over int64 arrays of n >= 0.
    Negative indices resolve to the envelope (a_{-1} := alpha_{N-1}).
    """
    class_tag: ClassTag
    envelope: PeriodicEnvelope
    a_fn: SeqFn
    b_fn: SeqFn
    name: str = "model"
    blend_inner: Optional["ParameterModel"] = None
    c_fn: Optional[SeqFn] = None
    spec: Optional[ModelSpec] = None
    flags: tuple = ()

    @property
    def N(self) -> int:
        return self.envelope.N

    @property
    def window(self) -> int:
        """Length of the transfer-matrix window X_n"""
        return self.N + 2 if self.class_tag is ClassTag.PERIODIC_BLEND else self.N

    def a_at(self, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        out = np.empty(idx.shape, dtype=float)
        pos = idx >= 0
        if np.any(pos):
            out[pos] = self.a_fn(idx[pos])
        if not np.all(pos):
            out[~pos] = self.envelope.alpha_at(idx[~pos])
        return out

    def b_at(self, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        out = np.empty(idx.shape, dtype=float)
        pos = idx >= 0
        if np.any(pos):
            out[pos] = self.b_fn(idx[pos])
        if not np.all(pos):
            out[~pos] = self.envelope.beta_at(idx[~pos])
        return out

    def a(self, n: int) -> float:
        return float(self.a_at(np.array([n]))[0])

    def b(self, n: int) -> float:
        return float(self.b_at(np.array([n]))[0])

    def a_seq(self, start: int, stop: int) -> np.ndarray:
        return self.a_at(np.arange(start, stop, dtype=np.int64))

    def b_seq(self, start: int, stop: int) -> np.ndarray:
        return self.b_at(np.arange(start, stop, dtype=np.int64))

    def c(self, n) -> np.ndarray:
        if self.c_fn is None:
            raise ConfigError(f"{self.name} is not a blend")
        return self.c_fn(np.asarray(n, dtype=np.int64))


def _check_positive(model: ParameterModel, window: int) -> None:
    a = model.a_seq(0, window)
    if not np.all(np.isfinite(a)) or np.min(a) <= 0:
        bad = int(np.argmin(np.where(np.isfinite(a), a, -np.inf)))
        raise ConfigError(f"{model.name}: a_n must be positive, a_{bad} = {a[bad]!r}")


def _envelope_spec(envelope: PeriodicEnvelope) -> dict:
    return {"N": envelope.N, "alpha": list(envelope.alpha), "beta": list(envelope.beta)}


# --------------------------------------------------------------------------
# Constructors
# --------------------------------------------------------------------------

def make_periodic(envelope: PeriodicEnvelope, name: str = "periodic") -> ParameterModel:
    alpha = np.asarray(envelope.alpha)
    beta = np.asarray(envelope.beta)
    N = envelope.N
    return ParameterModel(
        class_tag=ClassTag.EXACT_PERIODIC,
        envelope=envelope,
        a_fn=lambda n: alpha[n % N],
        b_fn=lambda n: beta[n % N],
        name=name,
        spec=ModelSpec(class_=ClassTag.EXACT_PERIODIC, name=name, **_envelope_spec(envelope)),
    )


def make_asymptotically_periodic(envelope: PeriodicEnvelope, perturbation: PowerPerturbation,
                                 name: str = "asymptotically-periodic") -> ParameterModel:
    alpha = np.asarray(envelope.alpha)
    beta = np.asarray(envelope.beta)
    N = envelope.N
    p = perturbation

    model = ParameterModel(
        class_tag=ClassTag.ASYMPTOTICALLY_PERIODIC,
        envelope=envelope,
        a_fn=lambda n: alpha[n % N] + p.amp_a / (n + 1.0) ** p.power,
        b_fn=lambda n: beta[n % N] + p.amp_b / (n + 1.0) ** p.power,
        name=name,
        spec=ModelSpec(class_=ClassTag.ASYMPTOTICALLY_PERIODIC, name=name,
                       perturbation=p, **_envelope_spec(envelope)),
    )
    # the perturbation decays monotonically per residue class, so the head decides positivity
    _check_positive(model, max(64 * N, 1024))
    return model


def modulation_diagnostic(model: ParameterModel, window: int = 10**6,
                          tol: Optional[float] = None) -> ModulationDiagnostic:
    """Check a_n growth, a_{n-1}/a_n - alpha_{n-1}/alpha_n and b_n/a_n - beta_n/alpha_n near n = window"""
    tol = get_settings().diagnostic_tol if tol is None else tol
    env = model.envelope
    idx = np.arange(window, window + env.N, dtype=np.int64)
    a = model.a_at(idx)
    a_prev = model.a_at(idx - 1)
    b = model.b_at(idx)
    ratio_dev = np.max(np.abs(a_prev / a - env.alpha_at(idx - 1) / env.alpha_at(idx)))
    b_dev = np.max(np.abs(b / a - env.beta_at(idx) / env.alpha_at(idx)))
    head = model.a_seq(0, env.N)
    return ModulationDiagnostic(
        window=window,
        tol=tol,
        growing=bool(np.min(a / env.alpha_at(idx)) > 10.0 * np.max(head / np.asarray(env.alpha))),
        ratio_deviation=float(ratio_dev),
        b_deviation=float(b_dev),
    )


def make_modulated(envelope: PeriodicEnvelope, growth: Union[Growth, SeqFn],
                   name: str = "modulated", window: int = 10**6,
                   tol: Optional[float] = None) -> ParameterModel:
    alpha = np.asarray(envelope.alpha)
    beta = np.asarray(envelope.beta)
    N = envelope.N

    spec = None
    if isinstance(growth, Growth):
        spec = ModelSpec(class_=ClassTag.PERIODICALLY_MODULATED, name=name,
                         growth=growth, **_envelope_spec(envelope))

    model = ParameterModel(
        class_tag=ClassTag.PERIODICALLY_MODULATED,
        envelope=envelope,
        a_fn=lambda n: alpha[n % N] * growth(n),
        b_fn=lambda n: beta[n % N] * growth(n),
        name=name,
        spec=spec,
    )
    _check_positive(model, 1024)

    diag = modulation_diagnostic(model, window=window, tol=tol)
    if diag.flagged:
        logger.warning(
            f"⚠️ {name}: modulation window check failed at n={window} "
            f"(growing={diag.growing}, ratio dev={diag.ratio_deviation:.2e}, b dev={diag.b_deviation:.2e})"
        )
        object.__setattr__(model, "flags", model.flags + ("modulation-window",))
    return model


def make_blend(inner: ParameterModel, c: Union[Growth, SeqFn], name: str = "blend",
               window: int = 4096) -> ParameterModel:
    """
    Splice two unbounded entries into every period of an asymptotically
    periodic model: a_{k(N+2)+i} = a~_{kN+i} (i < N), c_{2k} (i = N), c_{2k+1} (i = N+1);
    b vanishes at the two inserted slots.
    """
    if inner.class_tag not in (ClassTag.ASYMPTOTICALLY_PERIODIC, ClassTag.EXACT_PERIODIC):
        raise ConfigError(f"blend needs an asymptotically periodic inner model, got {inner.class_tag.value}")

    c_head = np.asarray(c(np.arange(window, dtype=np.int64)), dtype=float)
    if not np.all(np.isfinite(c_head)) or np.min(c_head) <= 0:
        raise ConfigError(f"{name}: c(n) must be positive")

    N = inner.N
    W = N + 2

    def a_fn(m: np.ndarray) -> np.ndarray:
        k, i = np.divmod(m, W)
        out = np.empty(m.shape, dtype=float)
        inside = i < N
        if np.any(inside):
            out[inside] = inner.a_fn(k[inside] * N + i[inside])
        slot = ~inside
        if np.any(slot):
            out[slot] = c(2 * k[slot] + (i[slot] - N))
        return out

    def b_fn(m: np.ndarray) -> np.ndarray:
        k, i = np.divmod(m, W)
        out = np.zeros(m.shape, dtype=float)
        inside = i < N
        if np.any(inside):
            out[inside] = inner.b_fn(k[inside] * N + i[inside])
        return out

    spec = None
    if inner.spec is not None and isinstance(c, Growth):
        spec = ModelSpec(class_=ClassTag.PERIODIC_BLEND, name=name,
                         blend=BlendSpec(inner=inner.spec, c=c))

    return ParameterModel(
        class_tag=ClassTag.PERIODIC_BLEND,
        envelope=inner.envelope,
        a_fn=a_fn,
        b_fn=b_fn,
        name=name,
        blend_inner=inner,
        c_fn=lambda n: np.asarray(c(n), dtype=float),
        spec=spec,
    )


def make_tabulated(a_values: Sequence[float], b_values: Sequence[float],
                   envelope: Optional[PeriodicEnvelope] = None,
                   name: str = "tabulated") -> ParameterModel:
    """Finite tables, held at their last entry past the end"""
    a_arr = np.asarray(a_values, dtype=float)
    b_arr = np.asarray(b_values, dtype=float)
    if a_arr.ndim != 1 or a_arr.shape != b_arr.shape or a_arr.size == 0:
        raise ConfigError("a_values and b_values must be non-empty and of equal length")
    if np.min(a_arr) <= 0 or not np.all(np.isfinite(a_arr)) or not np.all(np.isfinite(b_arr)):
        raise ConfigError(f"{name}: tabulated a_n must be positive and finite")
    if envelope is None:
        envelope = PeriodicEnvelope([a_arr[-1]], [b_arr[-1]])
    last = a_arr.size - 1

    return ParameterModel(
        class_tag=ClassTag.CUSTOM,
        envelope=envelope,
        a_fn=lambda n: a_arr[np.minimum(n, last)],
        b_fn=lambda n: b_arr[np.minimum(n, last)],
        name=name,
        spec=ModelSpec(class_=ClassTag.CUSTOM, name=name, a_values=a_arr.tolist(),
                       b_values=b_arr.tolist(), **_envelope_spec(envelope)),
    )


def make_alternating(growth: Union[Growth, SeqFn], b_pattern: Sequence[float],
                     name: str = "alternating") -> ParameterModel:
    """
    a_n = growth(n), b_n = b_pattern[n mod len(b_pattern)].

    The envelope is the N = 1 free one (alpha = 1, beta = 0) whatever the
    pattern length: the hypotheses are read at period one, where a
    non-constant b pattern keeps (b_n/a_n) from being regular.
    """
    pattern = np.asarray(b_pattern, dtype=float)
    if pattern.ndim != 1 or pattern.size == 0:
        raise ConfigError("b_pattern must be a non-empty list")
    L = pattern.size
    envelope = PeriodicEnvelope([1.0], [0.0])

    spec = None
    if isinstance(growth, Growth):
        spec = ModelSpec(class_=ClassTag.CUSTOM, name=name, growth=growth,
                         b_pattern=pattern.tolist(), **_envelope_spec(envelope))

    model = ParameterModel(
        class_tag=ClassTag.CUSTOM,
        envelope=envelope,
        a_fn=lambda n: np.asarray(growth(n), dtype=float),
        b_fn=lambda n: pattern[n % L],
        name=name,
        spec=spec,
        flags=("unbounded",),
    )
    _check_positive(model, 1024)
    return model


# --------------------------------------------------------------------------
# JSON
# --------------------------------------------------------------------------

def _envelope_from_spec(spec: ModelSpec) -> PeriodicEnvelope:
    if spec.alpha is None:
        raise ConfigError(f"{spec.class_.value} model needs 'alpha'")
    beta = spec.beta if spec.beta is not None else [0.0] * len(spec.alpha)
    if spec.N is not None and spec.N != len(spec.alpha):
        raise ConfigError(f"N={spec.N} but alpha has {len(spec.alpha)} entries")
    return PeriodicEnvelope(spec.alpha, beta)


def build_model(spec: ModelSpec) -> ParameterModel:
    name = spec.name or spec.class_.value
    tag = spec.class_

    if tag is ClassTag.EXACT_PERIODIC:
        return make_periodic(_envelope_from_spec(spec), name=name)
    if tag is ClassTag.ASYMPTOTICALLY_PERIODIC:
        return make_asymptotically_periodic(_envelope_from_spec(spec),
                                            spec.perturbation or PowerPerturbation(), name=name)
    if tag is ClassTag.PERIODICALLY_MODULATED:
        if spec.growth is None:
            raise ConfigError("PeriodicallyModulated model needs 'growth'")
        return make_modulated(_envelope_from_spec(spec), spec.growth, name=name)
    if tag is ClassTag.PERIODIC_BLEND:
        if spec.blend is None:
            raise ConfigError("PeriodicBlend model needs 'blend'")
        return make_blend(build_model(spec.blend.inner), spec.blend.c, name=name)

    if spec.a_values is not None:
        envelope = _envelope_from_spec(spec) if spec.alpha is not None else None
        return make_tabulated(spec.a_values, spec.b_values or [0.0] * len(spec.a_values),
                              envelope=envelope, name=name)
    if spec.growth is not None:
        return make_alternating(spec.growth, spec.b_pattern or [0.0], name=name)
    raise ConfigError("Custom model needs 'a_values' or 'growth'")


def model_from_json(data: Union[str, dict]) -> ParameterModel:
    try:
        if isinstance(data, str):
            data = json.loads(data)
        spec = ModelSpec.model_validate(data)
    except (ValidationError, json.JSONDecodeError) as e:
        raise ConfigError(f"invalid model JSON: {e}") from e
    return build_model(spec)


def model_to_json(model: ParameterModel) -> dict:
    if model.spec is None:
        raise ConfigError(f"{model.name} was built from a closure and has no JSON form")
    return model.spec.model_dump(mode="json", by_alias=True, exclude_none=True)


def load_model(path: str) -> ParameterModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read model file {path}: {e}") from e
    model = model_from_json(raw)
    logger.info(f"📄 Loaded {model.class_tag.value} model '{model.name}' from {path}")
    return model


# --------------------------------------------------------------------------
# Diagnostics
# --------------------------------------------------------------------------

def carleman_partial_sums(model: ParameterModel, n: int) -> np.ndarray:
    """sum_{k<=m} 1/a_k for m = 0..n"""
    return compensated_cumsum(1.0 / model.a_seq(0, n + 1))


def carleman_partial_sum(model: ParameterModel, n: int) -> float:
    if n < 0:
        raise ConfigError("n must be >= 0")
    return compensated_total(1.0 / model.a_seq(0, n + 1))


def tail_slope(terms: np.ndarray, bins: int = 10) -> float:
    """
    Log-log slope of the summands over the last decade of the window.

    Terms are averaged in log-spaced bins first so alternating zeros do not
    break the fit. Returns -inf when the last decade is identically zero.
    """
    terms = np.abs(np.asarray(terms, dtype=float))
    L = terms.size
    start = max(1, L // 10)
    if L - start < 2:
        return float("nan")
    edges = np.unique(np.geomspace(start, L, bins + 1).astype(np.int64))
    xs, ys = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        mean = float(np.mean(terms[lo:hi]))
        if mean > 0:
            xs.append(np.log(0.5 * (lo + hi)))
            ys.append(np.log(mean))
    if not ys:
        return float("-inf")
    if len(ys) < 2:
        return float("nan")
    return float(np.polyfit(xs, ys, 1)[0])


def slope_verdict(slope: float) -> str:
    if slope < -1.05:
        return "converging"
    if slope > -0.95:
        return "diverging"
    return "inconclusive"


def finite_difference(x: np.ndarray, j: int) -> np.ndarray:
    """Delta^j x_n = Delta^{j-1} x_{n+1} - Delta^{j-1} x_n, applied recursively along axis 0"""
    out = np.asarray(x, dtype=float)
    for _ in range(j):
        out = out[1:] - out[:-1]
    return out


def _norms(d: np.ndarray) -> np.ndarray:
    """Per-index norm: abs for scalars, operator norm (sup over a grid axis) for 2x2 stacks"""
    if d.ndim == 1:
        return np.abs(d)
    norms = np.linalg.norm(d, ord=2, axis=(-2, -1))
    if norms.ndim > 1:
        norms = norms.reshape(norms.shape[0], -1).max(axis=1)
    return norms


def dr_diagnostic(x: Union[np.ndarray, SeqFn], r: int, window: int) -> DrDiagnostic:
    """
    Partial sums of ||Delta^j x_n||^(r/j), j = 1..r, over n < window.

    x is either a callable evaluated on 0..window+r-1, a 1-D array, or an
    array of 2x2 matrices shaped (L, 2, 2) or (L, G, 2, 2) where G indexes
    an x-grid and the norm is the sup over the grid. The bounded_flag is a
    heuristic: summands decaying faster than n^-1.05 over the last decade
    read as converging, slower than n^-0.95 as diverging.
    """
    if r < 1:
        raise ConfigError(f"r must be >= 1, got {r}")
    if window < r + 2:
        raise ConfigError(f"window must be >= r + 2 = {r + 2}, got {window}")

    if callable(x):
        seq = np.asarray(x(np.arange(window + r, dtype=np.int64)), dtype=float)
    else:
        seq = np.asarray(x, dtype=float)
    if seq.shape[0] < window + r:
        raise ConfigError(f"sequence has {seq.shape[0]} terms, need window + r = {window + r}")
    seq = seq[: window + r]

    partial, slopes = {}, {}
    for j in range(1, r + 1):
        terms = _norms(finite_difference(seq, j))[:window] ** (r / j)
        partial[j] = compensated_cumsum(terms)
        slopes[j] = tail_slope(terms)

    verdicts = [slope_verdict(s) if np.isfinite(s) or s == float("-inf") else "inconclusive"
                for s in slopes.values()]
    if "diverging" in verdicts:
        flag = "diverging"
    elif all(v == "converging" for v in verdicts):
        flag = "converging"
    else:
        flag = "inconclusive"

    logger.debug(f"🔍 D_{r} diagnostic over {window} terms: {flag} (slopes {slopes})")
    return DrDiagnostic(r=r, per_j_partial_sums=partial, tail_slopes=slopes, bounded_flag=flag)


def theorem_hypotheses(model: ParameterModel, r: int = 1, window: int = 10**4) -> Dict[str, DrDiagnostic]:
    """
    Run dr_diagnostic on the residue-class sequences the Christoffel
    asymptotics assume regular: a_{kN+i-1}/a_{kN+i}, b_{kN+i}/a_{kN+i}, 1/a_{kN+i}.
    """
    N = model.N
    k = np.arange(window + r, dtype=np.int64)
    out = {}
    for i in range(N):
        idx = k * N + i
        a = model.a_at(idx)
        out[f"ratio_{i}"] = dr_diagnostic(model.a_at(idx - 1) / a, r, window)
        out[f"b_over_a_{i}"] = dr_diagnostic(model.b_at(idx) / a, r, window)
        out[f"inverse_a_{i}"] = dr_diagnostic(1.0 / a, r, window)
    return out


def ignjatovic_conditions(model: ParameterModel, window: int = 10**5) -> Dict[str, bool]:
    """
    Finite-window reading of the growth conditions for a_n (C1-C7) and
    the requirement -2 < lim b_n/a_n < 2.
    """
    a = model.a_seq(0, window + 2)
    b = model.b_seq(0, window + 2)
    lag = model.N
    half = window // 2

    da = np.abs(np.diff(a))[:window]
    d2a = np.abs(np.diff(a, n=2))[:window]
    a_w = a[:window]

    kappa_ok = any(slope_verdict(tail_slope(a_w ** -kappa)) == "converging"
                   for kappa in (1.5, 2.0, 3.0, 4.0, 6.0, 8.0))
    q = float(np.mean((b / a)[half:window]))

    conditions = {
        "C1": bool(np.min(a[half:window]) > np.max(a[: max(1, window // 100)])),
        "C2": tail_slope(da) < -0.05,
        "C3": bool(np.all(a[half + lag: window] > a[half: window - lag])),
        "C4": slope_verdict(tail_slope(1.0 / a_w)) == "diverging",
        "C5": kappa_ok,
        "C6": slope_verdict(tail_slope(da / a_w ** 2)) == "converging",
        "C7": slope_verdict(tail_slope(d2a / a_w)) == "converging",
        "b_ratio": -2.0 < q < 2.0,
    }
    logger.info(f"🔍 {model.name}: growth conditions {conditions}")
    return conditions
