import math
from typing import Iterable, Tuple

import numpy as np

TWO_PI = 2.0 * math.pi


def two_sum(u: float, v: float) -> Tuple[float, float]:
    """Error-free transformation: u + v == s + t exactly"""
    s = u + v
    up = s - v
    vpp = s - up
    up -= u
    vpp -= v
    return s, -(up + vpp)


class CompensatedSum:
    """Running sum with a Neumaier correction term, like math.fsum but incremental"""

    __slots__ = ("_s", "_c")

    def __init__(self, start: float = 0.0):
        self._s = float(start)
        self._c = 0.0

    def add(self, value: float) -> "CompensatedSum":
        s = self._s + value
        if abs(self._s) >= abs(value):
            self._c += (self._s - s) + value
        else:
            self._c += (value - s) + self._s
        self._s = s
        return self

    @property
    def value(self) -> float:
        return self._s + self._c

    def __float__(self) -> float:
        return self.value


SPLITTER = 134217729.0  # 2**27 + 1


def two_prod(u, v):
    """Dekker's product: u * v == p + e exactly (works on floats and ndarrays)"""
    p = u * v
    c = SPLITTER * u
    uh = c - (c - u)
    ul = u - uh
    c = SPLITTER * v
    vh = c - (c - v)
    vl = v - vh
    e = ((uh * vh - p) + uh * vl + ul * vh) + ul * vl
    return p, e


def compensated_cumsum(values: Iterable[float]) -> np.ndarray:
    """Partial sums s_n = sum_{k<=n} values[k], each compensated; 2-D input sums down axis 0"""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        acc = CompensatedSum()
        return np.asarray([acc.add(v).value for v in arr.tolist()], dtype=float)

    out = np.empty_like(arr)
    s = np.zeros(arr.shape[1:])
    c = np.zeros(arr.shape[1:])
    for n in range(arr.shape[0]):
        v = arr[n]
        t = s + v
        c += np.where(np.abs(s) >= np.abs(v), (s - t) + v, (v - t) + s)
        s = t
        out[n] = s + c
    return out


def compensated_total(values: Iterable[float]) -> float:
    return math.fsum(np.asarray(values, dtype=float).tolist())


class PhaseAccumulator:
    """Cumulative phase kept in [0, 2pi) with a compensated residual"""

    __slots__ = ("_s", "_c")

    def __init__(self):
        self._s = 0.0
        self._c = 0.0

    def add(self, theta: float) -> float:
        s, t = two_sum(self._s, theta)
        c = self._c + t
        s, c = two_sum(s, c)
        if s >= TWO_PI or s < 0.0:
            turns = math.floor(s / TWO_PI)
            s, t = two_sum(s, -turns * TWO_PI)
            s, c = two_sum(s, c + t)
        self._s, self._c = s, c
        return s + c


def cumulative_phases(thetas: Iterable[float]) -> np.ndarray:
    """Phases sum_{j<=k} theta_j reduced mod 2pi for every k"""
    acc = PhaseAccumulator()
    return np.asarray([acc.add(t) for t in np.asarray(thetas, dtype=float).tolist()])
