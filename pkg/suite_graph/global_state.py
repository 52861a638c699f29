import logging
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from jacobi.params import ParameterModel
from jacobi.poly import eval_poly_sequence
from tools.summation import compensated_total

logger = logging.getLogger(__name__)

Key = Tuple[str, int, Tuple[float, ...]]


class EvaluationCache:
    """Singleton keeping polynomial tables shared by several criteria of one run"""

    _instance = None
    _tables: Dict[Key, np.ndarray] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(EvaluationCache, cls).__new__(cls)
            cls._instance._tables = {}
        return cls._instance

    @staticmethod
    def _key(model: ParameterModel, n: int, xs: Sequence[float]) -> Key:
        return model.name, int(n), tuple(float(x) for x in xs)

    def lookup(self, model: ParameterModel, n: int, xs: Sequence[float]) -> Optional[np.ndarray]:
        return self._tables.get(self._key(model, n, xs))

    def polynomials(self, model: ParameterModel, n: int, xs: Sequence[float]) -> np.ndarray:
        """p_0..p_n on xs, shape (n+1, len(xs)); computed once per (model, n, xs)"""
        key = self._key(model, n, xs)
        table = self._tables.get(key)
        if table is None:
            # longer tables for the same grid already hold this one
            for (name, m, grid), values in self._tables.items():
                if name == key[0] and grid == key[2] and m >= n:
                    return values[: n + 1]
            table = eval_poly_sequence(model, 0, np.asarray(xs, dtype=float), n).values
            self._tables[key] = table
            logger.debug(f"🗂️ cached p_0..p_{n} of {model.name} on {len(xs)} point(s)")
        return table

    def diagonal(self, model: ParameterModel, n: int, xs: Sequence[float]) -> np.ndarray:
        """K_n(x, x) for every x in xs"""
        table = self.polynomials(model, n, xs)
        return np.asarray([compensated_total(table[:, j] ** 2) for j in range(table.shape[1])])

    def clear(self) -> None:
        count = len(self._tables)
        self._tables.clear()
        if count:
            logger.debug(f"🗑️ cleared {count} cached table(s)")

    @property
    def size(self) -> int:
        return len(self._tables)


def get_evaluation_cache() -> EvaluationCache:
    return EvaluationCache()


def cleanup_evaluation_cache() -> None:
    instance = EvaluationCache._instance
    if instance is not None:
        instance.clear()
