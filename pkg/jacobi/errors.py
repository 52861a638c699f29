from typing import Optional


class LabError(Exception):
    """Base class for every error raised by the lab"""


class ConfigError(LabError, ValueError):
    """Invalid model, envelope or run configuration"""


class NumericalError(LabError):
    """A computation could not produce a trustworthy value"""


class BandEdgeError(NumericalError):
    """Point sits at (or outside) a band edge: -discr below the guard"""

    def __init__(self, x: float, neg_discr: float, guard: float = 1e-14):
        self.x = x
        self.neg_discr = neg_discr
        super().__init__(
            f"x={x!r} is at or outside the band: -discr={neg_discr:.3e} < {guard:.0e}"
        )


class OverflowFlaggedError(NumericalError):
    """A requested polynomial value lies past the overflow truncation"""

    def __init__(self, name: str, n: int, x: float, valid: Optional[int] = None):
        self.n = n
        self.x = x
        self.valid = valid
        where = f"at n={valid}" if valid is not None else "early"
        super().__init__(f"{name}: p_n near x={x!r} overflowed {where}, below the requested n={n}")


class BandScanError(NumericalError):
    """Trace oscillates below the scan resolution even after refinement"""
