from .summation import CompensatedSum, PhaseAccumulator, compensated_cumsum, compensated_total
from .quadrature import chebyshev_u_rule, hermite_rule, integrate_edge_singular

__all__ = ['CompensatedSum', 'PhaseAccumulator', 'compensated_cumsum', 'compensated_total',
           'integrate_edge_singular', 'chebyshev_u_rule', 'hermite_rule']
