from .errors import BandEdgeError, BandScanError, ConfigError, LabError, NumericalError, OverflowFlaggedError
from .params import (ClassTag, Growth, ParameterModel, PeriodicEnvelope, PowerPerturbation, load_model,
                     make_alternating, make_asymptotically_periodic, make_blend, make_modulated,
                     make_periodic, make_tabulated, model_from_json, model_to_json)
from .poly import eval_poly_derivative, eval_poly_sequence
from .equilibrium import band_structure, omega_prime
from .kernel import christoffel_ratio, error_ledger, kernel, rho, rho_sub, scaling_kernel

__all__ = [
    'LabError', 'ConfigError', 'NumericalError', 'BandEdgeError', 'BandScanError', 'OverflowFlaggedError',
    'ClassTag', 'Growth', 'PowerPerturbation', 'PeriodicEnvelope', 'ParameterModel',
    'make_periodic', 'make_asymptotically_periodic', 'make_modulated', 'make_blend',
    'make_tabulated', 'make_alternating', 'model_from_json', 'model_to_json', 'load_model',
    'eval_poly_sequence', 'eval_poly_derivative',
    'band_structure', 'omega_prime',
    'kernel', 'rho', 'rho_sub', 'christoffel_ratio', 'scaling_kernel', 'error_ledger',
]
