"""Bernstein functions of commuting semigroup generators.

Evaluation of nonpositive Bernstein functions from their Lévy data, the
subordinator measures ``nu_t``, the induced functional calculus on commuting
matrix tuples, and numerical tests for the holomorphic-generator property.
"""

from .bernstein import (BernsteinFunction, RawFunction, eval_complex, eval_real, linear_combine,
                        make_atoms, make_example1, make_gamma, make_stable, make_tempered,
                        monotonicity_probe)
from .errors import BPKError
from .subordinator import (ExponentialPolynomial, GridMeasure, GridSpec, SignedGridMeasure,
                           bt_closed_form, bt_double_integral, compute_nu, compute_nu_derivative,
                           convolve, estimate_K, laplace, sup_norm, tv_norm, weak_continuity_probe)

__version__ = "0.1.0"

__all__ = [
    "BernsteinFunction", "RawFunction", "eval_real", "eval_complex", "make_stable", "make_gamma",
    "make_tempered", "make_atoms", "make_example1", "linear_combine", "monotonicity_probe",
    "BPKError", "GridSpec", "GridMeasure", "SignedGridMeasure", "ExponentialPolynomial",
    "compute_nu", "compute_nu_derivative", "convolve", "tv_norm", "laplace", "bt_closed_form",
    "bt_double_integral", "sup_norm", "estimate_K", "weak_continuity_probe",
]
