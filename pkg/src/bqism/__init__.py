"""Boundary quantum inverse scattering for the D(D3) R-matrix."""

from .exceptions import BQISMError, DimensionError, PoleError, SingularMatrixError, SpecError
from .rmatrix import curly_r, r_check, r_matrix, r_matrix_deriv
from .reflection import Identity, KMinusParams, KPlusParams, k_minus, k_plus
from .chain import ChainSpec, global_hamiltonian, spectrum, transfer_matrix

__version__ = "0.1.0"

__all__ = [
    "BQISMError",
    "DimensionError",
    "PoleError",
    "SingularMatrixError",
    "SpecError",
    "r_matrix",
    "r_matrix_deriv",
    "curly_r",
    "r_check",
    "Identity",
    "KMinusParams",
    "KPlusParams",
    "k_minus",
    "k_plus",
    "ChainSpec",
    "global_hamiltonian",
    "transfer_matrix",
    "spectrum",
]
