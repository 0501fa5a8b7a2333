"""Exact Lie-Poisson and enveloping-algebra computations for graded nilpotent
Lie algebras, and numerical geodesic dynamics on the 4x4 unitriangular group."""

from .algebra import (
    AlgebraFormatError,
    LieAlgebra,
    builtin,
    load_algebra,
    parse_algebra,
    validate_algebra,
)
from .poisson import (
    CentralizerReport,
    DegreeLimitError,
    Polynomial,
    casimirs,
    centralizer_basis,
    hamiltonian_vector_field,
    is_casimir,
    poisson_bracket,
    sub_riemannian_hamiltonian,
)
from .uea import (
    UEAElement,
    commutant_basis,
    commutator,
    degree_descent,
    principal_symbol,
    quantized_hamiltonian,
    symmetrize,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraFormatError",
    "CentralizerReport",
    "DegreeLimitError",
    "LieAlgebra",
    "Polynomial",
    "UEAElement",
    "builtin",
    "casimirs",
    "centralizer_basis",
    "commutant_basis",
    "commutator",
    "degree_descent",
    "hamiltonian_vector_field",
    "is_casimir",
    "load_algebra",
    "parse_algebra",
    "poisson_bracket",
    "principal_symbol",
    "quantized_hamiltonian",
    "sub_riemannian_hamiltonian",
    "symmetrize",
    "validate_algebra",
]
