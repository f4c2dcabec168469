"""vvmf: free bases of vector-valued modular forms of rank up to four.

The package computes q-expansions of minimal-weight vector-valued modular
forms for irreducible representations of the modular group by solving the
associated modular linear differential equations as truncated Frobenius
series, and assembles free bases for the cyclic, noncyclic, tensor-product,
symmetric-cube, and induction constructions.
"""

from .classical import ClassicalCatalog
from .constructions import (
    InductionJob,
    Rank2MinimalForm,
    build_fuchsian_z,
    induce_to_gamma,
    induction_minimal_pair,
    induction_pipeline,
    rank2_minimal,
    sym3_pipeline,
    tensor_pipeline,
    u_from_local_exponent,
)
from .errors import VvmfError
from .mlde import (
    CaseReport,
    FormBasis,
    FuchsianOperator,
    ODECoefficients,
    assemble_cyclic_basis,
    assemble_noncyclic_basis,
    build_cyclic_operator,
    build_noncyclic_operator,
    build_noncyclic_system,
    classify,
    cyclic_coeffs,
    dimension,
    frobenius_solve,
    frobenius_solve_system,
    generic_basis,
    hypergeom_2f1,
    modular_derivative,
    noncyclic_coeffs,
    solve_minimal_form,
)
from .reps import (
    ExponentData,
    GRank2Rep,
    Group,
    Rank2Rep,
    Rank4Rep,
    induced_exponents,
    induction_is_irreducible,
    rank2_is_irreducible,
    sym3_exponents,
    sym3_is_irreducible,
    tensor_exponents,
    tensor_is_irreducible,
)
from .series import Nome, PuiseuxSeries, VectorSeries, compose_frobenius

__version__ = "0.1.0"

__all__ = [
    "ClassicalCatalog",
    "CaseReport",
    "ExponentData",
    "FormBasis",
    "FuchsianOperator",
    "GRank2Rep",
    "Group",
    "InductionJob",
    "Nome",
    "ODECoefficients",
    "PuiseuxSeries",
    "Rank2MinimalForm",
    "Rank2Rep",
    "Rank4Rep",
    "VectorSeries",
    "VvmfError",
    "assemble_cyclic_basis",
    "assemble_noncyclic_basis",
    "build_cyclic_operator",
    "build_fuchsian_z",
    "build_noncyclic_operator",
    "build_noncyclic_system",
    "classify",
    "compose_frobenius",
    "cyclic_coeffs",
    "dimension",
    "frobenius_solve",
    "frobenius_solve_system",
    "generic_basis",
    "hypergeom_2f1",
    "induce_to_gamma",
    "induced_exponents",
    "induction_is_irreducible",
    "induction_minimal_pair",
    "induction_pipeline",
    "modular_derivative",
    "noncyclic_coeffs",
    "rank2_is_irreducible",
    "rank2_minimal",
    "solve_minimal_form",
    "sym3_exponents",
    "sym3_is_irreducible",
    "sym3_pipeline",
    "tensor_exponents",
    "tensor_is_irreducible",
    "tensor_pipeline",
    "u_from_local_exponent",
]
