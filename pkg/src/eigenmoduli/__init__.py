"""Eigenstate moduli of Hamiltonian families and exact lattice density functionals."""
from .config import DEFAULT, Tolerances
from .family import (FamilyError, HamiltonianFamily, ModelSpec, assemble, build_dft_family,
                     build_oscillator_family)
from .fock import FockBasis, Operator, enumerate_basis
from .moduli import (FunctionalResult, compute_functional, functional_from_dict, functional_to_dict,
                     rationalize, symbolic_jacobian)
from .polyring import BudgetExceeded, MPoly

__all__ = [
    "BudgetExceeded", "DEFAULT", "FamilyError", "FockBasis", "FunctionalResult", "HamiltonianFamily",
    "MPoly", "ModelSpec", "Operator", "Tolerances", "assemble", "build_dft_family",
    "build_oscillator_family", "compute_functional", "enumerate_basis", "functional_from_dict",
    "functional_to_dict", "rationalize", "symbolic_jacobian",
]
