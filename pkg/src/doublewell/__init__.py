"""Exact diagonalization of ultracold bosons in a tilted two-level double well.

Core pipeline: enumerate the four-mode Fock basis (`fock`), assemble the
sparse symmetric Hamiltonian (`hamiltonian`), diagonalize and parity-adapt
near-degenerate pairs (`spectrum`), then detect cat states, tunneling
resonances, and critical couplings (`analysis`).  `bandcalc` derives the
model energies from the experimental superlattice potential, and `cli` drives
batch runs producing CSV/JSON artifacts.
"""

from .fock import Basis, FockState, dimension, enumerate_basis, one_level_basis
from .hamiltonian import (
    ConfigurationError,
    ModelParams,
    SparseHamiltonian,
    build,
    matrix_element,
    number_operator,
    swap_permutation,
)
from .spectrum import (
    DenseCapError,
    PairClassification,
    SolverError,
    Spectrum,
    classify_pairs,
    solve_auto,
    solve_dense,
    solve_lowest,
)

__version__ = "0.1.0"

__all__ = [
    "Basis", "ConfigurationError", "DenseCapError", "FockState",
    "ModelParams", "PairClassification", "SolverError", "SparseHamiltonian",
    "Spectrum", "__version__", "build", "classify_pairs", "dimension",
    "enumerate_basis", "matrix_element", "number_operator", "one_level_basis",
    "solve_auto", "solve_dense", "solve_lowest", "swap_permutation",
]
