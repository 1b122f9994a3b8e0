"""Spectral solvers for the q-analogue heat equation and its inverse problems."""

from .errors import DomainError, HypothesisError, NumericalError, QHeatError, TruncationWarning
from .forward import SolutionBundle, SourceSpec, solve_forward
from .inverse_initial import InverseInitialProblem, reconstruct
from .inverse_source import InverseSourceProblem, picard_iterate, solve_volterra
from .qcore import QLattice, QParams, ScalarFn
from .spectral import ModalSeries, Spectrum, find_eigenvalues

__all__ = [
    "DomainError", "HypothesisError", "NumericalError", "QHeatError", "TruncationWarning",
    "SolutionBundle", "SourceSpec", "solve_forward",
    "InverseInitialProblem", "reconstruct",
    "InverseSourceProblem", "picard_iterate", "solve_volterra",
    "QLattice", "QParams", "ScalarFn",
    "ModalSeries", "Spectrum", "find_eigenvalues",
]
