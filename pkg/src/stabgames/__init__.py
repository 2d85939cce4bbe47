"""Nonlocal quantum games on topological stabilizer resource states.

Exact Pauli/Weyl operator algebra, stabilizer tableaux with phases, chain
complexes over GF(2), the standard topological and fracton codes, the
composite-operator strategies that win parity-type games on them, and a
dense state-vector oracle for small systems.
"""

__version__ = "0.1.0"

from .pauli import PauliOperator, commutes, make_y_composite, multiply, ordered_product
from .weyl import WeylOperator, commutation_phase, dagger, w_multiply, w_power
from .tableau import Expectation, StabilizerGroup

__all__ = [
    "PauliOperator",
    "WeylOperator",
    "StabilizerGroup",
    "Expectation",
    "commutes",
    "commutation_phase",
    "multiply",
    "w_multiply",
    "w_power",
    "dagger",
    "ordered_product",
    "make_y_composite",
    "__version__",
]
