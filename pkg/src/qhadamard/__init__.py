"""Quaternionic Hadamard matrices: algebra, families, Butson structure and a
numerical circulant-core solver."""

__version__ = "0.1.0"

from .quat import (
    I,
    J,
    K,
    ONE,
    DomainError,
    Quaternion,
    conjugal,
    group_conj,
    normalize_pair,
    normalize_to_complex,
)
from .qmat import (
    EquivalenceMove,
    QMatrix,
    VerificationReport,
    apply_move,
    apply_moves,
    commuting_core_test,
    complex_adjoint,
    dephase,
    hadamard_check,
    lift_from_complex,
    lift_from_real,
    real_adjoint,
)
from .families import FamilyPoint, generate
from .butson import bh45_emptiness, butson_profile
from .search import classify_order5, solve_circulant

__all__ = [
    "__version__",
    "Quaternion",
    "ONE",
    "I",
    "J",
    "K",
    "DomainError",
    "conjugal",
    "group_conj",
    "normalize_pair",
    "normalize_to_complex",
    "QMatrix",
    "VerificationReport",
    "EquivalenceMove",
    "apply_move",
    "apply_moves",
    "dephase",
    "hadamard_check",
    "commuting_core_test",
    "complex_adjoint",
    "real_adjoint",
    "lift_from_complex",
    "lift_from_real",
    "FamilyPoint",
    "generate",
    "bh45_emptiness",
    "butson_profile",
    "classify_order5",
    "solve_circulant",
]
