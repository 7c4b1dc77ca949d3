"""Exact coefficients, Laurent polynomials, field and PID linear algebra."""

from .field import GF2, QQ, Field
from .laurent import LaurentPoly, laurent_arith
from .linalg import Echelon, ReduceResult, Subspace, field_reduce, nullspace, rref
from .matrix import LaurentMatrix
from .snf import SmithDecomposition, presentation_invariants, snf

__all__ = [
    "Field", "QQ", "GF2",
    "LaurentPoly", "laurent_arith",
    "LaurentMatrix",
    "SmithDecomposition", "snf", "presentation_invariants",
    "Subspace", "ReduceResult", "field_reduce", "rref", "nullspace", "Echelon",
]
