"""Dense matrices over k[t^-1, t]."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import FieldMismatchError
from .field import Field
from .laurent import LaurentPoly


class LaurentMatrix:
    """``rows x cols`` grid of :class:`LaurentPoly` over one field.

    Treated as immutable by callers; the SNF code works on private copies.
    """

    __slots__ = ("field", "rows", "cols", "entries")

    def __init__(self, field: Field, entries: Sequence[Sequence[LaurentPoly]], rows: int | None = None, cols: int | None = None):
        self.field = field
        self.entries = [list(r) for r in entries]
        self.rows = len(self.entries) if rows is None else rows
        if cols is None:
            cols = len(self.entries[0]) if self.entries else 0
        self.cols = cols
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError("entry grid does not match the declared shape")
        for r in self.entries:
            for e in r:
                if e.field != field:
                    raise FieldMismatchError("matrix entry over a different field")

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> "LaurentMatrix":
        z = LaurentPoly.zero(field)
        return cls(field, [[z] * cols for _ in range(rows)], rows, cols)

    @classmethod
    def identity(cls, field: Field, n: int) -> "LaurentMatrix":
        z, o = LaurentPoly.zero(field), LaurentPoly.one(field)
        return cls(field, [[o if i == j else z for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def from_ints(cls, field: Field, grid) -> "LaurentMatrix":
        """Each entry is a scalar, a ``{exp: coeff}`` dict or a LaurentPoly."""
        out = []
        for row in grid:
            r = []
            for e in row:
                if isinstance(e, LaurentPoly):
                    r.append(e)
                elif isinstance(e, dict):
                    r.append(LaurentPoly(field, e))
                else:
                    r.append(LaurentPoly(field, {0: e}))
            out.append(r)
        cols = len(out[0]) if out else 0
        return cls(field, out, len(out), cols)

    @classmethod
    def from_columns(cls, field: Field, columns: Sequence[Sequence[LaurentPoly]], rows: int) -> "LaurentMatrix":
        return cls(field, [[col[i] for col in columns] for i in range(rows)], rows, len(columns))

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def column(self, j: int) -> list:
        return [self.entries[i][j] for i in range(self.rows)]

    def columns(self) -> list:
        return [self.column(j) for j in range(self.cols)]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "LaurentMatrix":
        return LaurentMatrix(self.field, [[self.entries[i][j] for j in cols] for i in rows], len(rows), len(cols))

    def transpose(self) -> "LaurentMatrix":
        return LaurentMatrix(self.field, [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)], self.cols, self.rows)

    def hstack(self, other: "LaurentMatrix") -> "LaurentMatrix":
        if other.rows != self.rows:
            raise ValueError("row counts differ")
        return LaurentMatrix(self.field, [self.entries[i] + other.entries[i] for i in range(self.rows)], self.rows, self.cols + other.cols)

    def __matmul__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        if self.field != other.field:
            raise FieldMismatchError("matrix product over different fields")
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        z = LaurentPoly.zero(self.field)
        out = []
        for i in range(self.rows):
            row = []
            Ai = self.entries[i]
            for j in range(other.cols):
                acc = z
                for k in range(self.cols):
                    a = Ai[k]
                    if a:
                        b = other.entries[k][j]
                        if b:
                            acc = acc + a * b
                row.append(acc)
            out.append(row)
        return LaurentMatrix(self.field, out, self.rows, other.cols)

    def apply(self, vec: Sequence[LaurentPoly]) -> list:
        """Matrix-vector product."""
        z = LaurentPoly.zero(self.field)
        out = []
        for i in range(self.rows):
            acc = z
            for a, b in zip(self.entries[i], vec):
                if a and b:
                    acc = acc + a * b
            out.append(acc)
        return out

    def is_zero(self) -> bool:
        return all(not e for r in self.entries for e in r)

    def is_diagonal(self) -> bool:
        return all(not self.entries[i][j] for i in range(self.rows) for j in range(self.cols) if i != j)

    def det(self) -> LaurentPoly:
        """Determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        F = self.field
        if n == 0:
            return LaurentPoly.one(F)
        M = [list(r) for r in self.entries]
        sign = 1
        prev = LaurentPoly.one(F)
        for k in range(n - 1):
            if not M[k][k]:
                for i in range(k + 1, n):
                    if M[i][k]:
                        M[k], M[i] = M[i], M[k]
                        sign = -sign
                        break
                else:
                    return LaurentPoly.zero(F)
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]).exact_div(prev)
            prev = M[k][k]
        d = M[n - 1][n - 1]
        return d if sign > 0 else -d

    def evaluate(self, theta: float) -> np.ndarray:
        """Complex matrix obtained by substituting ``t = exp(i*theta)``."""
        if not self.field.is_rational:
            raise ValueError("complex evaluation needs rational coefficients")
        z = complex(np.cos(theta), np.sin(theta))
        out = np.zeros((self.rows, self.cols), dtype=complex)
        for i in range(self.rows):
            for j in range(self.cols):
                e = self.entries[i][j]
                if e:
                    out[i, j] = e.evaluate(z)
        return out

    def evaluate_at(self, c) -> list:
        """Exact evaluation at a nonzero field scalar ``t = c``."""
        return [[e.evaluate(c) for e in r] for r in self.entries]

    def __eq__(self, other):
        return isinstance(other, LaurentMatrix) and self.field == other.field and self.shape == other.shape and self.entries == other.entries

    def __repr__(self):
        body = "; ".join("[" + ", ".join(str(e) for e in r) + "]" for r in self.entries)
        return f"LaurentMatrix({self.rows}x{self.cols} over {self.field!r}: {body})"
