"""Smith normal form over k[t^-1, t].

Every unit of the ring is a monomial, so each pivot can be shifted into k[t]
with a nonzero constant term; after that the usual Euclidean reduction
applies with span as the size function.
"""

from __future__ import annotations

from dataclasses import dataclass

from .laurent import LaurentPoly
from .matrix import LaurentMatrix


@dataclass(frozen=True)
class SmithDecomposition:
    """``A = U @ D @ V`` with ``D`` diagonal and canonical divisors.

    ``U_inv`` and ``V_inv`` are kept so callers can change coordinates without
    inverting a Laurent matrix.
    """

    U: LaurentMatrix
    D: LaurentMatrix
    V: LaurentMatrix
    divisors: tuple
    U_inv: LaurentMatrix
    V_inv: LaurentMatrix

    @property
    def rank(self) -> int:
        return len(self.divisors)

    def unit_divisors(self) -> bool:
        return all(d.is_unit() for d in self.divisors)


class _Work:
    """Mutable state for the elimination: ``P A Q = D`` plus inverses."""

    def __init__(self, A: LaurentMatrix):
        F = A.field
        self.F = F
        self.m, self.n = A.rows, A.cols
        self.zero = LaurentPoly.zero(F)
        self.A = [list(r) for r in A.entries]
        self.P = [list(r) for r in LaurentMatrix.identity(F, self.m).entries]
        self.Pinv = [list(r) for r in LaurentMatrix.identity(F, self.m).entries]
        self.Q = [list(r) for r in LaurentMatrix.identity(F, self.n).entries]
        self.Qinv = [list(r) for r in LaurentMatrix.identity(F, self.n).entries]

    # row i += c * row j
    def row_add(self, i, j, c):
        if not c:
            return
        for M in (self.A, self.P):
            Ri, Rj = M[i], M[j]
            for k in range(len(Ri)):
                if Rj[k]:
                    Ri[k] = Ri[k] + c * Rj[k]
        # Pinv <- Pinv E^-1 : col j -= c * col i
        for row in self.Pinv:
            if row[i]:
                row[j] = row[j] - c * row[i]

    def row_swap(self, i, j):
        if i == j:
            return
        for M in (self.A, self.P):
            M[i], M[j] = M[j], M[i]
        for row in self.Pinv:
            row[i], row[j] = row[j], row[i]

    def row_scale(self, i, u):
        ui = u.unit_inverse()
        for M in (self.A, self.P):
            M[i] = [e * u if e else e for e in M[i]]
        for row in self.Pinv:
            if row[i]:
                row[i] = row[i] * ui

    # col j += c * col i
    def col_add(self, j, i, c):
        if not c:
            return
        for M in (self.A, self.Q):
            for row in M:
                if row[i]:
                    row[j] = row[j] + c * row[i]
        # Qinv <- F^-1 Qinv : row i -= c * row j
        Ri, Rj = self.Qinv[i], self.Qinv[j]
        for k in range(self.n):
            if Rj[k]:
                Ri[k] = Ri[k] - c * Rj[k]

    def col_swap(self, i, j):
        if i == j:
            return
        for M in (self.A, self.Q):
            for row in M:
                row[i], row[j] = row[j], row[i]
        self.Qinv[i], self.Qinv[j] = self.Qinv[j], self.Qinv[i]


def _min_span_entry(A, k, m, n):
    best = None
    for i in range(k, m):
        row = A[i]
        for j in range(k, n):
            e = row[j]
            if e:
                s = e.span
                if best is None or s < best[0]:
                    best = (s, i, j)
                    if s == 0:
                        return best
    return best


def snf(A: LaurentMatrix) -> SmithDecomposition:
    """Smith normal form with tracked transforms.

    Returns ``U, D, V`` with ``A = U D V`` where each nonzero diagonal entry of
    ``D`` is monic in t with nonzero constant term and divides the next.
    """
    W = _Work(A)
    m, n = W.m, W.n
    M = W.A
    k = 0
    while k < min(m, n):
        found = _min_span_entry(M, k, m, n)
        if found is None:
            break
        _, i, j = found
        W.row_swap(k, i)
        W.col_swap(k, j)
        while True:
            changed = False
            piv = M[k][k]
            for i in range(k + 1, m):
                if M[i][k]:
                    q, _ = M[i][k].divmod(piv)
                    W.row_add(i, k, -q)
                    if M[i][k]:
                        changed = True
            for j in range(k + 1, n):
                if M[k][j]:
                    q, _ = M[k][j].divmod(piv)
                    W.col_add(j, k, -q)
                    if M[k][j]:
                        changed = True
            if changed:
                # a nonzero remainder is strictly smaller; move it to the pivot
                best = None
                for i in range(k, m):
                    e = M[i][k]
                    if e and (best is None or e.span < best[0]):
                        best = (e.span, i, k)
                for j in range(k, n):
                    e = M[k][j]
                    if e and (best is None or e.span < best[0]):
                        best = (e.span, k, j)
                _, i, j = best
                W.row_swap(k, i)
                W.col_swap(k, j)
                continue
            # row and column clear; enforce divisibility of the remainder
            bad = None
            for i in range(k + 1, m):
                for j in range(k + 1, n):
                    if M[i][j] and not piv.divides(M[i][j]):
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            W.row_add(k, bad, LaurentPoly.one(W.F))
        W.row_scale(k, M[k][k].normalizing_unit())
        k += 1

    F = A.field
    divisors = tuple(M[i][i] for i in range(k))
    return SmithDecomposition(
        U=LaurentMatrix(F, W.Pinv, m, m),
        D=LaurentMatrix(F, M, m, n),
        V=LaurentMatrix(F, W.Qinv, n, n),
        divisors=divisors,
        U_inv=LaurentMatrix(F, W.P, m, m),
        V_inv=LaurentMatrix(F, W.Q, n, n),
    )


def presentation_invariants(A: LaurentMatrix):
    """Invariants of ``coker(A)`` where the rows of ``A`` index generators.

    Returns ``(free_rank, invariant_factors, torsion_dim)``; unit divisors are
    dropped from the factor list.
    """
    S = snf(A)
    factors = [d for d in S.divisors if not d.is_unit()]
    return A.rows - S.rank, factors, sum(d.span for d in factors)
