"""Linear algebra over a field: dense RREF, canonical subspaces, sparse echelon.

Dense routines take matrices as lists of rows.  Sparse vectors are dicts
``{index: nonzero scalar}``.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Sequence

from .field import Field


def rref(F: Field, rows: Sequence[Sequence], ncols: int | None = None):
    """Reduced row echelon form.

    Pivots are taken column by column, first nonzero row from the top.
    Returns ``(nonzero_rows, pivot_columns)``.
    """
    M = [[F.norm(F(x)) for x in r] for r in rows]
    if ncols is None:
        ncols = len(M[0]) if M else 0
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(M):
            break
        p = next((i for i in range(r, len(M)) if M[i][c]), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = F.inv(M[r][c])
        M[r] = [F.norm(x * inv) for x in M[r]]
        pr = M[r]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [F.norm(x - f * y) for x, y in zip(M[i], pr)]
        pivots.append(c)
        r += 1
    return [tuple(x) for x in M[:r]], pivots


def nullspace(F: Field, rows: Sequence[Sequence], ncols: int) -> list:
    """Basis of ``{x : M x = 0}`` read off the RREF, one vector per free column."""
    R, piv = rref(F, rows, ncols)
    pivset = set(piv)
    out = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [F.zero] * ncols
        v[free] = F.one
        for row, p in zip(R, piv):
            v[p] = F.norm(-row[free])
        out.append(tuple(v))
    return out


class Subspace:
    """A subspace of ``F^n`` stored as its RREF basis, which makes equality exact."""

    __slots__ = ("field", "ambient_dim", "basis", "pivots")

    def __init__(self, field: Field, ambient_dim: int, vectors: Iterable[Sequence] = ()):
        self.field = field
        self.ambient_dim = ambient_dim
        vecs = [tuple(v) for v in vectors]
        for v in vecs:
            if len(v) != ambient_dim:
                raise ValueError("vector length does not match ambient dimension")
        self.basis, self.pivots = rref(field, vecs, ambient_dim) if vecs else ([], [])

    @classmethod
    def zero(cls, field: Field, n: int) -> "Subspace":
        return cls(field, n)

    @classmethod
    def full(cls, field: Field, n: int) -> "Subspace":
        return cls(field, n, [tuple(field.one if i == j else field.zero for j in range(n)) for i in range(n)])

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __len__(self):
        return self.dim

    def contains(self, v: Sequence) -> bool:
        F = self.field
        v = [F(x) for x in v]
        for row, p in zip(self.basis, self.pivots):
            c = v[p]
            if c:
                v = [F.norm(x - c * y) for x, y in zip(v, row)]
        return not any(v)

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(v) for v in other.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        self._compat(other)
        return Subspace(self.field, self.ambient_dim, list(self.basis) + list(other.basis))

    def annihilator(self) -> list:
        return nullspace(self.field, self.basis, self.ambient_dim)

    def intersect(self, other: "Subspace") -> "Subspace":
        """Uses ``ann(U & W) = ann(U) + ann(W)``."""
        self._compat(other)
        n = self.ambient_dim
        ann = self.annihilator() + other.annihilator()
        return Subspace(self.field, n, nullspace(self.field, ann, n) if ann else Subspace.full(self.field, n).basis)

    __and__ = intersect

    def _compat(self, other):
        if other.field != self.field or other.ambient_dim != self.ambient_dim:
            raise ValueError("subspaces live in different spaces")

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.field == other.field and self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self):
        return hash((self.field, self.ambient_dim, tuple(self.basis)))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


@dataclass(frozen=True)
class ReduceResult:
    rank: int
    image_basis: Subspace
    kernel_basis: Subspace


def field_reduce(F: Field, M: Sequence[Sequence], ncols: int | None = None) -> ReduceResult:
    """Rank, row space and right null space of ``M`` (given as rows).

    The row space is reported as the image so that the answer is unchanged
    when the input rows are permuted.
    """
    if ncols is None:
        ncols = len(M[0]) if M else 0
    R, piv = rref(F, M, ncols) if M else ([], [])
    image = Subspace(F, ncols)
    image.basis, image.pivots = R, piv
    kernel = Subspace(F, ncols, nullspace(F, M, ncols) if M else Subspace.full(F, ncols).basis)
    return ReduceResult(len(piv), image, kernel)


# -- sparse --------------------------------------------------------------

def sp_axpy(F: Field, y: dict, c, x: dict) -> None:
    """In place ``y += c * x``."""
    for k, v in x.items():
        s = F.norm(y.get(k, 0) + c * v)
        if s:
            y[k] = s
        else:
            y.pop(k, None)


def sp_scale(F: Field, x: dict, c) -> dict:
    return {k: F.norm(v * c) for k, v in x.items()}


class Echelon:
    """Incremental sparse echelon basis.

    Each stored row is normalized to 1 at its pivot, which is the entry of
    smallest ``order[index]`` (plain index order when ``order`` is None).
    Rows can carry a *tag* vector that undergoes the same operations; this
    records how a reduced vector was combined from the inputs.
    """

    def __init__(self, F: Field, order: dict | None = None):
        self.F = F
        self.order = order
        self.rows: dict = {}
        self.tags: dict = {}

    def _key(self, i):
        return i if self.order is None else self.order[i]

    def __len__(self):
        return len(self.rows)

    def copy(self) -> "Echelon":
        E = Echelon(self.F, self.order)
        E.rows = dict(self.rows)
        E.tags = dict(self.tags)
        return E

    def reduce(self, v: dict, tag: dict | None = None):
        """Return ``(residual, tag)`` after clearing every stored pivot from ``v``.

        Stored rows are never mutated, so sharing them between copies is safe.
        """
        F = self.F
        v = dict(v)
        tag = dict(tag) if tag is not None else None
        key = self._key
        heap = [(key(i), i) for i in v if i in self.rows]
        heapq.heapify(heap)
        while heap:
            _, p = heapq.heappop(heap)
            c = v.get(p)
            if not c:
                continue
            row = self.rows[p]
            sp_axpy(F, v, F.norm(-c), row)
            if tag is not None:
                sp_axpy(F, tag, F.norm(-c), self.tags[p])
            for i in row:
                if i != p and i in self.rows and i in v:
                    heapq.heappush(heap, (key(i), i))
        return v, tag

    def pivot_of(self, v: dict):
        return min(v, key=self._key)

    def add(self, v: dict, tag: dict | None = None):
        """Insert ``v``; returns ``(True, None)`` on rank increase, else ``(False, tag_residual)``.

        The residual tag of a dependent vector is a combination of inputs
        that reduces to zero.
        """
        r, tg = self.reduce(v, tag)
        if not r:
            return False, tg
        p = self.pivot_of(r)
        inv = self.F.inv(r[p])
        self.rows[p] = sp_scale(self.F, r, inv)
        if tg is not None:
            self.tags[p] = sp_scale(self.F, tg, inv)
        return True, None
