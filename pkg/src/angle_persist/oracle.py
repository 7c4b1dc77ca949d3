"""Brute-force cross-checks built on dense FLINT matrices.

Nothing here uses the window or subspace machinery of the main engine: the
lifted cells, boundary matrices, homology coordinates and intersections are
all rebuilt from scratch so that agreement between the two is meaningful.
Homology classes are measured by evaluating a fixed set of cocycles, and
every rank comes from ``rank()`` on a freshly assembled matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import flint

from .complex_io import ComplexWithMap
from .exact_algebra.field import GF2, Field


@dataclass(frozen=True)
class OracleReport:
    quantity: str
    sizes: tuple
    values: tuple
    stabilized: object
    diverged: bool


class _Dense:
    """Thin adapter so the same code runs over Q (fmpq_mat) and F_p (nmod_mat)."""

    def __init__(self, field: Field):
        self.field = field
        self.p = field.p

    def mat(self, rows: list, ncols: int):
        nrows = len(rows)
        flat = [x for r in rows for x in r]
        if self.p is None:
            return flint.fmpq_mat(nrows, ncols, [flint.fmpq(x.numerator, x.denominator) if isinstance(x, Fraction) else x for x in flat])
        return flint.nmod_mat(nrows, ncols, [int(x) % self.p for x in flat], self.p)

    def rank(self, rows: list, ncols: int) -> int:
        if not rows or ncols == 0:
            return 0
        return self.mat(rows, ncols).rank()

    def nullspace(self, rows: list, ncols: int) -> list:
        """Right null space as a list of vectors (python scalars)."""
        if ncols == 0:
            return []
        if not rows:
            return [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
        M = self.mat(rows, ncols)
        if self.p is not None:
            X, k = M.nullspace()
            return [[int(X[i, j]) for i in range(ncols)] for j in range(k)]
        R, rank = M.rref()
        pivots = []
        for i in range(rank):
            j = next(j for j in range(ncols) if R[i, j] != 0)
            pivots.append(j)
        out = []
        for free in (j for j in range(ncols) if j not in set(pivots)):
            v = [Fraction(0)] * ncols
            v[free] = Fraction(1)
            for i, pj in enumerate(pivots):
                x = R[i, free]
                v[pj] = -Fraction(int(x.p), int(x.q))
            out.append(v)
        return out

    def pivot_columns(self, rows: list, ncols: int) -> list:
        if not rows or ncols == 0:
            return []
        R, rank = self.mat(rows, ncols).rref()
        out = []
        for i in range(rank):
            out.append(next(j for j in range(ncols) if R[i, j] != 0))
        return out

    def matvec_rows(self, A: list, vecs: list) -> list:
        """``[A v for v in vecs]`` in exact python arithmetic."""
        p = self.p
        out = []
        for v in vecs:
            nz = [(j, x) for j, x in enumerate(v) if x]
            w = []
            for row in A:
                s = sum(row[j] * x for j, x in nz)
                w.append(s % p if p else s)
            out.append(w)
        return out


class _Lift:
    """Window of the cover covering periods ``[lo, hi]``, built from the raw complex data."""

    def __init__(self, c: ComplexWithMap, lo: int, hi: int):
        self.c = c
        self.cells = {}
        self.levels = {}
        for q in range(c.dim + 1):
            cells, levels = [], []
            for s in c.cells(q):
                a = s[0]
                heights = [c.turns[a] + (c.turns[v] - c.turns[a] + c.winding(a, v) if v != a else 0) for v in s]
                for k in range(lo - 2, hi + 3):
                    lv = [h + k for h in heights]
                    if min(lv) >= lo and max(lv) < hi + 1:
                        cells.append((s, k))
                        levels.append((min(lv), max(lv)))
            self.cells[q] = cells
            self.levels[q] = levels
        self.pos = {q: {cell: i for i, cell in enumerate(cells)} for q, cells in self.cells.items()}

    def boundary(self, q: int, p) -> list:
        rows = len(self.cells.get(q - 1, [])) if q >= 1 else 0
        cols = self.cells.get(q, [])
        M = [[0] * len(cols) for _ in range(rows)]
        if q >= 1:
            for j, (s, k) in enumerate(cols):
                for i in range(len(s)):
                    f = s[:i] + s[i + 1:]
                    kf = k + self.c.winding(s[0], f[0])
                    sign = 1 if i % 2 == 0 else -1
                    M[self.pos[q - 1][(f, kf)]][j] = sign % p if p else sign
        return M


class _WindowOracle:
    def __init__(self, c: ComplexWithMap, r: int, lo: int, hi: int, field: Field):
        self.D = D = _Dense(field)
        p = field.p
        L = self.L = _Lift(c, lo, hi)
        self.r = r
        self.nr = len(L.cells.get(r, []))
        self.d_r = L.boundary(r, p) if r >= 1 else []
        self.d_up = L.boundary(r + 1, p) if r + 1 <= c.dim else [[] for _ in range(self.nr)]
        n_up = len(L.cells.get(r + 1, []))
        cycles = D.nullspace(self.d_r, self.nr)
        # cocycles: row vectors phi with phi * d_up = 0
        d_up_T = [[self.d_up[i][j] for i in range(self.nr)] for j in range(n_up)]
        cocycles = D.nullspace(d_up_T, self.nr) if n_up else D.nullspace([], self.nr)
        # keep cocycles that are independent on the cycle space: pivot columns
        # of the transposed evaluation matrix pick them greedily
        evals = D.matvec_rows(cocycles, cycles) if cocycles else []
        self.phi = [cocycles[i] for i in D.pivot_columns(evals, len(cocycles))] if cycles else []
        self.h = len(self.phi)
        self._cache = {}

    def classes(self, chains: list) -> list:
        return self.D.matvec_rows(self.phi, chains)

    def image(self, level, side: str) -> list:
        key = (level, side)
        if key not in self._cache:
            if side == "sub":
                keep = [j for j, (mn, mx) in enumerate(self.L.levels[self.r]) if mx <= level]
            else:
                keep = [j for j, (mn, mx) in enumerate(self.L.levels[self.r]) if mn >= level]
            sub = [[row[j] for j in keep] for row in self.d_r] if self.r >= 1 else []
            local = self.D.nullspace(sub, len(keep))
            full = []
            for z in local:
                v = [0] * self.nr
                for x, j in zip(z, keep):
                    v[j] = x
                full.append(v)
            self._cache[key] = self.classes(full)
        return self._cache[key]

    def dim(self, vecs: list) -> int:
        return self.D.rank(vecs, self.h)

    def meet(self, A: list, B: list) -> list:
        """Explicit basis of span(A) & span(B) in class coordinates."""
        if not A or not B:
            return []
        cols = A + [[-x for x in b] for b in B]
        rows = [[col[k] for col in cols] for k in range(self.h)]
        out = []
        for v in self.D.nullspace(rows, len(cols)):
            w = [0] * self.h
            for coef, a in zip(v[: len(A)], A):
                if coef:
                    for k in range(self.h):
                        w[k] += coef * a[k]
            if self.D.p:
                w = [x % self.D.p for x in w]
            out.append(w)
        return out


def _critical(c: ComplexWithMap):
    vals = sorted(set(c.turns))
    if len(vals) == 1:
        return vals, Fraction(1)
    gaps = [y - x for x, y in zip(vals, vals[1:])] + [1 + vals[0] - vals[-1]]
    return vals, min(gaps)


def _stable(values: list):
    for k in range(len(values) - 3, -1, -1):
        if values[k] == values[k + 1] == values[k + 2]:
            return values[k + 2]
    return None


def oracle_delta_window(c: ComplexWithMap, r: int, N: int, field: Field = GF2) -> dict:
    """Support multiset from a window spanning periods ``[-N, N]``."""
    crit, gap = _critical(c)
    eps = gap / 2
    W = _WindowOracle(c, r, -N, N, field)
    if W.h == 0:
        return {}
    bs = sorted(t + j for j in range(-N, N + 1) for t in crit if -N + 1 <= t + j < N)
    dims = {}

    def dim_of(level, side):
        if (level, side) not in dims:
            dims[level, side] = W.dim(W.image(level, side))
        return dims[level, side]

    out = {}
    for a in crit:
        Ia, Ia_minus = W.image(a, "sub"), W.image(a - eps, "sub")
        if dim_of(a, "sub") == dim_of(a - eps, "sub"):
            continue
        for b in bs:
            Ib, Ib_plus = W.image(b, "super"), W.image(b + eps, "super")
            if dim_of(b, "super") == dim_of(b + eps, "super"):
                continue
            # dim(A & B) = dim A + dim B - dim(A + B)
            top = dim_of(a, "sub") + dim_of(b, "super") - W.dim(Ia + Ib)
            if top == 0:
                continue
            lower = W.meet(Ia_minus, Ib) + W.meet(Ia, Ib_plus)
            d = top - W.dim(lower)
            if d:
                out[(a, b)] = d
    return out


def oracle_delta(c: ComplexWithMap, r: int, windows=(3, 4, 5), field: Field = GF2) -> OracleReport:
    windows = tuple(windows)
    if list(windows) != sorted(set(windows)):
        raise ValueError("window sizes must be strictly increasing")
    values = [oracle_delta_window(c, r, N, field) for N in windows]
    stable = _stable(values)
    return OracleReport("delta", windows, tuple(values), stable, stable is None)


def window_betti(c: ComplexWithMap, r: int, periods: int, field: Field = GF2) -> int:
    """dim H_r of the window over periods ``[0, periods - 1]``."""
    D = _Dense(field)
    L = _Lift(c, 0, periods - 1)
    nr = len(L.cells.get(r, []))
    rank_r = D.rank(L.boundary(r, field.p), nr) if r >= 1 else 0
    n_up = len(L.cells.get(r + 1, []))
    rank_up = D.rank(L.boundary(r + 1, field.p), n_up) if r + 1 <= c.dim else 0
    return nr - rank_r - rank_up


def oracle_betti_slope(c: ComplexWithMap, r: int, N: int, field: Field = GF2) -> OracleReport:
    """Growth rate of window homology, which equals the Novikov-Betti number."""
    if N < 4:
        raise ValueError("N must be at least 4")
    sizes = (N - 2, N - 1, N)
    dims = tuple(window_betti(c, r, n, field) for n in sizes)
    d1, d2 = dims[1] - dims[0], dims[2] - dims[1]
    slope = d2 if d1 == d2 else None
    return OracleReport("betti_slope", sizes, dims, slope, slope is None)
