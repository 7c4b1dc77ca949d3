"""The infinite cyclic cover, seen through finite windows and through the
equivariant (twisted) chain complex over k[t^-1, t].

A lifted cell is a pair ``(s, k)``: simplex index ``s`` of the base complex
and period ``k``.  Its anchor vertex sits at level ``turn(anchor) + k``; any
other vertex ``v`` sits at ``turn(anchor) + k + delta(anchor, v)``, i.e. it is
the lift ``(v, k + winding(anchor, v))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .complex_io import ComplexWithMap
from .errors import InsufficientMarginError
from .exact_algebra import Echelon, Field, LaurentMatrix, LaurentPoly, Subspace, presentation_invariants, snf
from .exact_algebra.field import GF2


# -- windows -----------------------------------------------------------------

@dataclass(frozen=True)
class LiftedCell:
    simplex: int
    period: int
    min_level: Fraction
    max_level: Fraction


class WindowComplex:
    """Lifted cells whose vertex levels all lie in ``[m_lo, m_hi + 1)``.

    ``cells[q]`` is a list of :class:`LiftedCell`; ``boundary[q][j]`` is the
    boundary of the ``j``-th q-cell as a sparse dict over (q-1)-cell indices.
    """

    def __init__(self, c: ComplexWithMap, m_lo: int, m_hi: int, field: Field = GF2):
        if m_lo > m_hi:
            raise ValueError("window needs m_lo <= m_hi")
        self.complex = c
        self.m_lo, self.m_hi = m_lo, m_hi
        self.field = field
        self.cells: dict = {}
        self.index: dict = {}
        top = Fraction(m_hi + 1)
        for q in range(c.dim + 1):
            out = []
            for s_idx, s in enumerate(c.cells(q)):
                rel = c.relative_levels(s)
                lo, hi = min(rel), max(rel)
                base = c.turns[s[0]]
                k_first = math.ceil(m_lo - base - lo)
                k_last = math.ceil(top - base - hi) - 1
                for k in range(k_first, k_last + 1):
                    out.append(LiftedCell(s_idx, k, base + k + lo, base + k + hi))
            out.sort(key=lambda cell: (cell.period, cell.simplex))
            self.cells[q] = out
            self.index[q] = {(x.simplex, x.period): i for i, x in enumerate(out)}
        self.boundary = {0: [dict() for _ in self.cells.get(0, [])]}
        minus_one = field.norm(-1)
        for q in range(1, c.dim + 1):
            cols = []
            for cell in self.cells[q]:
                s = c.cells(q)[cell.simplex]
                col = {}
                for i in range(q + 1):
                    f = s[:i] + s[i + 1:]
                    k = cell.period + c.winding(s[0], f[0])
                    row = self.index[q - 1][(c.cell_index(q - 1, f), k)]
                    col[row] = field.one if i % 2 == 0 else minus_one
                cols.append(col)
            self.boundary[q] = cols

    @property
    def level_range(self):
        return Fraction(self.m_lo), Fraction(self.m_hi + 1)

    def n_cells(self, q: int) -> int:
        return len(self.cells.get(q, []))

    def boundary_matrix(self, q: int) -> list:
        """Dense boundary matrix ``d_q`` as rows over (q-1)-cells."""
        rows = self.n_cells(q - 1) if q > 0 else 0
        M = [[self.field.zero] * self.n_cells(q) for _ in range(rows)]
        for j, col in enumerate(self.boundary.get(q, [])):
            for i, v in col.items():
                M[i][j] = v
        return M

    def shift_index(self, q: int, j: int, by: int = 1):
        """Index of the deck translate of cell ``j``, or None when it leaves the window."""
        cell = self.cells[q][j]
        return self.index[q].get((cell.simplex, cell.period + by))

    def chain_to_laurent(self, q: int, chain: dict) -> list:
        """Map a window chain into ``k[t^-1, t]^{n_q}`` via ``(s, k) -> t^k e_s``."""
        F = self.field
        acc = [dict() for _ in range(self.complex.n_cells(q))]
        for j, v in chain.items():
            cell = self.cells[q][j]
            d = acc[cell.simplex]
            d[cell.period] = F.norm(d.get(cell.period, 0) + v)
        return [LaurentPoly(F, d) for d in acc]


def window_complex(c: ComplexWithMap, m_lo: int, m_hi: int, field: Field = GF2) -> WindowComplex:
    return WindowComplex(c, m_lo, m_hi, field)


def star_subcomplex(w: WindowComplex, level, side: str) -> dict:
    """Cell indices per dimension of the full subcomplex below (``"sub"``) or above (``"super"``) a level."""
    level = Fraction(level)
    if side == "sub":
        keep = lambda cell: cell.max_level <= level
    elif side == "super":
        keep = lambda cell: cell.min_level >= level
    else:
        raise ValueError(f"side must be 'sub' or 'super', not {side!r}")
    return {q: [j for j, cell in enumerate(cells) if keep(cell)] for q, cells in w.cells.items()}


def subcomplex_betti(w: WindowComplex, cells: dict, r: int) -> int:
    """dim H_r of a face-closed subset of window cells."""
    F = w.field
    keep_r = set(cells.get(r, []))
    E = Echelon(F)
    rank_r = 0
    if r > 0:
        for j in cells.get(r, []):
            if E.add(w.boundary[r][j])[0]:
                rank_r += 1
    E = Echelon(F)
    rank_up = 0
    for j in cells.get(r + 1, []):
        col = w.boundary[r + 1][j]
        assert all(i in keep_r for i in col)
        if E.add(col)[0]:
            rank_up += 1
    return len(keep_r) - rank_r - rank_up


# -- window homology engine ---------------------------------------------------

@dataclass
class StarCycles:
    """Cycles that raise the rank of the sublevel (or superlevel) image, with their levels."""

    values: list
    coords: list
    chains: list


class WindowHomology:
    """H_r of a window together with the filtered images of sub/superlevel homology.

    Homology classes are written in coordinates relative to a basis of
    ``H_r(window)``.  ``lower`` holds cycles ordered by the level at which
    they enter the sublevel image, ``upper`` the same for superlevel sets
    (descending level).
    """

    def __init__(self, w: WindowComplex, r: int):
        self.window = w
        self.r = r
        F = self.field = w.field
        nr = w.n_cells(r)
        cells_r = w.cells.get(r, [])

        boundaries = Echelon(F)
        for col in w.boundary.get(r + 1, []):
            boundaries.add(col, {})
        self._homology = homology = boundaries
        self.dim = 0

        lower_cycles = self._filtered_cycles(sorted(range(nr), key=lambda j: (cells_r[j].max_level, j)), "max")
        self.basis_chains = []
        for _, z in lower_cycles:
            if homology.add(z, {self.dim: F.one})[0]:
                self.basis_chains.append(z)
                self.dim += 1
        self.lower = self._rank_filter(lower_cycles)
        upper_cycles = self._filtered_cycles(sorted(range(nr), key=lambda j: (-cells_r[j].min_level, j)), "min")
        self.upper = self._rank_filter(upper_cycles)
        self._union_ranks = None

    # cycles of every prefix of the given column order, tagged with the entry level
    def _filtered_cycles(self, order: list, which: str) -> list:
        w, r, F = self.window, self.r, self.field
        if r == 0:
            cells = w.cells[0]
            return [(cells[j].max_level, {j: F.one}) for j in order]
        faces = w.cells[r - 1]
        if which == "max":
            row_order = {i: (-faces[i].max_level, -i) for i in range(len(faces))}
        else:
            row_order = {i: (faces[i].min_level, -i) for i in range(len(faces))}
        E = Echelon(F, row_order)
        out = []
        cells = w.cells[r]
        for j in order:
            independent, tag = E.add(w.boundary[r][j], {j: F.one})
            if not independent:
                lvl = cells[j].max_level if which == "max" else cells[j].min_level
                out.append((lvl, tag))
        return out

    def coordinates(self, chain: dict) -> tuple:
        """Homology coordinates of a window cycle."""
        F = self.field
        residual, tag = self._homology.reduce(chain, {})
        if residual:
            raise ValueError("chain is not a cycle of the window")
        vec = [F.zero] * self.dim
        for j, v in tag.items():
            vec[j] = F.norm(-v)
        return tuple(vec)

    def _rank_filter(self, cycles: list) -> StarCycles:
        F = self.field
        E = Echelon(F)
        out = StarCycles([], [], [])
        for lvl, z in cycles:
            co = self.coordinates(z)
            sp = {i: v for i, v in enumerate(co) if v}
            if sp and E.add(sp)[0]:
                out.values.append(lvl)
                out.coords.append(co)
                out.chains.append(z)
        return out

    # -- counts and ranks --------------------------------------------------
    def lower_count(self, a, strict: bool = False) -> int:
        a = Fraction(a)
        return sum(1 for v in self.lower.values if (v < a if strict else v <= a))

    def upper_count(self, b, strict: bool = False) -> int:
        b = Fraction(b)
        return sum(1 for v in self.upper.values if (v > b if strict else v >= b))

    def union_ranks(self) -> list:
        """``G[i][j] = dim(span(lower[:i]) + span(upper[:j]))``."""
        if self._union_ranks is None:
            F = self.field
            nl, nu = len(self.lower.coords), len(self.upper.coords)
            lo_sp = [{k: v for k, v in enumerate(co) if v} for co in self.lower.coords]
            up_sp = [{k: v for k, v in enumerate(co) if v} for co in self.upper.coords]
            G = []
            prefix = Echelon(F)
            for i in range(nl + 1):
                if i:
                    prefix.add(lo_sp[i - 1])
                E = prefix.copy()
                row = [i]
                rank = i
                for j in range(nu):
                    if E.add(up_sp[j])[0]:
                        rank += 1
                    row.append(rank)
                G.append(row)
            self._union_ranks = G
        return self._union_ranks

    def f_rank(self, a, b, a_strict: bool = False, b_strict: bool = False) -> int:
        """dim of (image below a) meet (image above b)."""
        i = self.lower_count(a, a_strict)
        j = self.upper_count(b, b_strict)
        return i + j - self.union_ranks()[i][j]

    def lower_image(self, a) -> Subspace:
        return Subspace(self.field, self.dim, self.lower.coords[: self.lower_count(a)])

    def upper_image(self, b) -> Subspace:
        return Subspace(self.field, self.dim, self.upper.coords[: self.upper_count(b)])


# -- twisted complex and Novikov homology --------------------------------------

def twisted_boundary(c: ComplexWithMap, q: int, field: Field = GF2) -> LaurentMatrix:
    """``d_q`` of the equivariant chain complex, rows indexed by (q-1)-simplices."""
    rows = c.n_cells(q - 1) if q >= 1 else 0
    zero = LaurentPoly.zero(field)
    M = [[zero] * c.n_cells(q) for _ in range(rows)]
    if q >= 1:
        for j, s in enumerate(c.cells(q)):
            for i in range(q + 1):
                f = s[:i] + s[i + 1:]
                row = c.cell_index(q - 1, f)
                sign = 1 if i % 2 == 0 else -1
                M[row][j] = M[row][j] + LaurentPoly(field, {c.winding(s[0], f[0]): sign})
    return LaurentMatrix(field, M, rows, c.n_cells(q))


def twisted_complex(c: ComplexWithMap, field: Field = GF2) -> dict:
    return {q: twisted_boundary(c, q, field) for q in range(0, c.dim + 2)}


@dataclass(frozen=True)
class NovikovInvariants:
    r: int
    free_rank: int
    invariant_factors: tuple
    torsion_dim: int


class NovikovHomology:
    """H_r of the twisted complex, with a projection of cycles onto its free part.

    With ``d_r = U D V`` the coordinates ``(V x)[rho:]`` parametrize cycles;
    the boundaries in these coordinates form the presentation matrix ``P``.
    With ``P = U2 D2 V2`` the last ``beta`` entries of ``U2^-1 (V x)[rho:]``
    are the free coordinates.
    """

    def __init__(self, c: ComplexWithMap, r: int, field: Field = GF2):
        if not 0 <= r <= c.dim:
            raise ValueError(f"degree {r} outside 0..{c.dim}")
        self.complex, self.r, self.field = c, r, field
        d_r = twisted_boundary(c, r, field)
        d_up = twisted_boundary(c, r + 1, field)
        self.S_r = snf(d_r)
        self.rho = self.S_r.rank
        n = c.n_cells(r)
        VD = self.S_r.V @ d_up
        P = VD.submatrix(range(self.rho, n), range(VD.cols))
        self.presentation = P
        self.S_p = snf(P)
        free, factors, tdim = presentation_invariants(P)
        self.invariants = NovikovInvariants(r, free, tuple(factors), tdim)

    @property
    def beta(self) -> int:
        return self.invariants.free_rank

    def free_projection(self, x: list) -> list:
        """Free-part coordinates of a twisted r-cycle ``x``."""
        y = self.S_r.V.apply(x)
        if any(y[: self.rho]):
            raise ValueError("vector is not a cycle")
        z = self.S_p.U_inv.apply(y[self.rho:])
        return z[self.S_p.rank:]


def novikov_invariants(c: ComplexWithMap, r: int, field: Field = GF2) -> NovikovInvariants:
    return NovikovHomology(c, r, field).invariants


def window_margin_check(w: WindowComplex, level) -> None:
    lo, hi = w.level_range
    if not (lo + 1 <= level <= hi - 1):
        raise InsufficientMarginError(
            f"level {level} needs one full period of margin inside [{lo}, {hi})"
        )
