"""Configurations of points in C* attached to a circle-valued map.

For each degree the engine scans critical pairs ``(a, b)`` with ``a`` in the
fundamental domain ``[0, 1)``, measures the rank of a small box at each pair
inside a finite window of the cover, and grows the window until the total
multiplicity equals the Novikov-Betti number and the answer is unchanged
from the previous window.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import groupby

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .complex_io import ComplexWithMap, critical_turns
from .cyclic_cover import NovikovHomology, WindowComplex, WindowHomology, window_margin_check
from .errors import CertificateError, InstabilityError, NonTerminationError
from .exact_algebra import Field, LaurentMatrix, LaurentPoly, Subspace, nullspace, snf
from .exact_algebra.field import GF2

DEFAULT_MAX_PERIODS = 64
MAX_PERIODS_ENV = "ANGLE_PERSIST_MAX_PERIODS"
INF = math.inf


def max_periods_from_env(default: int = DEFAULT_MAX_PERIODS) -> int:
    raw = os.environ.get(MAX_PERIODS_ENV)
    if raw is None or raw == "":
        return default
    value = int(raw)
    if value < 4:
        raise ValueError(f"{MAX_PERIODS_ENV} must be at least 4")
    return value


# -- data types ----------------------------------------------------------------

@dataclass(frozen=True)
class BoxQuery:
    """The box ``(a_lo, a_hi] x [b_lo, b_hi)``; infinite ends use ``math.inf``."""

    a_lo: object
    a_hi: object
    b_lo: object
    b_hi: object

    def __post_init__(self):
        if not (self.a_lo < self.a_hi and self.b_lo < self.b_hi):
            raise ValueError("box needs a_lo < a_hi and b_lo < b_hi")


@dataclass(frozen=True, order=True)
class SupportPoint:
    a: Fraction
    b: Fraction
    multiplicity: int = 1

    def __post_init__(self):
        if not 0 <= self.a < 1:
            raise ValueError("a must lie in [0, 1)")
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be positive")

    @property
    def z(self) -> complex:
        """``exp(2 pi ((b - a) + i a))``."""
        rho = math.exp(2 * math.pi * float(self.b - self.a))
        ang = 2 * math.pi * float(self.a)
        return complex(rho * math.cos(ang), rho * math.sin(ang))

    def key(self) -> tuple:
        return (self.a, self.b)


@dataclass(frozen=True)
class Configuration:
    r: int
    field: Field
    points: tuple
    window: tuple
    betti: int
    total: int
    history: tuple = ()

    def as_multiset(self) -> dict:
        return {p.key(): p.multiplicity for p in self.points}

    @property
    def certificate(self) -> dict:
        return {"window": self.window, "betti": self.betti, "total": self.total}


# -- per-window queries --------------------------------------------------------

def window_homology(w: WindowComplex, r: int) -> WindowHomology:
    """Homology engine for ``(w, r)``, cached on the window."""
    cache = w.__dict__.setdefault("_homology_cache", {})
    if r not in cache:
        cache[r] = WindowHomology(w, r)
    return cache[r]


def image_subspace(w: WindowComplex, r: int, level, side: str) -> Subspace:
    level = Fraction(level)
    window_margin_check(w, level)
    H = window_homology(w, r)
    if side == "sub":
        return H.lower_image(level)
    if side == "super":
        return H.upper_image(level)
    raise ValueError(f"side must be 'sub' or 'super', not {side!r}")


def f_subspace(w: WindowComplex, r: int, a, b) -> Subspace:
    return image_subspace(w, r, a, "sub") & image_subspace(w, r, b, "super")


def _clamp(w: WindowComplex, x):
    lo, hi = w.level_range
    if x == -INF:
        return lo + 1
    if x == INF:
        return hi - 1
    return Fraction(x)


def box_rank(w: WindowComplex, r: int, box: BoxQuery) -> int:
    """``dim F(a, b) - dim(F(a', b) + F(a, b'))`` for ``box = (a', a] x [b, b')``."""
    a_lo, a_hi = _clamp(w, box.a_lo), _clamp(w, box.a_hi)
    b_lo, b_hi = _clamp(w, box.b_lo), _clamp(w, box.b_hi)
    top = f_subspace(w, r, a_hi, b_lo)
    sub = f_subspace(w, r, a_lo, b_lo) + f_subspace(w, r, a_hi, b_hi)
    return top.dim - sub.dim


def _is_critical(level: Fraction, crit: tuple) -> bool:
    return (level - math.floor(level)) in crit


def _delta_counts(H: WindowHomology, a, b, eps) -> int:
    f = H.f_rank
    return f(a, b) - f(a - eps, b) - f(a, b + eps) + f(a - eps, b + eps)


def delta_point(w: WindowComplex, r: int, a, b, eps=None) -> int:
    """Rank of the box ``(a - eps, a] x [b, b + eps)``.

    ``eps`` defaults to half the smallest gap between critical turns; the
    value is recomputed with ``eps / 2`` and a disagreement raises
    :class:`InstabilityError`.
    """
    a, b = Fraction(a), Fraction(b)
    crit = critical_turns(w.complex)
    if not (_is_critical(a, crit.values) and _is_critical(b, crit.values)):
        return 0
    window_margin_check(w, a)
    window_margin_check(w, b)
    eps = Fraction(eps) if eps is not None else crit.min_gap / 2
    H = window_homology(w, r)
    v1 = _delta_counts(H, a, b, eps)
    v2 = _delta_counts(H, a, b, eps / 2)
    if v1 != v2:
        raise InstabilityError(f"box rank at ({a}, {b}) changes from {v1} to {v2} when eps is halved")
    return v1


def scan_window(c: ComplexWithMap, r: int, n: int, field: Field) -> dict:
    """All nonzero box ranks with ``a`` in ``[0, 1)`` and ``|b - a| <= n - 1`` in window ``[-n, n]``."""
    crit = critical_turns(c)
    w = WindowComplex(c, -n, n, field)
    H = window_homology(w, r)
    eps = crit.min_gap / 2
    radius = n - 1
    points = {}
    for a in crit.values:
        for j in range(-radius - 1, radius + 2):
            for theta in crit.values:
                b = theta + j
                if abs(b - a) > radius:
                    continue
                d = _delta_counts(H, a, b, eps)
                if d and d != _delta_counts(H, a, b, eps / 2):
                    raise InstabilityError(f"box rank at ({a}, {b}) depends on eps")
                if d:
                    points[(a, b)] = d
    return points


def configuration(c: ComplexWithMap, r: int, field: Field = GF2, max_periods: int | None = None,
                  start: int = 2) -> Configuration:
    """Stabilized configuration in degree ``r``.

    Windows ``[-n, n]`` grow from ``n = start``; the run stops once the
    multiplicities add up to the Novikov-Betti number and agree with the
    previous window.
    """
    if max_periods is None:
        max_periods = max_periods_from_env()
    betti = NovikovHomology(c, r, field).beta
    previous = None
    history = []
    n = start
    while 2 * n <= max_periods:
        points = scan_window(c, r, n, field)
        total = sum(points.values())
        history.append((n, total))
        if total == betti and points == previous:
            pts = tuple(SupportPoint(a, b, m) for (a, b), m in sorted(points.items()))
            return Configuration(r, field, pts, (-n, n), betti, total, tuple(history))
        previous = points
        n += 1
    raise NonTerminationError(
        f"degree {r}: no stable configuration with total {betti} within {max_periods} periods "
        f"(window totals {history})"
    )


def char_poly(cfg: Configuration) -> np.ndarray:
    """Coefficients of ``prod (z - z_i)^m_i``, lowest degree first."""
    roots = [p.z for p in cfg.points for _ in range(p.multiplicity)]
    if not roots:
        return np.array([1.0 + 0j])
    return np.poly(roots).astype(complex)[::-1]


# -- module refinement ---------------------------------------------------------

@dataclass(frozen=True)
class RefinementEntry:
    point: SupportPoint
    L_gens: LaurentMatrix
    Lprime_gens: LaurentMatrix
    complement: LaurentMatrix
    L_split: bool
    Lprime_split: bool
    quotient_rank: int


@dataclass(frozen=True)
class ModuleRefinement:
    r: int
    basis_dim: int
    entries: tuple
    direct_sum: bool
    rank_sum: int

    @property
    def certified(self) -> bool:
        return (self.direct_sum and self.rank_sum == self.basis_dim
                and all(e.L_split and e.Lprime_split and e.quotient_rank == e.point.multiplicity for e in self.entries))


def _intersection_cycles(H: WindowHomology, i: int, j: int) -> list:
    """Window cycles spanning ``span(lower[:i]) & span(upper[:j])``."""
    F = H.field
    if i == 0 or j == 0:
        return []
    cols = list(H.lower.coords[:i]) + [tuple(F.norm(-x) for x in co) for co in H.upper.coords[:j]]
    rows = [[col[k] for col in cols] for k in range(H.dim)]
    out = []
    for v in nullspace(F, rows, i + j):
        chain: dict = {}
        for coef, z in zip(v[:i], H.lower.chains[:i]):
            if coef:
                for idx, x in z.items():
                    s = F.norm(chain.get(idx, 0) + coef * x)
                    if s:
                        chain[idx] = s
                    else:
                        chain.pop(idx, None)
        out.append(chain)
    return out


def _gens_matrix(NH: NovikovHomology, w: WindowComplex, r: int, chains: list) -> LaurentMatrix:
    cols = [NH.free_projection(w.chain_to_laurent(r, z)) for z in chains]
    return LaurentMatrix.from_columns(NH.field, cols, NH.beta)


def _split_basis(G: LaurentMatrix):
    """Basis of the column module of ``G`` and whether it is a direct summand."""
    S = snf(G)
    basis = S.U.submatrix(range(G.rows), range(S.rank))
    return basis, S.unit_divisors(), S


def module_refinement(c: ComplexWithMap, r: int, field: Field = GF2, cfg: Configuration | None = None,
                      strict: bool = True) -> ModuleRefinement:
    """Generators of each point's submodule pair inside the free part of H_r of the cover.

    With ``strict`` a failed certificate raises :class:`CertificateError`.
    """
    if cfg is None:
        cfg = configuration(c, r, field)
    NH = NovikovHomology(c, r, field)
    beta = NH.beta
    m_lo, m_hi = cfg.window
    w = WindowComplex(c, m_lo, m_hi, field)
    H = window_homology(w, r)
    eps = critical_turns(c).min_gap / 2
    entries = []
    lifts = []
    for p in cfg.points:
        i, j = H.lower_count(p.a), H.upper_count(p.b)
        i_minus, j_plus = H.lower_count(p.a - eps), H.upper_count(p.b + eps)
        top = _intersection_cycles(H, i, j)
        low = _intersection_cycles(H, i_minus, j) + _intersection_cycles(H, i, j_plus)
        G = _gens_matrix(NH, w, r, top)
        Gp = _gens_matrix(NH, w, r, low)
        Lb, L_split, S = _split_basis(G)
        rho = S.rank
        coords = S.U_inv @ Gp
        inside = all(not coords[k, col] for k in range(rho, beta) for col in range(Gp.cols))
        C = coords.submatrix(range(rho), range(Gp.cols))
        SC = snf(C)
        rho_p = SC.rank
        Lp_basis = Lb @ SC.U.submatrix(range(rho), range(rho_p))
        comp = Lb @ SC.U.submatrix(range(rho), range(rho_p, rho))
        entry = RefinementEntry(p, Lb, Lp_basis, comp, L_split, inside and SC.unit_divisors(), rho - rho_p)
        entries.append(entry)
        lifts.append(comp)
        if strict and not (entry.L_split and entry.Lprime_split):
            raise CertificateError(f"degree {r}: submodules at ({p.a}, {p.b}) are not split")
    rank_sum = sum(e.quotient_rank for e in entries)
    if lifts and rank_sum == beta:
        cols = [col for M in lifts for col in M.columns()]
        assembled = LaurentMatrix.from_columns(field, cols, beta)
        Sa = snf(assembled)
        direct = Sa.rank == beta and Sa.unit_divisors()
    else:
        direct = rank_sum == beta == 0
    result = ModuleRefinement(r, beta, tuple(entries), direct, rank_sum)
    if strict and not result.certified:
        raise CertificateError(
            f"degree {r}: quotient ranks {[e.quotient_rank for e in entries]} (sum {rank_sum}) "
            f"do not assemble to the free module of rank {beta}"
        )
    return result


# -- comparisons -------------------------------------------------------------

def _cyclic(x: Fraction) -> Fraction:
    x = x - math.floor(x)
    return min(x, 1 - x)


def point_distance(p: SupportPoint, q: SupportPoint) -> Fraction:
    return max(_cyclic(p.a - q.a), abs((p.b - p.a) - (q.b - q.a)))


def collision_distance(c1: Configuration, c2: Configuration):
    """Bottleneck distance between the expanded multisets, ``math.inf`` if sizes differ."""
    if c1.r != c2.r:
        raise ValueError("configurations are in different degrees")
    xs = [p for p in c1.points for _ in range(p.multiplicity)]
    ys = [p for p in c2.points for _ in range(p.multiplicity)]
    if len(xs) != len(ys):
        return INF
    if not xs:
        return Fraction(0)
    D = [[point_distance(x, y) for y in ys] for x in xs]
    candidates = sorted({d for row in D for d in row})
    n = len(xs)

    def perfect(limit) -> bool:
        mask = np.array([[1 if d <= limit else 0 for d in row] for row in D], dtype=np.int8)
        match = maximum_bipartite_matching(csr_matrix(mask), perm_type="column")
        return bool(np.all(match >= 0)) and len(match) == n

    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if perfect(candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    return candidates[lo]


def dual_point(p: SupportPoint) -> tuple:
    """Turn coordinates of ``i * conj(z)``."""
    a = Fraction(1, 4) - p.a
    a -= math.floor(a)
    return a, a + (p.b - p.a)


def duality_check(cfgs: dict, n: int, is_manifold: bool = True) -> dict:
    """Compare each degree with degree ``n - r`` under ``z -> i * conj(z)``."""
    if not is_manifold:
        return {"applicable": False, "status": "not applicable", "mismatches": []}
    mismatches = []
    for r, cfg in sorted(cfgs.items()):
        other = cfgs.get(n - r)
        if other is None:
            mismatches.append({"r": r, "reason": f"degree {n - r} missing"})
            continue
        target = other.as_multiset()
        for p in cfg.points:
            key = dual_point(p)
            if target.get(key, 0) != p.multiplicity:
                mismatches.append({"r": r, "a": p.a, "b": p.b, "expected": p.multiplicity,
                                   "found": target.get(key, 0)})
    return {"applicable": True, "status": "pass" if not mismatches else "fail", "mismatches": mismatches}


# -- torsion through windows ---------------------------------------------------

@dataclass(frozen=True)
class TorsionEstimate:
    r: int
    sizes: tuple
    values: tuple
    stabilized: int | None


def torsion_window_estimate(c: ComplexWithMap, r: int, field: Field = GF2, sizes=(2, 3, 4, 5)) -> TorsionEstimate:
    """dim of (image below -n) meet (image above n + 1) in window ``[-2n, 2n]``.

    Classes visible from both far ends of the cover are the torsion classes,
    so the sequence should settle at the torsion dimension.
    """
    values = []
    for n in sizes:
        w = WindowComplex(c, -2 * n, 2 * n, field)
        H = window_homology(w, r)
        values.append(H.f_rank(-n, n + 1))
    stable = None
    for k in range(len(values) - 2):
        if values[k] == values[k + 1] == values[k + 2]:
            stable = values[k + 2]
    return TorsionEstimate(r, tuple(sizes), tuple(values), stable)
