"""Simplicial complexes carrying a circle-valued map.

The map is given by a turn value in ``[0, 1)`` per vertex and an integer
winding per oriented edge.  The lifted increment along an edge is

    delta(u, v) = turn(v) - turn(u) + winding(u, v)

and the windings must form a cocycle on triangles.  Vertices are indexed by
their position in the input list; simplices are stored as sorted index tuples
so the first entry is always the anchor vertex.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Mapping, Sequence

from .errors import CocycleError, DiameterError, FaceClosureError, NotACycleError, ParseError


def default_winding(t_from: Fraction, t_to: Fraction) -> int:
    """Winding putting the increment in ``(-1/2, 1/2]``."""
    return math.floor(Fraction(1, 2) - (t_to - t_from))


@dataclass(frozen=True)
class CriticalTurns:
    values: tuple
    min_gap: Fraction


class ComplexWithMap:
    """Validated, immutable (complex, map) pair.

    Attributes:
        vertices: vertex ids in input order.
        turns: per-vertex turn, indexed like ``vertices``.
        simplices: ``{q: [sorted index tuples]}`` for ``q >= 0``.
        edge_winding: winding on each edge in increasing index order.
    """

    def __init__(self, vertices, turns, simplices, edge_winding, dim, check_diameter=True):
        self.vertices = tuple(vertices)
        self.index = {v: i for i, v in enumerate(self.vertices)}
        self.turns = tuple(Fraction(t) for t in turns)
        self.dim = dim
        self.simplices = {q: sorted(s) for q, s in simplices.items()}
        self._simplex_index = {q: {s: i for i, s in enumerate(ss)} for q, ss in self.simplices.items()}
        self.edge_winding = dict(edge_winding)
        self._validate(check_diameter)

    # -- accessors -----------------------------------------------------------
    def cells(self, q: int) -> list:
        return self.simplices.get(q, [])

    def n_cells(self, q: int) -> int:
        return len(self.simplices.get(q, []))

    def cell_index(self, q: int, simplex) -> int:
        return self._simplex_index[q][tuple(simplex)]

    def winding(self, i: int, j: int) -> int:
        if i == j:
            return 0
        if i < j:
            return self.edge_winding[(i, j)]
        return -self.edge_winding[(j, i)]

    def delta(self, i: int, j: int) -> Fraction:
        if i == j:
            return Fraction(0)
        return self.turns[j] - self.turns[i] + self.winding(i, j)

    def relative_levels(self, simplex) -> tuple:
        """Lifted level of each vertex minus the anchor's level."""
        a = simplex[0]
        return tuple(self.delta(a, v) for v in simplex)

    def euler_characteristic(self) -> int:
        return sum((-1) ** q * len(s) for q, s in self.simplices.items())

    def vertex_id(self, i: int):
        return self.vertices[i]

    # -- validation ----------------------------------------------------------
    def _validate(self, check_diameter: bool):
        for q in range(1, self.dim + 1):
            lower = self._simplex_index.get(q - 1, {})
            for s in self.simplices.get(q, []):
                for f in combinations(s, q):
                    if f not in lower:
                        raise FaceClosureError(
                            f"face {self._ids(f)} of {self._ids(s)} is missing", cell=self._ids(s)
                        )
        for s in self.simplices.get(2, []):
            u, v, w = s
            if self.winding(u, v) + self.winding(v, w) != self.winding(u, w):
                raise CocycleError(f"windings are not a cocycle on {self._ids(s)}", cell=self._ids(s))
        if check_diameter:
            for q in range(1, self.dim + 1):
                for s in self.simplices.get(q, []):
                    rel = self.relative_levels(s)
                    if max(rel) - min(rel) >= 1:
                        raise DiameterError(
                            f"lifted levels of {self._ids(s)} span {max(rel) - min(rel)} turns (must be < 1)",
                            cell=self._ids(s),
                        )

    def _ids(self, s) -> tuple:
        return tuple(self.vertices[i] for i in s)

    # -- serialization -------------------------------------------------------
    def to_dict(self) -> dict:
        windings = {}
        for (i, j), w in sorted(self.edge_winding.items()):
            windings[f"{self.vertices[i]}>{self.vertices[j]}"] = w
        simplices = [list(self._ids(s)) for q in sorted(self.simplices) if q >= 1 for s in self.simplices[q]]
        return {
            "dim": self.dim,
            "vertices": [
                {"id": v, "turn": {"num": t.numerator, "den": t.denominator}}
                for v, t in zip(self.vertices, self.turns)
            ],
            "simplices": simplices,
            "windings": windings,
        }

    def __repr__(self):
        counts = ", ".join(str(self.n_cells(q)) for q in range(self.dim + 1))
        return f"ComplexWithMap(dim={self.dim}, cells=[{counts}])"


# -- loading -----------------------------------------------------------------

def _rational(obj, where) -> Fraction:
    try:
        num, den = obj["num"], obj["den"]
    except (TypeError, KeyError):
        raise ParseError(f"{where}: expected {{num, den}}", cell=where) from None
    if not isinstance(num, int) or not isinstance(den, int) or isinstance(num, bool) or isinstance(den, bool):
        raise ParseError(f"{where}: num and den must be integers", cell=where)
    if den < 1 or not 0 <= num < den:
        raise ParseError(f"{where}: turn must satisfy den >= 1 and 0 <= num < den", cell=where)
    return Fraction(num, den)


def _as_dict(source):
    if isinstance(source, Mapping):
        return source
    if isinstance(source, Path):
        source = source.read_text(encoding="utf-8")
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    try:
        return json.loads(source)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None


def load_complex(source, check_diameter: bool = True) -> ComplexWithMap:
    """Parse and validate a complex from JSON text, bytes, a Path or a dict."""
    doc = _as_dict(source)
    if not isinstance(doc, Mapping):
        raise ParseError("top-level JSON value must be an object")
    for key in ("dim", "vertices", "simplices"):
        if key not in doc:
            raise ParseError(f"missing field {key!r}", cell=key)
    dim = doc["dim"]
    if not isinstance(dim, int) or dim < 0:
        raise ParseError("dim must be a nonnegative integer", cell="dim")

    ids, turns = [], []
    for k, v in enumerate(doc["vertices"]):
        if not isinstance(v, Mapping) or "id" not in v or "turn" not in v:
            raise ParseError(f"vertex entry {k} needs id and turn", cell=k)
        ids.append(v["id"])
        turns.append(_rational(v["turn"], v["id"]))
    index = {}
    for i, v in enumerate(ids):
        if str(v) in index:
            raise ParseError(f"duplicate vertex id {v!r}", cell=v)
        index[str(v)] = i

    simplices = {0: [(i,) for i in range(len(ids))]}
    for s in doc["simplices"]:
        if not isinstance(s, Sequence) or isinstance(s, str) or not s:
            raise ParseError(f"bad simplex {s!r}", cell=s)
        try:
            t = tuple(sorted(index[str(v)] for v in s))
        except KeyError as exc:
            raise ParseError(f"simplex {s!r} uses unknown vertex {exc.args[0]}", cell=tuple(s)) from None
        if len(set(t)) != len(t):
            raise ParseError(f"simplex {s!r} repeats a vertex", cell=tuple(s))
        q = len(t) - 1
        if q > dim:
            raise ParseError(f"simplex {s!r} exceeds declared dim {dim}", cell=tuple(s))
        if q >= 1:
            simplices.setdefault(q, [])
            simplices[q].append(t)
    for q in list(simplices):
        simplices[q] = sorted(set(simplices[q]))
    edges = set(simplices.get(1, []))

    given: dict = {}
    for key, w in (doc.get("windings") or {}).items():
        parts = str(key).split(">")
        if len(parts) != 2 or parts[0] not in index or parts[1] not in index:
            raise ParseError(f"bad winding key {key!r}", cell=key)
        if not isinstance(w, int) or isinstance(w, bool):
            raise ParseError(f"winding {key!r} must be an integer", cell=key)
        u, v = index[parts[0]], index[parts[1]]
        if u == v:
            raise ParseError(f"winding {key!r} on a loop", cell=key)
        e, w_canon = ((u, v), w) if u < v else ((v, u), -w)
        if e not in edges:
            raise ParseError(f"winding {key!r} on an edge that is not in the complex", cell=key)
        if e in given and given[e] != w_canon:
            raise CocycleError(f"windings for {key!r} are not antisymmetric", cell=key)
        given[e] = w_canon
    winding = {}
    for (u, v) in simplices.get(1, []):
        winding[(u, v)] = given[(u, v)] if (u, v) in given else default_winding(turns[u], turns[v])
    return ComplexWithMap(ids, turns, simplices, winding, dim, check_diameter=check_diameter)


def load_complex_file(path) -> ComplexWithMap:
    return load_complex(Path(path))


# -- derived quantities ------------------------------------------------------

def critical_turns(c: ComplexWithMap) -> CriticalTurns:
    """Distinct vertex turns and their smallest cyclic gap."""
    vals = tuple(sorted(set(c.turns)))
    if len(vals) <= 1:
        return CriticalTurns(vals, Fraction(1))
    gaps = [b - a for a, b in zip(vals, vals[1:])]
    gaps.append(1 + vals[0] - vals[-1])
    return CriticalTurns(vals, min(gaps))


def cohomology_degree(c: ComplexWithMap, cycle) -> int:
    """Sum of lifted increments over a closed chain of oriented edges ``(u, v)`` (ids)."""
    boundary: dict = {}
    total = Fraction(0)
    for edge in cycle:
        if len(edge) != 2:
            raise NotACycleError(f"{edge!r} is not an oriented edge")
        try:
            u, v = (c.index[x] for x in edge)
        except KeyError as exc:
            raise NotACycleError(f"unknown vertex {exc.args[0]!r}") from None
        if (min(u, v), max(u, v)) not in c.edge_winding:
            raise NotACycleError(f"{edge!r} is not an edge of the complex")
        boundary[v] = boundary.get(v, 0) + 1
        boundary[u] = boundary.get(u, 0) - 1
        total += c.delta(u, v)
    if any(boundary.values()):
        raise NotACycleError("edge list has nonzero boundary")
    assert total.denominator == 1
    return int(total)


# -- mutation helpers (never applied implicitly) -----------------------------

def perturb_turns(c: ComplexWithMap, shifts: Mapping) -> ComplexWithMap:
    """Move vertex turns by small rational amounts, keeping the cohomology class.

    ``shifts`` maps vertex id to a rational offset.  Windings are adjusted on
    wrap-around so every lifted increment changes by ``shift(v) - shift(u)``.
    """
    new_turns, wraps = [], []
    for v, t in zip(c.vertices, c.turns):
        s = t + Fraction(shifts.get(v, 0))
        k = math.floor(s)
        new_turns.append(s - k)
        wraps.append(k)
    winding = {(u, v): w + wraps[v] - wraps[u] for (u, v), w in c.edge_winding.items()}
    return ComplexWithMap(c.vertices, new_turns, c.simplices, winding, c.dim)


def subdivide_long_edges(c: ComplexWithMap, max_steps: int = 10_000) -> ComplexWithMap:
    """Bisect edges until every simplex spans less than one turn.

    Each step picks a simplex violating the bound and splits its longest edge
    (the one between its lowest and highest lifted vertices) at the midpoint,
    replacing every simplex containing that edge by its two halves.  New
    vertex ids are ``"m<k>"``.  Accepts complexes loaded with
    ``check_diameter=False``.
    """
    vertices = list(c.vertices)
    turns = list(c.turns)
    simplices = {q: set(s) for q, s in c.simplices.items()}
    delta_from = {}  # canonical edge -> lifted increment

    def delta(i, j):
        if i == j:
            return Fraction(0)
        if i < j:
            return delta_from[(i, j)]
        return -delta_from[(j, i)]

    for (u, v) in c.edge_winding:
        delta_from[(u, v)] = c.delta(u, v)

    def offending():
        for q in sorted(simplices, reverse=True):
            if q == 0:
                continue
            for s in sorted(simplices[q]):
                rel = [delta(s[0], x) for x in s]
                if max(rel) - min(rel) >= 1:
                    lo = s[rel.index(min(rel))]
                    hi = s[rel.index(max(rel))]
                    return lo, hi
        return None

    fresh = 0
    for _ in range(max_steps):
        bad = offending()
        if bad is None:
            break
        lo, hi = bad
        half = delta(lo, hi) / 2
        while f"m{fresh}" in c.index:
            fresh += 1
        m = len(vertices)
        vertices.append(f"m{fresh}")
        fresh += 1
        level = turns[lo] + half
        turns.append(level - math.floor(level))
        e = (min(lo, hi), max(lo, hi))
        for q in sorted(simplices):
            if q == 0:
                continue
            for s in [s for s in simplices[q] if lo in s and hi in s]:
                simplices[q].discard(s)
                for keep, drop in ((lo, hi), (hi, lo)):
                    new = tuple(sorted([x for x in s if x != drop] + [m]))
                    simplices[q].add(new)
                    for f in combinations(new, 2):
                        if m in f:
                            other = f[0] if f[1] == m else f[1]
                            # lifted increment from m to the other vertex, through lo
                            d = delta(lo, other) - half
                            delta_from[(other, m)] = -d
                    for r in range(1, q):
                        for f in combinations(new, r + 1):
                            simplices.setdefault(r, set()).add(f)
        simplices.setdefault(0, set()).add((m,))
        simplices[1].discard(e)
        delta_from.pop(e, None)
    else:
        raise RuntimeError("subdivision did not converge")

    winding = {}
    for (u, v), d in delta_from.items():
        w = d - (turns[v] - turns[u])
        assert w.denominator == 1
        winding[(u, v)] = int(w)
    simplices = {q: sorted(s) for q, s in simplices.items() if s}
    return ComplexWithMap(vertices, turns, simplices, winding, c.dim)
