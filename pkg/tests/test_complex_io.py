import copy
import json
import math
from collections import deque
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _support import FIXTURE_DIR, fixture, random_complex

from angle_persist.complex_io import (
    cohomology_degree,
    critical_turns,
    default_winding,
    load_complex,
    perturb_turns,
    subdivide_long_edges,
)
from angle_persist.errors import (
    CocycleError,
    DiameterError,
    FaceClosureError,
    NotACycleError,
    ParseError,
)

CIRCLE_LOOP = [("v0", "v1"), ("v1", "v2"), ("v2", "v0")]
WEDGE_LOOP = [("v0", "u1"), ("u1", "u2"), ("u2", "v0")]
CHORD_LOOP = [("v2", "c"), ("c", "v1"), ("v1", "v2")]


def raw(name):
    return json.loads((FIXTURE_DIR / f"{name}.json").read_text())


def test_circle1_loads():
    c = fixture("circle1")
    assert (c.n_cells(0), c.n_cells(1)) == (3, 3)
    ids = {v: i for i, v in enumerate(c.vertices)}
    assert sum(c.winding(ids[u], ids[v]) for u, v in CIRCLE_LOOP) == 1
    assert cohomology_degree(c, CIRCLE_LOOP) == 1


def test_torus_loads():
    c = fixture("torus")
    assert [c.n_cells(q) for q in range(3)] == [7, 21, 14]
    assert c.euler_characteristic() == 0


def test_round_trip_through_dict():
    for name in ("circle1", "wedge", "chord", "torus"):
        c = fixture(name)
        again = load_complex(c.to_dict())
        assert again.turns == c.turns and again.edge_winding == c.edge_winding
        assert again.simplices == c.simplices


def test_filled_chord_triangle_breaks_cocycle():
    doc = raw("chord")
    doc["dim"] = 2
    doc["simplices"].append(["v1", "v2", "c"])
    with pytest.raises(CocycleError) as info:
        load_complex(doc)
    assert set(info.value.cell) == {"v1", "v2", "c"}


def test_full_turn_edge_is_too_long():
    doc = {
        "dim": 1,
        "vertices": [{"id": "a", "turn": {"num": 0, "den": 1}}, {"id": "b", "turn": {"num": 0, "den": 1}}],
        "simplices": [["a", "b"]],
        "windings": {"a>b": 1},
    }
    with pytest.raises(DiameterError) as info:
        load_complex(doc)
    assert info.value.cell == ("a", "b")
    assert load_complex(doc, check_diameter=False).delta(0, 1) == 1


def test_missing_face_is_reported():
    doc = raw("circle1")
    doc["dim"] = 2
    doc["simplices"] = [["v0", "v1", "v2"]]
    doc["windings"] = {}
    with pytest.raises(FaceClosureError):
        load_complex(doc)


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d["vertices"][1].update(turn={"num": 4, "den": 3}),
        lambda d: d["vertices"][1].update(turn={"num": 1, "den": 0}),
        lambda d: d["simplices"].append(["v0", "zz"]),
        lambda d: d.pop("vertices"),
        lambda d: d["windings"].update({"v0>v0": 1}),
        lambda d: d["windings"].update({"v0>v1": "1"}),
    ],
)
def test_parse_errors(mutate):
    doc = copy.deepcopy(raw("circle1"))
    mutate(doc)
    with pytest.raises(ParseError):
        load_complex(doc)


def test_bad_json_text():
    with pytest.raises(ParseError):
        load_complex("{not json")


def test_default_winding_ties_go_up():
    assert default_winding(Fraction(0), Fraction(1, 2)) == 0
    assert default_winding(Fraction(1, 2), Fraction(0)) == 1
    assert default_winding(Fraction(2, 3), Fraction(0)) == 1
    assert default_winding(Fraction(0), Fraction(2, 3)) == -1


def test_critical_turns_examples():
    third = [Fraction(0), Fraction(1, 3), Fraction(2, 3)]
    for name in ("circle1", "wedge"):
        ct = critical_turns(fixture(name))
        assert list(ct.values) == third and ct.min_gap == Fraction(1, 3)
    ct = critical_turns(fixture("chord"))
    assert list(ct.values) == [Fraction(k, 4) for k in range(4)] and ct.min_gap == Fraction(1, 4)


def test_degree_examples():
    assert cohomology_degree(fixture("wedge"), WEDGE_LOOP) == 0
    assert cohomology_degree(fixture("chord"), CHORD_LOOP) == 1


def test_degree_rejects_open_paths():
    with pytest.raises(NotACycleError):
        cohomology_degree(fixture("circle1"), CIRCLE_LOOP[:2])
    with pytest.raises(NotACycleError):
        cohomology_degree(fixture("chord"), [("v0", "v2"), ("v2", "v0")])


def _fundamental_cycles(c):
    """One closed edge path (as id pairs) per non-tree edge of a BFS forest."""
    adj = {i: [] for i in range(len(c.vertices))}
    for u, v in c.edge_winding:
        adj[u].append(v)
        adj[v].append(u)
    parent = {}
    for root in adj:
        if root in parent:
            continue
        parent[root] = None
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in parent:
                    parent[y] = x
                    queue.append(y)
    tree = {(min(x, p), max(x, p)) for x, p in parent.items() if p is not None}

    def to_root(x):
        path = [x]
        while parent[path[-1]] is not None:
            path.append(parent[path[-1]])
        return path

    cycles = []
    for u, v in c.edge_winding:
        if (u, v) in tree:
            continue
        pu, pv = to_root(u), to_root(v)
        common = next(x for x in pu if x in set(pv))
        up = pu[: pu.index(common) + 1]
        down = pv[: pv.index(common) + 1][::-1]
        walk = [v, u] + up[1:] + down[1:]
        ids = [c.vertices[x] for x in walk]
        cycles.append(list(zip(ids, ids[1:])))
    return cycles


seeds = st.integers(0, 10_000)


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(0, 50))
def test_degree_rotation_and_reversal(seed, shift):
    c = random_complex(seed)
    for cyc in _fundamental_cycles(c):
        d = cohomology_degree(c, cyc)
        k = shift % len(cyc)
        assert cohomology_degree(c, cyc[k:] + cyc[:k]) == d
        assert cohomology_degree(c, [(v, u) for u, v in reversed(cyc)]) == -d


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_min_gap_positive(seed):
    assert critical_turns(random_complex(seed)).min_gap > 0


@settings(max_examples=60, deadline=None)
@given(seeds, st.lists(st.integers(-40, 40), min_size=8, max_size=8))
def test_perturbation_keeps_cocycle_and_degrees(seed, nums):
    c = random_complex(seed)
    # small enough that no lifted increment can reach a full turn
    unit = Fraction(1, 8 * 41 * math.lcm(*(t.denominator for t in c.turns)))
    shifts = {v: n * unit for v, n in zip(c.vertices, nums)}
    d = perturb_turns(c, shifts)  # constructor re-validates the cocycle
    assert all(0 <= t < 1 for t in d.turns)
    for cyc in _fundamental_cycles(c):
        assert cohomology_degree(d, cyc) == cohomology_degree(c, cyc)
    for (u, v) in c.edge_winding:
        expected = c.delta(u, v) + shifts[c.vertices[v]] - shifts[c.vertices[u]]
        assert d.delta(u, v) == expected


def test_subdivision_repairs_long_edges():
    doc = {
        "dim": 2,
        "vertices": [
            {"id": "a", "turn": {"num": 0, "den": 1}},
            {"id": "b", "turn": {"num": 1, "den": 2}},
            {"id": "c", "turn": {"num": 0, "den": 1}},
        ],
        "simplices": [["a", "b", "c"], ["a", "b"], ["b", "c"], ["a", "c"]],
        "windings": {"a>b": 0, "b>c": 1, "a>c": 1},
    }
    long = load_complex(doc, check_diameter=False)
    fixed = subdivide_long_edges(long)  # validates diameter and cocycle on construction
    for q in range(1, fixed.dim + 1):
        for s in fixed.cells(q):
            rel = fixed.relative_levels(s)
            assert max(rel) - min(rel) < 1
    assert fixed.euler_characteristic() == long.euler_characteristic()
    assert any(str(v).startswith("m") for v in fixed.vertices)
