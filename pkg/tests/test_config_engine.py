import cmath
import math
import random
from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _support import FIXTURE_NAMES, corpus, fixture

from angle_persist.complex_io import critical_turns, perturb_turns
from angle_persist.config_engine import (
    INF,
    BoxQuery,
    Configuration,
    SupportPoint,
    box_rank,
    char_poly,
    collision_distance,
    configuration,
    delta_point,
    dual_point,
    duality_check,
    f_subspace,
    image_subspace,
    module_refinement,
    point_distance,
    torsion_window_estimate,
    window_homology,
)
from angle_persist.cyclic_cover import novikov_invariants, window_complex
from angle_persist.errors import NonTerminationError
from angle_persist.exact_algebra import GF2, QQ

F_ = Fraction
FIELDS = pytest.mark.parametrize("F", [QQ, GF2], ids=["q", "f2"])


def cfg_of(r, *points):
    pts = tuple(SupportPoint(F_(a), F_(b), m) for a, b, m in points)
    total = sum(p.multiplicity for p in pts)
    return Configuration(r, GF2, pts, (-2, 2), total, total)


# -- images and intersections --------------------------------------------

def test_wedge_sublevel_image():
    w = window_complex(fixture("wedge"), -2, 2)
    assert image_subspace(w, 1, 0, "sub").dim == 3


def test_circle_images_vanish():
    w = window_complex(fixture("circle1"), -2, 2)
    for level in (-1, F_(1, 3), 2):
        for side in ("sub", "super"):
            assert image_subspace(w, 1, level, side).dim == 0


def test_chord_superlevel_image_has_lifted_cycle():
    w = window_complex(fixture("chord"), -1, 3)
    assert image_subspace(w, 1, F_(1, 2), "super").dim >= 1


def test_f_subspace_examples():
    w = window_complex(fixture("wedge"), -2, 2)
    assert f_subspace(w, 1, 0, 0).dim >= 1
    assert window_homology(w, 1).f_rank(-3, 0) == 0
    w = window_complex(fixture("chord"), -1, 3)
    assert f_subspace(w, 1, F_(5, 4), F_(1, 2)).dim == 1


def test_f_rank_agrees_with_literal_intersection():
    w = window_complex(fixture("chord"), -2, 2)
    H = window_homology(w, 1)
    levels = [F_(k, 4) for k in range(-4, 9)]
    for a in levels:
        for b in levels:
            assert H.f_rank(a, b) == f_subspace(w, 1, a, b).dim


# -- boxes ---------------------------------------------------------------

def test_box_without_critical_a_is_zero():
    w = window_complex(fixture("wedge"), -2, 2)
    assert box_rank(w, 1, BoxQuery(F_(1, 12), F_(1, 4), F_(0), F_(1, 6))) == 0


def test_wedge_box_example():
    w = window_complex(fixture("wedge"), -2, 2)
    assert box_rank(w, 1, BoxQuery(F_(-1, 6), F_(0), F_(0), F_(1, 6))) == 1


def test_infinite_box_ends_are_clamped():
    w = window_complex(fixture("wedge"), -3, 3)
    whole = box_rank(w, 1, BoxQuery(-INF, F_(1, 2), F_(-1, 2), INF))
    assert whole == box_rank(w, 1, BoxQuery(F_(-2), F_(1, 2), F_(-1, 2), F_(3)))


def test_box_query_rejects_empty_box():
    with pytest.raises(ValueError):
        BoxQuery(F_(1), F_(0), F_(0), F_(1))


def _grid(c, lo, hi):
    """Critical levels and midpoints between them inside ``[lo, hi]``."""
    crit = critical_turns(c).values
    pts = sorted({t + k for k in range(math.floor(lo) - 1, math.ceil(hi) + 1) for t in crit})
    mids = [(x + y) / 2 for x, y in zip(pts, pts[1:])]
    return [x for x in sorted(pts + mids) if lo <= x <= hi]


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_box_additivity_and_point_count(name):
    c = fixture(name)
    w = window_complex(c, -4, 4)
    grid = _grid(c, -2, 2)
    rng = random.Random(FIXTURE_NAMES.index(name))
    cfgs = {r: configuration(c, r) for r in range(c.dim + 1)}
    for _ in range(40):
        r = rng.randrange(c.dim + 1)
        a0, a1, a2 = sorted(rng.sample(grid, 3))
        b0, b1, b2 = sorted(rng.sample(grid, 3))
        whole = box_rank(w, r, BoxQuery(a0, a2, b0, b2))
        left = box_rank(w, r, BoxQuery(a0, a1, b0, b2))
        right = box_rank(w, r, BoxQuery(a1, a2, b0, b2))
        low = box_rank(w, r, BoxQuery(a0, a2, b0, b1))
        high = box_rank(w, r, BoxQuery(a0, a2, b1, b2))
        assert whole == left + right == low + high
        inside = sum(
            p.multiplicity
            for p in cfgs[r].points
            for k in range(-4, 5)
            if a0 < p.a + k <= a2 and b0 <= p.b + k < b2
        )
        assert whole == inside


# -- delta ---------------------------------------------------------------

@FIELDS
def test_delta_examples(F):
    w = window_complex(fixture("wedge"), -3, 3, F)
    assert delta_point(w, 1, 0, 0) == 1
    assert delta_point(w, 1, F_(1, 3), 0) == 0
    w = window_complex(fixture("chord"), -3, 3, F)
    assert delta_point(w, 1, F_(5, 4), F_(1, 2)) == 1
    assert delta_point(w, 1, F_(1, 4), F_(-1, 2)) == 1


def test_delta_of_non_critical_point_is_zero():
    w = window_complex(fixture("chord"), -3, 3)
    assert delta_point(w, 1, F_(1, 8), F_(-1, 2)) == 0


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_delta_is_period_invariant(name):
    c = fixture(name)
    w = window_complex(c, -4, 4)
    levels = [t + k for k in range(-2, 2) for t in critical_turns(c).values]
    for r in range(c.dim + 1):
        for a in levels:
            for b in levels:
                assert delta_point(w, r, a, b) == delta_point(w, r, a + 1, b + 1)


# -- configurations ------------------------------------------------------

@FIELDS
def test_fixture_configurations(F):
    for r in (0, 1):
        assert configuration(fixture("circle1"), r, F).points == ()
    wedge = configuration(fixture("wedge"), 1, F)
    assert wedge.as_multiset() == {(F_(0), F_(0)): 1}
    assert wedge.certificate["betti"] == wedge.certificate["total"] == 1
    chord = configuration(fixture("chord"), 1, F)
    assert chord.as_multiset() == {(F_(1, 4), F_(-1, 2)): 1}
    (p,) = chord.points
    assert cmath.isclose(p.z, 1j * math.exp(-3 * math.pi / 2), rel_tol=1e-12)
    for r in range(3):
        assert configuration(fixture("torus"), r, F).points == ()


def test_cap_stops_growth():
    with pytest.raises(NonTerminationError):
        configuration(fixture("wedge"), 1, max_periods=3)


def test_cap_from_environment(monkeypatch):
    monkeypatch.setenv("ANGLE_PERSIST_MAX_PERIODS", "4")
    with pytest.raises(NonTerminationError):
        configuration(fixture("wedge"), 1)


def test_char_poly_examples():
    assert np.allclose(char_poly(cfg_of(1)), [1])
    assert np.allclose(char_poly(configuration(fixture("wedge"), 1)), [-1, 1])
    z = 1j * math.exp(-3 * math.pi / 2)
    coeffs = char_poly(configuration(fixture("chord"), 1))
    assert np.allclose(coeffs, [-z, 1], rtol=0, atol=1e-15)


def test_char_poly_is_monic_with_nonzero_constant():
    cfg = cfg_of(1, (0, 0, 2), (F_(1, 4), F_(-1, 2), 1))
    coeffs = char_poly(cfg)
    assert len(coeffs) == 4 and coeffs[-1] == 1 and abs(coeffs[0]) > 0


# -- module refinement ---------------------------------------------------

@FIELDS
def test_refinement_examples(F):
    assert module_refinement(fixture("circle1"), 1, F).entries == ()
    for name, r in (("wedge", 1), ("chord", 1)):
        ref = module_refinement(fixture(name), r, F)
        assert ref.certified and ref.basis_dim == 1
        (e,) = ref.entries
        assert e.L_gens.shape == (1, 1) and e.L_gens[0, 0].is_unit()
        assert e.Lprime_gens.cols == 0
        assert e.quotient_rank == 1


# -- collision distance --------------------------------------------------

def test_collision_distance_examples():
    wedge = configuration(fixture("wedge"), 1)
    assert collision_distance(wedge, wedge) == 0
    assert collision_distance(cfg_of(1), cfg_of(1)) == 0
    c = fixture("wedge")
    moved = perturb_turns(c, {v: F_(1, 100) for v in c.vertices})
    assert collision_distance(wedge, configuration(moved, 1)) == F_(1, 100)
    assert collision_distance(wedge, cfg_of(1)) == INF


def test_collision_distance_is_exhaustive_optimum():
    rng = random.Random(5)
    for _ in range(30):
        n = rng.randint(1, 4)
        xs = [(F_(rng.randrange(8), 8), F_(rng.randrange(-8, 8), 8)) for _ in range(n)]
        ys = [(F_(rng.randrange(8), 8), F_(rng.randrange(-8, 8), 8)) for _ in range(n)]
        A = cfg_of(1, *[(a, b, 1) for a, b in xs]) if len(set(xs)) == n else None
        B = cfg_of(1, *[(a, b, 1) for a, b in ys]) if len(set(ys)) == n else None
        if A is None or B is None:
            continue
        best = min(
            max(point_distance(p, q) for p, q in zip(A.points, perm)) for perm in permutations(B.points)
        )
        assert collision_distance(A, B) == best


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_small_perturbations_move_points_a_little(name):
    c = fixture(name)
    gap = critical_turns(c).min_gap
    rng = random.Random(11)
    base = {r: configuration(c, r) for r in range(c.dim + 1)}
    for _ in range(3):
        eps = gap / 8 * F_(rng.randint(1, 15), 16)
        shifts = {v: eps * F_(rng.randint(-16, 16), 16) for v in c.vertices}
        moved = perturb_turns(c, shifts)
        for r in range(c.dim + 1):
            assert collision_distance(base[r], configuration(moved, r)) <= 2 * eps


# -- duality -------------------------------------------------------------

def test_dual_point():
    assert dual_point(SupportPoint(F_(0), F_(0))) == (F_(1, 4), F_(1, 4))
    assert dual_point(SupportPoint(F_(1, 2), F_(1))) == (F_(3, 4), F_(5, 4))


def test_duality_examples():
    c = fixture("torus")
    cfgs = {r: configuration(c, r) for r in range(3)}
    assert duality_check(cfgs, 2)["status"] == "pass"
    wedge = {r: configuration(fixture("wedge"), r) for r in range(2)}
    assert duality_check(wedge, 1, is_manifold=False)["status"] == "not applicable"
    assert duality_check({0: cfg_of(0), 1: cfg_of(1)}, 1)["status"] == "pass"


def test_duality_reports_mismatch():
    cfgs = {0: cfg_of(0, (0, 0, 1)), 1: cfg_of(1)}
    report = duality_check(cfgs, 1)
    assert report["status"] == "fail" and report["mismatches"][0]["r"] == 0
    good = {0: cfg_of(0, (0, 0, 1)), 1: cfg_of(1, (F_(1, 4), F_(1, 4), 1))}
    assert duality_check(good, 1)["status"] == "pass"


# -- torsion through windows ---------------------------------------------

@FIELDS
@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_torsion_estimate_matches_presentation(name, F):
    c = fixture(name)
    for r in range(c.dim + 1):
        est = torsion_window_estimate(c, r, F)
        assert est.stabilized == novikov_invariants(c, r, F).torsion_dim


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_support_point_validation(seed):
    rng = random.Random(seed)
    a = F_(rng.randrange(-5, 10), 4)
    if 0 <= a < 1:
        assert SupportPoint(a, F_(0)).key() == (a, 0)
    else:
        with pytest.raises(ValueError):
            SupportPoint(a, F_(0))


@pytest.mark.slow
@FIELDS
def test_corpus_refinements_are_certified(F):
    for c in corpus():
        for r in range(c.dim + 1):
            ref = module_refinement(c, r, F, strict=False)
            assert ref.certified, (c, r)
