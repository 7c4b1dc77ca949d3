import math
import random

import numpy as np
import pytest

from _support import fixture

from angle_persist.config_engine import module_refinement
from angle_persist.exact_algebra import GF2, QQ, LaurentMatrix, LaurentPoly
from angle_persist.hilbert import (
    PointwiseProjector,
    SingularGramError,
    hat_hat_projector,
    orthogonality_report,
    projector_at,
    vn_dimension,
)

TOL = 1e-9


def P(d):
    return LaurentPoly(QQ, d)


def col(*entries):
    return LaurentMatrix(QQ, [[P(e)] for e in entries])


EYE2 = LaurentMatrix.identity(QQ, 2)
ONE_T = col({0: 1}, {1: 1})
EMPTY2 = LaurentMatrix.zeros(QQ, 2, 0)


def gram_schmidt_projector(v):
    u = v / np.linalg.norm(v)
    return np.outer(u, u.conj())


def test_identity_generators():
    for theta in (0.0, 1.0, math.pi):
        assert np.allclose(projector_at(EYE2, theta), np.eye(2), atol=TOL)


def test_diagonal_line_at_zero():
    assert np.allclose(projector_at(ONE_T, 0.0), np.full((2, 2), 0.5), atol=TOL)


def test_line_at_quarter_turn():
    expected = np.array([[0.5, -0.5j], [0.5j, 0.5]])
    Q = projector_at(ONE_T, math.pi / 2)
    assert np.allclose(Q, expected, atol=TOL)
    assert np.allclose(Q, gram_schmidt_projector(np.array([1, 1j])), atol=TOL)


def test_hat_hat_examples():
    assert np.allclose(hat_hat_projector(EYE2, EMPTY2, 0.3), np.eye(2), atol=TOL)
    assert np.allclose(hat_hat_projector(ONE_T, ONE_T, 0.3), np.zeros((2, 2)), atol=TOL)
    expected = np.array([[0.5, -0.5], [-0.5, 0.5]])
    assert np.allclose(hat_hat_projector(EYE2, ONE_T, 0.0), expected, atol=TOL)


def test_vn_dimension_examples():
    assert vn_dimension(PointwiseProjector(EYE2, EMPTY2)).value == 2.0
    assert abs(vn_dimension(PointwiseProjector(EYE2, ONE_T)).value - 1.0) <= 1e-6


def test_singular_nodes_are_skipped():
    G = LaurentMatrix(QQ, [[P({0: 1, 1: 1})]])
    with pytest.raises(SingularGramError):
        projector_at(G, math.pi)
    dim = vn_dimension(PointwiseProjector(G, LaurentMatrix.zeros(QQ, 1, 0)), 256)
    assert dim.skipped == (128,) and dim.reliable
    assert abs(dim.value - 1.0) <= 1e-6


def test_grid_must_have_sixteen_nodes():
    with pytest.raises(ValueError):
        vn_dimension(PointwiseProjector(EYE2, EMPTY2), 8)


def test_needs_rational_coefficients():
    with pytest.raises(ValueError):
        projector_at(LaurentMatrix.identity(GF2, 1), 0.0)


def test_report_examples():
    single = orthogonality_report([(EYE2, EMPTY2)], 64)
    assert max(single.idempotence, single.self_adjointness, single.mutual, single.completeness) <= 1e-12
    axes = orthogonality_report([(col({0: 1}, {}), EMPTY2), (col({}, {0: 1}), EMPTY2)], 64)
    assert axes.mutual <= 1e-12 and axes.completeness <= 1e-12
    skew = orthogonality_report([(col({0: 1}, {}), EMPTY2), (col({0: 1}, {0: 1}), EMPTY2)], 64)
    assert abs(skew.mutual - 0.5) <= 1e-12


@pytest.mark.parametrize("name", ["wedge", "chord"])
def test_fixture_entries(name):
    ref = module_refinement(fixture(name), 1, QQ)
    (entry,) = ref.entries
    Q = PointwiseProjector(entry.L_gens, entry.Lprime_gens)
    assert abs(vn_dimension(Q, 256).value - entry.point.multiplicity) <= 1e-6
    rep = orthogonality_report([(e.L_gens, e.Lprime_gens) for e in ref.entries], 256)
    assert rep.idempotence <= TOL and rep.self_adjointness <= TOL


def random_unimodular(rng, n):
    """Product of elementary Laurent operations and unit scalings."""
    U = LaurentMatrix.identity(QQ, n)
    for _ in range(4):
        E = [[P({0: 1}) if i == j else P({}) for j in range(n)] for i in range(n)]
        if n > 1:
            i, j = rng.sample(range(n), 2)
            E[i][j] = P({rng.randint(-2, 2): rng.choice((-2, -1, 1, 2)), rng.randint(-2, 2): 1})
        k = rng.randrange(n)
        E[k][k] = E[k][k] * P({rng.randint(-2, 2): rng.choice((-1, 1, 3))})
        U = U @ LaurentMatrix(QQ, E)
    return U


def test_unimodular_change_of_basis():
    rng = random.Random(2)
    pairs = [(EYE2, ONE_T), (ONE_T, LaurentMatrix.zeros(QQ, 2, 0)), (EYE2, EMPTY2)]
    for L, Lp in pairs:
        base = vn_dimension(PointwiseProjector(L, Lp), 256)
        base_rep = orthogonality_report([(L, Lp)], 256)
        for _ in range(10):
            U = random_unimodular(rng, 2)
            assert U.det().is_unit()
            moved = vn_dimension(PointwiseProjector(U @ L, U @ Lp), 256)
            assert abs(moved.value - base.value) <= 1e-6
            rep = orthogonality_report([(U @ L, U @ Lp)], 256)
            assert abs(rep.idempotence - base_rep.idempotence) <= 1e-6
            assert abs(rep.self_adjointness - base_rep.self_adjointness) <= 1e-6
