"""Pointwise orthogonal projectors on the unit circle.

A free submodule of ``C[t^-1, t]^beta`` with generator matrix ``G`` completes
to the Hilbert submodule whose fibre over ``t = exp(i theta)`` is the column
span of ``G(exp(i theta))``.  Everything here works fibrewise in floating
point; the von Neumann dimension is the average trace over a uniform grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exact_algebra import LaurentMatrix

GRAM_TOL = 1e-10


class SingularGramError(ArithmeticError):
    """The Gram matrix of the generators is singular at this angle."""


def _require_rational(M: LaurentMatrix):
    if not M.field.is_rational:
        raise ValueError("pointwise projectors need rational coefficients")


def projector_at(G: LaurentMatrix, theta: float, beta: int | None = None) -> np.ndarray:
    """``G (G* G)^-1 G*`` evaluated at ``t = exp(i theta)``."""
    _require_rational(G)
    n = G.rows if beta is None else beta
    if G.cols == 0:
        return np.zeros((n, n), dtype=complex)
    A = G.evaluate(theta)
    gram = A.conj().T @ A
    s = np.linalg.svd(gram, compute_uv=False)
    if s[-1] <= GRAM_TOL * max(1.0, s[0]):
        raise SingularGramError(f"singular Gram matrix at theta={theta!r}")
    return A @ np.linalg.solve(gram, A.conj().T)


def hat_hat_projector(L: LaurentMatrix, Lp: LaurentMatrix, theta: float) -> np.ndarray:
    """Projector onto the orthogonal complement of ``Lp`` inside ``L`` at one angle."""
    return projector_at(L, theta, L.rows) - projector_at(Lp, theta, L.rows)


@dataclass
class PointwiseProjector:
    """``theta -> Q(theta)`` for a submodule pair, sampled on a uniform grid."""

    L: LaurentMatrix
    Lp: LaurentMatrix

    def __call__(self, theta: float) -> np.ndarray:
        return hat_hat_projector(self.L, self.Lp, theta)

    @property
    def beta(self) -> int:
        return self.L.rows

    def sample(self, n_grid: int):
        """Returns ``(values, skipped)`` where ``values[j]`` is None at singular nodes."""
        values, skipped = [], []
        for j in range(n_grid):
            theta = 2 * np.pi * j / n_grid
            try:
                values.append(self(theta))
            except SingularGramError:
                values.append(None)
                skipped.append(j)
        return values, skipped


@dataclass(frozen=True)
class VNDimension:
    value: float
    skipped: tuple
    reliable: bool


def vn_dimension(Q: PointwiseProjector, n_grid: int = 256) -> VNDimension:
    """Grid average of ``tr Q(theta)``; unreliable if more than 1% of nodes are singular."""
    if n_grid < 16:
        raise ValueError("grid needs at least 16 nodes")
    values, skipped = Q.sample(n_grid)
    traces = [np.trace(v).real for v in values if v is not None]
    value = float(np.mean(traces)) if traces else float("nan")
    return VNDimension(value, tuple(skipped), len(skipped) <= 0.01 * n_grid)


@dataclass
class OrthogonalityReport:
    n_grid: int
    idempotence: float
    self_adjointness: float
    mutual: float
    completeness: float
    skipped: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "n_grid": self.n_grid,
            "idempotence": self.idempotence,
            "self_adjointness": self.self_adjointness,
            "mutual_orthogonality": self.mutual,
            "completeness": self.completeness,
            "skipped_nodes": self.skipped,
        }


def _sup(M: np.ndarray) -> float:
    return float(np.max(np.abs(M))) if M.size else 0.0


def orthogonality_report(entries, n_grid: int = 256) -> OrthogonalityReport:
    """Largest deviations over the grid from idempotence, self-adjointness,
    pairwise orthogonality and summing to the identity.  Nothing is asserted."""
    projs = [PointwiseProjector(L, Lp) for L, Lp in entries]
    idem = adj = mutual = comp = 0.0
    skipped = []
    for j in range(n_grid):
        theta = 2 * np.pi * j / n_grid
        try:
            Qs = [P(theta) for P in projs]
        except SingularGramError:
            skipped.append(j)
            continue
        for i, Q in enumerate(Qs):
            idem = max(idem, _sup(Q @ Q - Q))
            adj = max(adj, _sup(Q.conj().T - Q))
            for k, R in enumerate(Qs):
                if k != i:
                    mutual = max(mutual, _sup(Q @ R))
        if Qs:
            comp = max(comp, _sup(sum(Qs) - np.eye(Qs[0].shape[0])))
    return OrthogonalityReport(n_grid, idem, adj, mutual, comp, skipped)
