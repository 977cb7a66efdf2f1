"""Angles and separation verdicts for pairs of subspaces of ``C^d``."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import InternalInconsistency, ShapeMismatch
from .hilbert_core import (
    DEFAULT_TOL,
    Subspace,
    Tolerance,
    intersect,
    operator_norm,
    orth_complement,
    range_of,
    subspace_sum,
)
from .idempotents import canonical_pair, check_projection

__all__ = [
    "PairReport",
    "dixmier_cosine",
    "friedrichs_cosine",
    "is_separated",
    "separation_constants",
    "check_sum_equivalences",
    "DEFAULT_COEFFICIENTS",
]

# (λ1, λ2) pairs with λ1 λ2 ≠ 0 and λ1 + λ2 ≠ 0
DEFAULT_COEFFICIENTS = ((1, 1), (2, -1), (1, 1j), (0.5 + 0.5j, 3), (-1, 3))

# how close c0 may sit to the cutoff before a disagreement is blamed on rounding
_VERDICT_SLACK = 1e-12


@dataclass(frozen=True)
class PairReport:
    c0: float
    c: float
    dim_intersection: int
    separated: bool
    alpha1: float | None
    alpha2: float | None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, obj: dict) -> "PairReport":
        return cls(
            c0=float(obj["c0"]),
            c=float(obj["c"]),
            dim_intersection=int(obj["dim_intersection"]),
            separated=bool(obj["separated"]),
            alpha1=None if obj.get("alpha1") is None else float(obj["alpha1"]),
            alpha2=None if obj.get("alpha2") is None else float(obj["alpha2"]),
        )


def _check_pair(h: Subspace, k: Subspace) -> None:
    if h.ambient_dim != k.ambient_dim:
        raise ShapeMismatch("subspaces live in different ambient spaces")


def dixmier_cosine(h: Subspace, k: Subspace) -> float:
    """``c0(H, K) = ||P_H P_K||``, the largest singular value of ``F_H^* F_K``."""
    _check_pair(h, k)
    if h.dim == 0 or k.dim == 0:
        return 0.0
    s = np.linalg.svd(h.frame.conj().T @ k.frame, compute_uv=False)
    return float(min(1.0, max(0.0, s[0])))


def friedrichs_cosine(h: Subspace, k: Subspace, tol: Tolerance = DEFAULT_TOL) -> float:
    """``c(H, K) = ||P_H P_K - P_{H∩K}||``."""
    _check_pair(h, k)
    if h.dim == 0 or k.dim == 0:
        return 0.0
    common = intersect(h, k, tol)
    val = operator_norm(h.projection @ k.projection - common.projection)
    return float(min(1.0, max(0.0, val)))


def separation_constants(h: Subspace, k: Subspace, tol: Tolerance = DEFAULT_TOL) -> tuple[float, float]:
    """``(1/||Π1||, 1/||Π2||)`` so that ``||x+y|| >= α1||x||`` and ``||x+y|| >= α2||y||``.

    Raises:
        NotSeparated: if ``H ∩ K ≠ 0``.
    """
    _check_pair(h, k)
    if h.dim == 0 or k.dim == 0:
        return 1.0, 1.0
    pair = canonical_pair(h, k, tol)
    return 1.0 / operator_norm(pair.pi1.matrix), 1.0 / operator_norm(pair.pi2.matrix)


def is_separated(h: Subspace, k: Subspace, tol: Tolerance = DEFAULT_TOL) -> PairReport:
    """Separation verdict computed twice: ``c0 < 1 - rank_rel`` and ``dim(H∩K) = 0``.

    Raises:
        InternalInconsistency: when the two criteria disagree and ``c0`` is not
            within rounding distance of the cutoff.
    """
    _check_pair(h, k)
    c0 = dixmier_cosine(h, k)
    c = friedrichs_cosine(h, k, tol)
    dim_common = intersect(h, k, tol).dim
    by_cosine = c0 < 1.0 - tol.rank_rel
    by_intersection = dim_common == 0
    if by_cosine != by_intersection:
        if abs(c0 - (1.0 - tol.rank_rel)) > _VERDICT_SLACK:
            raise InternalInconsistency(
                f"c0 = {c0!r} but dim(H∩K) = {dim_common}; input is ill-conditioned"
            )
        # on the cutoff itself: trust the sine-based intersection
        by_cosine = by_intersection
    alpha1 = alpha2 = None
    if by_intersection:
        alpha1, alpha2 = separation_constants(h, k, tol)
    return PairReport(
        c0=c0,
        c=c,
        dim_intersection=dim_common,
        separated=by_intersection,
        alpha1=alpha1,
        alpha2=alpha2,
    )


def check_sum_equivalences(p, q, tol: Tolerance = DEFAULT_TOL, coefficients=DEFAULT_COEFFICIENTS) -> dict:
    """Range identities for two orthogonal projections.

    Checks ``R(P)+R(Q) = R(P+Q)``, ``R(I-P)+R(I-Q) = R(2I-P-Q)`` and
    ``R(λ1 P + λ2 Q) = R(P)+R(Q)`` for each coefficient pair, plus the
    equivalence ``||PQ|| < 1  ⟺  R(I-P)+R(I-Q)`` is everything.
    """
    p = check_projection(p, tol, "P")
    q = check_projection(q, tol, "Q")
    if p.shape != q.shape:
        raise ShapeMismatch("P and Q differ in shape")
    n = p.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    rp, rq = range_of(p, tol), range_of(q, tol)
    rp_c, rq_c = orth_complement(rp), orth_complement(rq)
    sum_pq = subspace_sum(rp, rq, tol)
    sum_c = subspace_sum(rp_c, rq_c, tol)

    combos = []
    for l1, l2 in coefficients:
        l1, l2 = complex(l1), complex(l2)
        if l1 == 0 or l2 == 0 or l1 + l2 == 0:
            raise ValueError(f"coefficients ({l1}, {l2}) are degenerate")
        holds = range_of(l1 * p + l2 * q, tol).equals(sum_pq, tol)
        combos.append({"lambda1": [l1.real, l1.imag], "lambda2": [l2.real, l2.imag], "holds": holds})

    norm_pq = operator_norm(p @ q)
    return {
        "sum_range": range_of(p + q, tol).equals(sum_pq, tol),
        "complement_sum_range": range_of(2 * eye - p - q, tol).equals(sum_c, tol),
        "combinations": combos,
        "all_combinations": all(c["holds"] for c in combos),
        "dim_sum": sum_pq.dim,
        "norm_pq": norm_pq,
        "norm_pq_below_one": norm_pq < 1.0 - tol.rank_rel,
        "complements_span": sum_c.dim == n,
    }
