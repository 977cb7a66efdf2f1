"""Oblique projections attached to a separated pair.

Builds the canonical annihilating pair ``(Π1, Π2)`` of a separated pair
``(H, K)``, the idempotents ``(I - PQ)^{-1} P (I - PQ)`` determined by two
orthogonal projections, and the pseudoinverse formula for ``Π1 + λ Π2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InternalInconsistency,
    LambdaZero,
    NormNotLessThanOne,
    NotAProjection,
    NotAnnihilating,
    NotIdempotent,
    NotSeparated,
    ShapeMismatch,
)
from .hilbert_core import (
    DEFAULT_TOL,
    Subspace,
    Tolerance,
    as_matrix,
    intersect,
    matrix_from_json,
    matrix_to_json,
    min_positive_singular,
    moore_penrose,
    null_space_of,
    numerical_rank,
    operator_norm,
    orth_complement,
    orthonormalize,
    range_of,
    subspace_sum,
)

__all__ = [
    "Idempotent",
    "CanonicalPair",
    "make_idempotent",
    "check_projection",
    "canonical_pair",
    "koliha_idempotent",
    "mp_linear_combination",
    "range_stability_sweep",
    "check_sum_is_projection",
    "uniqueness_check",
    "DEFAULT_LAMBDAS",
]

DEFAULT_LAMBDAS = (1, -1, 1j, -1j, 2, 0.5, 1 + 1j)


@dataclass(frozen=True, eq=False)
class Idempotent:
    matrix: np.ndarray
    range: Subspace
    nullspace: Subspace

    @property
    def ambient_dim(self) -> int:
        return self.matrix.shape[0]

    def to_dict(self) -> dict:
        return {
            "matrix": matrix_to_json(self.matrix),
            "range": matrix_to_json(self.range.frame),
            "nullspace": matrix_to_json(self.nullspace.frame),
        }

    @classmethod
    def from_dict(cls, obj: dict, tol: Tolerance = DEFAULT_TOL) -> "Idempotent":
        idem = make_idempotent(matrix_from_json(obj["matrix"]), tol)
        for key, sub in (("range", idem.range), ("nullspace", idem.nullspace)):
            if key in obj:
                declared = orthonormalize(matrix_from_json(obj[key]), tol)
                if not declared.equals(sub, tol):
                    raise InternalInconsistency(f"declared {key} does not match the matrix")
        return idem


def make_idempotent(matrix, tol: Tolerance = DEFAULT_TOL) -> Idempotent:
    """Validate ``matrix`` as an idempotent and attach its range and null space."""
    m = as_matrix(matrix, "idempotent")
    if m.shape[0] != m.shape[1]:
        raise ShapeMismatch("an idempotent must be square")
    resid = operator_norm(m @ m - m)
    if resid > tol.eq_abs:
        raise NotIdempotent(f"||M^2 - M|| = {resid:.3e} exceeds {tol.eq_abs:.1e}")
    m = m.copy()
    m.setflags(write=False)
    rng = range_of(m, tol)
    null = null_space_of(m, tol)
    if rng.dim + null.dim != m.shape[0]:
        raise InternalInconsistency("rank-nullity failed for idempotent")
    return Idempotent(m, rng, null)


def check_projection(p, tol: Tolerance = DEFAULT_TOL, name: str = "P") -> np.ndarray:
    m = as_matrix(p, name)
    if m.shape[0] != m.shape[1]:
        raise NotAProjection(f"{name} is not square")
    if operator_norm(m - m.conj().T) > tol.eq_abs or operator_norm(m @ m - m) > tol.eq_abs:
        raise NotAProjection(f"{name} is not a self-adjoint idempotent")
    return m


@dataclass(frozen=True, eq=False)
class CanonicalPair:
    """``Π1(x+y+z) = x``, ``Π2(x+y+z) = y`` for ``x∈H, y∈K, z⊥(H+K)``.

    ``basis_condition`` is the condition number of the assembled basis
    ``[F_H F_K F_W]``; its growth signals the pair approaching non-separation.
    """

    pi1: Idempotent
    pi2: Idempotent
    p_tilde: np.ndarray
    basis_condition: float = field(default=1.0)

    def to_dict(self) -> dict:
        return {
            "pi1": self.pi1.to_dict(),
            "pi2": self.pi2.to_dict(),
            "p_tilde": matrix_to_json(self.p_tilde),
            "basis_condition": self.basis_condition,
            "norm_pi1": operator_norm(self.pi1.matrix),
            "norm_pi2": operator_norm(self.pi2.matrix),
        }

    @classmethod
    def from_dict(cls, obj: dict, tol: Tolerance = DEFAULT_TOL) -> "CanonicalPair":
        return cls(
            Idempotent.from_dict(obj["pi1"], tol),
            Idempotent.from_dict(obj["pi2"], tol),
            matrix_from_json(obj["p_tilde"]),
            float(obj.get("basis_condition", 1.0)),
        )


def canonical_pair(h: Subspace, k: Subspace, tol: Tolerance = DEFAULT_TOL) -> CanonicalPair:
    """Annihilating idempotents with ranges ``H`` and ``K``.

    The basis ``M = [F_H F_K F_W]`` with ``W = (H+K)^⊥`` is invertible exactly
    when ``H ∩ K = 0``; then ``Π1 = M diag(I, 0, 0) M^{-1}`` and likewise ``Π2``.

    Raises:
        NotSeparated: if ``H`` and ``K`` share a direction.
    """
    common = intersect(h, k, tol)
    if common.dim:
        raise NotSeparated(f"H ∩ K has dimension {common.dim}")
    s = subspace_sum(h, k, tol)
    if s.dim != h.dim + k.dim:
        raise NotSeparated("dim(H + K) < dim H + dim K")
    w = orth_complement(s)
    basis = np.hstack([h.frame, k.frame, w.frame])
    inv = np.linalg.inv(basis)
    a, b = h.dim, h.dim + k.dim
    pi1 = h.frame @ inv[:a]
    pi2 = k.frame @ inv[a:b]
    cond = operator_norm(basis) * operator_norm(inv)
    return CanonicalPair(
        make_idempotent(pi1, tol),
        make_idempotent(pi2, tol),
        np.array(s.projection),
        float(cond),
    )


def koliha_idempotent(p, q, tol: Tolerance = DEFAULT_TOL) -> Idempotent:
    """``Π_{P,Q} = (I - PQ)^{-1} P (I - PQ)`` with range and kernel verified.

    The range must equal ``R(P)`` and the kernel ``R(Q) + N(P) ∩ N(Q)``;
    ``Π_{P,Q} P = P`` is checked as well.
    """
    p = check_projection(p, tol, "P")
    q = check_projection(q, tol, "Q")
    if p.shape != q.shape:
        raise ShapeMismatch("P and Q differ in shape")
    n = p.shape[0]
    pq_norm = operator_norm(p @ q)
    if pq_norm >= 1.0 - tol.rank_rel:
        raise NormNotLessThanOne(f"||PQ|| = {pq_norm:.12g}")
    eye = np.eye(n, dtype=np.complex128)
    a = eye - p @ q
    pi = np.linalg.solve(a, p @ a)
    idem = make_idempotent(pi, tol)

    rp = range_of(p, tol)
    rq = range_of(q, tol)
    np_nq = intersect(orth_complement(rp), orth_complement(rq), tol)
    expected_null = subspace_sum(rq, np_nq, tol)
    scale = max(1.0, operator_norm(pi))
    slack = tol.eq_abs * scale
    if not idem.range.equals(rp, Tolerance(tol.rank_rel, min(slack, 0.5))):
        raise InternalInconsistency("R(Π_{P,Q}) != R(P)")
    if not idem.nullspace.equals(expected_null, Tolerance(tol.rank_rel, min(slack, 0.5))):
        raise InternalInconsistency("N(Π_{P,Q}) != R(Q) + N(P)∩N(Q)")
    if operator_norm(pi @ p - p) > slack:
        raise InternalInconsistency("Π_{P,Q} P != P")
    return idem


def _as_idem_matrix(x, tol: Tolerance) -> np.ndarray:
    if isinstance(x, Idempotent):
        return x.matrix
    return make_idempotent(x, tol).matrix


def mp_linear_combination(pi1, pi2, lam: complex, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """``(Π1+Π2)^† (Π1 + Π2/λ) (Π1+Π2)^†``, the pseudoinverse of ``Π1 + λΠ2``.

    Raises:
        NotAnnihilating: unless ``Π1Π2 = Π2Π1 = 0``.
        LambdaZero: for ``λ = 0``.
    """
    a = _as_idem_matrix(pi1, tol)
    b = _as_idem_matrix(pi2, tol)
    if a.shape != b.shape:
        raise ShapeMismatch("Π1 and Π2 differ in shape")
    lam = complex(lam)
    if lam == 0:
        raise LambdaZero("λ must be nonzero")
    if operator_norm(a @ b) > tol.eq_abs or operator_norm(b @ a) > tol.eq_abs:
        raise NotAnnihilating("Π1Π2 and Π2Π1 must vanish")
    s_dag = moore_penrose(a + b, tol)
    return s_dag @ (a + b / lam) @ s_dag


def range_stability_sweep(pi1, pi2, lambdas=DEFAULT_LAMBDAS, tol: Tolerance = DEFAULT_TOL) -> list[dict]:
    """Rank and smallest positive singular value of ``Π1 + λΠ2`` along ``lambdas``.

    Every nonzero ``λ`` must give the rank of ``Π1 + Π2``; ``λ = 0`` is
    reported but left out of that comparison.

    Raises:
        NotSeparated: if ``R(Π1) ∩ R(Π2) ≠ 0``.
        InternalInconsistency: if the rank varies over nonzero ``λ``.
    """
    a = _as_idem_matrix(pi1, tol)
    b = _as_idem_matrix(pi2, tol)
    if intersect(range_of(a, tol), range_of(b, tol), tol).dim:
        raise NotSeparated("R(Π1) ∩ R(Π2) ≠ 0")
    ref = numerical_rank(a + b, tol)
    records = []
    for lam in lambdas:
        lam = complex(lam)
        t = a + lam * b
        rank = numerical_rank(t, tol)
        records.append({
            "lambda": [lam.real, lam.imag],
            "rank": rank,
            "sigma_min": min_positive_singular(t, tol),
            "in_constancy_check": lam != 0,
        })
        if lam != 0 and rank != ref:
            raise InternalInconsistency(
                f"rank of Π1 + λΠ2 is {rank} at λ={lam}, but {ref} at λ=1"
            )
    return records


def check_sum_is_projection(pi1, pi2, tol: Tolerance = DEFAULT_TOL) -> dict:
    """Decide ``Π1 + Π2 = P̃`` and, independently, ``Π1 = Π_{P,Q}, Π2 = Π_{Q,P}``.

    The two verdicts are equivalent; disagreement raises.
    """
    a = _as_idem_matrix(pi1, tol)
    b = _as_idem_matrix(pi2, tol)
    rh, rk = range_of(a, tol), range_of(b, tol)
    if intersect(rh, rk, tol).dim:
        raise NotSeparated("R(Π1) ∩ R(Π2) ≠ 0")
    p_tilde = subspace_sum(rh, rk, tol).projection
    scale = max(1.0, operator_norm(a), operator_norm(b))
    slack = tol.eq_abs * scale
    sum_dist = operator_norm(a + b - p_tilde)
    sum_ok = sum_dist <= slack

    p, q = rh.projection, rk.projection
    k1 = koliha_idempotent(p, q, tol).matrix
    k2 = koliha_idempotent(q, p, tol).matrix
    d1 = operator_norm(a - k1)
    d2 = operator_norm(b - k2)
    koliha_ok = d1 <= slack and d2 <= slack
    if sum_ok != koliha_ok:
        raise InternalInconsistency(
            f"Π1+Π2=P̃ is {sum_ok} but Π_i = Π_(P,Q)/Π_(Q,P) is {koliha_ok}"
        )
    return {
        "sum_is_projection": sum_ok,
        "pi1_is_koliha": d1 <= slack,
        "pi2_is_koliha": d2 <= slack,
        "sum_distance": sum_dist,
        "pi1_distance": d1,
        "pi2_distance": d2,
    }


def uniqueness_check(a, b, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff ``R(b) ⊆ R(a)`` and ``N(b) ⊆ N(a)``; then ``a = b`` is enforced."""
    ia = a if isinstance(a, Idempotent) else make_idempotent(a, tol)
    ib = b if isinstance(b, Idempotent) else make_idempotent(b, tol)
    contained = ib.range.is_subspace_of(ia.range, tol) and ib.nullspace.is_subspace_of(ia.nullspace, tol)
    if contained:
        scale = max(1.0, operator_norm(ia.matrix))
        if operator_norm(ia.matrix - ib.matrix) > tol.eq_abs * scale:
            raise InternalInconsistency("containments hold but the idempotents differ")
    return contained
