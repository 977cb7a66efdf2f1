"""Dense complex linear algebra kernel.

Operators are plain ``numpy`` arrays of dtype ``complex128``; subspaces of
``C^d`` are carried by orthonormal column frames.  Every rank decision takes
an explicit :class:`Tolerance`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import PreconditionFailed, ShapeMismatch

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "Subspace",
    "as_matrix",
    "orthonormalize",
    "projection",
    "moore_penrose",
    "intersect",
    "subspace_sum",
    "orth_complement",
    "operator_norm",
    "min_positive_singular",
    "numerical_rank",
    "range_of",
    "null_space_of",
    "subspace_distance",
    "matrix_to_json",
    "matrix_from_json",
]


@dataclass(frozen=True)
class Tolerance:
    """Numerical tolerance policy.

    Attributes:
        rank_rel: relative singular value cutoff used for every rank decision.
        eq_abs: absolute threshold for matrix equality (spectral norm).
    """

    rank_rel: float = 1e-10
    eq_abs: float = 1e-9

    def __post_init__(self):
        if not 0.0 < self.rank_rel < 1.0:
            raise PreconditionFailed(f"rank_rel must lie in (0, 1), got {self.rank_rel}")
        if not 0.0 < self.eq_abs < 1.0:
            raise PreconditionFailed(f"eq_abs must lie in (0, 1), got {self.eq_abs}")

    @property
    def sine_cutoff(self) -> float:
        # sin of the angle whose cosine is 1 - rank_rel
        r = self.rank_rel
        return float(np.sqrt(r * (2.0 - r)))


DEFAULT_TOL = Tolerance()


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex128 array (vectors become columns)."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise ShapeMismatch(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise PreconditionFailed(f"{name} has non-finite entries")
    return m


def _svd(a: np.ndarray, full: bool = False):
    if a.size == 0:
        r, c = a.shape
        u = np.eye(r, dtype=np.complex128) if full else np.zeros((r, 0), np.complex128)
        vh = np.eye(c, dtype=np.complex128) if full else np.zeros((0, c), np.complex128)
        return u, np.zeros(0), vh
    return np.linalg.svd(a, full_matrices=full)


def _keep(s: np.ndarray, tol: Tolerance, scale: float | None) -> np.ndarray:
    """Mask of singular values that count toward the numerical rank."""
    if s.size == 0:
        return np.zeros(0, dtype=bool)
    ref = float(s[0]) if scale is None else float(scale)
    return (s > 0.0) & (s >= tol.rank_rel * ref)


def numerical_rank(a, tol: Tolerance = DEFAULT_TOL, scale: float | None = None) -> int:
    s = np.linalg.svd(as_matrix(a), compute_uv=False) if np.size(a) else np.zeros(0)
    return int(_keep(s, tol, scale).sum())


class Subspace:
    """A subspace of ``C^d`` held as an orthonormal frame (``d x dim``).

    Instances are immutable; the frame array is marked read-only.
    """

    def __init__(self, frame, tol: Tolerance = DEFAULT_TOL, check: bool = True):
        f = as_matrix(frame, "frame").copy()
        f.setflags(write=False)
        if check and f.shape[1]:
            err = np.linalg.norm(f.conj().T @ f - np.eye(f.shape[1]), 2)
            if err > tol.eq_abs:
                raise PreconditionFailed(f"frame is not orthonormal (residual {err:.3e})")
        if f.shape[1] > f.shape[0]:
            raise ShapeMismatch("subspace dimension exceeds ambient dimension")
        object.__setattr__(self, "frame", f)

    def __setattr__(self, key, value):
        raise AttributeError("Subspace is immutable")

    @property
    def ambient_dim(self) -> int:
        return self.frame.shape[0]

    @property
    def dim(self) -> int:
        return self.frame.shape[1]

    @cached_property
    def projection(self) -> np.ndarray:
        p = self.frame @ self.frame.conj().T
        p.setflags(write=False)
        return p

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(np.zeros((ambient_dim, 0), dtype=np.complex128), check=False)

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(np.eye(ambient_dim, dtype=np.complex128), check=False)

    def equals(self, other: "Subspace", tol: Tolerance = DEFAULT_TOL) -> bool:
        """Frame-independent equality: ``||P_self - P_other|| <= eq_abs``."""
        return subspace_distance(self, other) <= tol.eq_abs

    def contains(self, vectors, tol: Tolerance = DEFAULT_TOL) -> bool:
        v = as_matrix(vectors)
        if v.shape[0] != self.ambient_dim:
            raise ShapeMismatch("vector length does not match ambient dimension")
        resid = v - self.projection @ v
        scale = max(1.0, float(np.linalg.norm(v, 2))) if v.size else 1.0
        return (float(np.linalg.norm(resid, 2)) if v.size else 0.0) <= tol.eq_abs * scale

    def is_subspace_of(self, other: "Subspace", tol: Tolerance = DEFAULT_TOL) -> bool:
        return other.contains(self.frame, tol)

    def __repr__(self) -> str:
        return f"Subspace(ambient_dim={self.ambient_dim}, dim={self.dim})"


def _same_ambient(h: Subspace, k: Subspace) -> None:
    if h.ambient_dim != k.ambient_dim:
        raise ShapeMismatch(f"ambient dimensions differ: {h.ambient_dim} vs {k.ambient_dim}")


def orthonormalize(vectors, tol: Tolerance = DEFAULT_TOL, scale: float | None = None) -> Subspace:
    """Orthonormal frame for the column space of ``vectors``.

    Columns of the left singular basis are kept when their singular value is at
    least ``tol.rank_rel`` times ``scale`` (default: the largest singular value).
    Pass an explicit ``scale`` when the input is the image of an orthonormal
    frame, so that numerically vanishing images are dropped.
    """
    v = as_matrix(vectors, "vectors")
    u, s, _ = _svd(v)
    keep = _keep(s, tol, scale)
    return Subspace(u[:, keep], check=False)


def range_of(t, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    return orthonormalize(t, tol)


def null_space_of(t, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    m = as_matrix(t)
    _, s, vh = _svd(m, full=True)
    r = int(_keep(s, tol, None).sum())
    return Subspace(vh[r:].conj().T, check=False)


def projection(s: Subspace) -> np.ndarray:
    """Orthogonal projection ``frame @ frame^*`` onto ``s``."""
    return np.array(s.projection)


def moore_penrose(t, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose inverse via a truncated SVD."""
    m = as_matrix(t)
    u, s, vh = _svd(m)
    keep = _keep(s, tol, None)
    if not keep.any():
        return np.zeros((m.shape[1], m.shape[0]), dtype=np.complex128)
    u, s, vh = u[:, keep], s[keep], vh[keep]
    return (vh.conj().T / s) @ u.conj().T


def intersect(h: Subspace, k: Subspace, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """``H ∩ K`` as the principal vectors of ``H`` at angle zero with ``K``.

    Principal angles are read off as sines, the singular values of
    ``(I - P_K) F_H``; a direction counts as shared when its sine is below the
    sine of ``arccos(1 - rank_rel)``.  Sines keep small angles accurate where
    cosines saturate at 1.
    """
    _same_ambient(h, k)
    if h.dim == 0 or k.dim == 0:
        return Subspace.zero(h.ambient_dim)
    fh, fk = h.frame, k.frame
    resid = fh - fk @ (fk.conj().T @ fh)
    _, s, vh = np.linalg.svd(resid, full_matrices=True)
    sines = np.zeros(h.dim)
    sines[: s.size] = s
    # svd orders descending, so the shared directions are the trailing ones
    shared = sines <= tol.sine_cutoff
    frame = fh @ vh.conj().T[:, shared]
    return orthonormalize(frame, tol, scale=1.0)


def subspace_sum(h: Subspace, k: Subspace, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    _same_ambient(h, k)
    return orthonormalize(np.hstack([h.frame, k.frame]), tol, scale=1.0)


def orth_complement(h: Subspace) -> Subspace:
    d = h.ambient_dim
    if h.dim == 0:
        return Subspace.full(d)
    u, _, _ = np.linalg.svd(h.frame, full_matrices=True)
    return Subspace(u[:, h.dim:], check=False)


def operator_norm(t) -> float:
    m = as_matrix(t)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def min_positive_singular(t, tol: Tolerance = DEFAULT_TOL) -> float | None:
    """Smallest singular value above the rank cutoff; ``None`` when ``t ≈ 0``.

    In finite dimensions every range is closed; the decay of this value along
    a family of operators is what stands in for losing closed range.
    """
    m = as_matrix(t)
    s = np.linalg.svd(m, compute_uv=False) if m.size else np.zeros(0)
    if s.size == 0 or s[0] <= tol.eq_abs:
        return None
    return float(s[_keep(s, tol, None)][-1])


def subspace_distance(h: Subspace, k: Subspace) -> float:
    """Gap metric ``||P_H - P_K||``."""
    _same_ambient(h, k)
    return operator_norm(h.projection - k.projection)


def matrix_to_json(t) -> dict:
    m = as_matrix(t)
    flat = m.reshape(-1)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in flat],
    }


def matrix_from_json(obj) -> np.ndarray:
    """Parse ``{"rows", "cols", "entries": [[re, im], ...]}`` (row-major)."""
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        entries = obj["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ShapeMismatch(f"malformed matrix object: {exc}") from exc
    if rows < 0 or cols < 0 or len(entries) != rows * cols:
        raise ShapeMismatch(f"expected {rows}x{cols} entries, got {len(entries)}")
    vals = np.empty(rows * cols, dtype=np.complex128)
    for i, pair in enumerate(entries):
        if len(pair) != 2:
            raise ShapeMismatch("complex entries must be [re, im] pairs")
        vals[i] = complex(float(pair[0]), float(pair[1]))
    return as_matrix(vals.reshape(rows, cols))
