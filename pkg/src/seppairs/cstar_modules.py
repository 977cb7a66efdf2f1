"""Finite-dimensional C*-algebras, standard modules ``A^m`` and localization.

``A = M_{n_1}(C) ⊕ ... ⊕ M_{n_k}(C)``.  An element of ``E = A^m`` is stored
flat in ``C^D`` (``D = m * sum n_i^2``): coordinate-major, then block, then
the block's entries in row-major order.  The flat Hilbert structure is the
trace pairing ``Tr <x, y>``; for right-A-invariant subspaces its orthogonal
complement coincides with the module complement, so submodule projections are
ordinary orthogonal projections on ``C^D``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import block_diag
from scipy.stats import norm as _normal
from scipy.stats import qmc

from .errors import NotAState, PreconditionFailed, ShapeMismatch, X0InL
from .hilbert_core import (
    DEFAULT_TOL,
    Subspace,
    Tolerance,
    as_matrix,
    intersect,
    matrix_from_json,
    matrix_to_json,
    null_space_of,
    operator_norm,
    orth_complement,
    orthonormalize,
    subspace_sum,
)

__all__ = [
    "FiniteCStarAlgebra",
    "AlgebraElement",
    "ModuleVector",
    "StandardModule",
    "Submodule",
    "State",
    "LocalizedSpace",
    "inner_product",
    "submodule_closure",
    "submodule_from_flat",
    "module_orth_complement",
    "module_intersection",
    "module_sum",
    "is_orthogonally_complemented",
    "localize",
    "localize_submodule",
    "check_complement_localization",
    "is_concordant",
    "check_concordance_via_states",
    "check_intersection_localization",
    "find_separating_state",
    "sphere_points",
    "matrix_unit_states",
]


@dataclass(frozen=True)
class FiniteCStarAlgebra:
    block_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.block_dims)
        if not dims or any(n < 1 for n in dims):
            raise PreconditionFailed(f"block dimensions must be positive, got {self.block_dims}")
        object.__setattr__(self, "block_dims", dims)

    @property
    def total_dim(self) -> int:
        return sum(n * n for n in self.block_dims)

    @property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for n in self.block_dims:
            out.append(acc)
            acc += n * n
        return tuple(out)

    def element(self, blocks) -> "AlgebraElement":
        return AlgebraElement(self, tuple(as_matrix(b) for b in blocks))

    def zero(self) -> "AlgebraElement":
        return self.element([np.zeros((n, n)) for n in self.block_dims])

    def identity(self) -> "AlgebraElement":
        return self.element([np.eye(n) for n in self.block_dims])

    def basis(self) -> list["AlgebraElement"]:
        """Matrix units ``E_rc`` of every block, in flat order."""
        out = []
        for i, n in enumerate(self.block_dims):
            for r in range(n):
                for c in range(n):
                    blocks = [np.zeros((m, m)) for m in self.block_dims]
                    blocks[i][r, c] = 1.0
                    out.append(self.element(blocks))
        return out

    def flatten(self, a: "AlgebraElement") -> np.ndarray:
        return np.concatenate([b.reshape(-1) for b in a.blocks])

    def unflatten(self, v) -> "AlgebraElement":
        v = np.asarray(v, dtype=np.complex128).reshape(-1)
        if v.size != self.total_dim:
            raise ShapeMismatch(f"expected {self.total_dim} entries, got {v.size}")
        return self.element(
            [v[o:o + n * n].reshape(n, n) for o, n in zip(self.offsets, self.block_dims)]
        )

    def to_dict(self) -> dict:
        return {"blocks": list(self.block_dims)}


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    algebra: FiniteCStarAlgebra
    blocks: tuple

    def __post_init__(self):
        dims = self.algebra.block_dims
        if len(self.blocks) != len(dims) or any(b.shape != (n, n) for b, n in zip(self.blocks, dims)):
            raise ShapeMismatch(f"block shapes do not match algebra {dims}")

    def __matmul__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.algebra, tuple(a @ b for a, b in zip(self.blocks, other.blocks)))

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.algebra, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def scale(self, z: complex) -> "AlgebraElement":
        return AlgebraElement(self.algebra, tuple(z * a for a in self.blocks))

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, tuple(a.conj().T for a in self.blocks))

    def norm(self) -> float:
        return max(operator_norm(b) for b in self.blocks)

    def is_positive(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        for b in self.blocks:
            if operator_norm(b - b.conj().T) > tol.eq_abs:
                return False
            if np.linalg.eigvalsh((b + b.conj().T) / 2).min() < -tol.eq_abs:
                return False
        return True

    def allclose(self, other: "AlgebraElement", atol: float) -> bool:
        return all(np.allclose(a, b, rtol=0.0, atol=atol) for a, b in zip(self.blocks, other.blocks))


@dataclass(frozen=True, eq=False)
class ModuleVector:
    coords: tuple

    def __post_init__(self):
        if not self.coords:
            raise ShapeMismatch("a module vector needs at least one coordinate")
        alg = self.coords[0].algebra
        if any(c.algebra != alg for c in self.coords):
            raise ShapeMismatch("coordinates belong to different algebras")

    @property
    def algebra(self) -> FiniteCStarAlgebra:
        return self.coords[0].algebra

    @property
    def m(self) -> int:
        return len(self.coords)

    def flat(self) -> np.ndarray:
        return np.concatenate([self.algebra.flatten(c) for c in self.coords])

    def act(self, a: AlgebraElement) -> "ModuleVector":
        """Right action ``x · a``."""
        return ModuleVector(tuple(c @ a for c in self.coords))

    def to_json(self) -> list:
        return [[matrix_to_json(b) for b in c.blocks] for c in self.coords]

    @classmethod
    def from_json(cls, algebra: FiniteCStarAlgebra, obj) -> "ModuleVector":
        return cls(tuple(algebra.element([matrix_from_json(b) for b in coord]) for coord in obj))


def inner_product(x: ModuleVector, y: ModuleVector) -> AlgebraElement:
    """``<x, y> = sum_k x_k^* y_k``; conjugate-linear in ``x``."""
    if x.algebra != y.algebra or x.m != y.m:
        raise ShapeMismatch("vectors belong to different modules")
    acc = x.algebra.zero()
    for a, b in zip(x.coords, y.coords):
        acc = acc + a.adjoint() @ b
    return acc


@dataclass(frozen=True)
class StandardModule:
    """``E = A^m`` with its flat coordinates."""

    algebra: FiniteCStarAlgebra
    m: int = 1

    def __post_init__(self):
        if int(self.m) < 1:
            raise PreconditionFailed("m must be at least 1")

    @property
    def dim(self) -> int:
        return self.m * self.algebra.total_dim

    def vector(self, flat) -> ModuleVector:
        v = np.asarray(flat, dtype=np.complex128).reshape(-1)
        if v.size != self.dim:
            raise ShapeMismatch(f"expected {self.dim} flat entries, got {v.size}")
        t = self.algebra.total_dim
        return ModuleVector(tuple(self.algebra.unflatten(v[k * t:(k + 1) * t]) for k in range(self.m)))

    def right_action(self, a: AlgebraElement) -> np.ndarray:
        """Matrix ``R`` with ``flat(x · a) = R flat(x)``."""
        # row-major vec(X a) = (I ⊗ a^T) vec(X)
        per_coord = [np.kron(np.eye(b.shape[0]), b.T) for b in a.blocks]
        return block_diag(*(per_coord * self.m)).astype(np.complex128)

    @cached_property
    def action_generators(self) -> tuple:
        return tuple(self.right_action(e) for e in self.algebra.basis())

    def basis_vectors(self) -> list[ModuleVector]:
        eye = np.eye(self.dim)
        return [self.vector(eye[:, u]) for u in range(self.dim)]

    def to_dict(self) -> dict:
        return {"algebra": self.algebra.to_dict(), "m": self.m}


@dataclass(frozen=True, eq=False)
class Submodule:
    module: StandardModule
    flat: Subspace
    generators: tuple = ()

    @property
    def dim(self) -> int:
        return self.flat.dim

    def invariance_residual(self) -> float:
        if self.flat.dim == 0:
            return 0.0
        f = self.flat.frame
        comp = np.eye(self.module.dim) - self.flat.projection
        return max(operator_norm(comp @ (r @ f)) for r in self.module.action_generators)

    def equals(self, other: "Submodule", tol: Tolerance = DEFAULT_TOL) -> bool:
        return self.flat.equals(other.flat, tol)


def _closure_flat(module: StandardModule, vectors: np.ndarray, tol: Tolerance) -> Subspace:
    vectors = as_matrix(vectors)
    if vectors.shape[0] != module.dim:
        raise ShapeMismatch(f"generators must have {module.dim} flat entries")
    if vectors.shape[1] == 0:
        return Subspace.zero(module.dim)
    sub = orthonormalize(vectors, tol)
    while True:
        if sub.dim == 0:
            return sub
        orbit = np.hstack([sub.frame] + [r @ sub.frame for r in module.action_generators])
        grown = orthonormalize(orbit, tol, scale=1.0)
        if grown.dim == sub.dim:
            return grown
        sub = grown


def submodule_closure(module: StandardModule, gens, tol: Tolerance = DEFAULT_TOL) -> Submodule:
    """Smallest right-A-invariant subspace containing ``gens``."""
    gens = tuple(gens)
    cols = [g.flat() for g in gens]
    mat = np.column_stack(cols) if cols else np.zeros((module.dim, 0), np.complex128)
    return Submodule(module, _closure_flat(module, mat, tol), gens)


def submodule_from_flat(module: StandardModule, vectors, tol: Tolerance = DEFAULT_TOL) -> Submodule:
    """Submodule generated by flat column vectors."""
    mat = as_matrix(vectors)
    gens = tuple(module.vector(mat[:, j]) for j in range(mat.shape[1]))
    return Submodule(module, _closure_flat(module, mat, tol), gens)


def _wrap(module: StandardModule, flat: Subspace) -> Submodule:
    # the frame columns serve as generators; they are not materialized
    return Submodule(module, flat)


def _pairwise_inner_norms(module: StandardModule, xs: np.ndarray, gs: np.ndarray) -> np.ndarray:
    """Frobenius norms of ``<x_a, g_b>`` for flat column stacks ``xs``, ``gs``.

    The Frobenius norm bounds the C*-norm from above, so thresholds on it are
    conservative.
    """
    alg = module.algebra
    t = alg.total_dim
    out = np.zeros((xs.shape[1], gs.shape[1]))
    for o, n in zip(alg.offsets, alg.block_dims):
        idx = (np.arange(module.m)[:, None] * t + o + np.arange(n * n)[None, :]).reshape(-1)
        xb = xs[idx].reshape(module.m, n, n, -1)
        gb = gs[idx].reshape(module.m, n, n, -1)
        # <x, g>_rc = sum_k sum_j conj(X_k[j, r]) G_k[j, c]
        z = np.einsum("kjra,kjcb->abrc", xb.conj(), gb)
        out += np.sum(np.abs(z) ** 2, axis=(2, 3))
    return np.sqrt(out)


def module_orth_complement(h: Submodule, tol: Tolerance = DEFAULT_TOL) -> Submodule:
    """``H^⊥ = {x : <x, g> = 0 for all g in H}``.

    Computed as the trace-pairing complement of ``flat(H)``, then confirmed
    against the A-valued inner product on the generators of ``H``.
    """
    comp = orth_complement(h.flat)
    out = _wrap(h.module, comp)
    if h.generators:
        gens = np.column_stack([g.flat() for g in h.generators])
    else:
        gens = h.flat.frame
    if comp.dim and gens.shape[1]:
        norms = _pairwise_inner_norms(h.module, comp.frame, gens)
        scale = np.maximum(1.0, np.linalg.norm(gens, axis=0))
        if np.any(norms > tol.eq_abs * scale[None, :]):
            raise PreconditionFailed("complement is not A-orthogonal; flat(H) is not a submodule")
    return out


def module_intersection(h: Submodule, k: Submodule, tol: Tolerance = DEFAULT_TOL) -> Submodule:
    return _wrap(h.module, intersect(h.flat, k.flat, tol))


def module_sum(h: Submodule, k: Submodule, tol: Tolerance = DEFAULT_TOL) -> Submodule:
    return _wrap(h.module, subspace_sum(h.flat, k.flat, tol))


def is_orthogonally_complemented(h: Submodule, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``flat(H) ⊕ flat(H^⊥)`` fills ``E``: dimension count plus orthogonality."""
    comp = module_orth_complement(h, tol)
    if h.flat.dim + comp.flat.dim != h.module.dim:
        return False
    if h.flat.dim == 0 or comp.flat.dim == 0:
        return True
    return operator_norm(h.flat.frame.conj().T @ comp.flat.frame) <= tol.eq_abs


@dataclass(frozen=True, eq=False)
class State:
    """``f(a) = sum_i Tr(rho_i a_i)`` for density blocks ``rho_i``."""

    algebra: FiniteCStarAlgebra
    densities: tuple

    @classmethod
    def create(cls, algebra: FiniteCStarAlgebra, densities, tol: Tolerance = DEFAULT_TOL) -> "State":
        dens = tuple(as_matrix(d, "density") for d in densities)
        if len(dens) != len(algebra.block_dims):
            raise NotAState("one density block per algebra block is required")
        total = 0.0
        for d, n in zip(dens, algebra.block_dims):
            if d.shape != (n, n):
                raise NotAState(f"density block has shape {d.shape}, expected {(n, n)}")
            if operator_norm(d - d.conj().T) > tol.eq_abs:
                raise NotAState("density block is not Hermitian")
            if np.linalg.eigvalsh((d + d.conj().T) / 2).min() < -tol.eq_abs:
                raise NotAState("density block is not positive semidefinite")
            total += float(np.trace(d).real)
        if abs(total - 1.0) > tol.eq_abs:
            raise NotAState(f"total trace is {total!r}, expected 1")
        dens = tuple((d + d.conj().T) / 2 for d in dens)
        return cls(algebra, dens)

    @classmethod
    def pure(cls, algebra: FiniteCStarAlgebra, block: int, xi) -> "State":
        """Vector state ``a ↦ <a_block xi, xi>``."""
        xi = np.asarray(xi, dtype=np.complex128).reshape(-1)
        nrm = np.linalg.norm(xi)
        if nrm == 0:
            raise NotAState("xi must be nonzero")
        xi = xi / nrm
        dens = [np.zeros((n, n), np.complex128) for n in algebra.block_dims]
        if xi.size != algebra.block_dims[block]:
            raise NotAState("xi has the wrong length for its block")
        dens[block] = np.outer(xi, xi.conj())
        return cls(algebra, tuple(dens))

    @classmethod
    def tracial(cls, algebra: FiniteCStarAlgebra) -> "State":
        """Faithful state ``sum_i Tr(a_i) / sum_i n_i``."""
        total = sum(algebra.block_dims)
        return cls(algebra, tuple(np.eye(n, dtype=np.complex128) / total for n in algebra.block_dims))

    def __call__(self, a: AlgebraElement) -> complex:
        return complex(sum(np.trace(r @ b) for r, b in zip(self.densities, a.blocks)))

    def is_pure(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        nonzero = [d for d in self.densities if operator_norm(d) > tol.eq_abs]
        if len(nonzero) != 1:
            return False
        d = nonzero[0]
        return operator_norm(d @ d - d) <= tol.eq_abs

    def is_faithful(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        return all(np.linalg.eigvalsh(d).min() > tol.eq_abs for d in self.densities)

    def to_dict(self) -> dict:
        return {"densities": [matrix_to_json(d) for d in self.densities]}

    @classmethod
    def from_dict(cls, algebra: FiniteCStarAlgebra, obj, tol: Tolerance = DEFAULT_TOL) -> "State":
        return cls.create(algebra, [matrix_from_json(d) for d in obj["densities"]], tol)


@dataclass(frozen=True, eq=False)
class LocalizedSpace:
    """``E_f`` realized as ``C^dim`` with ``ι_f(x) = quotient_map @ flat(x)``.

    ``quotient_map`` is the square root of the Gram matrix restricted to its
    range, so ``<ι_f x, ι_f y> = f(<x, y>)`` holds by construction.
    """

    module: StandardModule
    state: State
    gram: np.ndarray
    quotient_map: np.ndarray

    @property
    def dim(self) -> int:
        return self.quotient_map.shape[0]

    def iota(self, x) -> np.ndarray:
        v = x.flat() if isinstance(x, ModuleVector) else as_matrix(x)
        return self.quotient_map @ v

    def null_space(self, tol: Tolerance = DEFAULT_TOL) -> Subspace:
        """``N_f`` as the kernel of the Gram matrix."""
        return null_space_of(self.gram, tol)


def _gram(module: StandardModule, f: State) -> np.ndarray:
    # f(<E_rc, E_r'c'>) = delta_rr' rho[c', c]
    per_coord = [np.kron(np.eye(r.shape[0]), r.T) for r in f.densities]
    return block_diag(*(per_coord * module.m)).astype(np.complex128)


def _quotient(module: StandardModule, f: State, tol: Tolerance) -> np.ndarray:
    pieces = []
    for rho in f.densities:
        n = rho.shape[0]
        w, v = np.linalg.eigh(rho.T)
        keep = w > tol.rank_rel
        root = np.sqrt(w[keep])[:, None] * v[:, keep].conj().T
        pieces.append(np.kron(np.eye(n), root))
    per_coord = block_diag(*pieces) if pieces else np.zeros((0, 0))
    q = block_diag(*([per_coord] * module.m))
    return q.astype(np.complex128)


def localize(module: StandardModule, f: State, tol: Tolerance = DEFAULT_TOL, validate: bool = True) -> LocalizedSpace:
    """Localization of ``E`` at the state ``f``.

    With ``validate`` the two descriptions of ``N_f`` (``f(<x,x>) = 0`` versus
    ``f(<y,x>) = 0`` for all ``y``) are compared, as is ``Q^* Q`` with the Gram.
    """
    if f.algebra != module.algebra:
        raise NotAState("state and module use different algebras")
    gram = _gram(module, f)
    q = _quotient(module, f, tol)
    loc = LocalizedSpace(module, f, gram, q)
    if validate:
        if operator_norm(q.conj().T @ q - gram) > tol.eq_abs:
            raise PreconditionFailed("quotient map does not reproduce the Gram matrix")
        n_gram = loc.null_space(tol)
        n_quad = null_space_of(q, tol) if q.shape[0] else Subspace.full(module.dim)
        if not n_gram.equals(n_quad, tol):
            raise PreconditionFailed("the two characterizations of N_f disagree")
    return loc


def localize_submodule(h: Submodule, loc: LocalizedSpace, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """``H_f``: image of ``flat(H)`` in ``E_f``, orthonormalized."""
    if h.module != loc.module:
        raise ShapeMismatch("submodule and localization live over different modules")
    if loc.dim == 0:
        return Subspace.zero(0)
    return orthonormalize(loc.quotient_map @ h.flat.frame, tol, scale=1.0)


def check_complement_localization(h: Submodule, states, tol: Tolerance = DEFAULT_TOL) -> dict:
    """Compare ``(H_f)^⊥`` with ``(H^⊥)_f`` inside ``E_f`` for each state."""
    comp = module_orth_complement(h, tol)
    complemented = is_orthogonally_complemented(h, tol)
    rows = []
    for f in states:
        loc = localize(h.module, f, tol)
        lhs = orth_complement(localize_submodule(h, loc, tol))
        rhs = localize_submodule(comp, loc, tol)
        dist = _gap(lhs, rhs)
        rows.append({"dim_Ef": loc.dim, "distance": dist, "equal": dist <= tol.eq_abs})
    all_equal = all(r["equal"] for r in rows)
    return {
        "complemented": complemented,
        "per_state": rows,
        "all_equal": all_equal,
        "consistent": all_equal or not complemented,
    }


def _gap(a: Subspace, b: Subspace) -> float:
    if a.ambient_dim == 0:
        return 0.0
    return operator_norm(a.projection - b.projection)


def is_concordant(h: Submodule, k: Submodule, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``E = (H∩K) ⊕ closure(H^⊥ + K^⊥)`` as an orthogonal decomposition."""
    common = intersect(h.flat, k.flat, tol)
    perp_sum = subspace_sum(orth_complement(h.flat), orth_complement(k.flat), tol)
    if common.dim + perp_sum.dim != h.module.dim:
        return False
    if common.dim == 0 or perp_sum.dim == 0:
        return True
    return operator_norm(common.frame.conj().T @ perp_sum.frame) <= tol.eq_abs


def check_concordance_via_states(h: Submodule, k: Submodule, states, tol: Tolerance = DEFAULT_TOL) -> dict:
    """Per state, ``(H∩K)_f = ((H^⊥)_f)^⊥ ∩ ((K^⊥)_f)^⊥``."""
    common = module_intersection(h, k, tol)
    hp, kp = module_orth_complement(h, tol), module_orth_complement(k, tol)
    rows = []
    for f in states:
        loc = localize(h.module, f, tol)
        lhs = localize_submodule(common, loc, tol)
        rhs = intersect(
            orth_complement(localize_submodule(hp, loc, tol)),
            orth_complement(localize_submodule(kp, loc, tol)),
            tol,
        )
        dist = _gap(lhs, rhs)
        rows.append({"dim_Ef": loc.dim, "distance": dist, "equal": dist <= tol.eq_abs})
    via_states = all(r["equal"] for r in rows)
    concordant = is_concordant(h, k, tol)
    return {
        "concordant": concordant,
        "via_states": via_states,
        "per_state": rows,
        "agree": concordant == via_states,
    }


def check_intersection_localization(h: Submodule, k: Submodule, states, tol: Tolerance = DEFAULT_TOL) -> dict:
    """Per state, ``(H∩K)_f = H_f ∩ K_f``.

    Required for concordant pairs; for other pairs the outcome is only recorded.
    """
    common = module_intersection(h, k, tol)
    rows = []
    for f in states:
        loc = localize(h.module, f, tol)
        lhs = localize_submodule(common, loc, tol)
        rhs = intersect(localize_submodule(h, loc, tol), localize_submodule(k, loc, tol), tol)
        dist = _gap(lhs, rhs)
        rows.append({"dim_Ef": loc.dim, "distance": dist, "equal": dist <= tol.eq_abs})
    all_equal = all(r["equal"] for r in rows)
    concordant = is_concordant(h, k, tol)
    return {
        "concordant": concordant,
        "per_state": rows,
        "all_equal": all_equal,
        "consistent": all_equal or not concordant,
    }


def sphere_points(n: int, count: int, seed: int = 0) -> np.ndarray:
    """``count`` quasi-uniform unit vectors in ``C^n`` (rows).

    Scrambled Sobol points pushed through the normal quantile and normalized;
    the first ``count`` points do not depend on how many more are requested.
    """
    if count <= 0:
        return np.zeros((0, n), np.complex128)
    engine = qmc.Sobol(d=2 * n, scramble=True, seed=seed)
    m = int(np.ceil(np.log2(count)))
    u = engine.random_base2(m)[:count]
    z = _normal.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    v = z[:, :n] + 1j * z[:, n:]
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def matrix_unit_states(algebra: FiniteCStarAlgebra) -> list[State]:
    """Pure states at the standard basis vectors of every block."""
    out = []
    for i, n in enumerate(algebra.block_dims):
        for j in range(n):
            out.append(State.pure(algebra, i, np.eye(n)[j]))
    return out


def _separation_gap(lsub: Submodule, x0: np.ndarray, f: State, tol: Tolerance) -> float:
    loc = localize(lsub.module, f, tol, validate=False)
    if loc.dim == 0:
        return 0.0
    lf = localize_submodule(lsub, loc, tol)
    v = loc.quotient_map @ x0
    return float(np.linalg.norm(v - lf.projection @ v)) if lf.dim else float(np.linalg.norm(v))


def find_separating_state(lsub: Submodule, x0, tol: Tolerance = DEFAULT_TOL, budget: int = 64, seed: int = 0) -> State | None:
    """A state ``f`` with ``ι_f(x0)`` outside ``L_f``.

    Pure states are scanned block by block (standard basis, then ``budget``
    quasi-random unit vectors), the best is polished by a Nelder-Mead search
    on the sphere, and the tracial state closes the scan.  ``None`` means the
    scan was inconclusive, not that no state exists.

    Raises:
        X0InL: if ``x0`` lies in ``flat(L)``.
    """
    from scipy.optimize import minimize

    module = lsub.module
    x0 = x0.flat() if isinstance(x0, ModuleVector) else np.asarray(x0, np.complex128).reshape(-1)
    if x0.size != module.dim:
        raise ShapeMismatch("x0 does not belong to the module of L")
    if lsub.flat.contains(x0, tol):
        raise X0InL("x0 lies in L")
    alg = module.algebra

    best_gap, best_state = -1.0, None
    for i, n in enumerate(alg.block_dims):
        cands = np.vstack([np.eye(n, dtype=np.complex128), sphere_points(n, budget, seed)])
        gaps = [_separation_gap(lsub, x0, State.pure(alg, i, xi), tol) for xi in cands]
        j = int(np.argmax(gaps))
        xi, gap = cands[j], gaps[j]
        if n > 1:
            def neg(p, i=i, n=n):
                return -_separation_gap(lsub, x0, State.pure(alg, i, p[:n] + 1j * p[n:]), tol)

            res = minimize(neg, np.concatenate([xi.real, xi.imag]), method="Nelder-Mead",
                           options={"maxiter": 200 * n, "xatol": 1e-8, "fatol": 1e-12})
            if -res.fun > gap:
                xi, gap = res.x[:n] + 1j * res.x[n:], -res.fun
        if gap > best_gap:
            best_gap, best_state = gap, State.pure(alg, i, xi)
    if best_gap > tol.eq_abs:
        return best_state
    tracial = State.tracial(alg)
    if _separation_gap(lsub, x0, tracial, tol) > tol.eq_abs:
        return tracial
    return None


def load_module_description(obj: dict, tol: Tolerance = DEFAULT_TOL):
    """Parse the module description format.

    Returns ``(module, submodules, states)`` where ``submodules`` maps names to
    :class:`Submodule` and ``states`` is a list of :class:`State`.
    """
    try:
        alg = FiniteCStarAlgebra(tuple(obj["algebra"]["blocks"]))
        module = StandardModule(alg, int(obj.get("m", 1)))
        subs = {}
        for name, gens in obj.get("submodules", {}).items():
            vecs = [ModuleVector.from_json(alg, g) for g in gens]
            for v in vecs:
                if v.m != module.m:
                    raise ShapeMismatch(f"generator of {name} has {v.m} coordinates, expected {module.m}")
            subs[name] = submodule_closure(module, vecs, tol)
        states = [State.from_dict(alg, s, tol) for s in obj.get("states", [])]
    except (KeyError, TypeError) as exc:
        raise ShapeMismatch(f"malformed module description: {exc}") from exc
    return module, subs, states
