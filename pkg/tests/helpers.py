"""Random instance generators shared by the test modules."""

import numpy as np

from seppairs.cstar_modules import FiniteCStarAlgebra, StandardModule, submodule_from_flat
from seppairs.hilbert_core import Subspace, orthonormalize


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_subspace(rng, d, k) -> Subspace:
    if k == 0:
        return Subspace.zero(d)
    return orthonormalize(crandn(rng, d, k))


def random_separated_pair(rng, dmin=2, dmax=10):
    """Generic subspaces with dim H + dim K <= d, hence H ∩ K = 0."""
    d = int(rng.integers(dmin, dmax + 1))
    h = int(rng.integers(1, d))
    k = int(rng.integers(1, d - h + 1))
    return random_subspace(rng, d, h), random_subspace(rng, d, k)


def random_projection(rng, d, k):
    return random_subspace(rng, d, k).projection


def random_unit(rng, frame, count):
    """``count`` random unit vectors in the span of an orthonormal ``frame`` (columns)."""
    c = crandn(rng, frame.shape[1], count)
    v = frame @ c
    return v / np.linalg.norm(v, axis=0, keepdims=True)


def random_submodule(rng, module: StandardModule, gens: int = 1):
    return submodule_from_flat(module, crandn(rng, module.dim, gens))


def block_module(blocks=(2, 3), m=1):
    return StandardModule(FiniteCStarAlgebra(tuple(blocks)), m)


def coordinate_submodule(module: StandardModule, mask):
    """Submodule spanned by the flat coordinates selected by ``mask`` (diagonal algebras)."""
    eye = np.eye(module.dim, dtype=np.complex128)
    return submodule_from_flat(module, eye[:, np.asarray(mask, bool)])


def range_submodule(module: StandardModule, ws):
    """``{x : ran X_i ⊆ span(ws[i])}`` where ``X_i`` stacks the block-``i`` coordinates.

    Over a block ``M_n`` the coordinates of ``x ∈ A^m`` stack into an
    ``(m n) x n`` matrix; every right submodule is described by one subspace
    ``W_i ⊆ C^{m n_i}`` per block.  ``ws[i]`` is an ``(m n_i) x r_i`` array.
    """
    alg = module.algebra
    t = alg.total_dim
    cols = []
    for o, n, w in zip(alg.offsets, alg.block_dims, ws):
        w = np.asarray(w, dtype=np.complex128).reshape(module.m * n, -1)
        for j in range(w.shape[1]):
            for c in range(n):
                vec = np.zeros(module.dim, dtype=np.complex128)
                for k in range(module.m):
                    mat = np.zeros((n, n), dtype=np.complex128)
                    mat[:, c] = w[k * n:(k + 1) * n, j]
                    vec[k * t + o:k * t + o + n * n] = mat.reshape(-1)
                cols.append(vec)
    mat = np.column_stack(cols) if cols else np.zeros((module.dim, 0), np.complex128)
    return submodule_from_flat(module, mat)


def random_unitary(rng, d):
    q, r = np.linalg.qr(crandn(rng, d, d))
    return q * (np.diag(r) / np.abs(np.diag(r)))
