"""Structured sparse sign embeddings, constructed and applied implicitly.

An embedding of dimension ``k`` with row sparsity ``zeta`` (``zeta | k``)
places exactly ``zeta`` nonzeros in every row of the implied ``n x k``
matrix: one per contiguous column block of width ``b = k / zeta``, each
equal to ``+-zeta**-0.5``. Every row therefore has unit Euclidean norm.

Floating-point reproducibility contract: products against the embedding
accumulate each output column's contributions in ascending input-row order,
so the implicit application routines below are bit-identical to a product
against :func:`materialize`'s output evaluated in that same canonical order.
"""

from dataclasses import dataclass
from math import sqrt

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatchError, InvalidParamError, InvalidSparsityError


@dataclass(frozen=True)
class SparseSignEmbedding:
    """Implicit representation of one sampled embedding.

    ``signs[i, j]`` and ``block_indices[i, j]`` give the sign and the
    within-block column (0-based, in ``[0, b)``) of row ``i``'s nonzero in
    block ``j``; the actual column is ``j * b + block_indices[i, j]`` and the
    value is ``signs[i, j] * zeta**-0.5``.

    ``seed`` records the constructing seed when one was given, else None
    (determinism then rests with the caller's generator state).
    """

    n: int
    k: int
    zeta: int
    b: int
    signs: np.ndarray
    block_indices: np.ndarray
    seed: object = None


def sparse_sign_embedding(n, k, zeta, rng):
    """Sample a fresh embedding, fully determined by ``(n, k, zeta)`` and
    the generator state.

    Draw order is fixed: one uniform stream consumed row-major over
    ``(i, j)``, sign before block index, so a given seed always yields the
    same embedding.

    Raises
    ------
    InvalidSparsityError
        ``zeta`` does not divide ``k`` or exceeds it.
    """
    n, k, zeta = int(n), int(k), int(zeta)
    if n < 1 or k < 1 or zeta < 1:
        raise InvalidParamError("n, k and zeta must all be >= 1")
    if zeta > k or k % zeta != 0:
        raise InvalidSparsityError(
            f"row sparsity {zeta} must divide the embedding dimension {k}"
        )
    if isinstance(rng, np.random.Generator):
        seed = None
    else:
        seed = rng
        rng = np.random.default_rng(rng)
    b = k // zeta
    u = rng.random((n, zeta, 2))
    signs = np.where(u[:, :, 0] < 0.5, -1.0, 1.0)
    block_indices = np.minimum((u[:, :, 1] * b).astype(np.int64), b - 1)
    return SparseSignEmbedding(
        n=n, k=k, zeta=zeta, b=b, signs=signs, block_indices=block_indices,
        seed=seed,
    )


def materialize(emb):
    """Explicit ``n x k`` sparse matrix (canonical CSC) with ``n * zeta``
    stored entries. Intended for tests and small problems only.
    """
    n, zeta, b = emb.n, emb.zeta, emb.b
    scale = 1.0 / sqrt(zeta)
    rows = np.repeat(np.arange(n), zeta)
    cols = (np.arange(zeta) * b + emb.block_indices).ravel()
    vals = emb.signs.ravel() * scale
    out = sp.csc_array(
        (vals, (rows, cols)), shape=(n, emb.k), dtype=np.float64
    )
    out.sort_indices()
    return out


def apply_right_dense(A, emb):
    """Compute ``A @ Omega`` implicitly in O(zeta * m * n) scalar operations.

    Bit-identical to the materialized product evaluated in the canonical
    accumulation order (see module docstring).
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[1] != emb.n:
        raise DimensionMismatchError(
            f"A must be m x {emb.n}, got shape {A.shape}"
        )
    m = A.shape[0]
    AT = np.ascontiguousarray(A.T)
    out_t = np.zeros((emb.k, m))
    scale = 1.0 / sqrt(emb.zeta)
    tmp = np.empty(m)
    for j in range(emb.zeta):
        base = j * emb.b
        cols = emb.block_indices[:, j]
        w = emb.signs[:, j] * scale
        for i in range(emb.n):
            np.multiply(AT[i], w[i], out=tmp)
            out_t[base + cols[i]] += tmp
    return np.ascontiguousarray(out_t.T)


def apply_right_sparse(A, emb):
    """Same contract as :func:`apply_right_dense` for CSC input, in
    O(zeta * nnz(A)) scalar operations.

    The result is bit-identical to the dense path on a densified copy of
    ``A`` (zero entries only append exact-zero terms to each accumulator).
    """
    if not sp.issparse(A):
        raise DimensionMismatchError("apply_right_sparse requires a sparse matrix")
    if A.shape[1] != emb.n:
        raise DimensionMismatchError(
            f"A must be m x {emb.n}, got shape {A.shape}"
        )
    A = sp.csc_array(A)
    if not A.has_sorted_indices:
        A = A.copy()
        A.sort_indices()
    m = A.shape[0]
    indptr, indices, data = A.indptr, A.indices, A.data
    out_t = np.zeros((emb.k, m))
    scale = 1.0 / sqrt(emb.zeta)
    for j in range(emb.zeta):
        base = j * emb.b
        cols = emb.block_indices[:, j]
        w = emb.signs[:, j] * scale
        for i in range(emb.n):
            lo, hi = indptr[i], indptr[i + 1]
            if lo == hi:
                continue
            out_t[base + cols[i]][indices[lo:hi]] += data[lo:hi] * w[i]
    return np.ascontiguousarray(out_t.T)


def sketch_apply(A, emb):
    """Dispatch ``A @ Omega`` to the dense or sparse implicit path."""
    if sp.issparse(A):
        return apply_right_sparse(A, emb)
    return apply_right_dense(A, emb)
