"""End-to-end driver: sketch-based rangefinder, volume-sampled pivot
selection, and construction of the interpolation matrix W for the three
output variants, plus residual evaluation.

Variants
--------
``type1``
    ``W = Q @ inv(Q[S, :])``, built from the sampler's QR factors with one
    orthogonal apply and one triangular solve, with no extra factorization.
``type2``
    ``W = A @ pinv(A[S, :])``; the row-span-optimal projection, never worse
    than type1 in Frobenius norm for the same pivots.
``osid``
    ``W = (A @ Phi) @ pinv(A[S, :] @ Phi)`` for a fresh oversampled sketch
    ``Phi``; a fast approximation to type2.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .errors import DimensionMismatchError, InvalidParamError, RankDeficientError
from .linalg import apply_pinv_right, orth, svd_pinv_apply
from .samplers import PivotSet, rejection_rpqr
from .sketch import sparse_sign_embedding, sketch_apply

VARIANTS = ("type1", "type2", "osid")


@dataclass(frozen=True)
class ArpConfig:
    """Knobs for :func:`arp_decompose`.

    ``oversample`` only matters for the ``osid`` variant (sketch width
    ``round(oversample * k)``, padded up to a multiple of ``zeta``).
    """

    k: int
    zeta: int = 4
    oversample: float = 2.0
    variant: str = "osid"
    seed: object = None
    max_rounds: int = 64

    def __post_init__(self):
        if self.k < 1:
            raise InvalidParamError("k must be >= 1")
        if self.zeta < 1:
            raise InvalidParamError("zeta must be >= 1")
        if self.oversample < 1.0:
            raise InvalidParamError("oversample must be >= 1")
        if self.variant not in VARIANTS:
            raise InvalidParamError(f"variant must be one of {VARIANTS}")
        if self.max_rounds < 1:
            raise InvalidParamError("max_rounds must be >= 1")


@dataclass(frozen=True)
class InterpolativeDecomposition:
    """A row interpolative decomposition ``A ~= W @ A[S, :]``.

    ``w[S, :]`` equals the identity (to 1e-10) whenever the inverted or
    pseudoinverted factor had full numerical rank. ``effective_rank`` is the
    number of pivots actually produced, which drops below ``config.k`` when
    the rangefinder detects lower numerical rank. ``pinv_fallback`` flags
    that a rank-deficient pseudoinverse was replaced by its truncated-SVD
    variant.
    """

    pivots: PivotSet
    w: np.ndarray
    variant: str
    effective_rank: int
    config: ArpConfig
    pinv_fallback: bool = False


def _round_up_multiple(k, zeta):
    return ((k + zeta - 1) // zeta) * zeta


def _take_rows(A, idx):
    if sp.issparse(A):
        return sp.csr_array(A)[idx, :].toarray().astype(np.float64, copy=False)
    return np.asarray(A[idx, :], dtype=np.float64)


def rangefinder(A, k, zeta, rng):
    """Orthonormal ``Q`` approximating the range of ``A`` from one sketch.

    The sketch width is ``k`` rounded up to a multiple of ``zeta``; after
    orthonormalization the basis is truncated back to at most ``k``
    columns. A width below ``k`` reports numerical rank deficiency of the
    sketch and is not an error.
    """
    m, n = A.shape
    if not 1 <= k <= min(m, n):
        raise DimensionMismatchError(f"need 1 <= k <= min{A.shape}, got {k}")
    emb = sparse_sign_embedding(n, _round_up_multiple(k, zeta), zeta, rng)
    Q = orth(sketch_apply(A, emb))
    if Q.shape[1] > k:
        Q = np.ascontiguousarray(Q[:, :k])
    return Q


def _pinv_apply(A, B):
    """``A @ pinv(B)`` with the documented rank-deficiency fallback."""
    try:
        return apply_pinv_right(A, B), False
    except RankDeficientError:
        return svd_pinv_apply(A, B), True


def build_type1_w(Q, qr):
    """Interpolation matrix ``Q @ inv(Q[S, :])`` from the sampler's QR of
    ``Q^T[:, S]``: one implicit orthogonal apply and one triangular solve.
    """
    Z = qr.apply_qt(Q.T).T  # = Q @ U
    return np.ascontiguousarray(
        sla.solve_triangular(qr.R, Z.T, lower=False).T
    )


def arp_decompose(A, cfg, rng=None):
    """Compute a row interpolative decomposition of ``A``.

    A pure function of ``(A, cfg, seed)``: the rangefinder sketch, the
    pivot sampler, and (for ``osid``) the oversampling sketch all consume
    one generator stream seeded from ``cfg.seed`` unless an explicit ``rng``
    is supplied.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    m, n = A.shape
    Q = rangefinder(A, cfg.k, cfg.zeta, rng)
    k_eff = Q.shape[1]
    pivots, qr = rejection_rpqr(Q, rng, max_rounds=cfg.max_rounds)
    S = pivots.indices
    fallback = False
    if cfg.variant == "type1":
        W = build_type1_w(Q, qr)
    elif cfg.variant == "type2":
        W, fallback = _pinv_apply(A, _take_rows(A, S))
    else:  # osid
        width = _round_up_multiple(int(round(cfg.oversample * cfg.k)), cfg.zeta)
        phi = sparse_sign_embedding(n, width, cfg.zeta, rng)
        rows = _take_rows(A, S)
        W, fallback = _pinv_apply(sketch_apply(A, phi), sketch_apply(rows, phi))
    return InterpolativeDecomposition(
        pivots=pivots,
        w=W,
        variant=cfg.variant,
        effective_rank=k_eff,
        config=cfg,
        pinv_fallback=fallback,
    )


def residual_fro(A, dec, block_cols=1024):
    """Frobenius norm of ``A - W @ A[S, :]``.

    Sparse inputs are streamed in column blocks so the full approximation
    is never materialized.
    """
    S = dec.pivots.indices
    W = dec.w
    if A.shape[0] != W.shape[0]:
        raise DimensionMismatchError("W row count must match A")
    if len(S) != W.shape[1]:
        raise DimensionMismatchError("W column count must match the pivot count")
    if not sp.issparse(A):
        A = np.asarray(A, dtype=np.float64)
        return float(np.linalg.norm(A - W @ A[S, :]))
    A = sp.csc_array(A)
    rows = sp.csc_array(sp.csr_array(A)[S, :])
    total = 0.0
    for lo in range(0, A.shape[1], block_cols):
        hi = min(lo + block_cols, A.shape[1])
        diff = A[:, lo:hi].toarray() - W @ rows[:, lo:hi].toarray()
        total += float(np.einsum("ij,ij->", diff, diff))
    return float(np.sqrt(total))
