"""Pivot selection: sequential randomly pivoted QR and the block
rejection sampler that draws volume-sampled row subsets from an
orthonormal basis.

Both samplers own their generator stream for the duration of a call;
independent calls with independent streams are safe to run concurrently.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateDistributionError,
    DimensionMismatchError,
    MaxRoundsExceededError,
    NotOrthonormalError,
    RankDeficientError,
)
from .linalg import HouseholderQR, squared_row_norms

ACCEPT_SLACK = 1e-12  # roundoff allowance on acceptance ratios


@dataclass(frozen=True)
class PivotSet:
    """Ordered, duplicate-free row indices in ``[0, m)``.

    ``indices`` preserves selection order.
    """

    indices: np.ndarray
    m: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.intp)
        object.__setattr__(self, "indices", idx)
        if idx.ndim != 1:
            raise DimensionMismatchError("pivot indices must be 1-D")
        if idx.size:
            values = idx.tolist()
            if min(values) < 0 or max(values) >= self.m:
                raise IndexError(f"pivot index out of range [0, {self.m})")
            if len(set(values)) != idx.size:
                raise ValueError("pivot indices must be distinct")

    def __len__(self):
        return self.indices.size

    def __iter__(self):
        return iter(self.indices.tolist())

    def as_tuple(self):
        """Sorted tuple form, the key used by distribution enumerations."""
        return tuple(sorted(self.indices.tolist()))


@dataclass(frozen=True)
class ProposalBlock:
    """One round of block proposals for the rejection sampler.

    ``gram`` is ``C^T C`` for ``C`` the proposals' residuals after
    projecting out the already-accepted pivots; its diagonal can exceed the
    proposals' leverage scores only by roundoff.
    """

    proposals: np.ndarray
    gram: np.ndarray
    lev_scores: np.ndarray


def _draw_from_cumulative(cum, count, rng):
    u = rng.random(count) * cum[-1]
    idx = np.searchsorted(cum, u, side="right")
    return np.minimum(idx, cum.size - 1)


def _draw_one(cum, total, rng):
    idx = int(np.searchsorted(cum, rng.random() * total, side="right"))
    return idx if idx < cum.size else cum.size - 1


def leverage_multinomial(lev_scores, count, rng):
    """Draw ``count`` iid indices with probability proportional to the
    scores. Zero-score rows are never drawn; tiny negative roundoff is
    treated as zero.

    Raises
    ------
    DegenerateDistributionError
        Every score is <= 0.
    """
    p = np.clip(np.asarray(lev_scores, dtype=np.float64), 0.0, None)
    if p.ndim != 1:
        raise DimensionMismatchError("scores must be 1-D")
    cum = np.cumsum(p)
    if not cum.size or cum[-1] <= 0.0:
        raise DegenerateDistributionError("all sampling weights are zero")
    return _draw_from_cumulative(cum, count, rng)


def rejection_sample_submatrix(block, rng, _accept_bias=0.0):
    """Run the in-block accept/reject pass over a proposal block.

    Walks the proposals in order; proposal ``i`` is accepted when a uniform
    draw scaled by its leverage score lands below the current residual
    diagonal ``H[i, i]``, after which the trailing block of ``H`` is updated
    by Schur-complement elimination so that duplicates of an accepted
    proposal carry zero residual and are never accepted themselves.

    Returns the accepted positions (indices into the block) in order.

    ``_accept_bias`` is a test-only corruption hook: a positive value turns
    the strict accept comparison into a ``<=`` with that much slack, which
    detectably skews the sampled distribution. Leave at 0.
    """
    H = np.array(block.gram, dtype=np.float64)
    lev = np.asarray(block.lev_scores, dtype=np.float64)
    nb = H.shape[0]
    if H.shape != (nb, nb) or lev.shape != (nb,):
        raise DimensionMismatchError("gram must be square and match the scores")
    lev_list = lev.tolist()
    accepted = []
    for i in range(nb):
        hii = float(H[i, i])
        # ratio validity: projections never grow norms beyond roundoff
        assert hii <= lev_list[i] + ACCEPT_SLACK, \
            "acceptance ratio above 1: residual diagonal exceeds leverage score"
        draw = lev_list[i] * rng.random()
        if (draw < hii) if _accept_bias == 0.0 else (draw <= hii + _accept_bias):
            accepted.append(i)
            if hii > 0.0:
                H[i:, i:] -= (H[i:, i, None] / hii) * H[i, i:]
    return accepted


def rejection_rpqr(Q, rng, max_rounds=64, block_size=None, _accept_bias=0.0):
    """Draw a volume-sampled pivot set from an orthonormal-column ``Q``.

    Proposes blocks of pivots iid from the leverage score distribution and
    filters them through :func:`rejection_sample_submatrix`, maintaining an
    incrementally updated Householder QR of the selected columns of ``Q^T``.
    The returned subset of ``k = Q.shape[1]`` rows follows the distribution
    with probability proportional to ``det(Q[S, :])**2``.

    Parameters
    ----------
    Q : (m, k) ndarray with orthonormal columns (checked to 1e-8)
    rng : numpy Generator
    max_rounds : int
        Safety cap on proposal rounds; hitting it signals a numerically
        deficient ``Q``.
    block_size : int, optional
        Proposals per round; defaults to ``k``.

    Returns
    -------
    (PivotSet, HouseholderQR)
        The pivots in selection order, and the QR factorization of
        ``Q^T[:, S]`` accumulated while sampling.
    """
    Q = np.ascontiguousarray(Q, dtype=np.float64)
    if Q.ndim != 2:
        raise DimensionMismatchError("Q must be 2-D")
    m, k = Q.shape
    if k < 1:
        raise DimensionMismatchError("Q must have at least one column")
    G = Q.T @ Q
    G.flat[:: k + 1] -= 1.0
    if np.einsum("ij,ij->", G, G) > 1e-16:  # ||Q^T Q - I||_F <= 1e-8
        raise NotOrthonormalError(
            "columns of Q are not orthonormal to 1e-8"
        )
    lev = squared_row_norms(Q)
    cum = np.cumsum(lev)
    QT = np.ascontiguousarray(Q.T)
    qr = HouseholderQR(k, capacity=k)
    chosen = []
    bs = k if block_size is None else int(block_size)
    for _ in range(max_rounds):
        if len(chosen) == k:
            break
        T = _draw_from_cumulative(cum, bs, rng)
        cols = QT.take(T, axis=1)
        # before anything is accepted the projector is the identity
        C = qr.project_out(cols) if qr.k_cur else cols
        block = ProposalBlock(proposals=T, gram=C.T @ C, lev_scores=lev.take(T))
        accepted = rejection_sample_submatrix(block, rng, _accept_bias=_accept_bias)
        if not accepted:
            continue
        room = k - len(chosen)
        if len(accepted) > room:
            accepted = accepted[:room]
        new_rows = T.take(accepted)
        qr.update(QT.take(new_rows, axis=1))
        chosen.extend(new_rows.tolist())
    if len(chosen) < k:
        raise MaxRoundsExceededError(
            f"{max_rounds} proposal rounds yielded only {len(chosen)} of {k} "
            "pivots; Q is likely numerically deficient"
        )
    return PivotSet(np.array(chosen, dtype=np.intp), m), qr


def rpqr_sequential(M, k, rng):
    """Randomly pivoted QR column selection on ``M`` (d x m).

    Each step samples a column with probability proportional to its current
    squared norm, then orthogonalizes the working copy against it. Squared
    norms are maintained by downdating and fully recomputed whenever a
    downdated value dips below 1e-8 of its value at the last recomputation
    (cancellation guard). The caller's ``M`` is untouched.

    Raises
    ------
    RankDeficientError
        The working matrix's total squared norm fell below
        ``1e-12 * ||M||_F^2`` before ``k`` pivots were found.
    """
    W = np.array(M, dtype=np.float64)  # working copy
    if W.ndim != 2:
        raise DimensionMismatchError("M must be 2-D")
    d, m = W.shape
    if not 1 <= k <= min(d, m):
        raise DimensionMismatchError(f"need 1 <= k <= min{W.shape}, got {k}")
    norms2 = np.einsum("ij,ij->j", W, W)
    total0 = float(norms2.sum())
    ref = norms2.copy()  # values at the last full recomputation
    pivots = []
    for _ in range(k):
        np.clip(norms2, 0.0, None, out=norms2)
        cum = np.cumsum(norms2)
        total = float(cum[-1])
        if total <= 1e-12 * total0:
            raise RankDeficientError(
                f"working matrix numerically exhausted after {len(pivots)} pivots"
            )
        s = _draw_one(cum, total, rng)
        col = W[:, s]
        q = col / math.sqrt(float(col @ col))
        proj = q @ W
        W -= q[:, None] * proj
        W[:, s] = 0.0
        norms2 -= proj * proj
        norms2[s] = 0.0
        ref[s] = -1.0  # sentinel: selected columns never look stale
        pivots.append(s)
        if np.any(norms2 < 1e-8 * ref):
            norms2 = np.einsum("ij,ij->j", W, W)
            norms2[np.asarray(pivots)] = 0.0
            ref = norms2.copy()
            ref[np.asarray(pivots)] = -1.0
    return PivotSet(np.array(pivots, dtype=np.intp), m)
