"""Dense matrix kernels: orthonormalization, appendable Householder QR,
projections, and stable pseudoinverse application.

Conventions used throughout the library:

* dense matrices are ``numpy.ndarray`` of dtype float64 in C (row-major)
  storage order;
* sparse matrices are ``scipy.sparse.csc_array`` in canonical form
  (sorted row indices, no duplicates);
* the relative cutoff for every triangular-diagonal rank decision is the
  single constant ``RANK_RTOL``.
"""

import math

import numpy as np
import scipy.linalg as sla

from .errors import (
    DimensionMismatchError,
    EmptyMatrixError,
    RankDeficientError,
    RankDeficientUpdateError,
)

RANK_RTOL = 1e-12


def _as_matrix(a, name="matrix"):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionMismatchError(f"{name} must be 2-D, got ndim={a.ndim}")
    return a


def orth(B):
    """Orthonormal basis for the range of ``B``.

    Uses column-pivoted QR. If ``B`` is numerically rank deficient (a
    pivoted R diagonal entry falls below ``RANK_RTOL * ||B||_F``), only the
    leading numerically independent columns are returned, so the output may
    be narrower than ``B``.

    Parameters
    ----------
    B : (m, n) ndarray, m >= n

    Returns
    -------
    Q : (m, r) ndarray, r <= n
        Orthonormal columns spanning range(B).
    """
    B = _as_matrix(B, "B")
    m, n = B.shape
    if n == 0:
        raise EmptyMatrixError("cannot orthonormalize a matrix with zero columns")
    if m < n:
        raise DimensionMismatchError(f"need rows >= cols, got {m}x{n}")
    Q, R, _ = sla.qr(B, mode="economic", pivoting=True)
    tol = RANK_RTOL * np.linalg.norm(B)
    # pivoting makes |R[i,i]| non-increasing, so the rank is a prefix length
    rank = int(np.count_nonzero(np.abs(np.diag(R)) > tol))
    return np.ascontiguousarray(Q[:, :rank])


def squared_row_norms(Q):
    """Entry ``j`` is ``||Q[j, :]||^2``.

    For ``Q`` with orthonormal columns these are the leverage scores and sum
    to the number of columns.
    """
    Q = _as_matrix(Q, "Q")
    return np.einsum("ij,ij->i", Q, Q)


class HouseholderQR:
    """QR factorization of a growing set of columns in ambient dimension ``d``.

    Columns are absorbed append-only via :meth:`update`; previously stored
    reflectors are never modified. The orthogonal factor is kept implicitly
    as a compact product ``I - V T V^T`` of Householder reflectors and is
    never formed; :meth:`project_out`, :meth:`apply_qt` and :meth:`apply_q`
    apply it through matrix products with the stored blocks.

    A freshly constructed object represents the empty factorization:
    ``k_cur == 0`` and ``project_out`` is the identity.
    """

    def __init__(self, d, capacity=8):
        d = int(d)
        if d < 1:
            raise DimensionMismatchError("ambient dimension must be >= 1")
        cap = min(int(capacity), d)
        self.d = d
        self.k_cur = 0
        self._V = np.zeros((d, cap))  # unit-diagonal Householder vectors
        self._T = np.zeros((cap, cap))  # upper-triangular WY block
        self._Rfull = np.zeros((cap, cap))

    @property
    def R(self):
        """The current k_cur x k_cur upper-triangular factor (a view)."""
        k = self.k_cur
        return self._Rfull[:k, :k]

    def _ensure_capacity(self, k_new):
        cap = self._V.shape[1]
        if k_new <= cap:
            return
        new_cap = min(self.d, max(k_new, 2 * cap))
        V = np.zeros((self.d, new_cap))
        T = np.zeros((new_cap, new_cap))
        R = np.zeros((new_cap, new_cap))
        V[:, :cap] = self._V
        T[:cap, :cap] = self._T
        R[:cap, :cap] = self._Rfull
        self._V, self._T, self._Rfull = V, T, R

    def _apply_product_t(self, M):
        # (H_k ... H_1) M = M - V T^T (V^T M)
        k = self.k_cur
        V = self._V[:, :k]
        T = self._T[:k, :k]
        return M - V @ (T.T @ (V.T @ M))

    def _apply_product(self, M):
        # (H_1 ... H_k) M = M - V T (V^T M)
        k = self.k_cur
        V = self._V[:, :k]
        T = self._T[:k, :k]
        return M - V @ (T @ (V.T @ M))

    def update(self, new_cols):
        """Absorb ``new_cols`` (d x a) so the factorization represents the
        concatenation of everything absorbed so far.

        Raises
        ------
        DimensionMismatchError
            Wrong row count, or more columns than the ambient dimension holds.
        RankDeficientUpdateError
            A new column is numerically in the span of the absorbed ones
            (its fresh diagonal entry is below ``RANK_RTOL`` relative to the
            column's norm), the signature of a duplicate pivot.
        """
        C = np.asarray(new_cols, dtype=np.float64)
        if C.ndim == 1:
            C = C[:, None]
        if C.ndim != 2 or C.shape[0] != self.d:
            raise DimensionMismatchError(
                f"expected {self.d} rows, got shape {C.shape}"
            )
        a = C.shape[1]
        if a == 0:
            return
        if self.k_cur + a > self.d:
            raise DimensionMismatchError(
                f"cannot absorb {a} more columns: {self.k_cur} of {self.d} used"
            )
        col_norms2 = np.einsum("ij,ij->j", C, C).tolist()
        self._ensure_capacity(self.k_cur + a)
        W = self._apply_product_t(C) if self.k_cur else C.copy()
        for j in range(a):
            i = self.k_cur
            w = W[:, j]
            x = w[i:]
            normx2 = float(x @ x)
            if normx2 <= (RANK_RTOL * RANK_RTOL) * col_norms2[j] or col_norms2[j] == 0.0:
                raise RankDeficientUpdateError(
                    f"column {j} of the update is numerically dependent "
                    f"(residual^2 {normx2:.3e} vs norm^2 {col_norms2[j]:.3e})"
                )
            alpha = float(x[0])
            beta = -math.copysign(math.sqrt(normx2), alpha)
            v0 = alpha - beta  # no cancellation: signs of alpha and -beta agree
            tau = -v0 / beta
            v = self._V[:, i]
            v[i] = 1.0
            v[i + 1:] = x[1:] / v0
            if j + 1 < a:
                sub = W[i:, j + 1:]
                sub -= (tau * v[i:, None]) * (v[i:] @ sub)
            if i > 0:
                z = self._V[i:, :i].T @ v[i:]  # rows above i of v are zero
                self._T[:i, i] = -tau * (self._T[:i, :i] @ z)
            self._T[i, i] = tau
            self._Rfull[:i, i] = w[:i]
            self._Rfull[i, i] = beta
            self.k_cur = i + 1

    def project_out(self, M):
        """Return ``(I - U U^T) M`` where U is the implicit orthonormal factor.

        Computed via reflector products; the empty factorization returns a
        copy of ``M``.
        """
        M = _as_matrix(M, "M")
        if M.shape[0] != self.d:
            raise DimensionMismatchError(
                f"expected {self.d} rows, got {M.shape[0]}"
            )
        if self.k_cur == 0:
            return M.copy()
        W = self._apply_product_t(M)
        W[: self.k_cur, :] = 0.0
        return self._apply_product(W)

    def apply_qt(self, M):
        """Return ``U^T M`` (k_cur x cols) without forming U."""
        M = _as_matrix(M, "M")
        if M.shape[0] != self.d:
            raise DimensionMismatchError(
                f"expected {self.d} rows, got {M.shape[0]}"
            )
        return self._apply_product_t(M)[: self.k_cur, :]

    def apply_q(self, C):
        """Return ``U C`` (d x cols) for a coefficient block with k_cur rows."""
        C = _as_matrix(C, "C")
        if C.shape[0] != self.k_cur:
            raise DimensionMismatchError(
                f"expected {self.k_cur} rows, got {C.shape[0]}"
            )
        X = np.zeros((self.d, C.shape[1]))
        X[: self.k_cur, :] = C
        return self._apply_product(X)

    def reconstruct(self):
        """The absorbed columns, rebuilt as ``U R`` from the stored factors."""
        return self.apply_q(self.R)


def apply_pinv_right(A, B):
    """Compute ``A @ pinv(B)`` for a full-row-rank ``B`` via QR of ``B^T``.

    Never forms normal equations. ``A`` may be dense or a scipy sparse
    matrix; the result is dense.

    Parameters
    ----------
    A : (m, n) array or sparse
    B : (k, n) ndarray, k <= n

    Raises
    ------
    RankDeficientError
        B's numerical row rank is below k (an R diagonal entry of the QR of
        ``B^T`` falls below ``RANK_RTOL * ||B||_F``). The caller decides the
        fallback.
    """
    B = _as_matrix(B, "B")
    kb, n = B.shape
    if kb > n:
        raise DimensionMismatchError(f"B must have rows <= cols, got {kb}x{n}")
    if A.shape[1] != n:
        raise DimensionMismatchError(
            f"A has {A.shape[1]} columns but B has {n}"
        )
    Qb, Rb = sla.qr(B.T, mode="economic")
    diag = np.abs(np.diag(Rb))
    if kb == 0 or np.min(diag) <= RANK_RTOL * np.linalg.norm(B):
        raise RankDeficientError(
            "B is numerically row rank deficient; pseudoinverse via QR refused"
        )
    Y = A @ Qb
    # A B^+ = (A Q_b) R_b^{-T}; transpose to a standard triangular solve
    return np.ascontiguousarray(sla.solve_triangular(Rb, np.asarray(Y).T, lower=False).T)


def svd_pinv_apply(A, B, rcond=RANK_RTOL):
    """Fallback ``A @ pinv(B)`` through a truncated SVD of ``B``.

    Singular values below ``rcond`` times the largest are treated as zero.
    Used when :func:`apply_pinv_right` refuses a rank-deficient ``B``.
    """
    B = _as_matrix(B, "B")
    return np.asarray(A @ np.linalg.pinv(B, rcond=rcond))
