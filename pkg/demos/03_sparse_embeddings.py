"""Anatomy of the structured sparse sign embedding used for sketching.

Every row of the n x k embedding has exactly zeta nonzeros, one in each
contiguous block of k/zeta columns, with values +-zeta^{-1/2}. Products
against it cost O(zeta) per matrix entry instead of O(k).
"""

import numpy as np

import rowpick as rp

rng = np.random.default_rng(3)
emb = rp.sparse_sign_embedding(n=8, k=8, zeta=2, rng=rng)
omega = rp.materialize(emb).toarray()

print(f"n={emb.n}, k={emb.k}, zeta={emb.zeta}, block width b={emb.b}")
print("signs of the embedding (0 = empty):\n")
print(np.array2string(
    (np.sign(omega) * (omega != 0)).astype(int), separator=" "
))
print(f"\nnonzeros per row: {np.unique(np.sum(omega != 0, axis=1))}")
print(f"row norms:        {np.unique(np.sum(omega * omega, axis=1))}")

# the implicit application never builds the matrix above; it agrees with a
# BLAS product against it to roundoff, and bit for bit with the same sums
# taken in the library's canonical accumulation order
A = rng.standard_normal((5, 8))
implicit = rp.apply_right_dense(A, emb)
print(f"\nmax |implicit - A @ materialize(emb)| = "
      f"{np.max(np.abs(implicit - A @ omega)):.2e}")

# sketch quality: a width-k sketch of a decaying 200x200 matrix captures
# its range nearly as well as the exact rank-k truncation
A = np.arange(1, 201.0)[:, None] ** -2.0 * rng.standard_normal((200, 200))
k = 20
Q = rp.rangefinder(A, k, 4, rng)
sv = np.linalg.svd(A, compute_uv=False)
optimal = np.sqrt(np.sum(sv[k:] ** 2))
err = np.linalg.norm(A - Q @ (Q.T @ A))
print(f"\nrangefinder residual {err:.3e} vs optimal rank-{k} error {optimal:.3e}")
