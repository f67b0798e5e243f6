"""Pick representative rows of a matrix and compare the three
interpolation variants.

The decomposition approximates A by W @ A[S, :]: a handful of actual rows
of A, recombined by an interpolation matrix W whose restriction to the
selected rows is the identity.
"""

import numpy as np

import rowpick as rp

rng = np.random.default_rng(0)

# a 400 x 300 matrix with polynomially decaying row importance
A = np.arange(1, 401.0)[:, None] ** -1.5 * rng.standard_normal((400, 300))
fro = np.linalg.norm(A)
print(f"matrix: {A.shape[0]} x {A.shape[1]}, ||A||_F = {fro:.3f}")

k = 20
for variant in rp.VARIANTS:
    cfg = rp.ArpConfig(k=k, variant=variant, seed=7)
    dec = rp.arp_decompose(A, cfg)
    rel = rp.residual_fro(A, dec) / fro
    interp_gap = np.linalg.norm(dec.w[dec.pivots.indices, :] - np.eye(k))
    print(
        f"variant {variant:>5}: rel error {rel:.4f}, "
        f"||W[S,:] - I|| = {interp_gap:.2e}, "
        f"first pivots {list(dec.pivots)[:5]}"
    )

# the same seed gives the same pivot set for every variant, so the numbers
# above differ only in how W recombines the selected rows:
#   type2 projects A onto the span of its selected rows (best possible),
#   osid approximates that projection from a narrow sketch,
#   type1 recombines through the range basis only (cheapest, least accurate).
