"""Hodge blocks of the Weyl tensor on four-dimensional neutral geometries.

Run with ``python3 demos/self_duality.py``.  The script compares a product of
two space forms, where the anti-self-dual block is fixed by the scalar
curvature, with tangent bundles of surfaces, whose lifted metrics are
scalar-flat and therefore self-dual.
"""

import numpy as np

from kahlerlift import geometry as G
from kahlerlift import hodge as H
from kahlerlift import lift as L
from kahlerlift.rng import SplitMix64

np.set_printoptions(precision=5, suppress=True)

# sphere(1) x -sphere(2) is pseudo-Kaehler with Scal = 3/2.
prod = G.catalog("sphere_product")
x = prod.sample(SplitMix64(1), 1)[0]
frame = H.adapted_frame(prod, x)
print("adapted frame signs g(e_a, e_a):", frame.signs)
blocks = H.weyl_blocks(prod, x, frame)
print("Scal =", blocks.scal)
print("W- =\n", blocks.w_minus)
print("Scal * diag(1/3, 1/6, 1/6) =\n", blocks.expected_w_minus())
print("largest off-diagonal entry:", np.max(np.abs(blocks.offdiag)))

# The para-Kaehler product has the signed pattern diag(-1/3, -1/6, 1/6).
para = G.catalog("para_product")
xp = para.sample(SplitMix64(1), 1)[0]
bp = H.weyl_blocks(para, xp)
print("\npara product: W- - Scal * pattern:", np.max(np.abs(bp.w_minus - bp.expected_w_minus())))


def lifted_summary(name):
    tg = L.lift_geometry(G.catalog(name))
    geom4 = tg.as_geometry()
    pts = tg.sample(SplitMix64(7), 8)
    v = H.duality_audit(geom4, pts)
    flipped = H.duality_audit(geom4, pts, flip_orientation=True)
    print(f"{name:>10}: max|W-| {v.max_w_minus:.1e}  max|W+| {v.max_w_plus:.1e}  "
          f"max|Scal| {v.max_scal:.1e}  verdict {v.verdict}  (reversed orientation: {flipped.verdict})")


# Tangent bundles: W- always vanishes; W+ vanishes only over constant curvature.
print()
for name in ["sphere", "de_sitter", "bump", "para_bump"]:
    lifted_summary(name)
