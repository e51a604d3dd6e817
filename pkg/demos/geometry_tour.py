"""Tour of the feasible sets and their linear minimization oracles.

Every learner in this package avoids projections: the only geometric
primitive it ever calls is ``lmo(direction)``, which returns a vertex
minimizing a linear function. This script shows what those vertices
look like on each set and why the product set makes block-structured
models (like the one-hidden-layer network) just work.
"""

import numpy as np

from onlinefw import ColumnL1Ball, L2Ball, ProductSet, Simplex

rng = np.random.default_rng(0)

# The workhorse set: per-column l1 balls over a weight matrix. The
# minimizer concentrates each column's budget on its largest entry.
ball = ColumnL1Ball(radius=2.0, dims=(4, 3))
direction = rng.standard_normal((4, 3))
vertex = ball.lmo(direction)
print("direction:\n", np.round(direction, 3))
print("lmo vertex (one spike per column):\n", vertex)
print("objective value:", np.vdot(direction, vertex))
print()

# Vertices are extreme points: any feasible point does at least as
# badly on the linear objective.
for trial in range(3):
    p = ball.sample_point(rng)
    assert np.vdot(direction, vertex) <= np.vdot(direction, p) + 1e-12
print("3 random feasible points confirmed worse, as they must be")
print()

# The simplex and the l2 ball answer the same query with different
# geometry: a single coordinate spike, or a rescaled negative gradient.
simplex = Simplex(scale=1.0, dims=(5, 1))
print("simplex lmo:", simplex.lmo(np.array([[0.3], [-0.1], [0.4], [-0.9], [0.0]])).ravel())
sphere = L2Ball(radius=1.0, dims=(3, 1))
print("l2 ball lmo:", np.round(sphere.lmo(np.array([[3.0], [0.0], [4.0]])), 3).ravel())
print()

# Small instances can enumerate their vertices, which is how the test
# suite cross-checks every closed-form oracle.
tiny = ColumnL1Ball(radius=1.0, dims=(2, 1))
print("vertex enumeration of a 2x1 ball:",
      [v.ravel().tolist() for v in tiny.vertex_enumerate()])
print()

# Product sets bolt independent blocks together; the lmo decomposes.
# This is exactly how the network's four weight blocks are constrained.
prod = ProductSet(blocks=(
    ColumnL1Ball(radius=1.0, dims=(2, 2)),
    Simplex(scale=1.0, dims=(3, 1)),
))
flat_direction = rng.standard_normal((prod.dims[0], 1))
print("product-set vertex (flattened):", prod.lmo(flat_direction).ravel())
print("product-set diameter:", round(prod.diameter, 4))
