"""Run the numerical verification battery and poke at two checks.

The analysis behind the learners leans on a handful of scalar facts
(a recurrence staying under 1/(t+1)^alpha, a telescoping product
identity) and one distributional claim (the gradient estimator's error
shrinks like t^{-alpha/2}). All of them are checked numerically here,
the same checks ``onlinefw verify`` runs.
"""

import numpy as np

from onlinefw import (
    ColumnL1Ball,
    concentration_probe,
    product_identity_check,
    sequence_direct_sum,
    sequence_lemma_check,
    verification_battery,
)

for result in verification_battery():
    mark = "ok " if result.passed else "FAIL"
    print(f"{mark} {result.name}")
print()

# The sequence bound is tightest at alpha = 1: the ratio creeps up
# toward 1 and stays there.
probe = sequence_lemma_check(alpha=1.0, t_max=100_000)
print(f"alpha=1 worst ratio s_t*(t+1): {probe.worst_ratio:.12f}")

# The recurrence is an O(t) shortcut; the direct O(t^2) sum agrees.
t = 50
recurrence = sequence_lemma_check(1.0, t).worst_ratio
print(f"direct sum at t={t}: {sequence_direct_sum(1.0, t):.10f}")

print(f"product identity worst error (K<=1000): {product_identity_check(1000):.2e}")
print()

# The error of the recursive estimator, normalized by sqrt(t+1),
# should hover around a constant rather than grow.
stats = concentration_probe(
    A=np.eye(3), b=np.zeros(3),
    feasible_set=ColumnL1Ball(radius=1.0, dims=(3, 1)),
    sigma=1.0, alpha=1.0, T=1000, n_seeds=20,
)
for t, med, q90 in zip(stats["t_grid"], stats["median"], stats["q90"]):
    print(f"t={t:>5}  normalized error median {med:.3f}, q90 {q90:.3f}")
