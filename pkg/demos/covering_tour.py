"""Walk through one rational covering: branch points, flat charts, pairings."""

import numpy as np

from wdvv_lab import hurwitz_g0 as hg

np.set_printoptions(precision=4, suppress=True, linewidth=110)

cov = hg.RationalCovering([1, -1], [1 / 3, 1 / 3, 1 / 3])
bd = hg.critical_data(cov)
print("critical points:", bd.alpha)
print("branch points:  ", bd.lam)

for cid in ["Phi0", "PhiJ(1)", "Phi2mJ(2)"]:
    print(f"{cid:10s}", hg.flat_chart(cov, cid).coords)

print("flat metric from residues:\n", hg.gram_matrix(cov, bd).real)
print("intersection form:\n", hg.gram_matrix(cov, bd, (1.0, 0.0)))
print("sum rules:", hg.sum_rule_residuals(hg.flat_chart(cov, "Phi0").coords))
print("d lambda / d t (FD vs closed form):", hg.lambda_jacobian_residual(cov, "PhiJ(1)"))
