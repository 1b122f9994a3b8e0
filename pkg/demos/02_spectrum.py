"""
Eigenpairs of L = -(1/q) D_{1/q} D_q
====================================

The eigenvalues are the squares of the positive zeros of sin(z; q^2); the
eigenfunctions are sin(sqrt(lam) x; q^2) normalised in the Jackson L^2 norm.
"""

import numpy as np

from qheat.qcore import QParams, apply_L
from qheat.spectral import analyze, basis_function, find_eigenvalues, projection_defect

ctx = QParams(q=0.5)
spec = find_eigenvalues(ctx, 6)

print("lambda_k:", np.array2string(spec.lambdas, precision=6))
print("ratios  :", np.array2string(spec.lambdas[1:] / spec.lambdas[:-1], precision=4), "-> q^-2 =", ctx.q**-2)
print("|sin(sqrt(lam_k); q^2)|:", ["%.1e" % abs(r) for r in spec.characteristic_residuals()])

gram = (spec.basis * spec.weights) @ spec.basis.T
print("Gram error:", np.max(np.abs(gram - np.eye(spec.K))))

# L phi_k = lam_k phi_k, evaluated with the literal three-point stencil
phi2 = basis_function(spec, 2)
for x in spec.lattice.points[1:5]:
    print(f"x={x:.4f}: L phi_2 = {apply_L(phi2, x, ctx):+.10f}, lam_2 phi_2 = {spec.lambdas[1] * phi2(x):+.10f}")

# Every eigenfunction vanishes at x = 1, and that point carries Jackson weight 1-q.
# The constant function therefore keeps a squared defect of at least 1-q.
print("coefficients of f = 1:", np.array2string(analyze(lambda x: 1.0, spec).coeffs, precision=4))
print("squared projection defect of f = 1:", projection_defect(lambda x: 1.0, spec) ** 2)
