"""
Forward solve
=============

D_{q,t} u + L u = v(t) f(t, x), u(0, .) = phi, on the time lattice T q^j.
A manufactured solution u = (1 + t^2) phi_1 checks the whole pipeline.
"""

import numpy as np

from qheat.forward import SourceSpec, pde_residual, solve_forward
from qheat.qcore import QParams
from qheat.spectral import basis_function, find_eigenvalues

ctx = QParams(q=0.5)
spec = find_eigenvalues(ctx, 6)
q, lam1 = ctx.q, spec.lambdas[0]
phi1 = basis_function(spec, 1)

# D_q (1 + t^2) = (1 + q) t, so this v makes u = (1 + t^2) phi_1 exact
src = SourceSpec(lambda t, x: phi1(x), lambda t: (1 + q) * t + lam1 * (1 + t * t), T=1.0)
bundle = solve_forward(phi1, src, spec, ctx)

print("t        u_1(t)              1 + t^2")
for t, c in zip(bundle.times[:6], bundle.coeffs[:6, 0]):
    print(f"{t:<8g} {c:.15f}   {1 + t * t:.15f}")

res = max(abs(pde_residual(bundle, src, float(t), float(x), ctx))
          for t in bundle.times[:-1] for x in spec.lattice.points[1:20])
print("max pointwise residual:", res)
print("mass psi(t) at the first lattice times:", np.array2string(bundle.mass[:4], precision=10))
