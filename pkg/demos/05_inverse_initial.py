"""
Recovering the initial state from a later snapshot
==================================================

Each mode is divided by its decay factor e_q^{-xi0 lam_k}, which multiplies
data errors by A_k = E_q^{xi0 lam_k}. The table below shows why only a few
modes can be recovered.
"""

import math

import numpy as np

from qheat.errors import NumericalError
from qheat.forward import SourceSpec, mode_solution
from qheat.inverse_initial import InverseInitialProblem, amplification_factors, reconstruct
from qheat.qcore import QParams
from qheat.spectral import ModalSeries, basis_function, find_eigenvalues, synthesize

ctx = QParams(q=0.5)
spec = find_eigenvalues(ctx, 6)
phi1 = basis_function(spec, 1)
src = SourceSpec(lambda t, x: phi1(x), lambda t: 1.0, 1.0)

table = InverseInitialProblem(src, 0.0, 1.0, lambda x: 0.0, 4, log10_budget=math.inf)
for k, a in enumerate(amplification_factors(table, spec, ctx), start=1):
    print(f"mode {k}: A_k = {a:.3e}")

gamma_true = np.array([1.0, 0.1, 0, 0, 0, 0])
xi0, alpha = 0.5, -0.5
nu = ModalSeries(spec, [mode_solution(k + 1, xi0, gamma_true[k], src, spec, ctx) for k in range(spec.K)])
prob = InverseInitialProblem(src, alpha, xi0, lambda x: synthesize(nu, x), K_reg=2)
rec = reconstruct(prob, spec, ctx)
print("gamma:", rec.gamma.coeffs[:2], "tau:", rec.tau.coeffs[:2])

try:
    reconstruct(InverseInitialProblem(src, alpha, 1.0, lambda x: 0.0, K_reg=4), spec, ctx)
except NumericalError as exc:
    print("K_reg=4:", exc)
