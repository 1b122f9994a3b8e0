"""
Jackson calculus basics
=======================

The q-derivative, the Jackson integral and the two q-exponentials, checked
against their classical counterparts.
"""

import numpy as np

from qheat.qcore import (QParams, big_E_q, log_big_E_q, q_cos, q_derivative, q_integral,
                         q_sin, small_e_q_neg)

ctx = QParams(q=0.5)

# D_q x^n = [n]_q x^{n-1}; with q = 0.5, [3]_q = 1.75
print("D_q x^3 at x=1:", q_derivative(lambda x: x**3, 1.0, ctx))

# The Jackson integral sums f on the points q^m with weights (1-q) q^m
print("int_0^1 x^2 d_q x:", q_integral(lambda x: x * x, 0.0, 1.0, ctx), "vs 1/[3]_q =", 1 / 1.75)

# As q -> 1 the q-derivative approaches the ordinary one
for q in (0.9, 0.99, 0.999):
    c = QParams(q=q)
    err = max(abs(q_derivative(lambda x: x**3, x, c) - 3 * x * x) for x in np.linspace(0.1, 1, 10))
    print(f"q={q}: max |D_q x^3 - 3x^2| = {err:.3e}")

# E_q is a convergent product for every x >= 0, and e_q^{-t} is its reciprocal.
# For large arguments only the log form is usable.
for t in (1.0, 10.0, 1e4):
    print(f"t={t:g}: E_q={big_E_q(t, ctx):.6e}  e_q^-t={small_e_q_neg(t, ctx):.6e}")
print("log E_q at 1e200:", log_big_E_q(1e200, QParams(q=0.5, m_max=1000)))

# q-trigonometric functions; their terms peak far above 1 for larger z,
# so the sums are carried out in extended precision
for z in (0.5, 3.0, 60.0):
    print(f"z={z}: sin(z;q^2)={q_sin(z, ctx):+.12f}  cos(z;q^2)={q_cos(z, ctx):+.12f}")
