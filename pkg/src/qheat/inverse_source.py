"""Recover the time factor v(t) of the source from the mass ``int_0^1 u d_q x = psi(t)``.

Projecting the equation onto the retained modes and integrating in x gives

    v(t) * m_f(t) = D_q psi(t) + sum_k lam_k I_k u_k(t),

where ``I_k`` is the Jackson integral of mode k and ``m_f(t) = sum_k I_k f_k(t)``
is the mean of the projected source shape. Substituting the series for
``u_k`` turns this into the Volterra equation

    v(t) = psi_hat(t) - int_0^t v(s) K(t, s) d_q s,

with ``psi_hat`` and ``K`` as in :func:`psi_hat` and :func:`kernel_K`. On the
Jackson time lattice the integral is lower triangular plus a diagonal term,
so the system is solved exactly by back-substitution from the deepest point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, HypothesisError, NumericalError
from .forward import SourceSpec, decay_ratio, time_lattice
from .qcore import QLattice, QParams, log_big_E_q, q_integral
from .spectral import Spectrum, analyze

PIVOT_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class InverseSourceProblem:
    """Data of the inverse source problem.

    ``f`` is the known spatial shape ``f(t, x)``, ``psi`` the measured mass,
    ``phi`` the initial state and ``M1`` the bound required of
    ``1 / |int_0^1 f(t, x) d_q x|``.
    """

    phi: Callable[[float], float]
    f: Callable[[float, float], float]
    psi: Callable[[float], float]
    T: float
    M1: float = 1e6
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.T > 0:
            raise DomainError("horizon T must be positive")
        if not self.M1 > 0:
            raise DomainError("M1 must be positive")

    def source(self, v: Callable[[float], float] = lambda t: 1.0) -> SourceSpec:
        return SourceSpec(self.f, v, self.T)

    def time_lattice(self, ctx: QParams) -> QLattice:
        return time_lattice(self.T, ctx)

    def shape_modes(self, s: float, spec: Spectrum) -> np.ndarray:
        key = ("f", id(spec), float(s))
        if key not in self._cache:
            self._cache[key] = analyze(lambda x: self.f(s, x), spec).coeffs
        return self._cache[key]

    def phi_modes(self, spec: Spectrum) -> np.ndarray:
        key = ("phi", id(spec))
        if key not in self._cache:
            self._cache[key] = analyze(self.phi, spec).coeffs
        return self._cache[key]

    def projected_mean(self, t: float, spec: Spectrum) -> float:
        """``sum_k I_k f_k(t)``: the x-integral of the projected source shape."""
        return float(self.shape_modes(t, spec) @ spec.phi_integrals)


@dataclass(frozen=True, eq=False)
class ReconstructedSource:
    time_lattice: QLattice
    v_values: np.ndarray
    diagnostics: dict

    @property
    def times(self) -> np.ndarray:
        return self.time_lattice.points


def check_hypothesis(prob: InverseSourceProblem, ctx: QParams) -> float:
    """Largest ``1 / |int_0^1 f(t, x) d_q x|`` over the time lattice.

    Raises :class:`HypothesisError` if it exceeds ``prob.M1``.
    """
    worst = 0.0
    for t in prob.time_lattice(ctx).points:
        mean = q_integral(lambda x: prob.f(t, x), 0.0, 1.0, ctx)
        bound = np.inf if mean == 0 else 1.0 / abs(mean)
        if bound > prob.M1:
            raise HypothesisError(
                f"source shape has (near) zero q-mean at t={t:.17g}: "
                f"|int f d_qx| = {abs(mean):.3e} < 1/M1 = {1 / prob.M1:.3e}")
        worst = max(worst, bound)
    return float(worst)


def _dq_psi(prob: InverseSourceProblem, t: float, ctx: QParams) -> float:
    if t == 0:
        raise DomainError("psi_hat needs t > 0")
    q = ctx.q
    return (prob.psi(t) - prob.psi(q * t)) / (t * (1 - q))


def _checked_mean(prob: InverseSourceProblem, t: float, spec: Spectrum) -> float:
    mean = prob.projected_mean(t, spec)
    if abs(mean) * prob.M1 < 1.0:
        raise HypothesisError(
            f"source shape has (near) zero q-mean at t={t:.17g}: "
            f"projected mean {mean:.3e} below 1/M1")
    return mean


def psi_hat(prob: InverseSourceProblem, t: float, spec: Spectrum, ctx: QParams) -> float:
    """``(D_q psi(t) + sum_k e_q^{-t lam_k} lam_k I_k <phi, phi_k>) / m_f(t)``."""
    lam = spec.lambdas
    decay = np.exp(-log_big_E_q(t * lam, ctx))
    free = float(np.sum(decay * lam * spec.phi_integrals * prob.phi_modes(spec)))
    return (_dq_psi(prob, t, ctx) + free) / _checked_mean(prob, t, spec)


def kernel_K(prob: InverseSourceProblem, t: float, s: float, spec: Spectrum,
             ctx: QParams) -> float:
    """``-sum_k e_q^{-t lam_k} E_q^{q s lam_k} lam_k I_k f_k(s) / m_f(t)``."""
    if not (0 < s <= t * (1 + 1e-12)):
        raise DomainError("kernel_K needs 0 < s <= t")
    lam = spec.lambdas
    ratio = np.array([decay_ratio(t, s, l, ctx) for l in lam])
    num = float(np.sum(ratio * lam * spec.phi_integrals * prob.shape_modes(s, spec)))
    return -num / _checked_mean(prob, t, spec)


def volterra_system(prob: InverseSourceProblem, spec: Spectrum, ctx: QParams):
    """Right-hand side ``psi_hat`` and lattice operator ``A`` with ``v = psi_hat - A v``.

    ``A[j, i] = (1-q) t_i K(t_j, t_i)`` for ``i >= j`` and zero otherwise.
    """
    lattice = prob.time_lattice(ctx)
    t = np.asarray(lattice.points)
    n, q = len(t), ctx.q
    lam = spec.lambdas
    F = np.array([prob.shape_modes(s, spec) for s in t])            # (n, K)
    means = np.array([_checked_mean(prob, s, spec) for s in t])
    logE_t = log_big_E_q(np.multiply.outer(t, lam), ctx)              # (n, K)
    logE_qs = log_big_E_q(q * np.multiply.outer(t, lam), ctx)         # (n, K)
    weight = lam * spec.phi_integrals                                  # (K,)
    A = np.zeros((n, n))
    for j in range(n):
        ratio = np.exp(logE_qs[j:] - logE_t[j])                        # (n-j, K)
        kern = -(ratio * weight * F[j:]).sum(axis=1) / means[j]
        A[j, j:] = (1 - q) * t[j:] * kern
    rhs = np.array([psi_hat(prob, float(s), spec, ctx) for s in t])
    return lattice, rhs, A


def solve_volterra(prob: InverseSourceProblem, spec: Spectrum, ctx: QParams) -> ReconstructedSource:
    """Exact lattice solve of the Volterra equation by back-substitution."""
    check_hypothesis(prob, ctx)
    lattice, rhs, A = volterra_system(prob, spec, ctx)
    n = len(rhs)
    v = np.zeros(n)
    for j in range(n - 1, -1, -1):
        pivot = 1.0 + A[j, j]
        if abs(pivot) < PIVOT_FLOOR:
            raise NumericalError(f"degenerate diagonal in Volterra solve at t={lattice.points[j]:.17g}")
        v[j] = (rhs[j] - A[j, j + 1:] @ v[j + 1:]) / pivot
    residual = np.abs(v - rhs + A @ v)
    v.setflags(write=False)
    diagnostics = {
        "volterra_residual": residual,
        "max_scaled_residual": float(np.max(residual / (1 + np.abs(v)))),
        "diagonal": np.diag(A).copy(),
        "last_mode_weight": float(abs(spec.lambdas[-1] * spec.phi_integrals[-1])),
    }
    return ReconstructedSource(lattice, v, diagnostics)


def picard_iterate(prob: InverseSourceProblem, spec: Spectrum, ctx: QParams,
                   n_iter: int = 50, tol: float = 0.0) -> ReconstructedSource:
    """Successive substitution ``v <- psi_hat - A v`` starting from ``psi_hat``.

    Stops after ``n_iter`` sweeps, or earlier once the sup-norm update drops
    to ``tol``. Five consecutive growing updates count as divergence.
    """
    if n_iter < 1:
        raise DomainError("n_iter must be positive")
    check_hypothesis(prob, ctx)
    lattice, rhs, A = volterra_system(prob, spec, ctx)
    v = rhs.copy()
    diffs = []
    growing = 0
    for _ in range(n_iter):
        nxt = rhs - A @ v
        d = float(np.max(np.abs(nxt - v)))
        if diffs and d > diffs[-1]:
            growing += 1
            if growing >= 5:
                raise NumericalError("Picard iteration diverging; check T*sup|K|")
        else:
            growing = 0
        diffs.append(d)
        v = nxt
        if d <= tol:
            break
    v.setflags(write=False)
    diagnostics = {
        "iteration_differences": np.array(diffs),
        "iterations": len(diffs),
        "contraction_bound": float(np.max(np.sum(np.abs(A), axis=1))),
    }
    return ReconstructedSource(lattice, v, diagnostics)
