"""Recover the initial state and the non-local datum from an interior snapshot.

Given the full source ``v(t) f(t, x)``, the snapshot ``u(xi0, .) = nu`` and the
non-local condition ``u(T, .) = alpha u(0, .) + tau``, each mode is inverted
separately:

    gamma_k = A_k (nu_k - int_0^xi0 e_q^{-xi0 lam_k} E_q^{q s lam_k} v(s) f_k(s) d_q s)
    tau_k   = u_k(T) - alpha gamma_k

where ``A_k = 1 / e_q^{-xi0 lam_k} = E_q^{xi0 lam_k}`` is the amplification
factor. ``A_k`` grows like ``exp(c log(lam_k)**2)``, so the problem is severely
ill-posed and only the first ``K_reg`` modes are reconstructed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, NumericalError
from .forward import SourceSpec, mode_solution
from .qcore import QParams, log_big_E_q
from .spectral import ModalSeries, Spectrum, analyze

# Largest accepted log10 of an amplification factor.
DEFAULT_LOG10_BUDGET = 12.0


@dataclass(frozen=True, eq=False)
class InverseInitialProblem:
    src: SourceSpec
    alpha: float
    xi0: float
    nu: Callable[[float], float]
    K_reg: int
    log10_budget: float = DEFAULT_LOG10_BUDGET

    def __post_init__(self):
        if abs(self.alpha) > 1:
            raise DomainError(f"|alpha| must not exceed 1, got {self.alpha}")
        if not (0 < self.xi0 <= self.src.T * (1 + 1e-12)):
            raise DomainError(f"xi0 must lie in (0, T], got {self.xi0}")
        if self.K_reg < 1:
            raise DomainError("K_reg must be a positive integer")

    @property
    def T(self) -> float:
        return self.src.T


@dataclass(frozen=True, eq=False)
class InitialReconstruction:
    gamma: ModalSeries
    tau: ModalSeries
    amplification: np.ndarray  # A_k for k <= K_reg


def _check_modes(prob: InverseInitialProblem, spec: Spectrum):
    if prob.K_reg > spec.K:
        raise DomainError(f"K_reg={prob.K_reg} exceeds the {spec.K} computed modes")


def amplification_factors(prob: InverseInitialProblem, spec: Spectrum, ctx: QParams) -> np.ndarray:
    """``A_k = E_q^{xi0 lam_k}`` for ``k <= K_reg``, enforcing the log10 budget."""
    _check_modes(prob, spec)
    lam = spec.lambdas[: prob.K_reg]
    log10_A = np.asarray(log_big_E_q(prob.xi0 * lam, ctx)) / math.log(10.0)
    for k, la in enumerate(log10_A, start=1):
        if la > prob.log10_budget:
            raise NumericalError(
                f"mode {k} unrecoverable at this precision; lower K_reg "
                f"(log10 amplification {la:.2f} > {prob.log10_budget:g})")
    return 10.0**log10_A


def _source_part(k: int, t: float, src: SourceSpec, spec: Spectrum, ctx: QParams) -> float:
    """Forced part of ``u_k(t)``: the series solution with zero initial data."""
    return mode_solution(k, t, 0.0, src, spec, ctx)


def reconstruct_gamma(prob: InverseInitialProblem, spec: Spectrum, ctx: QParams) -> ModalSeries:
    """Initial state ``u(0, .)`` on the first ``K_reg`` modes; higher modes are zero."""
    amp = amplification_factors(prob, spec, ctx)
    nu_k = analyze(prob.nu, spec).coeffs
    gamma = np.zeros(spec.K)
    for k in range(1, prob.K_reg + 1):
        forced = _source_part(k, prob.xi0, prob.src, spec, ctx)
        gamma[k - 1] = amp[k - 1] * (nu_k[k - 1] - forced)
    return ModalSeries(spec, gamma)


def reconstruct_tau(prob: InverseInitialProblem, gamma: ModalSeries, spec: Spectrum,
                    ctx: QParams) -> ModalSeries:
    """``tau_k = (e_q^{-T lam_k} - alpha) gamma_k + forced_k(T)`` for ``k <= K_reg``."""
    _check_modes(prob, spec)
    lam = spec.lambdas
    tau = np.zeros(spec.K)
    for k in range(1, prob.K_reg + 1):
        decay = math.exp(-log_big_E_q(prob.T * lam[k - 1], ctx))
        forced = _source_part(k, prob.T, prob.src, spec, ctx)
        tau[k - 1] = (decay - prob.alpha) * gamma.coeffs[k - 1] + forced
    return ModalSeries(spec, tau)


def reconstruct(prob: InverseInitialProblem, spec: Spectrum, ctx: QParams) -> InitialReconstruction:
    gamma = reconstruct_gamma(prob, spec, ctx)
    tau = reconstruct_tau(prob, gamma, spec, ctx)
    return InitialReconstruction(gamma, tau, amplification_factors(prob, spec, ctx))


def verify_reconstruction(prob: InverseInitialProblem, rec: InitialReconstruction,
                          spec: Spectrum, ctx: QParams) -> dict:
    """Modal residuals of the snapshot and non-local conditions over the first K_reg modes.

    The solution is re-run forward from ``rec.gamma``.
    """
    n = prob.K_reg
    nu_k = analyze(prob.nu, spec).coeffs[:n]
    u_xi = np.array([mode_solution(k, prob.xi0, rec.gamma.coeffs[k - 1], prob.src, spec, ctx)
                     for k in range(1, n + 1)])
    u_T = np.array([mode_solution(k, prob.T, rec.gamma.coeffs[k - 1], prob.src, spec, ctx)
                    for k in range(1, n + 1)])
    snapshot = u_xi - nu_k
    nonlocal_ = u_T - prob.alpha * rec.gamma.coeffs[:n] - rec.tau.coeffs[:n]
    return {
        "snapshot_residual": float(np.linalg.norm(snapshot)),
        "nonlocal_residual": float(np.linalg.norm(nonlocal_)),
        "snapshot_relative": float(np.linalg.norm(snapshot) / max(np.linalg.norm(nu_k), 1e-300)),
        "amplification": np.asarray(rec.amplification).copy(),
        "lambdas": spec.lambdas[:n].copy(),
    }
