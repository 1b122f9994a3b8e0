"""Series solution of ``D_{q,t} u + L u = v(t) f(t, x)`` with ``u(0, .) = phi``.

Time lives on the Jackson lattice ``T q**j``. The Jackson integral from 0 to
``t`` only sees points ``t q**m`` that are not below the lattice floor
``T q**M``; this truncation is shared with the inverse solvers, so
forward-generated data are reproduced exactly by them.

Each mode obeys ``D_q u_k + lam_k u_k = v f_k`` exactly on the lattice,
because ``e_q^{-t lam} E_q^{q t lam} = 1 / (1 + (1-q) t lam)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError
from .qcore import QLattice, QParams, log_big_E_q
from .spectral import ModalSeries, Spectrum, analyze, eigenfunction


def time_lattice(T: float, ctx: QParams) -> QLattice:
    """Time lattice ``T q**j`` down to ``T * sqrt(tail_tol)`` (or ``m_max`` points).

    The floor is kept well above ``T * tail_tol``: a Jackson difference quotient
    of measured data at time t loses roughly ``eps / t`` relative precision.
    """
    return QLattice.build(T, ctx, floor=T * math.sqrt(ctx.tail_tol))


@dataclass(frozen=True, eq=False)
class SourceSpec:
    """Source ``v(t) f(t, x)`` on ``[0, T] x [0, 1]``."""

    f: Callable[[float, float], float]
    v: Callable[[float], float]
    T: float
    _modal_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.T > 0:
            raise DomainError("horizon T must be positive")

    def modal(self, s: float, spec: Spectrum) -> np.ndarray:
        """``f_k(s) = <f(s, .), phi_k>`` for every retained mode (cached per s)."""
        key = (id(spec), float(s))
        hit = self._modal_cache.get(key)
        if hit is None:
            hit = analyze(lambda x: self.f(s, x), spec).coeffs
            self._modal_cache[key] = hit
        return hit

    def time_lattice(self, ctx: QParams) -> QLattice:
        return time_lattice(self.T, ctx)


def zero_source(T: float) -> SourceSpec:
    return SourceSpec(lambda t, x: 0.0, lambda t: 0.0, T)


def integration_points(t: float, lattice: QLattice) -> np.ndarray:
    """Points ``t q**m`` at or above the lattice floor (empty for ``t`` below it)."""
    j = lattice.index_of(t)
    if j is not None:
        return lattice.points[j:]
    q, floor = lattice.q, lattice.floor
    pts = []
    s = t
    while s >= floor * (1 - 1e-12):
        pts.append(s)
        s *= q
    return np.array(pts)


def decay_ratio(t: float, s, lam: float, ctx: QParams):
    """``e_q^{-t lam} E_q^{q s lam}`` computed as a difference of logs."""
    q = ctx.q
    return np.exp(log_big_E_q(q * np.asarray(s) * lam, ctx) - log_big_E_q(t * lam, ctx))


def mode_solution(k: int, t: float, phi_k_coeff: float, src: SourceSpec,
                  spec: Spectrum, ctx: QParams) -> float:
    """Coefficient ``u_k(t)`` of the series solution (k is 1-based)."""
    spec.check_index(k)
    if t < 0 or t > src.T * (1 + 1e-12):
        raise DomainError(f"t={t} outside [0, {src.T}]")
    if t == 0:
        return float(phi_k_coeff)
    lam = float(spec.lambdas[k - 1])
    homogeneous = np.exp(-log_big_E_q(t * lam, ctx)) * phi_k_coeff
    pts = integration_points(t, src.time_lattice(ctx))
    if len(pts) == 0:
        return float(homogeneous)
    g = np.array([src.v(s) * src.modal(s, spec)[k - 1] for s in pts])
    ratio = decay_ratio(t, pts, lam, ctx)
    return float(homogeneous + (1 - ctx.q) * np.sum(pts * ratio * g))


@dataclass(frozen=True, eq=False)
class SolutionBundle:
    """Modal solution on the time lattice.

    ``coeffs[j, k]`` is ``u_{k+1}(t_j)`` with ``t_j = T q**j``; ``initial`` holds
    the coefficients at t = 0.
    """

    spectrum: Spectrum
    time_lattice: QLattice
    initial: np.ndarray
    coeffs: np.ndarray
    mass: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return self.time_lattice.points

    @property
    def modal_u(self) -> list[ModalSeries]:
        """``u(t_j, .)`` as a modal series for every lattice time."""
        return [self.series(j) for j in range(len(self.coeffs))]

    def series(self, j: int) -> ModalSeries:
        return ModalSeries(self.spectrum, self.coeffs[j])

    def at_time(self, t: float) -> ModalSeries:
        if t == 0:
            return ModalSeries(self.spectrum, self.initial)
        j = self.time_lattice.index_of(t)
        if j is None:
            raise DomainError(f"t={t} is not on the time lattice")
        return self.series(j)

    def values(self) -> np.ndarray:
        """``u(t_j, x_m)`` for every time- and x-lattice point."""
        return self.coeffs @ self.spectrum.basis


def solve_forward(phi: Callable[[float], float], src: SourceSpec, spec: Spectrum,
                  ctx: QParams, phi_coeffs: np.ndarray | None = None) -> SolutionBundle:
    """Evaluate the series solution at every point of the time lattice.

    ``phi_coeffs`` may be passed instead of analysing ``phi`` (``phi`` is then ignored).
    """
    if phi_coeffs is None:
        phi_coeffs = analyze(phi, spec).coeffs
    phi_coeffs = np.asarray(phi_coeffs, dtype=float)
    lattice = src.time_lattice(ctx)
    times = lattice.points
    coeffs = np.empty((len(times), spec.K))
    for j, t in enumerate(times):
        for k in range(spec.K):
            coeffs[j, k] = mode_solution(k + 1, float(t), phi_coeffs[k], src, spec, ctx)
    mass = coeffs @ spec.phi_integrals
    for arr in (coeffs, mass, phi_coeffs):
        arr.setflags(write=False)
    return SolutionBundle(spec, lattice, phi_coeffs, coeffs, mass)


def pde_residual(bundle: SolutionBundle, src: SourceSpec, t: float, x: float,
                 ctx: QParams) -> float:
    """``D_{q,t} u + L u - v f`` at an interior lattice point ``(t, x)``.

    ``L u`` is taken modally as ``sum_k lam_k u_k(t) phi_k(x)``.
    """
    j = bundle.time_lattice.index_of(t)
    if j is None or j >= bundle.time_lattice.depth:
        raise DomainError("pde_residual needs an interior time-lattice point")
    spec = bundle.spectrum
    phis = np.array([eigenfunction(spec, k + 1, x) for k in range(spec.K)])
    now, before = bundle.coeffs[j], bundle.coeffs[j + 1]
    dt_u = (now - before) @ phis / (t * (1 - ctx.q))
    lu = (spec.lambdas * now) @ phis
    return float(dt_u + lu - src.v(t) * src.f(t, x))


def mass_function(phi_coeffs, src: SourceSpec, spec: Spectrum, ctx: QParams,
                  perturb: np.ndarray | None = None) -> Callable[[float], float]:
    """``psi(t) = int_0^1 u(t, x) d_q x`` of the series solution, as measurement data.

    Defined on the time lattice plus the point one step below its floor (the
    q-derivative of ``psi`` at the floor needs it). ``perturb`` multiplies the
    values by ``1 + perturb`` for noise experiments.
    """
    lattice = src.time_lattice(ctx)
    times = list(lattice.points) + [lattice.floor * ctx.q]
    phi_coeffs = np.asarray(phi_coeffs, dtype=float)
    values = np.array([sum(mode_solution(k + 1, float(t), phi_coeffs[k], src, spec, ctx) * spec.phi_integrals[k]
                           for k in range(spec.K)) for t in times])
    if perturb is not None:
        values = values * (1 + np.asarray(perturb, dtype=float))
    below = times[-1]

    def psi(t: float) -> float:
        j = lattice.index_of(t)
        if j is None:
            if not math.isclose(t, below, rel_tol=1e-12):
                raise DomainError(f"mass requested off the measurement lattice at t={t}")
            j = len(times) - 1
        return float(values[j])

    psi.times = np.array(times)
    return psi
