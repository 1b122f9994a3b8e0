"""Dirichlet eigenpairs of ``L = -(1/q) D_{1/q} D_q`` on [0, 1] and modal analysis.

Eigenvalues are the squares of the positive zeros of ``sin(z; q^2)``; the
eigenfunctions are ``sin(sqrt(lam) x; q^2) / sqrt(lam)``, normalised here in
``L^2_q[0, 1]``. Roots are kept in extended precision (``Decimal``) because the
characteristic function is extremely steep for higher modes: near the fifth
root at q = 0.5 its slope in ``log(lam)`` is ~4e7, so the nearest double to
``lam_5`` already leaves a residual of ~2e-9.

Note that every eigenfunction vanishes at x = 1, which carries Jackson
weight ``1 - q``; the eigenbasis therefore spans the functions with
``f(1) = 0`` and Parseval is an inequality for anything else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from typing import Callable

import numpy as np

from .errors import DomainError, NumericalError
from .qcore import QLattice, QParams, ScalarFn, _q_trig_decimal

# Bisection stops once the bracket is this narrow (relative) and the
# residual at its midpoint is below RESIDUAL_TARGET.
BRACKET_RTOL = Decimal("1e-13")
RESIDUAL_TARGET = 1e-14
_MIN_BRACKET_RTOL = Decimal("1e-45")
_WORK_DIGITS = 60


def eigen_sine_residual(lam, ctx: QParams) -> float:
    """Characteristic function ``sin(sqrt(lam); q^2)``; its zeros are the eigenvalues."""
    if lam <= 0:
        raise DomainError("eigen_sine_residual needs lambda > 0")
    with localcontext() as dctx:
        dctx.prec = _WORK_DIGITS
        z = Decimal(lam).sqrt() if not isinstance(lam, Decimal) else lam.sqrt()
    return float(_q_trig_decimal(z, ctx.q, odd=True))


def _sine_at(z: Decimal, q: float) -> Decimal:
    return _q_trig_decimal(z, q, odd=True)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """First K eigenpairs together with their values on the x-lattice.

    ``basis[k, m]`` holds the orthonormalised eigenfunction of mode ``k+1`` at
    ``lattice.points[m]``.
    """

    ctx: QParams
    roots: tuple  # Decimal sqrt(lambda_k)
    lattice: QLattice
    norms: np.ndarray
    basis: np.ndarray
    phi_integrals: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def K(self) -> int:
        return len(self.roots)

    @property
    def lambdas(self) -> np.ndarray:
        lam = np.array([float(z * z) for z in self.roots])
        lam.setflags(write=False)
        return lam

    @property
    def weights(self) -> np.ndarray:
        return self.lattice.weights

    def characteristic_residuals(self) -> list[float]:
        """``sin(sqrt(lam_k); q^2)`` evaluated at the stored extended-precision roots."""
        return [float(_sine_at(z, self.ctx.q)) for z in self.roots]

    def check_index(self, k: int):
        if not (1 <= k <= self.K):
            raise DomainError(f"mode index {k} out of range 1..{self.K}")


def _scan_brackets(ctx: QParams, K: int, start: float, ratio: float):
    """Walk ``lam <- lam * ratio`` and return the first K sign-change brackets."""
    brackets = []
    lam = start
    prev = eigen_sine_residual(lam, ctx)
    if prev <= 0:
        raise NumericalError("eigenvalue scan must start below the first eigenvalue")
    while len(brackets) < K:
        nxt = lam * ratio
        try:
            val = eigen_sine_residual(nxt, ctx)
        except NumericalError as exc:
            raise NumericalError("mode cap exceeds representable spectrum") from exc
        if val == 0.0 or (val < 0) != (prev < 0):
            brackets.append((lam, nxt))
        lam, prev = nxt, (val if val != 0.0 else -prev)
    return brackets


def _bisect_root(lo: float, hi: float, q: float) -> Decimal:
    """Bisect ``sin(z; q^2)`` in ``z = sqrt(lam)`` on a sign-change bracket."""
    with localcontext() as dctx:
        dctx.prec = _WORK_DIGITS
        a = Decimal(lo).sqrt()
        b = Decimal(hi).sqrt()
        fa = _sine_at(a, q)
        two = Decimal(2)
        for _ in range(400):
            mid = (a + b) / two
            fm = _sine_at(mid, q)
            width = (b - a) / a
            if width <= BRACKET_RTOL and abs(fm) <= RESIDUAL_TARGET:
                return mid
            if width <= _MIN_BRACKET_RTOL:
                break
            if fm == 0:
                return mid
            if (fm < 0) == (fa < 0):
                a, fa = mid, fm
            else:
                b = mid
    raise NumericalError(f"bisection did not converge on bracket [{lo}, {hi}]")


def find_eigenvalues(ctx: QParams, K: int, start: float = 1e-2) -> Spectrum:
    """Locate the first K eigenvalues and tabulate the orthonormal eigenbasis.

    The scan is geometric with ratio ``q**-0.5``, fine relative to the
    asymptotic spacing ``lam_{k+1}/lam_k -> q**-2``. Each bracket is bisected
    in extended precision.
    """
    if not (1 <= K <= ctx.k_max):
        raise DomainError(f"K must satisfy 1 <= K <= k_max={ctx.k_max}, got {K}")
    q = ctx.q
    brackets = _scan_brackets(ctx, K, start, q**-0.5)
    roots = tuple(_bisect_root(lo, hi, q) for lo, hi in brackets)

    lattice = QLattice.build(1.0, ctx)
    xs = [Decimal(float(x)) for x in lattice.points]
    raw = np.empty((K, len(xs)))
    for k, z in enumerate(roots):
        with localcontext() as dctx:
            dctx.prec = _WORK_DIGITS
            args = [z * x for x in xs]
        raw[k] = [float(_sine_at(arg, q) / z) for arg in args]
    w = lattice.weights
    norms = np.sqrt((raw**2) @ w)
    basis = raw / norms[:, None]
    integrals = basis @ w
    for arr in (norms, basis, integrals):
        arr.setflags(write=False)
    return Spectrum(ctx, roots, lattice, norms, basis, integrals)


def eigenfunction(spec: Spectrum, k: int, x: float) -> float:
    """Orthonormalised eigenfunction of mode k (1-based) at x."""
    spec.check_index(k)
    x = float(x)
    key = (k, x)
    hit = spec._cache.get(key)
    if hit is not None:
        return hit
    m = spec.lattice.index_of(x, rtol=0.0)
    if m is not None:
        val = float(spec.basis[k - 1, m])
    else:
        z = spec.roots[k - 1]
        with localcontext() as dctx:
            dctx.prec = _WORK_DIGITS
            arg = z * Decimal(x)
        val = float(_sine_at(arg, spec.ctx.q) / z) / float(spec.norms[k - 1])
    spec._cache[key] = val
    return val


def basis_function(spec: Spectrum, k: int) -> ScalarFn:
    """Mode k as a :class:`ScalarFn` on ``[0, 1/q]`` (room for the L stencil at x <= 1)."""
    spec.check_index(k)
    return ScalarFn(lambda x: eigenfunction(spec, k, x), 0.0, 1.0 / spec.ctx.q, name=f"phi_{k}")


@dataclass(frozen=True, eq=False)
class ModalSeries:
    """Coefficients of a function in the orthonormal eigenbasis of ``spectrum``."""

    spectrum: Spectrum
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.shape != (self.spectrum.K,):
            raise DomainError(f"expected {self.spectrum.K} coefficients, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __add__(self, other: "ModalSeries") -> "ModalSeries":
        return ModalSeries(self.spectrum, self.coeffs + other.coeffs)

    def __sub__(self, other: "ModalSeries") -> "ModalSeries":
        return ModalSeries(self.spectrum, self.coeffs - other.coeffs)

    def __rmul__(self, s: float) -> "ModalSeries":
        return ModalSeries(self.spectrum, s * self.coeffs)

    def on_lattice(self) -> np.ndarray:
        """Synthesised values at every x-lattice point."""
        return self.coeffs @ self.spectrum.basis

    @property
    def mean(self) -> float:
        """Jackson integral over [0, 1] of the synthesised function."""
        return float(self.coeffs @ self.spectrum.phi_integrals)


def unit_series(spec: Spectrum, k: int) -> ModalSeries:
    spec.check_index(k)
    c = np.zeros(spec.K)
    c[k - 1] = 1.0
    return ModalSeries(spec, c)


def sample_on_lattice(f: Callable[[float], float], spec: Spectrum) -> np.ndarray:
    return np.array([float(f(float(x))) for x in spec.lattice.points])


def analyze(f: Callable[[float], float], spec: Spectrum) -> ModalSeries:
    """Coefficients ``<f, phi_k>`` by the Jackson integral on the spectrum's lattice."""
    vals = sample_on_lattice(f, spec)
    return ModalSeries(spec, spec.basis @ (spec.weights * vals))


def l2q_norm(f: Callable[[float], float], spec: Spectrum) -> float:
    vals = sample_on_lattice(f, spec)
    return math.sqrt(float(spec.weights @ vals**2))


def projection_defect(f: Callable[[float], float], spec: Spectrum) -> float:
    """``||f - P_K f||`` from Parseval: the part of f the retained modes miss."""
    total = l2q_norm(f, spec) ** 2
    captured = float(np.sum(analyze(f, spec).coeffs ** 2))
    return math.sqrt(max(total - captured, 0.0))


def synthesize(m: ModalSeries, x: float) -> float:
    """``sum_k c_k phi_k(x)``."""
    spec = m.spectrum
    return float(sum(c * eigenfunction(spec, k + 1, x) for k, c in enumerate(m.coeffs) if c != 0.0))


def sobolev_norm(m: ModalSeries, s: float) -> float:
    """Modal ``W^s`` norm ``(sum_k lam_k**s c_k**2)**0.5`` over the retained modes."""
    if s < 0:
        raise DomainError("sobolev_norm needs s >= 0")
    return math.sqrt(float(np.sum(m.spectrum.lambdas**s * m.coeffs**2)))
