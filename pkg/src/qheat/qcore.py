"""Jackson q-calculus primitives.

Everything here works for a fixed base ``0 < q < 1`` carried in a
:class:`QParams` context. Functions are pure; types are frozen.

The q-trigonometric series suffer catastrophic cancellation once their
argument is large (the peak term of ``sin(z; q^2)`` near the sixth Dirichlet
eigenvalue at q = 0.5 is ~1e11), so they are summed in extended precision
with :mod:`decimal` and rounded once at the end.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from typing import Callable, Union

import numpy as np

from .errors import DomainError, NumericalError, TruncationWarning

Real = Union[float, int]

# Largest peak term (log10) accepted by the q-trigonometric series.
MAX_PEAK_LOG10 = 300.0
# Extra significant digits carried beyond the size of the peak term.
_GUARD_DIGITS = 30


@dataclass(frozen=True)
class QParams:
    """Global numeric context.

    Parameters
    ----------
    q : float
        Base of the q-calculus, strictly between 0 and 1.
    tail_tol : float
        Relative threshold for truncating infinite sums and products.
    m_max : int
        Hard cap on lattice depth and on the number of series terms.
    k_max : int
        Largest number of eigenmodes a spectrum may be asked for.
    """

    q: float = 0.5
    tail_tol: float = 1e-14
    m_max: int = 60
    k_max: int = 16

    def __post_init__(self):
        if not (0.0 < self.q < 1.0):
            raise DomainError(f"q must satisfy 0 < q < 1, got {self.q!r}")
        if not self.tail_tol > 0:
            raise DomainError(f"tail_tol must be positive, got {self.tail_tol!r}")
        if int(self.m_max) != self.m_max or self.m_max < 1:
            raise DomainError(f"m_max must be a positive integer, got {self.m_max!r}")
        if int(self.k_max) != self.k_max or self.k_max < 1:
            raise DomainError(f"k_max must be a positive integer, got {self.k_max!r}")


@dataclass(frozen=True)
class ScalarFn:
    """A real function on the closed interval ``[a, b]``.

    Calling it outside the interval raises :class:`DomainError`; consumers do
    their own lattice sampling.
    """

    fn: Callable[[float], float]
    a: float = 0.0
    b: float = 1.0
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if not (0.0 <= self.a < self.b):
            raise DomainError(f"invalid domain [{self.a}, {self.b}]")

    def contains(self, x: float) -> bool:
        slack = 1e-13 * max(1.0, abs(self.b))
        return self.a - slack <= x <= self.b + slack

    def __call__(self, x: float) -> float:
        if not self.contains(x):
            raise DomainError(f"point outside function domain: {x!r} not in [{self.a}, {self.b}]")
        return float(self.fn(x))

    def sample(self, points) -> np.ndarray:
        return np.array([self(float(x)) for x in np.asarray(points, dtype=float)])


@dataclass(frozen=True)
class QLattice:
    """The geometric point set ``base * q**m`` for ``m = 0..depth``."""

    base: float
    q: float
    depth: int

    def __post_init__(self):
        if not self.base > 0:
            raise DomainError("lattice base must be positive")
        if not (0.0 < self.q < 1.0):
            raise DomainError("lattice ratio must satisfy 0 < q < 1")
        if self.depth < 0:
            raise DomainError("lattice depth must be non-negative")

    @classmethod
    def build(cls, base: float, ctx: QParams, floor: float | None = None) -> "QLattice":
        """Deepest lattice with ``base*q**depth <= floor``, capped at ``ctx.m_max``.

        ``floor`` defaults to ``ctx.tail_tol * base``.
        """
        if floor is None:
            floor = ctx.tail_tol * base
        if floor >= base:
            depth = 0
        else:
            depth = math.ceil(math.log(floor / base) / math.log(ctx.q))
        return cls(float(base), ctx.q, int(min(depth, ctx.m_max)))

    @property
    def points(self) -> np.ndarray:
        pts = self.base * self.q ** np.arange(self.depth + 1, dtype=float)
        pts.setflags(write=False)
        return pts

    @property
    def weights(self) -> np.ndarray:
        """Jackson weights ``(1-q) * x_m``: the integral over ``[0, base]`` is ``weights @ f(points)``."""
        w = (1.0 - self.q) * self.points
        w.setflags(write=False)
        return w

    @property
    def floor(self) -> float:
        return self.base * self.q ** self.depth

    def __len__(self) -> int:
        return self.depth + 1

    def index_of(self, x: float, rtol: float = 1e-12) -> int | None:
        """Index ``m`` with ``points[m] == x`` up to ``rtol``, or None."""
        if x <= 0:
            return None
        m = round(math.log(x / self.base) / math.log(self.q))
        if 0 <= m <= self.depth and abs(self.base * self.q**m - x) <= rtol * x:
            return int(m)
        return None


def _warn_cap(what: str, m_max: int):
    warnings.warn(f"{what} reached m_max={m_max} terms before meeting the tail tolerance",
                  TruncationWarning, stacklevel=3)


# ---------------------------------------------------------------- q-numbers


def q_number(alpha: Real, ctx: QParams) -> float:
    """The q-real number ``[alpha]_q = (1 - q**alpha) / (1 - q)``."""
    q = ctx.q
    return (1.0 - q**alpha) / (1.0 - q)


def q_factorial(n: int, ctx: QParams) -> float:
    """``[n]_q! = [1]_q [2]_q ... [n]_q`` with ``[0]_q! = 1``."""
    if n < 0 or int(n) != n:
        raise DomainError(f"q-factorial needs a non-negative integer, got {n!r}")
    out = 1.0
    for j in range(1, int(n) + 1):
        out *= q_number(j, ctx)
    return out


# -------------------------------------------------------------- derivatives


def q_derivative(f: Callable[[float], float], x: float, ctx: QParams) -> float:
    """Jackson derivative ``(f(x) - f(qx)) / (x (1 - q))``."""
    if x == 0:
        raise DomainError("q-derivative undefined at zero")
    q = ctx.q
    return (f(x) - f(q * x)) / (x * (1.0 - q))


def q_derivative_inv(f: Callable[[float], float], x: float, ctx: QParams) -> float:
    """The ``D_{1/q}`` difference quotient ``(f(x) - f(x/q)) / (x (1 - 1/q))``."""
    if x == 0:
        raise DomainError("q-derivative undefined at zero")
    q = ctx.q
    if isinstance(f, ScalarFn) and not f.contains(x / q):
        raise DomainError("inverse-q step leaves domain")
    return (f(x) - f(x / q)) / (x * (1.0 - 1.0 / q))


def apply_L(f: Callable[[float], float], x: float, ctx: QParams) -> float:
    """``-(1/q) D_{1/q} D_q f`` at ``x``: a three-point stencil on ``qx, x, x/q``."""
    q = ctx.q
    if isinstance(f, ScalarFn) and not f.contains(x / q):
        raise DomainError("inverse-q step leaves domain")

    def dq(y):
        return q_derivative(f, y, ctx)

    return -q_derivative_inv(dq, x, ctx) / q


# ----------------------------------------------------------------- integral


def q_integral(f: Callable[[float], float], a: float, b: float, ctx: QParams) -> float:
    """Jackson integral of ``f`` over ``[a, b]``.

    ``(1-q) * sum_m q**m (b f(b q**m) - a f(a q**m))``, stopped once the
    geometric bound on the remaining tail (built from the largest ``|x f(x)|``
    seen so far) falls below ``tail_tol * (1 + |partial sum|)``.
    """
    if a < 0 or b <= a:
        raise DomainError("invalid q-integration bounds")
    q, tol = ctx.q, ctx.tail_tol
    terms = []
    partial = 0.0
    envelope = 0.0
    for m in range(ctx.m_max + 1):
        qm = q**m
        xb = b * qm
        fb = f(xb)
        if a > 0:
            xa = a * qm
            fa = f(xa)
        else:
            xa = fa = 0.0
        term = (1.0 - q) * (xb * fb - xa * fa)
        terms.append(term)
        partial += term
        envelope = max(envelope, abs(fb) * b + abs(fa) * a)
        if m >= 2 and envelope * qm * q < tol * (1.0 + abs(partial)):
            return math.fsum(terms)
    _warn_cap("q_integral", ctx.m_max)
    return math.fsum(terms)


def q_integration_by_parts_residual(f, g, a: float, b: float, ctx: QParams) -> float:
    """Defect of the q integration-by-parts identity on ``[a, b]``; ~0 when it holds."""
    q = ctx.q
    lhs = q_integral(lambda x: f(x) * q_derivative(g, x, ctx), a, b, ctx)
    rhs = q_integral(lambda x: g(q * x) * q_derivative(f, x, ctx), a, b, ctx)
    boundary = f(b) * g(b) - f(a) * g(a)
    return lhs + rhs - boundary


# ------------------------------------------------------------ exponentials


def big_E_q(x: float, ctx: QParams) -> float:
    """``E_q^x`` from the product ``prod_m (1 + (1-q) q**m x)``."""
    q, tol = ctx.q, ctx.tail_tol
    c = (1.0 - q) * x
    out = 1.0
    for m in range(ctx.m_max + 1):
        step = c * q**m
        if abs(step) < tol:
            break
        out *= 1.0 + step
        if math.isinf(out) or math.isnan(out):
            raise NumericalError(f"E_q product overflows at x={x!r}; use log_big_E_q")
    else:
        _warn_cap("big_E_q", ctx.m_max)
    return out


def log_big_E_q(x, ctx: QParams):
    """``log E_q^x`` for ``x >= 0``; accepts scalars or arrays.

    The product is summed as ``log1p`` terms until ``(1-q) q**m x < tail_tol``
    (or ``m_max``), and the remaining geometric tail ``sum_{m>=n} (1-q) q**m x``
    is added to first order. If the cap leaves omitted factors far from 1 the
    tail cannot be approximated and :class:`NumericalError` is raised.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError("log_big_E_q needs x >= 0")
    q, tol = ctx.q, ctx.tail_tol
    c = (1.0 - q) * arr
    cmax = float(c.max()) if c.size else 0.0
    if cmax == 0.0:
        out = np.zeros_like(arr)
        return float(out) if out.ndim == 0 else out
    needed = max(1, math.ceil(math.log(tol / cmax) / math.log(q)) + 1)
    n = min(needed, ctx.m_max + 1)
    qm = q ** np.arange(n, dtype=float)
    out = np.log1p(np.multiply.outer(c, qm)).sum(axis=-1)
    remainder = c * q**n / (1.0 - q)
    lead = cmax * q**n  # largest omitted factor minus one
    if needed > n and lead * lead / (2 * (1 - q * q)) > tol:
        if lead > 0.1:
            # log1p(y) ~ y is useless here; the answer would be meaningless
            raise NumericalError(f"log E_q tail not resolved within m_max={ctx.m_max} terms; raise m_max")
        _warn_cap("log_big_E_q", ctx.m_max)
    out = out + remainder
    return float(out) if out.ndim == 0 else out


def small_e_q_neg(t, ctx: QParams):
    """``e_q^{-t}`` for ``t >= 0`` as ``1 / E_q^t`` (never via the divergent series)."""
    if np.ndim(t):
        return np.exp(-log_big_E_q(t, ctx))
    return math.exp(-log_big_E_q(t, ctx))


def small_e_q(x: float, ctx: QParams) -> float:
    """``e_q^x`` for ``x < 1/(1-q)``.

    Negative arguments go through :func:`small_e_q_neg`; positive ones use
    ``1 / prod_m (1 - (1-q) q**m x)``.
    """
    q = ctx.q
    if x <= 0:
        return small_e_q_neg(-x, ctx)
    if x * (1.0 - q) >= 1.0:
        raise DomainError(f"e_q^x diverges for x >= 1/(1-q) = {1 / (1 - q)}")
    return 1.0 / big_E_q(-x, ctx)


# ------------------------------------------------------- q-trigonometric


def _log_series_peak(zabs: float, q: float, odd: bool) -> float:
    """log10 of the largest term magnitude of the q-sine (odd) or q-cosine series."""
    lq, lz = math.log(q), math.log(zabs)
    log_fact = 0.0
    best = -math.inf
    n = 1 if odd else 0
    k = 0
    while True:
        power = k * (k + 1) if odd else k * k
        lt = power * lq + n * lz - log_fact
        if lt > best:
            best = lt
        elif lt < best - 60.0:
            return best / math.log(10.0)
        k += 1
        for j in (n + 1, n + 2):
            log_fact += math.log((1.0 - q**j) / (1.0 - q))
        n += 2
        if k > 100000:
            raise NumericalError("q-trigonometric series failed to peak")


def _q_trig_decimal(z, q: float, odd: bool) -> Decimal:
    """Extended-precision sum of the q-sine/q-cosine series at ``z``."""
    zd = z if isinstance(z, Decimal) else Decimal(float(z))
    if zd == 0:
        return Decimal(0) if odd else Decimal(1)
    zabs = abs(float(zd))
    if math.isinf(zabs):
        raise NumericalError("argument too large for fixed precision")
    peak = _log_series_peak(zabs, q, odd)
    if peak > MAX_PEAK_LOG10:
        raise NumericalError(
            f"argument too large for fixed precision (peak series term ~1e{peak:.0f})")
    digits = _GUARD_DIGITS + max(0, math.ceil(peak))
    with localcontext() as dctx:
        dctx.prec = digits
        qd = Decimal(q)
        one = Decimal(1)
        omq = one - qd
        z2 = zd * zd
        term = zd if odd else one
        total = term
        biggest = abs(term)
        threshold_scale = Decimal(10) ** (-(digits - 2))
        qpow = one  # q**(k-1) ... updated per step
        n = 1 if odd else 0
        qn = qd**n  # q**n tracks q-number numerators
        k = 0
        while True:
            k += 1
            # ratio of consecutive terms: -q^{2k} z^2/([2k][2k+1]) (sine), -q^{2k-1} z^2/([2k-1][2k]) (cosine)
            qn1 = qn * qd
            qn2 = qn1 * qd
            num1 = (one - qn1) / omq
            num2 = (one - qn2) / omq
            qn = qn2
            n += 2
            qpow = qd ** (2 * k if odd else 2 * k - 1)
            term = -term * qpow * z2 / (num1 * num2)
            total += term
            mag = abs(term)
            if mag > biggest:
                biggest = mag
            elif mag <= biggest * threshold_scale:
                break
            if k > 100000:
                raise NumericalError("q-trigonometric series did not converge")
        return +total


def q_sin(z, ctx: QParams) -> float:
    """``sin(z; q^2) = sum_k (-1)^k q^{k(k+1)} z^{2k+1} / [2k+1]_q!``."""
    return float(_q_trig_decimal(z, ctx.q, odd=True))


def q_cos(z, ctx: QParams) -> float:
    """``cos(z; q^2) = sum_k (-1)^k q^{k^2} z^{2k} / [2k]_q!``."""
    return float(_q_trig_decimal(z, ctx.q, odd=False))
