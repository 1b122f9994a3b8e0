"""Named built-in functions and run scenarios used by the command-line driver."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .qcore import QParams, ScalarFn, q_number, small_e_q_neg
from .spectral import Spectrum, eigenfunction


def constant(c: float) -> ScalarFn:
    return ScalarFn(lambda x: c, name=f"const({c:g})")


def monomial(n: int) -> ScalarFn:
    return ScalarFn(lambda x: x**n, name=f"x^{n}")


def basis_combination(spec: Spectrum, coeffs) -> ScalarFn:
    """``sum_k c_k phi_k`` for the given (1-based, in order) coefficients."""
    coeffs = [float(c) for c in coeffs]

    def fn(x):
        return sum(c * eigenfunction(spec, k, x) for k, c in enumerate(coeffs, start=1) if c)

    return ScalarFn(fn, 0.0, 1.0 / spec.ctx.q, name=f"basis{coeffs}")


def time_profile(name: str, ctx: QParams) -> Callable[[float], float]:
    """One of the built-in time factors: ``one``, ``affine`` (1 + t/2), ``expq`` (e_q^{-t})."""
    if name == "one":
        return lambda t: 1.0
    if name == "affine":
        return lambda t: 1.0 + t / 2.0
    if name == "expq":
        return lambda t: small_e_q_neg(t, ctx)
    if name == "zero":
        return lambda t: 0.0
    raise KeyError(name)


TIME_PROFILES = ("zero", "one", "affine", "expq")


@dataclass(frozen=True)
class Scenario:
    """Data of one named run.

    ``phi`` is given as basis coefficients, ``shape`` names the source shape
    and ``v`` the true time profile.
    """

    command: str
    phi: tuple = ()
    shape: str = "phi1"
    v: str = "one"
    description: str = ""

    def shape_fn(self, spec: Spectrum, ctx: QParams) -> Callable[[float, float], float]:
        if self.shape == "phi1":
            return lambda t, x: eigenfunction(spec, 1, x)
        if self.shape == "one_plus_phi1":
            return lambda t, x: 1.0 + eigenfunction(spec, 1, x)
        if self.shape == "zero_mean":
            c = 1.0 / q_number(2, ctx)
            return lambda t, x: x - c
        if self.shape == "zero":
            return lambda t, x: 0.0
        raise KeyError(self.shape)

    def phi_coeffs(self, spec: Spectrum) -> np.ndarray:
        c = np.zeros(spec.K)
        c[: len(self.phi)] = self.phi[: spec.K]
        return c


SCENARIOS = {
    "eigenmode": Scenario("forward", phi=(1.0,), shape="zero", v="zero",
                          description="free decay of the first mode"),
    "driven": Scenario("forward", phi=(1.0, 0.1), shape="phi1", v="affine",
                       description="two-mode start, forced along mode 1"),
    "constant-v": Scenario("inverse-source", phi=(1.0,), shape="one_plus_phi1", v="one"),
    "affine-v": Scenario("inverse-source", phi=(1.0,), shape="one_plus_phi1", v="affine"),
    "expq-v": Scenario("inverse-source", phi=(1.0,), shape="one_plus_phi1", v="expq"),
    "zero-mean": Scenario("inverse-source", phi=(1.0,), shape="zero_mean", v="one",
                          description="source shape with vanishing q-mean (rejected)"),
    "two-mode": Scenario("inverse-initial", phi=(1.0, 0.1), shape="phi1", v="one"),
    "free-decay": Scenario("inverse-initial", phi=(1.0, 0.1), shape="zero", v="zero"),
}

DEFAULT_SCENARIO = {
    "forward": "eigenmode",
    "inverse-source": "affine-v",
    "inverse-initial": "two-mode",
    "selftest": None,
}
