"""Command-line driver.

    qheat <command> [--config FILE] [--set key=value ...] [--out PATH]

Commands: ``selftest``, ``forward``, ``inverse-source``, ``inverse-initial``.
The config file is flat ``key=value`` text; ``--set`` overrides it. Exit
codes: 0 success, 1 numerical failure, 2 validation or configuration failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import catalog
from .errors import DomainError, HypothesisError, NumericalError, QHeatError
from .forward import (SourceSpec, mass_function, mode_solution, pde_residual, solve_forward,
                      time_lattice)
from .inverse_initial import InverseInitialProblem, reconstruct, verify_reconstruction
from .inverse_source import InverseSourceProblem, solve_volterra
from .qcore import (QParams, apply_L, big_E_q, q_derivative, q_integral,
                    q_integration_by_parts_residual, q_number, small_e_q_neg)
from .spectral import ModalSeries, find_eigenvalues, synthesize

COMMANDS = ("selftest", "forward", "inverse-source", "inverse-initial")


class ConfigError(QHeatError, ValueError):
    """Bad or inconsistent run configuration."""


@dataclass(frozen=True)
class RunConfig:
    command: str = "selftest"
    q: float = 0.5
    T: float = 1.0
    K: int = 6
    K_reg: int = 2
    m_max: int = 60
    k_max: int = 16
    tail_tol: float = 1e-14
    scenario: str | None = None
    alpha: float = 0.0
    xi0: float = 1.0
    noise: float = 0.0
    seed: int = 0
    out_path: str | None = None

    def ctx(self) -> QParams:
        return QParams(q=self.q, tail_tol=self.tail_tol, m_max=self.m_max, k_max=self.k_max)


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _convert(key: str, raw: str):
    kind = _TYPES[key]
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {kind}") from None
    if raw.strip().lower() in ("", "none"):
        return None
    return raw.strip()


def parse_pairs(pairs, source: str) -> dict:
    out = {}
    for lineno, line in enumerate(pairs, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _TYPES or key == "command":
            raise ConfigError(f"{key}: unknown configuration key")
        out[key] = _convert(key, raw)
    return out


def validate(cfg: RunConfig) -> RunConfig:
    """Check every key before any computation; returns cfg with the scenario filled in."""
    if cfg.command not in COMMANDS:
        raise ConfigError(f"command: unknown command {cfg.command!r}")
    try:
        cfg.ctx()
    except DomainError as exc:
        key = str(exc).split()[0]
        raise ConfigError(f"{key}: {exc}") from None
    if not cfg.T > 0:
        raise ConfigError("T: horizon must be positive")
    if not (1 <= cfg.K <= cfg.k_max):
        raise ConfigError(f"K: must satisfy 1 <= K <= k_max={cfg.k_max}")
    if not (1 <= cfg.K_reg <= cfg.K):
        raise ConfigError(f"K_reg: must satisfy 1 <= K_reg <= K={cfg.K}")
    if abs(cfg.alpha) > 1:
        raise ConfigError("alpha: |alpha| must not exceed 1")
    if not (0 < cfg.xi0 <= cfg.T):
        raise ConfigError("xi0: must lie in (0, T]")
    if cfg.noise < 0:
        raise ConfigError("noise: must be non-negative")
    scenario = cfg.scenario or catalog.DEFAULT_SCENARIO[cfg.command]
    if cfg.command != "selftest":
        if scenario not in catalog.SCENARIOS:
            raise ConfigError(f"scenario: unknown scenario {scenario!r}")
        if catalog.SCENARIOS[scenario].command != cfg.command:
            raise ConfigError(f"scenario: {scenario!r} does not belong to command {cfg.command!r}")
    return replace(cfg, scenario=scenario)


def emit_csv(header, rows, path) -> None:
    """UTF-8 CSV with LF line endings; floats written with 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format(v, ".17g") if isinstance(v, float) else v for v in row])


# --------------------------------------------------------------- commands


def _selftest(cfg: RunConfig):
    ctx = cfg.ctx()
    tol = 10 * ctx.tail_tol
    checks = []

    def add(name, value, limit):
        checks.append((name, float(value), float(limit), bool(value <= limit)))

    f = lambda x: 1 + x + x**2  # noqa: E731
    g = lambda x: x**3 - 2 * x  # noqa: E731
    x0 = 0.7
    leibniz = q_derivative(lambda x: f(x) * g(x), x0, ctx) - (
        f(ctx.q * x0) * q_derivative(g, x0, ctx) + g(x0) * q_derivative(f, x0, ctx))
    add("q_leibniz", abs(leibniz), tol)
    add("integration_by_parts", abs(q_integration_by_parts_residual(f, g, 0.0, 1.0, ctx)), tol)
    add("eq_Eq_duality", max(abs(small_e_q_neg(t, ctx) * big_E_q(t, ctx) - 1) for t in (0.1, 1, 10)), 1e-12)
    add("q_integral_x", abs(q_integral(lambda x: x, 0.0, 1.0, ctx) - 1 / q_number(2, ctx)), tol)

    spec = find_eigenvalues(ctx, cfg.K)
    add("characteristic_residual", max(abs(r) for r in spec.characteristic_residuals()), 1e-10)
    gram = (spec.basis * spec.weights) @ spec.basis.T
    add("gram_identity", np.max(np.abs(gram - np.eye(spec.K))), 1e-8)
    phi1 = catalog.basis_combination(spec, [1.0])
    pts = spec.lattice.points[1:12]
    scale = spec.lambdas[0] * np.max(np.abs(spec.basis[0]))
    add("eigen_relation", max(abs(apply_L(phi1, x, ctx) - spec.lambdas[0] * phi1(x)) for x in pts) / scale, 1e-6)

    src = SourceSpec(lambda t, x: phi1(x), lambda t: 1.0 + t / 2, cfg.T)
    bundle = solve_forward(phi1, src, spec, ctx)
    t1 = float(bundle.times[1])
    add("pde_residual", max(abs(pde_residual(bundle, src, t1, float(x), ctx)) for x in pts), 1e-8)
    return checks


def _forward(cfg: RunConfig):
    ctx = cfg.ctx()
    sc = catalog.SCENARIOS[cfg.scenario]
    spec = find_eigenvalues(ctx, cfg.K)
    src = SourceSpec(sc.shape_fn(spec, ctx), catalog.time_profile(sc.v, ctx), cfg.T)
    bundle = solve_forward(None, src, spec, ctx, phi_coeffs=sc.phi_coeffs(spec))
    values = bundle.values()
    rows = [(float(t), float(x), float(values[j, m]))
            for j, t in enumerate(bundle.times) for m, x in enumerate(spec.lattice.points)]
    interior_x = spec.lattice.points[1:min(12, len(spec.lattice))]
    err = max(abs(pde_residual(bundle, src, float(t), float(x), ctx))
              for t in bundle.times[:-1] for x in interior_x)
    return ("t", "x", "u"), rows, err


def _perturbation(cfg: RunConfig, n: int) -> np.ndarray:
    if cfg.noise == 0:
        return np.zeros(n)
    return cfg.noise * np.random.default_rng(cfg.seed).standard_normal(n)


def _inverse_source(cfg: RunConfig):
    ctx = cfg.ctx()
    sc = catalog.SCENARIOS[cfg.scenario]
    spec = find_eigenvalues(ctx, cfg.K)
    shape = sc.shape_fn(spec, ctx)
    v_true = catalog.time_profile(sc.v, ctx)
    src = SourceSpec(shape, v_true, cfg.T)
    phi_c = sc.phi_coeffs(spec)
    n_data = len(time_lattice(cfg.T, ctx)) + 1
    psi = mass_function(phi_c, src, spec, ctx, perturb=_perturbation(cfg, n_data))
    phi = ModalSeries(spec, phi_c)
    prob = InverseSourceProblem(lambda x: synthesize(phi, x), shape, psi, cfg.T)
    rec = solve_volterra(prob, spec, ctx)
    rows, err = [], 0.0
    for t, v in zip(rec.times, rec.v_values):
        vt = v_true(float(t))
        rows.append((float(t), float(vt), float(v), float(abs(v - vt))))
        err = max(err, abs(v - vt))
    return ("t", "v_true", "v_rec", "abs_err"), rows, err


def _inverse_initial(cfg: RunConfig):
    ctx = cfg.ctx()
    sc = catalog.SCENARIOS[cfg.scenario]
    spec = find_eigenvalues(ctx, cfg.K)
    src = SourceSpec(sc.shape_fn(spec, ctx), catalog.time_profile(sc.v, ctx), cfg.T)
    gamma_true = sc.phi_coeffs(spec)
    nu_c = np.array([mode_solution(k + 1, cfg.xi0, gamma_true[k], src, spec, ctx) for k in range(spec.K)])
    nu_c = nu_c * (1 + _perturbation(cfg, spec.K))
    nu = ModalSeries(spec, nu_c)
    prob = InverseInitialProblem(src, cfg.alpha, cfg.xi0, lambda x: synthesize(nu, x), cfg.K_reg)
    rec = reconstruct(prob, spec, ctx)
    verify_reconstruction(prob, rec, spec, ctx)
    n = cfg.K_reg
    rows = [(k + 1, float(spec.lambdas[k]), float(rec.gamma.coeffs[k]), float(rec.tau.coeffs[k]),
             float(rec.amplification[k])) for k in range(n)]
    err = float(np.max(np.abs(rec.gamma.coeffs[:n] - gamma_true[:n])))
    return ("k", "lambda_k", "gamma_k", "tau_k", "amplification_k"), rows, err


def run(cfg: RunConfig) -> int:
    """Execute one validated command; returns the process exit code."""
    try:
        cfg = validate(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        if cfg.command == "selftest":
            checks = _selftest(cfg)
            passed = sum(c[3] for c in checks)
            if cfg.out_path:
                emit_csv(("check", "value", "limit", "passed"), checks, cfg.out_path)
            for name, value, limit, ok in checks:
                print(f"  {'pass' if ok else 'FAIL'} {name}: {value:.3e} (limit {limit:.1e})")
            status = "ok" if passed == len(checks) else "failed"
            print(f"selftest {status} passed={passed}/{len(checks)}")
            return 0 if passed == len(checks) else 1
        handler = {"forward": _forward, "inverse-source": _inverse_source,
                   "inverse-initial": _inverse_initial}[cfg.command]
        header, rows, err = handler(cfg)
        if cfg.out_path:
            emit_csv(header, rows, cfg.out_path)
        print(f"{cfg.command} ok max_err={err:.17g}")
        return 0
    except (HypothesisError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, OSError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def build_config(argv=None) -> RunConfig:
    parser = argparse.ArgumentParser(prog="qheat", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path, help="flat key=value configuration file")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one configuration key (repeatable)")
    parser.add_argument("--out", help="CSV output path")
    args = parser.parse_args(argv)
    values = {}
    if args.config is not None:
        values.update(parse_pairs(args.config.read_text(encoding="utf-8").splitlines(), str(args.config)))
    values.update(parse_pairs(args.set, "--set"))
    if args.out:
        values["out_path"] = args.out
    return RunConfig(command=args.command, **values)


def main(argv=None) -> int:
    try:
        cfg = build_config(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
