"""Command-line front end.

Commands: ``solve``, ``profile``, ``sweep``, ``validate`` and ``limit``.
JSON documents carry ``"schema": "mcg-piston/1"``; floats are written in
shortest round-trip form, and non-finite values use the ``NaN`` /
``Infinity`` tokens that Python's json module reads back.

Exit codes: 0 success, 1 I/O failure, 2 usage, 3 domain error,
4 convergence failure, 5 concentration regime, 6 validation failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import limits, validation
from .eos import SQRT2
from .errors import ConcentrationRegime, ConvergenceError, DomainError, PistonError
from .rarefaction import second_family_certificate, solve_rarefaction
from .setup import Direction, PistonProblem, WaveKind, WaveProfile, make_problem
from .shock import concentrates, solve_shock

SCHEMA = "mcg-piston/1"
PROFILE_COLUMNS = ("xi", "rho", "u", "p")
SWEEP_COLUMNS = ("m0", "alpha", "theta", "direction", "status", "kind", "limit_class",
                 "rho1", "speed", "residual", "message")

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3
EXIT_CONVERGENCE, EXIT_CONCENTRATION, EXIT_VALIDATION = 4, 5, 6

GOLDEN_RTOL = 1e-10
WEAK_FORM_LIMIT = 1e-6


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    M0: float
    alpha: float
    theta: float
    direction: Direction
    samples: int = 201
    grid_n: int = 4000
    t_final: float = 0.5
    cfl: float = 0.9
    output_format: str = "json"
    output_path: Optional[str] = None
    seed: int = 0
    sweep: Optional[str] = None
    sweep_from: Optional[float] = None
    sweep_to: Optional[float] = None
    count: int = 0
    log: bool = False
    golden: Optional[str] = None
    random_cases: int = 0
    resolution: int = 256


# ----------------------------------------------------------------------------
# argument handling


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--m0", type=float, default=1.0)
    common.add_argument("--alpha", type=float, default=0.5)
    common.add_argument("--theta", type=float, default=0.5)
    common.add_argument("--direction", choices=[d.value for d in Direction],
                        default=Direction.PROCEEDING.value)
    common.add_argument("--samples", type=int, default=201)
    common.add_argument("--grid-n", type=int, default=4000)
    common.add_argument("--t-final", type=float, default=0.5)
    common.add_argument("--cfl", type=float, default=0.9)
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--out", default=None)
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="mcg-piston", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="solve one piston problem")
    sub.add_parser("profile", parents=[common], help="sample the exact profile")
    sweep = sub.add_parser("sweep", parents=[common], help="solve over a parameter range")
    sweep.add_argument("--sweep", choices=("theta", "m0"), required=True)
    sweep.add_argument("--from", dest="sweep_from", type=float, required=True)
    sweep.add_argument("--to", dest="sweep_to", type=float, required=True)
    sweep.add_argument("--count", type=int, required=True)
    sweep.add_argument("--log", action="store_true")
    val = sub.add_parser("validate", parents=[common], help="cross-check against the FVM")
    val.add_argument("--golden", default=None, help="solve JSON to compare against")
    val.add_argument("--random-cases", type=int, default=0,
                     help="extra randomly drawn invariant checks (uses --seed)")
    val.add_argument("--resolution", type=int, default=256,
                     help="weak-form quadrature resolution in the concentration regime")
    sub.add_parser("limit", parents=[common], help="A -> 0 limit analysis")
    return parser


def _check_problem_ranges(m0, alpha, theta):
    if not (math.isfinite(m0) and m0 > 0.0):
        raise UsageError(f"--m0 must be positive and finite, got {m0}")
    if not 0.0 < alpha <= 1.0:
        raise UsageError(f"--alpha must lie in (0, 1], got {alpha}")
    if not 0.0 <= theta < 1.0:
        raise UsageError(f"--theta must lie in [0, 1), got {theta}")
    if alpha == 1.0 and theta > 0.0:
        raise UsageError("--alpha 1 requires --theta 0")


def build_config(args: argparse.Namespace) -> RunConfig:
    default_format = "csv" if args.command in ("profile", "sweep") else "json"
    cfg = RunConfig(
        command=args.command, M0=args.m0, alpha=args.alpha, theta=args.theta,
        direction=Direction(args.direction), samples=args.samples, grid_n=args.grid_n,
        t_final=args.t_final, cfl=args.cfl, output_format=args.format or default_format,
        output_path=args.out, seed=args.seed,
        sweep=getattr(args, "sweep", None), sweep_from=getattr(args, "sweep_from", None),
        sweep_to=getattr(args, "sweep_to", None), count=getattr(args, "count", 0),
        log=getattr(args, "log", False), golden=getattr(args, "golden", None),
        random_cases=getattr(args, "random_cases", 0),
        resolution=getattr(args, "resolution", 256))
    if cfg.command != "sweep":
        _check_problem_ranges(cfg.M0, cfg.alpha, cfg.theta)
    if cfg.samples < 2:
        raise UsageError("--samples must be at least 2")
    if cfg.grid_n < 128:
        raise UsageError("--grid-n must be at least 128")
    if not (math.isfinite(cfg.t_final) and cfg.t_final > 0.0):
        raise UsageError("--t-final must be positive")
    if not 0.0 < cfg.cfl <= 1.0:
        raise UsageError("--cfl must lie in (0, 1]")
    if cfg.random_cases < 0:
        raise UsageError("--random-cases must be non-negative")
    if cfg.resolution < 1:
        raise UsageError("--resolution must be positive")
    if cfg.command in ("solve", "validate", "limit") and cfg.output_format != "json":
        raise UsageError(f"{cfg.command} writes JSON only")
    if cfg.command == "sweep":
        if cfg.count < 1:
            raise UsageError("--count must be at least 1")
        if not (math.isfinite(cfg.sweep_from) and math.isfinite(cfg.sweep_to)):
            raise UsageError("sweep bounds must be finite")
        if cfg.count > 1 and cfg.sweep_from == cfg.sweep_to:
            raise UsageError("empty sweep range")
        if cfg.log and min(cfg.sweep_from, cfg.sweep_to) <= 0.0:
            raise UsageError("--log needs positive bounds")
    return cfg


# ----------------------------------------------------------------------------
# output


def _document(command: str, cfg: RunConfig, body: dict) -> dict:
    doc = {"schema": SCHEMA, "command": command,
           "inputs": {"m0": cfg.M0, "alpha": cfg.alpha, "theta": cfg.theta,
                      "direction": cfg.direction.value}}
    doc.update(body)
    return doc


def dumps_json(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def dumps_csv(columns: Sequence[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def parse_csv(text: str):
    """Inverse of the CSV writer: header plus rows with floats restored where possible."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    rows = []
    for raw in reader:
        row = []
        for cell in raw:
            try:
                row.append(float(cell))
            except ValueError:
                row.append(cell)
        rows.append(row)
    return header, rows


def _emit(cfg: RunConfig, text: str):
    if cfg.output_path is None:
        sys.stdout.write(text)
        return
    with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# ----------------------------------------------------------------------------
# solving


def _problem(cfg: RunConfig, **override) -> PistonProblem:
    m0 = override.get("M0", cfg.M0)
    theta = override.get("theta", cfg.theta)
    _check_problem_ranges(m0, cfg.alpha, theta)
    return make_problem(m0, cfg.direction, cfg.alpha, theta)


def solve_summary(problem: PistonProblem) -> dict:
    """Wave summary used by ``solve``, ``sweep`` and golden comparison."""
    gas = problem.gas
    out = {"gas": {"A": gas.A, "B": gas.B, "alpha": gas.alpha}}
    if problem.direction is Direction.PROCEEDING:
        sol = solve_shock(problem)
        out.update(kind=WaveKind.SHOCK.value, rho1=sol.rho1, sigma=sol.sigma, p1=sol.p1,
                   rh_residual=list(sol.rh_residual), lax_ok=sol.lax_ok,
                   f_residual=sol.f_residual)
        return out
    if gas.A > 0.0:
        sol = solve_rarefaction(problem)
        cert = second_family_certificate(problem)
        out.update(kind=WaveKind.RAREFACTION1.value, rho1=sol.rho1, eta_head=sol.eta_head,
                   eta_tail=sol.eta_tail, w0=sol.w0, tail_residual=sol.tail.scaled_residual,
                   second_family={"branch": cert.branch.value, "g_head": cert.g_head,
                                  "sign_witness": cert.sign_witness,
                                  "predicted_sign_holds": cert.predicted_sign_holds,
                                  "xi_head": cert.xi_head, "xi0": cert.xi0})
        return out
    if gas.alpha < 1.0:
        head, tail = limits.gcg_fan_bounds(gas.alpha, problem.M0)
        rho1, _ = limits.gcg_rarefaction_profile(gas.alpha, problem.M0, tail)
        out.update(kind=WaveKind.RAREFACTION1.value, rho1=rho1, eta_head=head, eta_tail=tail)
        return out
    contact = limits.chaplygin_receding_density(problem.M0)
    out.update(kind="contact", rho1=contact.rho1, sigma=contact.sigma)
    return out


def cmd_solve(cfg: RunConfig) -> int:
    _emit(cfg, dumps_json(_document("solve", cfg, solve_summary(_problem(cfg)))))
    return EXIT_OK


def exact_profile(problem: PistonProblem, samples: int) -> WaveProfile:
    """Profile over [1.2 * leftmost wave speed, 0]; the measure limit uses its regular part."""
    if problem.direction is Direction.PROCEEDING and concentrates(problem):
        xi = np.linspace(-1.2 * SQRT2, 0.0, samples)
        return WaveProfile.from_state(problem.gas, xi, np.ones(samples),
                                      np.full(samples, problem.u0), WaveKind.MEASURE_LIMIT)
    exact = validation.exact_solution(problem)
    xi = np.linspace(1.2 * exact.leftmost_speed, 0.0, samples)
    rho, u = exact.state_at(xi)
    kind = WaveKind.SHOCK if problem.direction is Direction.PROCEEDING else WaveKind.RAREFACTION1
    return WaveProfile.from_state(problem.gas, xi, rho, u, kind)


def cmd_profile(cfg: RunConfig) -> int:
    prof = exact_profile(_problem(cfg), cfg.samples)
    if cfg.output_format == "csv":
        rows = zip(*(map(float, col) for col in (prof.xi, prof.rho, prof.u, prof.p)))
        _emit(cfg, dumps_csv(PROFILE_COLUMNS, rows))
    else:
        body = {"wave_kind": prof.wave_kind.value, "columns": list(PROFILE_COLUMNS),
                "rows": [[float(v) for v in r] for r in zip(prof.xi, prof.rho, prof.u, prof.p)]}
        _emit(cfg, dumps_json(_document("profile", cfg, body)))
    return EXIT_OK


def _sweep_values(cfg: RunConfig):
    if cfg.count == 1:
        return [cfg.sweep_from]
    if cfg.log:
        return list(np.geomspace(cfg.sweep_from, cfg.sweep_to, cfg.count))
    return list(np.linspace(cfg.sweep_from, cfg.sweep_to, cfg.count))


def sweep_row(cfg: RunConfig, value: float):
    m0 = value if cfg.sweep == "m0" else cfg.M0
    theta = value if cfg.sweep == "theta" else cfg.theta
    base = [float(m0), float(cfg.alpha), float(theta), cfg.direction.value]
    try:
        limit_class = limits.classify_limit(cfg.alpha, m0).value
    except DomainError:
        limit_class = ""
    try:
        problem = _problem(cfg, M0=m0, theta=theta)
        s = solve_summary(problem)
    except (UsageError, DomainError) as exc:
        return base + ["domain", "", limit_class, math.nan, math.nan, math.nan, str(exc)]
    except ConcentrationRegime as exc:
        return base + ["concentration", "", limit_class, math.nan, math.nan, math.nan,
                       str(exc).split(":")[0]]
    except ConvergenceError as exc:
        return base + ["convergence", "", limit_class, math.nan, math.nan, math.nan, str(exc)]
    if "sigma" in s:
        speed = s["sigma"]
        residual = max(map(abs, s.get("rh_residual", [0.0])))
    else:
        speed = s["eta_tail"]
        residual = s.get("tail_residual", 0.0)
    return base + ["ok", s["kind"], limit_class, s["rho1"], speed, float(residual), ""]


def cmd_sweep(cfg: RunConfig) -> int:
    rows = [sweep_row(cfg, float(v)) for v in _sweep_values(cfg)]
    if cfg.output_format == "csv":
        _emit(cfg, dumps_csv(SWEEP_COLUMNS, rows))
    else:
        body = {"sweep": cfg.sweep, "columns": list(SWEEP_COLUMNS), "rows": rows}
        _emit(cfg, dumps_json(_document("sweep", cfg, body)))
    return EXIT_OK


# ----------------------------------------------------------------------------
# validation


def _check(name, value, limit, passed):
    return {"name": name, "value": value, "limit": limit, "passed": bool(passed)}


def _golden_checks(cfg: RunConfig, problem: PistonProblem):
    try:
        with open(cfg.golden, encoding="utf-8") as fh:
            golden = json.load(fh)
        if golden.get("schema") != SCHEMA:
            raise ValueError("schema mismatch")
    except (OSError, ValueError, AttributeError) as exc:
        return [_check("golden:parse", str(exc), SCHEMA, False)]
    current = solve_summary(problem)
    checks = []
    for key in ("rho1", "sigma", "p1", "eta_head", "eta_tail", "w0"):
        if key not in golden and key not in current:
            continue
        want, got = golden.get(key), current.get(key)
        ok = (isinstance(want, (int, float)) and isinstance(got, float)
              and math.isclose(got, want, rel_tol=GOLDEN_RTOL, abs_tol=GOLDEN_RTOL))
        checks.append(_check(f"golden:{key}", got, want, ok))
    return checks


def _random_checks(cfg: RunConfig):
    rng = np.random.default_rng(cfg.seed)
    checks = []
    for i in range(cfg.random_cases):
        alpha = float(rng.uniform(0.05, 0.95))
        theta = float(rng.uniform(0.01, 0.99))
        m0 = float(rng.uniform(0.05, 20.0))
        shock = solve_shock(make_problem(m0, Direction.PROCEEDING, alpha, theta))
        rh = max(map(abs, shock.rh_residual))
        checks.append(_check(f"random[{i}]:shock", rh, 1e-10,
                             shock.rho1 > 1.0 and rh < 1e-10 and shock.lax_ok))
        fan = solve_rarefaction(make_problem(m0, Direction.RECEDING, alpha, theta))
        _, u_tail, _ = fan.fan(fan.eta_tail)
        checks.append(_check(f"random[{i}]:rarefaction", abs(u_tail), 1e-10,
                             abs(u_tail) < 1e-10 and 0.0 < fan.rho1 < 1.0))
    return checks


def validation_checks(cfg: RunConfig):
    problem = _problem(cfg)
    checks = []
    if problem.direction is Direction.PROCEEDING and concentrates(problem):
        ms = limits.measure_solution(cfg.alpha, cfg.M0)
        res = limits.verify_weak_form(ms, resolution=cfg.resolution)
        checks.append(_check("weak_form", res, WEAK_FORM_LIMIT, res < WEAK_FORM_LIMIT))
    else:
        n = cfg.grid_n
        ladder = (n // 8, n // 4, n // 2, n)
        report = validation.validate_case(problem, cfg.t_final, ladder, cfg.cfl)
        fin = report.finest
        checks.append(_check("l1", fin.l1, validation.L1_LIMIT, report.checks["l1"]))
        if "shock_position" in report.checks:
            checks.append(_check("shock_position", fin.shock_position_error,
                                 validation.SHOCK_POSITION_LIMIT,
                                 report.checks["shock_position"]))
        checks.append(_check("order", report.order, validation.ORDER_LIMIT,
                             report.checks["order"]))
    if cfg.golden is not None:
        checks.extend(_golden_checks(cfg, problem))
    checks.extend(_random_checks(cfg))
    return checks


def cmd_validate(cfg: RunConfig) -> int:
    checks = validation_checks(cfg)
    passed = all(c["passed"] for c in checks)
    failed = [c["name"] for c in checks if not c["passed"]]
    _emit(cfg, dumps_json(_document("validate", cfg, {"passed": passed, "failed": failed,
                                                      "checks": checks})))
    if not passed:
        print(f"validation failed: {', '.join(failed)}", file=sys.stderr)
    return EXIT_OK if passed else EXIT_VALIDATION


def cmd_limit(cfg: RunConfig) -> int:
    kind = limits.classify_limit(cfg.alpha, cfg.M0)
    body = {"classification": kind.value}
    if cfg.direction is Direction.PROCEEDING:
        if kind is limits.LimitKind.CONCENTRATION:
            ms = limits.measure_solution(cfg.alpha, cfg.M0)
            body.update(w_rho_slope=ms.w_rho_slope, w_p_const=ms.w_p_const,
                        upstream={"rho": ms.rho, "u": ms.u, "p": ms.pressure},
                        weak_form_residual=limits.verify_weak_form(ms))
        else:
            rho1 = limits.gcg_limit_density(cfg.alpha, cfg.M0)
            body.update(rho1=rho1, sigma=-SQRT2 / (rho1 - 1.0))
    elif cfg.alpha < 1.0:
        head, tail = limits.gcg_fan_bounds(cfg.alpha, cfg.M0)
        rho1, _ = limits.gcg_rarefaction_profile(cfg.alpha, cfg.M0, tail)
        body.update(eta_head=head, eta_tail=tail, rho1=rho1)
    else:
        contact = limits.chaplygin_receding_density(cfg.M0)
        body.update(rho1=contact.rho1, sigma=contact.sigma)
    _emit(cfg, dumps_json(_document("limit", cfg, body)))
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "profile": cmd_profile, "sweep": cmd_sweep,
            "validate": cmd_validate, "limit": cmd_limit}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = build_config(args)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConcentrationRegime as exc:
        print(f"concentration regime: {exc}", file=sys.stderr)
        return EXIT_CONCENTRATION
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except PistonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
