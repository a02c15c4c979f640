"""Command-line front end.

Exit codes: 0 certified and every check passed, 1 computed but uncertified
or a check failed, 2 usage or input error.  Reports go to stdout and
diagnostics to stderr.  JSON output is deterministic for fixed flags; the
wall-clock time is only added with ``--timing``.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .family import (
    FamilyParams,
    ParityError,
    chi_IC_transverse,
    chi_Um,
    monomial_matrix,
    off_H_certificate,
    singular_points,
    verify_family,
)
from .likelihood import ModelError, hyperplane_model, load_model, ml_degree
from .polyrat import ParseError, Polynomial, univariate_gcd, variables
from .solver import (
    Homotopy,
    SquareSystem,
    TrackerConfig,
    newton_refine,
    scaled_residual,
    solve_square,
    track_path,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
COMMANDS = ("mldeg", "euler", "family", "selftest")


@dataclass
class RunConfig:
    command: str
    model_path: str | None = None
    m: int | None = None
    draws: int = 5
    seed: int = 42
    tracker: dict = field(default_factory=dict)
    output: str = "json"
    timing: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.command == "family" and self.m is None:
            raise ValueError("family needs --m")
        if self.command in ("mldeg", "euler") and not self.model_path:
            raise ValueError(f"{self.command} needs --model")
        if self.draws < 1:
            raise ValueError("--draws must be at least 1")

    def tracker_config(self) -> TrackerConfig:
        return TrackerConfig(**{**self.tracker, "seed": self.seed})


def _tracker_fields():
    return [f for f in dataclasses.fields(TrackerConfig) if f.name != "seed"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mldegree", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "mldeg": "count likelihood critical points of a model file",
        "euler": "signed Euler characteristic of a smooth model, (-1)^d * MLdeg",
        "family": "verify the V_m family relations for odd m",
        "selftest": "quick built-in checks",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--model", dest="model_path", metavar="PATH")
        p.add_argument("--m", type=int)
        p.add_argument("--draws", type=int, default=5)
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--output", choices=("json", "text"), default="json")
        p.add_argument("--timing", action="store_true", help="add wall-clock seconds to the report")
        for f in _tracker_fields():
            p.add_argument("--" + f.name.replace("_", "-"), type=type(f.default), default=None,
                           metavar=f.type.upper() if isinstance(f.type, str) else None)
    return parser


def parse_run_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    tracker = {f.name: getattr(ns, f.name) for f in _tracker_fields() if getattr(ns, f.name) is not None}
    return RunConfig(ns.command, ns.model_path, ns.m, ns.draws, ns.seed, tracker, ns.output, ns.timing)


def _envelope(run: RunConfig, cfg: TrackerConfig) -> dict:
    return {
        "tool": "mldegree",
        "version": __version__,
        "command": run.command,
        "config": {
            "model": run.model_path,
            "m": run.m,
            "draws": run.draws,
            "seed": run.seed,
            "tracker": dataclasses.asdict(cfg),
        },
    }


def cmd_mldeg(run: RunConfig) -> tuple[int, dict]:
    cfg = run.tracker_config()
    model = load_model(run.model_path)
    rep = ml_degree(model, cfg, run.draws)
    out = _envelope(run, cfg)
    out["model_name"] = model.name
    out["dimension"] = model.dimension
    out.update(rep.to_dict())
    return (EXIT_OK if rep.certified else EXIT_FAIL), out


def cmd_euler(run: RunConfig) -> tuple[int, dict]:
    code, out = cmd_mldeg(run)
    d = out["dimension"]
    out["euler_characteristic"] = (-1) ** d * out["count"] if out["certified"] else None
    out["assumes_smooth"] = True
    return code, out


def cmd_family(run: RunConfig) -> tuple[int, dict]:
    cfg = run.tracker_config()
    FamilyParams(run.m)  # parity check before any solving
    report = verify_family(run.m, cfg, run.draws)
    out = _envelope(run, cfg)
    out.update(report.to_dict())
    return (EXIT_OK if report.ok else EXIT_FAIL), out


# ---------------------------------------------------------------- selftest


def _check_arithmetic(cfg):
    x, y = variables(2)
    ok = (x + 1) * (x - 1) == x**2 - 1 and ((x + y) ** 2).diff(0) == 2 * x + 2 * y
    return ok, "polynomial ring operations"


def _check_gcd(cfg):
    (x,) = variables(1)
    g = univariate_gcd(2 * x * (1 + x) + 1, x**2 + x + 1)
    return g == Polynomial.constant(1, 1), f"gcd = {g.format(['x'])}"


def _check_newton(cfg):
    (x,) = variables(1)
    res = newton_refine(SquareSystem([x**2 - 2]), [1.4], tol=cfg.corrector_tol)
    err = abs(res.point[0] - np.sqrt(2))
    return res.converged and err < 1e-12, f"|x - sqrt 2| = {err:.3e}"


def _check_track(cfg):
    (x,) = variables(1)
    start, target = SquareSystem([x**2 - 1]), SquareSystem([x**2 - 4])
    h = Homotopy(start, target, gamma=np.exp(0.7j), patch=np.array([0.6 + 0.3j, -0.2 + 0.9j]))
    res = track_path([1.0], h, cfg)
    err = abs(res.endpoint[0] - 2) if res.endpoint is not None else float("inf")
    return res.status == "finite" and err < 1e-10, f"endpoint error {err:.3e}"


def _check_solve(cfg):
    x, y = variables(2)
    system = SquareSystem([x**2 - 1, y**2 - 1])
    sol = solve_square(system, cfg)
    counts = sol.path_results
    total = sum(counts.values())
    resid = max(float(scaled_residual(system, np.array([p]))[0]) for p in sol.points)
    ok = len(sol.points) == 4 and total == 4 and sol.certified and resid <= cfg.endpoint_tol
    return ok, f"{len(sol.points)} solutions, accounting {counts}, max residual {resid:.1e}"


def _check_hyperplane(cfg):
    model = hyperplane_model(2)
    rep = ml_degree(model, cfg, draws=1)
    ok = rep.certified and rep.count == 1
    return ok, f"count {rep.count}"


def _check_singular(cfg):
    (p,) = singular_points(FamilyParams(3))
    err = float(np.max(np.abs(p - np.array([-1, 1, 1, 1]))))
    return err < 1e-10 and off_H_certificate(3), f"distance to (-1,1,1,1) = {err:.1e}"


def _check_invariants(cfg):
    ok = (
        [chi_Um(m) for m in (1, 3, 5, 7)] == [1, 0, -1, -2]
        and chi_IC_transverse(11, 1) == 12
        and [monomial_matrix(m).determinant() for m in (1, 3)] == [-1, -3]
    )
    return ok, "chi(U_m), IC correction, determinant"


SELFTEST_CHECKS = [
    ("polynomial_arithmetic", _check_arithmetic),
    ("gcd_certificate_m3", _check_gcd),
    ("newton_sqrt2", _check_newton),
    ("track_single_path", _check_track),
    ("solve_product_system", _check_solve),
    ("mldeg_line", _check_hyperplane),
    ("singular_point_m3", _check_singular),
    ("closed_form_invariants", _check_invariants),
]


def cmd_selftest(run: RunConfig) -> tuple[int, dict]:
    cfg = run.tracker_config()
    checks = []
    for name, fn in SELFTEST_CHECKS:
        try:
            ok, detail = fn(cfg)
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        checks.append({"name": name, "passed": bool(ok), "detail": detail})
    out = _envelope(run, cfg)
    out["checks"] = checks
    out["failed"] = [c["name"] for c in checks if not c["passed"]]
    out["passed"] = not out["failed"]
    return (EXIT_OK if out["passed"] else EXIT_FAIL), out


HANDLERS = {"mldeg": cmd_mldeg, "euler": cmd_euler, "family": cmd_family, "selftest": cmd_selftest}


def _text(out: dict) -> str:
    cmd = out["command"]
    lines = [f"mldegree {out['version']} {cmd} (seed {out['config']['seed']})"]
    if cmd in ("mldeg", "euler"):
        lines.append(f"MLdeg = {out['count']}  certified = {out['certified']}  "
                     f"per-draw = {out['per_draw_counts']}")
        if cmd == "euler":
            lines.append(f"chi = {out['euler_characteristic']}  (assumes a smooth model)")
    elif cmd == "family":
        lines.append(f"m = {out['m']}  singular points = {out['num_sing']}")
        lines.append(f"MLdeg(V_m) = {out['mldeg_Vm']}  chi(V_m) = {out['chi_Vm']}  "
                     f"chi_IC(V_m) = {out['chi_IC_Vm']}  gap = {out['gap']}")
        for k, v in out["checks"].items():
            lines.append(f"  [{'ok' if v else 'FAIL'}] {k}")
        lines.append(f"certified = {out['certified']}  ok = {out['ok']}")
    else:
        for c in out["checks"]:
            lines.append(f"  [{'ok' if c['passed'] else 'FAIL'}] {c['name']}: {c['detail']}")
    return "\n".join(lines)


def _json_default(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def main(argv=None) -> int:
    try:
        run = parse_run_config(argv)
    except SystemExit as exc:  # argparse already printed the diagnostic
        return EXIT_USAGE if exc.code else EXIT_OK
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    t0 = time.perf_counter()
    try:
        code, out = HANDLERS[run.command](run)
    except (ModelError, ParseError, ParityError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    elapsed = time.perf_counter() - t0
    if run.timing:
        out["wall_clock_seconds"] = elapsed
    print(f"{run.command}: {elapsed:.2f} s", file=sys.stderr)
    if run.output == "json":
        print(json.dumps(out, indent=2, sort_keys=True, default=_json_default))
    else:
        print(_text(out))
    return code


if __name__ == "__main__":
    sys.exit(main())
