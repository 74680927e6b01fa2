# SPDX-FileCopyrightText: Copyright (c) 2026 provide.io llc. All rights reserved.
# SPDX-License-Identifier: MIT

"""Command-line entry point.

Usage:
    vpatch residual --contour disc.json --omega -1
    vpatch solve --m 3 --omega 0.32 --amp0 0.05 --tol 1e-10
    vpatch branch --m 3 --amps 0.01:0.05:0.01
    vpatch sigma-check --contour peanut.json --alpha "acos(1/sqrt5)"
    vpatch probe --kind moving-plane --contour disc.json --omega -1 --out report.json
    vpatch evolve --contour ellipse.json --dt 1e-3 --steps 1000 --snapshot-every 100 --out-dir frames/
    vpatch field --contour disc.json --omega -1 --x=-2:2:41 --y=-2:2:41 --out field.csv
    vpatch bifurcation-scan --m 3 --omega 0.30:0.36:0.005
    vpatch far-field --contour ellipse.json

Exit codes:
  0 - ran and passed (or converged)
  1 - could not run: usage, malformed input or numerical error
  2 - ran, and the mathematical check failed (report still written)
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import re
import sys
import time
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any, NoReturn

import numpy as np

from vpatch import __version__, io
from vpatch.config import Settings, load_settings
from vpatch.dynamics import EvolutionState, TimeStepConfig, evolve, rigid_rotation_error
from vpatch.errors import BranchAbortedError, ProbeRefusedError, UsageError, VPatchError
from vpatch.geometry import Contour, PolarShape
from vpatch.parallel import set_threads
from vpatch.potential import PatchField, boundary_mu_spread, compute_mu, far_field_fit, sample_field
from vpatch.probes import (
    DEFAULT_LAMBDAS,
    DEFAULT_T_GRID,
    g_monotonicity_probe,
    half_omega_identity_probe,
    laplacian_dichotomy_probe,
    moving_plane_probe,
    normal_derivative_bound_probe,
    phi_sign_probe,
    radial_symmetry_probe,
)
from vpatch.sigma import CRITICAL_ALPHA, classify, estimate_max_alpha
from vpatch.vstate import (
    VStateProblem,
    best_fit_omega,
    bifurcation_omega,
    bifurcation_points,
    bifurcation_scan,
    boundary_residual,
    continuation,
    kirchhoff_omega,
    newton_solve,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAILED = 2

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

SNAPSHOT_COLUMNS = ("step", "time", "area", "barycenter_x", "barycenter_y")
PROBE_KINDS = ("phi-sign", "g-mono", "normal-bound", "moving-plane", "radial", "half-omega", "laplacian")


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser whose usage errors exit with status 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        print(f"❌ {self.prog}: {message}", file=sys.stderr)
        raise SystemExit(EXIT_ERROR)


# ---- argument syntax ----------------------------------------------------------


def parse_range(text: str) -> list[float]:
    """``start:stop:step`` with an inclusive stop, or a single number."""
    parts = text.split(":")
    try:
        values = [float(p) for p in parts]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"not a number range: {text!r}") from e
    if len(values) == 1:
        return values
    if len(values) != 3 or values[2] <= 0 or values[1] < values[0]:
        raise argparse.ArgumentTypeError(f"expected start:stop:step with step > 0, got {text!r}")
    start, stop, step = values
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def parse_linspace(text: str) -> np.ndarray:
    """``start:stop:count`` grid axis."""
    parts = text.split(":")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except (ValueError, IndexError) as e:
        raise argparse.ArgumentTypeError(f"expected start:stop:count, got {text!r}") from e
    if count < 1:
        raise argparse.ArgumentTypeError(f"count must be positive in {text!r}")
    return np.linspace(start, stop, count)


_PI_FRACTION = re.compile(r"^(?P<num>\d*\.?\d*)\s*\*?\s*pi(?:\s*/\s*(?P<den>\d+(?:\.\d+)?))?$")


def parse_angle(text: str) -> float:
    """Radians: a float, ``pi``, ``pi/k``, ``2pi/3``, ``acos(1/sqrt5)`` or ``critical``."""
    key = text.strip().lower().replace(" ", "")
    if key in {"critical", "acos(1/sqrt5)", "acos(1/sqrt(5))", "arccos(1/sqrt5)"}:
        return CRITICAL_ALPHA
    match = _PI_FRACTION.match(key)
    if match:
        num = float(match["num"]) if match["num"] else 1.0
        den = float(match["den"]) if match["den"] else 1.0
        return num * math.pi / den
    try:
        return float(key)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}") from e


# ---- helpers ------------------------------------------------------------------


class Run:
    """Per-command context: settings, the manifest being built and output helpers."""

    def __init__(self, args: argparse.Namespace, settings: Settings, argv: Sequence[str]) -> None:
        self.args = args
        self.settings = settings
        self.started = time.perf_counter()
        self.manifest = io.RunManifest(["vpatch", *argv], settings.tolerances.as_dict())

    def contour(self, path: Path) -> Contour:
        self.manifest.add_input(path)
        return io.load_contour(path, self.args.nodes, self.settings.tolerances, self.settings.evaluation_nodes)

    def emit(self, payload: dict[str, Any], schema: str, out: Path | None = None) -> None:
        """Write the payload and its manifest, or print it when no output path was given."""
        target = out if out is not None else getattr(self.args, "out", None)
        if target is None:
            payload = io.clean(payload)
            io.validate(payload, schema)
            print(json.dumps(payload, indent=2))
            return
        io.dump_json(payload, target, schema)
        self.finish(target)
        _say(f"📝 Wrote {target}")

    def finish(self, *outputs: Path) -> None:
        self.manifest.outputs.extend(str(p) for p in outputs)
        self.manifest.wall_time = time.perf_counter() - self.started
        for output in outputs:
            self.manifest.write(output)


def _say(message: str) -> None:
    """Status lines go to stderr; stdout carries only payloads."""
    print(message, file=sys.stderr)


def _status(passed: bool, message: str) -> int:
    _say(f"{'✅' if passed else '❌'} {message}")
    return EXIT_OK if passed else EXIT_FAILED


# ---- subcommands --------------------------------------------------------------


def cmd_residual(run: Run) -> int:
    args = run.args
    contour = run.contour(args.contour)
    r = boundary_residual(contour, args.omega)
    i = int(np.argmax(np.abs(r)))
    sup = float(np.abs(r[i]))
    payload = {
        "schema": io.RESIDUAL,
        "omega": args.omega,
        "residual_norm": sup,
        "argmax_theta": float(contour.theta[i]),
        "mu": compute_mu(contour, args.omega),
        "mu_spread": boundary_mu_spread(contour, args.omega),
        "best_fit_omega": best_fit_omega(contour),
        "nodes": contour.node_count,
    }
    run.emit(payload, io.RESIDUAL)
    if args.max_residual is not None:
        message = f"residual sup-norm {sup:.3e} (limit {args.max_residual:.1e})"
        return _status(sup <= args.max_residual, message)
    _say(f"✅ residual sup-norm {sup:.3e} at omega={args.omega}")
    return EXIT_OK


def _solve_problem(run: Run) -> VStateProblem:
    args = run.args
    nodes = args.nodes or run.settings.solve_nodes
    if args.start == "ellipse":
        shape = PolarShape.ellipse(args.a, args.b, args.terms)
        omega = args.omega if args.omega is not None else kirchhoff_omega(args.a, args.b)
        return VStateProblem(shape, omega, args.free_omega, nodes)
    if args.omega is None:
        raise UsageError("--omega is required unless --start ellipse")
    return VStateProblem.near_disc(args.m, args.omega, args.amp0, args.terms, nodes, args.free_omega)


def cmd_solve(run: Run) -> int:
    args = run.args
    solution = newton_solve(_solve_problem(run), args.tol, args.max_iter, run.settings.tolerances)
    run.emit(io.solution_to_json(solution), io.SOLUTION)
    _say(
        f"✅ converged in {solution.iterations} iterations: omega={solution.omega:.12g}, "
        f"a1={solution.branch_parameter:.6g}, residual={solution.residual_norm:.3e}"
    )
    return EXIT_OK


def cmd_branch(run: Run) -> int:
    args = run.args
    nodes = args.nodes or run.settings.solve_nodes
    problem = VStateProblem.near_disc(args.m, bifurcation_omega(args.m), args.amps[0], args.terms, nodes, True)
    try:
        solutions = continuation(problem, args.amps, args.tol, args.max_iter, run.settings.tolerances)
    except BranchAbortedError as e:
        run.emit(io.branch_to_json(args.m, e.partial, {"message": str(e), **e.witness}), io.BRANCH)
        raise
    run.emit(io.branch_to_json(args.m, solutions), io.BRANCH)
    for s in solutions:
        _say(f"  a1={s.branch_parameter:.6g}  omega={s.omega:.12g}  residual={s.residual_norm:.3e}")
    _say(f"✅ branch m={args.m}: {len(solutions)} solutions")
    return EXIT_OK


def cmd_sigma_check(run: Run) -> int:
    args = run.args
    contour = run.contour(args.contour)
    report = classify(contour, args.alpha, args.interior_samples)
    max_alpha = estimate_max_alpha(contour, args.interior_samples) if args.estimate_alpha else None
    run.emit(io.sigma_report_to_json(report, max_alpha), io.SIGMA_REPORT)
    for c in report.conditions:
        _say(f"  {'✅' if c.passed else '❌'} {c.name}: {c.value:.6g}")
    return _status(report.verdict, f"class check at alpha={report.alpha:.10g}")


def cmd_probe(run: Run) -> int:
    args = run.args
    contour = run.contour(args.contour)
    kind = args.kind
    if kind == "half-omega":
        report = half_omega_identity_probe(contour, count=args.samples, seed=args.seed)
    else:
        if args.omega is None:
            raise UsageError(f"--omega is required for probe {kind}")
        field = PatchField.canonical(contour, args.omega)
        probes: dict[str, Callable[[], Any]] = {
            "phi-sign": lambda: phi_sign_probe(field, count=args.samples, seed=args.seed),
            "g-mono": lambda: g_monotonicity_probe(field, args.t_grid),
            "normal-bound": lambda: normal_derivative_bound_probe(field, args.t_grid),
            "moving-plane": lambda: moving_plane_probe(field, args.lambdas, args.grid),
            "radial": lambda: radial_symmetry_probe(field),
            "laplacian": lambda: laplacian_dichotomy_probe(field, count=args.samples, seed=args.seed),
        }
        try:
            report = probes[kind]()
        except ProbeRefusedError as e:
            if e.report is not None:
                print(json.dumps(io.clean(io.sigma_report_to_json(e.report)), indent=2))
            raise
    run.emit(io.probe_report_to_json(report), io.PROBE_REPORT)
    for note in report.notes:
        _say(f"⚠️  {note}")
    return _status(report.verdict, f"probe {report.probe}: margin {report.margin:.6g}")


def cmd_evolve(run: Run) -> int:
    args = run.args
    contour = run.contour(args.contour)
    out_dir: Path = args.out_dir
    written: list[Path] = []

    def snapshot(state: EvolutionState) -> None:
        path = out_dir / f"step_{state.step_index:06d}.json"
        written.append(io.dump_json(io.contour_to_json(state.contour), path, io.CONTOUR))

    config = TimeStepConfig(args.dt, args.steps, args.renode_every)
    final, rows = evolve(EvolutionState(contour), config, args.snapshot_every, snapshot)
    table = np.array([[r[key] for key in SNAPSHOT_COLUMNS] for r in rows])
    csv = io.write_csv(out_dir / "manifest.csv", list(SNAPSHOT_COLUMNS), table)
    run.manifest.outputs.extend(str(p) for p in written)
    run.finish(csv)

    drift = abs(final.contour.area - contour.area) / contour.area
    _say(f"✅ {final.step_index} steps to t={final.time:.6g}; relative area drift {drift:.3e}")
    if args.omega is not None:
        error = rigid_rotation_error(contour, final.contour, args.omega, final.time)
        _say(f"  rigid rotation error at omega={args.omega}: {error:.3e}")
    _say(f"📝 Wrote {len(written)} snapshots and {csv}")
    return EXIT_OK


def cmd_field(run: Run) -> int:
    args = run.args
    contour = run.contour(args.contour)
    field = PatchField.canonical(contour, args.omega)
    points = (args.x[None, :] + 1j * args.y[:, None]).ravel()
    sample = sample_field(field, points)
    table = np.column_stack(
        (
            points.real,
            points.imag,
            sample.psi,
            sample.velocity.real,
            sample.velocity.imag,
            sample.phi,
            sample.cauchy.real,
            sample.cauchy.imag,
        )
    )
    header = ["x", "y", "psi", "vx", "vy", "phi", "re_C", "im_C"]
    if args.out is None:
        np.savetxt(sys.stdout, table, fmt="%.17g", delimiter=",", header=",".join(header), comments="")
        return EXIT_OK
    io.write_csv(args.out, header, table)
    run.finish(args.out)
    _say(f"📝 Wrote {points.size} rows to {args.out}")
    return EXIT_OK


def cmd_bifurcation_scan(run: Run) -> int:
    args = run.args
    nodes = args.nodes or run.settings.evaluation_nodes
    scan = bifurcation_scan(args.m, args.omega, args.terms, nodes, tolerances=run.settings.tolerances)
    eigen = None
    if args.eigen:
        eigen = bifurcation_points(args.m, args.terms, nodes, run.settings.tolerances).tolist()
    run.emit(io.scan_to_json(scan, eigen), io.BIFURCATION_SCAN)
    expected = (args.m - 1) / (2 * args.m)
    _say(
        f"✅ smallest singular value {scan.sigma_min:.3e} at omega={scan.omega_min:.8f} "
        f"(expected {expected:.8f})"
    )
    return EXIT_OK


def cmd_far_field(run: Run) -> int:
    args = run.args
    contour = run.contour(args.contour)
    model = far_field_fit(contour, args.omega, args.radius)
    run.emit(io.far_field_to_json(model), io.FAR_FIELD)
    exponent = "exact" if model.decay_exponent is None else f"{model.decay_exponent:.4f}"
    _say(f"✅ far-field remainder bound {model.remainder_bound:.6g}, decay exponent {exponent}")
    return EXIT_OK


# ---- parser -------------------------------------------------------------------


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="vpatch", description="Rotating vortex patch laboratory")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    parser.add_argument("--threads", type=int, help="Worker threads (overrides VPATCH_THREADS)")
    parser.add_argument("--config", type=Path, help="YAML file with tolerance and node-count overrides")
    parser.add_argument("--nodes", type=int, help="Quadrature node count for contours and solves")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    def command(name: str, handler: Callable[[Run], int], help_text: str) -> ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(handler=handler)
        return p

    def contour_arg(p: argparse.ArgumentParser) -> None:
        p.add_argument("--contour", type=Path, required=True, help="Contour JSON file")

    def out_arg(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", type=Path, help="Output file (prints to stdout when omitted)")

    p = command("residual", cmd_residual, "V-state residual of a contour")
    contour_arg(p)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--max-residual", type=float, help="Exit 2 when the sup-norm exceeds this value")
    out_arg(p)

    p = command("solve", cmd_solve, "Newton solve for an m-fold V-state")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--omega", type=float)
    p.add_argument("--amp0", type=float, default=0.05, help="Initial (or pinned) first cosine")
    p.add_argument("--start", choices=("disc", "ellipse"), default="disc")
    p.add_argument("--a", type=float, default=2.0, help="Ellipse semi-axis along x")
    p.add_argument("--b", type=float, default=1.0, help="Ellipse semi-axis along y")
    p.add_argument("--terms", type=int, default=16)
    p.add_argument("--free-omega", action="store_true", help="Pin a1 and solve for omega")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=50)
    out_arg(p)

    p = command("branch", cmd_branch, "Continuation along the branch bifurcating at (m-1)/(2m)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--amps", type=parse_range, required=True, help="start:stop:step pinned amplitudes")
    p.add_argument("--terms", type=int, default=16)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=50)
    out_arg(p)

    p = command("sigma-check", cmd_sigma_check, "Sampled membership in the slightly-convex class")
    contour_arg(p)
    p.add_argument("--alpha", type=parse_angle, default=CRITICAL_ALPHA)
    p.add_argument("--interior-samples", type=int, default=10_000)
    p.add_argument("--estimate-alpha", action="store_true", help="Also report the sampled largest alpha")
    out_arg(p)

    p = command("probe", cmd_probe, "Run one rigidity probe")
    p.add_argument("--kind", choices=PROBE_KINDS, required=True)
    contour_arg(p)
    p.add_argument("--omega", type=float)
    p.add_argument("--lambdas", type=parse_range, default=list(DEFAULT_LAMBDAS))
    p.add_argument("--t-grid", type=parse_range, default=list(DEFAULT_T_GRID))
    p.add_argument("--grid", type=int, default=100, help="Moving-plane grid side")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    out_arg(p)

    p = command("evolve", cmd_evolve, "Contour-dynamics time stepping")
    contour_arg(p)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--snapshot-every", type=int, default=100)
    p.add_argument("--renode-every", type=int, default=20)
    p.add_argument("--omega", type=float, help="Report the rigid rotation error at this angular velocity")
    p.add_argument("--out-dir", type=Path, required=True)

    p = command("field", cmd_field, "Evaluate psi, v, phi and C on a grid")
    contour_arg(p)
    p.add_argument("--omega", type=float, default=0.0)
    p.add_argument("--x", type=parse_linspace, required=True, help="start:stop:count")
    p.add_argument("--y", type=parse_linspace, required=True, help="start:stop:count")
    out_arg(p)

    p = command("bifurcation-scan", cmd_bifurcation_scan, "Smallest singular value of the disc linearization")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--omega", type=parse_range, required=True, help="start:stop:step")
    p.add_argument("--terms", type=int, default=4)
    p.add_argument("--eigen", action="store_true", help="Also solve the generalized eigenvalue problem")
    out_arg(p)

    p = command("far-field", cmd_far_field, "Fit the far-field remainder of psi")
    contour_arg(p)
    p.add_argument("--omega", type=float, default=0.0)
    p.add_argument("--radius", type=float, help="Inner fitting radius (default: three diameters)")
    out_arg(p)

    return parser


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)


def dispatch(argv: Sequence[str]) -> int:
    """Parse ``argv``, run the subcommand and map the outcome to an exit code."""
    argv = list(argv)
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        settings = load_settings(args.config, args.threads)
        set_threads(settings.threads)
        return int(args.handler(Run(args, settings, argv)))
    except VPatchError as e:
        _say(f"❌ {type(e).__name__}: {e}")
        if e.witness:
            _say(json.dumps(io.clean(e.witness), indent=2))
        return EXIT_ERROR


def main() -> int:
    return dispatch(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
