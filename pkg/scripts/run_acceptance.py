#!/usr/bin/env python3
# SPDX-FileCopyrightText: Copyright (c) 2026 provide.io llc. All rights reserved.
# SPDX-License-Identifier: MIT

"""Run the numerical acceptance checks against the installed vpatch package.

Each check prints one ✅/❌ line with the measured quantity. The contour
dynamics check takes a few minutes and can be skipped with --quick.

Exit codes:
  0 - All checks passed
  1 - At least one check failed or raised
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from collections.abc import Callable

import numpy as np

from vpatch.dynamics import EvolutionState, TimeStepConfig, evolve, rigid_rotation_error
from vpatch.errors import VPatchError
from vpatch.geometry import Contour, PolarShape
from vpatch.parallel import set_threads
from vpatch.potential import PatchField, cauchy_transform, stream_function, velocity
from vpatch.probes import (
    DEFAULT_LAMBDAS,
    HalfPlaneFrame,
    g_monotonicity_probe,
    half_omega_identity_probe,
    laplacian_dichotomy_probe,
    moving_plane_probe,
    phi_lambda,
    phi_sign_probe,
)
from vpatch.sigma import CRITICAL_ALPHA, classify
from vpatch.vstate import (
    VStateProblem,
    bifurcation_omega,
    bifurcation_scan,
    boundary_residual,
    continuation,
    kirchhoff_omega,
    kirchhoff_speed_search,
    newton_solve,
)

Check = Callable[[], tuple[bool, str]]

PEANUT = PolarShape(2, 1.0, (0.6,))


def disc_residual() -> tuple[bool, str]:
    disc = Contour.circle(1.0, nodes=256)
    worst = max(float(np.abs(boundary_residual(disc, w)).max()) for w in (-1.0, 0.0, 0.25, 0.5))
    return worst < 1e-12, f"disc residual sup {worst:.2e}"


def kirchhoff_formula() -> tuple[bool, str]:
    errors = []
    residuals = []
    for a, b in ((2.0, 1.0), (3.0, 1.0), (1.5, 1.0)):
        omega, sup = kirchhoff_speed_search(Contour.ellipse(a, b, nodes=256))
        errors.append(abs(omega - kirchhoff_omega(a, b)))
        residuals.append(sup)
    passed = max(errors) < 1e-6 and max(residuals) < 1e-8
    return passed, f"speed error {max(errors):.2e}, residual {max(residuals):.2e}"


def bifurcation_zeros() -> tuple[bool, str]:
    worst = 0.0
    for m in (2, 3, 4, 5):
        expected = bifurcation_omega(m)
        grid = np.arange(expected - 0.02, expected + 0.02 + 1e-12, 0.0025)
        scan = bifurcation_scan(m, grid.tolist())
        worst = max(worst, abs(scan.omega_min - expected))
    return worst < 5e-4, f"largest offset from (m-1)/(2m): {worst:.2e}"


def branch_existence() -> tuple[bool, str]:
    amps = [0.01, 0.02, 0.03, 0.04, 0.05]
    problem = VStateProblem.near_disc(3, bifurcation_omega(3), amps[0], terms=16, free_omega=True)
    branch = continuation(problem, amps)
    omegas = [s.omega for s in branch]
    residual = max(s.residual_norm for s in branch)
    gaps = [abs(w - 1.0 / 3.0) for w in omegas]
    fixed = newton_solve(VStateProblem.near_disc(3, 0.32, 0.05))
    passed = (
        residual < 1e-10 and all(0.0 < w < 0.5 for w in omegas) and gaps[0] < 1e-3 and gaps == sorted(gaps)
    )
    passed = passed and fixed.branch_parameter > 0 and fixed.residual_norm <= 1e-10
    return passed, (
        f"{len(branch)} solutions, omega {omegas[0]:.8f}..{omegas[-1]:.8f}, residual {residual:.2e}; "
        f"omega=0.32 state a1={fixed.branch_parameter:.4f}"
    )


def rigidity_negative_omega() -> tuple[bool, str]:
    largest = 0.0
    for m in (2, 3, 4):
        for omega in (-0.1, -0.3):
            solution = newton_solve(VStateProblem.near_disc(m, omega, 0.05))
            largest = max(largest, max(abs(a) for a in solution.shape.cosines))
    field = PatchField.canonical(Contour.circle(1.0, nodes=256), -1.0)
    plane = moving_plane_probe(field, DEFAULT_LAMBDAS, grid=100)
    sign = phi_sign_probe(field)
    passed = largest < 1e-8 and plane.verdict and plane.margin > 0 and sign.verdict and sign.margin > 0
    return passed, (
        f"largest cosine {largest:.2e}, "
        f"moving-plane margin {plane.margin:.3g}, phi-sign margin {sign.margin:.3g}"
    )


def rigidity_half_omega() -> tuple[bool, str]:
    disc = half_omega_identity_probe(Contour.circle(1.0, nodes=256))
    ellipse = half_omega_identity_probe(Contour.ellipse(2.0, 1.0, nodes=256))
    tip = complex(*ellipse.witness["point"])
    passed = disc.margin < 1e-10 and abs(ellipse.margin - 2.0 / 3.0) < 1e-6 and abs(tip - 2.0) < 1e-9
    return passed, f"disc margin {disc.margin:.2e}, ellipse margin {ellipse.margin:.8f} at {tip:.6g}"


def sigma_classifier() -> tuple[bool, str]:
    disc = Contour.circle(1.0, nodes=256)
    ellipse = Contour.ellipse(2.0, 1.0, nodes=256)
    peanut = PEANUT.to_contour(256)
    reports = [classify(c, CRITICAL_ALPHA) for c in (disc, ellipse, peanut)]
    failed = [c for c in reports[2].conditions if not c.passed]
    witnessed = bool(failed) and all(c.witness is not None for c in failed)
    refined = [classify(c.refined(2), CRITICAL_ALPHA, 20_000).verdict for c in (disc, ellipse, peanut)]
    verdicts = [r.verdict for r in reports]
    passed = verdicts == [True, True, False] and witnessed and refined == verdicts
    margins = ", ".join(f"{r.condition2.value:.4f}" for r in reports)
    return passed, f"verdicts {verdicts}, sector values {margins}, refined {refined}"


def potential_oracles() -> tuple[bool, str]:
    disc = Contour.circle(1.0, nodes=256)
    rng = np.random.default_rng(2024)
    points = rng.uniform(-2.5, 2.5, 2000) + 1j * rng.uniform(-2.5, 2.5, 2000)
    points = points[np.abs(np.abs(points) - 1.0) > 0.05][:1000]
    r = np.abs(points)
    inside = r < 1.0
    psi = np.where(inside, (r**2 - 1.0) / 4.0, 0.5 * np.log(r))
    c = np.where(inside, -np.conj(points), -1.0 / points)
    v = -0.5j * np.conj(c)
    worst = max(
        float(np.abs(np.asarray(stream_function(disc, points)) - psi).max()),
        float(np.abs(np.asarray(cauchy_transform(disc, points)) - c).max()),
        float(np.abs(np.asarray(velocity(disc, points)) - v).max()),
    )
    laplacian = [laplacian_dichotomy_probe(PatchField.canonical(disc, w), count=200) for w in (-1.0, 0.5)]
    kirchhoff = PatchField.canonical(Contour.ellipse(2.0, 1.0), 2.0 / 9.0)
    laplacian.append(laplacian_dichotomy_probe(kirchhoff, count=200))
    deviation = max(p.margin for p in laplacian)
    message = f"closed-form error {worst:.2e}, laplacian deviation {deviation:.2e}"
    return worst < 1e-10 and deviation < 1e-5, message


def kirchhoff_dynamics() -> tuple[bool, str]:
    ellipse = Contour.ellipse(2.0, 1.0, nodes=256)
    started = time.perf_counter()
    final, rows = evolve(EvolutionState(ellipse), TimeStepConfig(1e-3, steps=1000))
    elapsed = time.perf_counter() - started
    error = rigid_rotation_error(ellipse, final.contour, kirchhoff_omega(2.0, 1.0), final.time)
    drift = abs(rows[-1]["area"] - ellipse.area)
    passed = error < 1e-4 and drift < 1e-8 and elapsed <= 300.0
    return passed, f"rotation error {error:.2e}, area drift {drift:.2e}, {elapsed:.0f}s"


def moving_plane_structure() -> tuple[bool, str]:
    rng = np.random.default_rng(7)
    worst = 0.0
    for contour, omega in ((Contour.ellipse(2.0, 1.0), 2.0 / 9.0), (PEANUT.to_contour(256), 0.3)):
        field = PatchField.canonical(contour, omega)
        frame = HalfPlaneFrame(float(rng.uniform(0.1, 1.5)))
        x = frame.lam - rng.uniform(0.01, 3.0, 100) + 1j * rng.uniform(-2.0, 2.0, 100)
        mirrored = np.asarray(phi_lambda(field, frame, frame.reflect(x)))
        antisymmetry = np.asarray(phi_lambda(field, frame, x)) + mirrored
        edge = np.asarray(phi_lambda(field, frame, frame.lam + 1j * rng.uniform(-2.0, 2.0, 50)))
        worst = max(worst, float(np.abs(antisymmetry).max()), float(np.abs(edge).max()))
    slope = g_monotonicity_probe(PatchField.canonical(Contour.circle(1.0, nodes=256), -1.0)).margin
    return worst < 1e-12 and slope <= -0.9, f"structure defect {worst:.2e}, largest slope {slope:.4f}"


CHECKS: list[tuple[str, Check, bool]] = [
    ("disc residual", disc_residual, False),
    ("Kirchhoff speed", kirchhoff_formula, False),
    ("bifurcation zeros", bifurcation_zeros, False),
    ("branch existence", branch_existence, False),
    ("rigidity for omega < 0", rigidity_negative_omega, False),
    ("rigidity for omega = 1/2", rigidity_half_omega, False),
    ("slightly-convex classifier", sigma_classifier, False),
    ("potential oracles", potential_oracles, False),
    ("Kirchhoff rotation", kirchhoff_dynamics, True),
    ("moving-plane structure", moving_plane_structure, False),
]


def main() -> int:
    """Run every check and report."""
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--quick", action="store_true", help="Skip the long contour-dynamics run")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args()

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    set_threads(args.threads)

    failures = []
    for number, (name, check, slow) in enumerate(CHECKS, start=1):
        if slow and args.quick:
            print(f"⏭️  {number:2d}. {name}: skipped")
            continue
        started = time.perf_counter()
        try:
            passed, message = check()
        except VPatchError as e:
            passed, message = False, f"{type(e).__name__}: {e}"
        elapsed = time.perf_counter() - started
        print(f"{'✅' if passed else '❌'} {number:2d}. {name}: {message} ({elapsed:.1f}s)")
        if not passed:
            failures.append(name)

    print()
    if failures:
        print(f"❌ {len(failures)} check(s) failed: {', '.join(failures)}")
        return 1
    print("✅ All acceptance checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
