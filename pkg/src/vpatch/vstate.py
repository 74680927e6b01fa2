# SPDX-FileCopyrightText: Copyright (c) 2026 provide.io llc. All rights reserved.
# SPDX-License-Identifier: MIT

"""V-state boundary equation, bifurcation detection and Newton continuation.

The residual at a boundary node is

    r = 1/2 Re{(2 Omega conj(z) + C(z)) tau(z)} = (v - Omega x_perp) . nu,

which is affine in Omega: r = n(a) + Omega s(a) with s = Re(conj(z) tau).
For shapes symmetric about the x-axis the residual is odd in theta, so the
Galerkin equations are its sine harmonics sin(j m theta), j = 1..J.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy import linalg, optimize

from vpatch.config import DEFAULT_TOLERANCES, Tolerances
from vpatch.errors import (
    BranchAbortedError,
    DivergenceError,
    DomainError,
    SingularSystemError,
)
from vpatch.geometry import Contour, PolarShape
from vpatch.potential import boundary_cauchy_values

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]

_RANK_RATIO = 1e-7
_DISC_GUARD = 1e-8  # every |a_j| below this is the disc
_STALL_FACTOR = 10.0
_RESOLVED_RATIO = 1e-3
_BRANCH_STEP = 0.02
_BRANCH_STEPS = 25


def _split_residual(contour: Contour) -> tuple[FloatArray, FloatArray]:
    """Omega-independent part n and Omega coefficient s of the node residual."""
    tau = contour.tangent
    n = 0.5 * (boundary_cauchy_values(contour) * tau).real
    s = (np.conj(contour.points) * tau).real
    return n, s


def boundary_residual(contour: Contour, omega: float) -> FloatArray:
    """Residual of the V-state equation at every node."""
    n, s = _split_residual(contour)
    return n + omega * s


def kirchhoff_omega(a: float, b: float) -> float:
    if a <= 0 or b <= 0:
        raise DomainError("semi-axes must be positive", {"a": a, "b": b})
    return a * b / (a + b) ** 2


def bifurcation_omega(m: int) -> float:
    if m < 2:
        raise DomainError("bifurcation from the disc needs m >= 2", {"m": m})
    return (m - 1) / (2 * m)


def best_fit_omega(contour: Contour) -> float:
    """Least-squares angular velocity of a contour."""
    n, s = _split_residual(contour)
    denom = float(np.dot(s, s))
    if denom == 0.0:
        return 0.0
    return -float(np.dot(s, n)) / denom


def kirchhoff_speed_search(
    contour: Contour, bounds: tuple[float, float] = (0.0, 0.5), grid: int = 51
) -> tuple[float, float]:
    """Omega minimizing the residual sup-norm, by golden-section search.

    Returns ``(omega, sup_residual)``.
    """
    n, s = _split_residual(contour)

    def sup(omega: float) -> float:
        return float(np.abs(n + omega * s).max())

    omegas = np.linspace(bounds[0], bounds[1], grid)
    values = np.array([sup(w) for w in omegas])
    i = int(np.argmin(values))
    if 0 < i < grid - 1:
        result = optimize.minimize_scalar(
            sup, bracket=(omegas[i - 1], omegas[i], omegas[i + 1]), method="golden", options={"xtol": 1e-12}
        )
    else:
        lo, hi = omegas[max(i - 1, 0)], omegas[min(i + 1, grid - 1)]
        result = optimize.minimize_scalar(sup, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    return float(result.x), float(result.fun)


# ---- polar problems ---------------------------------------------------------


@dataclass(frozen=True)
class VStateProblem:
    """m-fold polar V-state problem.

    With ``free_omega`` the first cosine is pinned at its current value and
    omega becomes an unknown.
    """

    shape: PolarShape
    omega: float
    free_omega: bool = False
    nodes: int = 512

    def __post_init__(self) -> None:
        if self.shape.terms < 1:
            raise DomainError("the shape needs at least one cosine unknown")
        if not self.shape.terms < self.nodes / (2 * self.shape.symmetry):
            raise DomainError(
                "too many cosine unknowns for the node count",
                {"terms": self.shape.terms, "nodes": self.nodes, "m": self.shape.symmetry},
            )

    @property
    def m(self) -> int:
        return self.shape.symmetry

    @property
    def branch_parameter(self) -> float:
        return self.shape.cosines[0]

    @classmethod
    def near_disc(
        cls,
        m: int,
        omega: float,
        amplitude: float = 0.0,
        terms: int = 16,
        nodes: int = 512,
        free_omega: bool = False,
    ) -> VStateProblem:
        cosines = np.zeros(terms)
        cosines[0] = amplitude
        return cls(PolarShape(m, 1.0, tuple(cosines)), omega, free_omega, nodes)


@dataclass(frozen=True)
class VStateSolution:
    shape: PolarShape
    omega: float
    residual_norm: float
    branch_parameter: float
    iterations: int = 0
    nodes: int = 512

    @property
    def m(self) -> int:
        return self.shape.symmetry

    def contour(self, nodes: int | None = None) -> Contour:
        return shape_contour(self.shape, nodes or self.nodes)


def shape_contour(shape: PolarShape, nodes: int, tolerances: Tolerances = DEFAULT_TOLERANCES) -> Contour:
    """Polar graphs with R > 0 are simple, so the pairwise segment check is skipped here."""
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    return Contour.from_samples(shape.radius(theta) * np.exp(1j * theta), tolerances)


class _Galerkin:
    """Residual projected on sin(j m theta), j = 1..J, as a function of the unknown vector."""

    def __init__(self, problem: VStateProblem, tolerances: Tolerances) -> None:
        self.problem = problem
        self.tolerances = tolerances
        n = problem.nodes
        theta = 2.0 * np.pi * np.arange(n) / n
        harmonics = problem.m * np.arange(1, problem.shape.terms + 1)
        self.projector = (2.0 / n) * np.sin(np.outer(harmonics, theta))
        self.pinned = problem.branch_parameter

    def initial(self) -> FloatArray:
        a = np.asarray(self.problem.shape.cosines, dtype=float)
        if self.problem.free_omega:
            return np.concatenate((a[1:], [self.problem.omega]))
        return a.copy()

    def unpack(self, u: FloatArray) -> tuple[PolarShape, float]:
        if self.problem.free_omega:
            cosines = np.concatenate(([self.pinned], u[:-1]))
            return self.problem.shape.with_cosines(cosines), float(u[-1])
        return self.problem.shape.with_cosines(u), self.problem.omega

    def evaluate(self, u: FloatArray) -> tuple[FloatArray, float]:
        """Projected residual and nodal sup-norm."""
        shape, omega = self.unpack(u)
        r = boundary_residual(shape_contour(shape, self.problem.nodes, self.tolerances), omega)
        return self.projector @ r, float(np.abs(r).max())

    def jacobian(self, u: FloatArray) -> FloatArray:
        step = self.tolerances.jacobian_step
        columns = []
        for j in range(u.size):
            e = np.zeros_like(u)
            e[j] = step
            plus, _ = self.evaluate(u + e)
            minus, _ = self.evaluate(u - e)
            columns.append((plus - minus) / (2.0 * step))
        return np.column_stack(columns)


def linearization_smallest_singular_value(
    problem: VStateProblem, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> float:
    """Smallest singular value of the projected residual Jacobian at fixed omega."""
    fixed = VStateProblem(problem.shape, problem.omega, False, problem.nodes)
    system = _Galerkin(fixed, tolerances)
    return float(linalg.svdvals(system.jacobian(system.initial()))[-1])


@dataclass(frozen=True)
class BifurcationScan:
    m: int
    omegas: tuple[float, ...]
    singular_values: tuple[float, ...]
    omega_min: float
    sigma_min: float


def bifurcation_scan(
    m: int,
    omegas: Sequence[float],
    terms: int = 4,
    nodes: int = 256,
    refine: bool = True,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> BifurcationScan:
    """Smallest singular value of the disc linearization over an omega grid.

    The grid minimum is refined by a bounded Brent search between its neighbours.
    """
    grid = np.asarray(sorted(omegas), dtype=float)
    if grid.size == 0:
        raise DomainError("empty omega grid")

    def sigma(omega: float) -> float:
        return linearization_smallest_singular_value(
            VStateProblem.near_disc(m, omega, terms=terms, nodes=nodes), tolerances
        )

    values = np.array([sigma(w) for w in grid])
    i = int(np.argmin(values))
    omega_min, sigma_min = float(grid[i]), float(values[i])
    if refine and grid.size > 1:
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
        result = optimize.minimize_scalar(sigma, bounds=(lo, hi), method="bounded", options={"xatol": 1e-8})
        if result.fun <= sigma_min:
            omega_min, sigma_min = float(result.x), float(result.fun)
    logger.info("bifurcation scan m=%d: minimum %.3e at omega=%.8f", m, sigma_min, omega_min)
    return BifurcationScan(m, tuple(grid.tolist()), tuple(values.tolist()), omega_min, sigma_min)


def bifurcation_points(
    m: int, terms: int = 4, nodes: int = 256, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> FloatArray:
    """Real omegas where the disc linearization A + omega B is singular."""
    base = _Galerkin(VStateProblem.near_disc(m, 0.0, terms=terms, nodes=nodes), tolerances)
    unit = _Galerkin(VStateProblem.near_disc(m, 1.0, terms=terms, nodes=nodes), tolerances)
    a = base.jacobian(base.initial())
    b = unit.jacobian(unit.initial()) - a
    eigen = linalg.eigvals(a, -b)
    finite = eigen[np.isfinite(eigen) & (np.abs(eigen.imag) < 1e-8)]
    return np.sort(finite.real)


# ---- Newton ---------------------------------------------------------------


def _padded(cosines: Sequence[float] | FloatArray, terms: int) -> FloatArray:
    a = np.asarray(cosines, dtype=float)
    out = np.zeros(max(terms, a.size))
    out[: a.size] = a
    return out


def _term_capacity(problem: VStateProblem) -> int:
    """Largest cosine count a solve grows to: harmonics stay below a quarter of the nodes."""
    return max(problem.shape.terms, problem.nodes // (4 * problem.m))


def _is_disc(shape: PolarShape) -> bool:
    return max(abs(a) for a in shape.cosines) < _DISC_GUARD


def _wants_branch(problem: VStateProblem) -> bool:
    """Fixed speed strictly between 0 and the bifurcation speed, started off the disc."""
    if problem.free_omega or problem.m < 2:
        return False
    inside = 0.0 < problem.omega < bifurcation_omega(problem.m)
    return inside and abs(problem.branch_parameter) >= _DISC_GUARD


def _gauss_newton(
    system: _Galerkin, tolerance: float, max_iter: int, tolerances: Tolerances
) -> tuple[FloatArray, FloatArray, float, int, bool]:
    """Damped iterations until the nodal sup-norm reaches ``tolerance``, stalls or runs out.

    Returns ``(u, projected_residual, sup_norm, iterations, converged)``.
    """
    u = system.initial()
    f, sup = system.evaluate(u)
    iteration = 0
    for iteration in range(max_iter + 1):
        logger.debug("newton iteration %d: sup residual %.3e", iteration, sup)
        if sup <= tolerance:
            return u, f, sup, iteration, True
        if iteration == max_iter:
            break

        jac = system.jacobian(u)
        sv = linalg.svdvals(jac)
        if sv[-1] <= _RANK_RATIO * max(sv[0], 1.0):
            raise SingularSystemError(
                "Jacobian is rank deficient",
                {"iteration": iteration, "smallest_singular_value": float(sv[-1]), "iterate": u.tolist()},
            )
        step, *_ = linalg.lstsq(jac, -f)

        damping = 1.0
        norm = float(np.linalg.norm(f))
        while damping >= tolerances.damping_floor:
            trial = u + damping * step
            try:
                f_trial, sup_trial = system.evaluate(trial)
            except DomainError:
                f_trial, sup_trial = None, np.inf
            if f_trial is not None and float(np.linalg.norm(f_trial)) < norm:
                u, f, sup = trial, f_trial, sup_trial
                break
            damping *= 0.5
        else:
            logger.debug("no descent above damping %.3g; stalled at %.3e", tolerances.damping_floor, sup)
            break
    return u, f, sup, iteration, False


def _solve(
    problem: VStateProblem, tolerance: float, max_iter: int, tolerances: Tolerances
) -> VStateSolution:
    """Gauss-Newton, doubling the cosine count while truncation holds the nodal residual up."""
    capacity = _term_capacity(problem)
    total = 0
    while True:
        system = _Galerkin(problem, tolerances)
        u, f, sup, iterations, converged = _gauss_newton(system, tolerance, max_iter, tolerances)
        total += iterations
        shape, omega = system.unpack(u)
        if converged:
            logger.info("V-state converged in %d iterations (omega=%.12g, residual=%.3e)", total, omega, sup)
            return VStateSolution(shape, omega, sup, shape.cosines[0], total, problem.nodes)

        resolved = float(np.abs(f).max()) <= max(tolerance, _RESOLVED_RATIO * sup)
        if resolved and shape.terms < capacity:
            terms = min(2 * shape.terms, capacity)
            logger.info(
                "projected residual solved but nodal residual is %.3e; cosine terms %d -> %d",
                sup,
                shape.terms,
                terms,
            )
            grown = shape.with_cosines(_padded(shape.cosines, terms))
            problem = VStateProblem(grown, omega, problem.free_omega, problem.nodes)
            continue
        if sup <= _STALL_FACTOR * tolerance:
            logger.info("accepting residual %.3e at the round-off floor (tolerance %.1e)", sup, tolerance)
            return VStateSolution(shape, omega, sup, shape.cosines[0], total, problem.nodes)
        raise DivergenceError(
            "Newton iteration did not converge",
            {
                "iterations": total,
                "residual_norm": sup,
                "omega": omega,
                "terms": shape.terms,
                "cosines": list(shape.cosines),
            },
        )


def newton_solve(
    problem: VStateProblem,
    tolerance: float = 1e-10,
    max_iter: int = 50,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> VStateSolution:
    """Damped Gauss-Newton on the projected residual.

    When the projected equations are solved but the nodal residual stays above
    ``tolerance``, the cosine series is truncated: the term count doubles, up to
    a quarter of the nodes per fold. A stall within 10x ``tolerance`` is
    accepted as the round-off floor and reported with its actual residual.

    At a fixed omega in (0, (m-1)/(2m)) a start off the disc that falls back
    onto the disc is re-seeded from the branch bifurcating at (m-1)/(2m): the
    branch is followed in its amplitude until it passes omega, and the
    interpolated shape is corrected at fixed omega. Landing on the disc again
    raises DivergenceError.

    Raises SingularSystemError when the Jacobian loses rank and
    DivergenceError (witness: last iterate) when the nodal sup-norm does not
    reach ``tolerance``.
    """
    seeded = _wants_branch(problem)
    try:
        solution = _solve(problem, tolerance, max_iter, tolerances)
    except DivergenceError as e:
        if not seeded:
            raise
        logger.info("direct solve at omega=%.6g failed (%s); seeding from the branch", problem.omega, e)
        return _solve_from_branch(problem, tolerance, max_iter, tolerances)
    if seeded and _is_disc(solution.shape):
        logger.info(
            "start a1=%.3g fell back onto the disc at omega=%.6g; seeding from the m=%d branch",
            problem.branch_parameter,
            problem.omega,
            problem.m,
        )
        return _solve_from_branch(problem, tolerance, max_iter, tolerances)
    return solution


def _solve_from_branch(
    problem: VStateProblem, tolerance: float, max_iter: int, tolerances: Tolerances
) -> VStateSolution:
    """Follow the branch from the disc until its omega passes ``problem.omega``, then correct there."""
    m, target = problem.m, problem.omega
    origin = bifurcation_omega(m)
    direction = 1.0 if problem.branch_parameter > 0 else -1.0
    zero = np.zeros(problem.shape.terms)
    template = VStateProblem(problem.shape.with_cosines(zero), origin, True, problem.nodes)

    below: tuple[FloatArray, float] = (zero, origin)
    solutions: list[VStateSolution] = []
    for k in range(1, _BRANCH_STEPS + 1):
        s = direction * k * _BRANCH_STEP
        try:
            solution = _branch_step(template, solutions, s, tolerance, max_iter, tolerances)
        except (DivergenceError, SingularSystemError, DomainError) as e:
            raise DivergenceError(
                f"branch m={m} ended before reaching omega={target}",
                {**e.witness, "target_omega": target, "amplitude": s},
            ) from e
        solutions.append(solution)
        logger.debug("seeding branch m=%d: amplitude %.4g -> omega %.10g", m, s, solution.omega)
        if solution.omega <= target:
            break
        below = (np.asarray(solution.shape.cosines), solution.omega)
    else:
        raise DivergenceError(
            f"branch m={m} does not reach omega={target}",
            {"target_omega": target, "reached_omega": solutions[-1].omega, "amplitude": s},
        )

    above = solutions[-1]
    terms = max(below[0].size, above.shape.terms)
    lo, hi = _padded(below[0], terms), _padded(above.shape.cosines, terms)
    t = (target - below[1]) / (above.omega - below[1])
    seed = problem.shape.with_cosines(lo + t * (hi - lo))
    solution = _solve(VStateProblem(seed, target, False, problem.nodes), tolerance, max_iter, tolerances)
    if _is_disc(solution.shape):
        raise DivergenceError(
            "correction at fixed omega fell back onto the disc",
            {
                "omega": target,
                "seed_amplitude": float(seed.cosines[0]),
                "cosines": list(solution.shape.cosines),
            },
        )
    logger.info("V-state at omega=%.12g seeded from the branch: a1=%.6g", target, solution.branch_parameter)
    return solution


def _branch_step(
    template: VStateProblem,
    solutions: list[VStateSolution],
    s: float,
    tolerance: float,
    max_iter: int,
    tolerances: Tolerances,
) -> VStateSolution:
    """Solve with omega freed at pinned amplitude ``s``, seeded by extrapolating the last two solutions."""
    terms = max([template.shape.terms, *(x.shape.terms for x in solutions)])
    guess, omega = _padded(template.shape.cosines, terms), template.omega
    if solutions:
        last = solutions[-1]
        guess, omega = _padded(last.shape.cosines, terms), last.omega
        if len(solutions) > 1:
            prev = solutions[-2]
            ds = last.branch_parameter - prev.branch_parameter
            if ds != 0:
                t = (s - last.branch_parameter) / ds
                guess = guess + t * (guess - _padded(prev.shape.cosines, terms))
                omega = omega + t * (last.omega - prev.omega)
    guess[0] = s
    step_problem = VStateProblem(template.shape.with_cosines(guess), omega, True, template.nodes)
    return _solve(step_problem, tolerance, max_iter, tolerances)


def continuation(
    problem: VStateProblem,
    amplitude_grid: Sequence[float],
    tolerance: float = 1e-10,
    max_iter: int = 50,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> list[VStateSolution]:
    """Follow the branch through the pinned amplitudes with omega freed.

    Each step starts from a linear extrapolation of the previous two
    solutions. A diverging step raises BranchAbortedError carrying the
    solutions found so far.
    """
    solutions: list[VStateSolution] = []
    for s in amplitude_grid:
        try:
            solution = _branch_step(problem, solutions, float(s), tolerance, max_iter, tolerances)
        except (DivergenceError, SingularSystemError) as e:
            raise BranchAbortedError(
                f"continuation stopped at amplitude {s}: {e}",
                solutions,
                {"amplitude": float(s), "completed": len(solutions), **e.witness},
            ) from e
        logger.info("branch m=%d: amplitude %.6g -> omega %.12g", problem.m, s, solution.omega)
        solutions.append(solution)
    return solutions
