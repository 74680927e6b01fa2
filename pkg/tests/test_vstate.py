# SPDX-FileCopyrightText: Copyright (c) 2026 provide.io llc. All rights reserved.
# SPDX-License-Identifier: MIT

from __future__ import annotations

import numpy as np
import pytest

from vpatch.errors import BranchAbortedError, DivergenceError, DomainError, SingularSystemError
from vpatch.geometry import Contour, PolarShape
from vpatch.potential import boundary_mu_spread, velocity
from vpatch.vstate import (
    VStateProblem,
    best_fit_omega,
    bifurcation_omega,
    bifurcation_points,
    bifurcation_scan,
    boundary_residual,
    continuation,
    kirchhoff_omega,
    kirchhoff_speed_search,
    linearization_smallest_singular_value,
    newton_solve,
)


class TestBoundaryResidual:
    @pytest.mark.parametrize("omega", [-1.0, 0.0, 0.3, 0.5])
    def test_disc_rotates_at_any_speed(self, disc, omega):
        assert np.abs(boundary_residual(disc, omega)).max() < 1e-12

    def test_kirchhoff_ellipse(self, ellipse):
        assert np.abs(boundary_residual(ellipse, 2.0 / 9.0)).max() < 1e-8
        assert np.abs(boundary_residual(ellipse, 0.3)).max() > 1e-2

    def test_matches_relative_normal_velocity(self, ellipse):
        omega = 0.3
        nodes = ellipse.points[::8]
        v = np.asarray(velocity(ellipse, nodes))
        relative = v - omega * 1j * nodes
        expected = (relative * np.conj(ellipse.normal[::8])).real
        np.testing.assert_allclose(boundary_residual(ellipse, omega)[::8], expected, atol=1e-10)

    def test_rotation_invariance(self, ellipse):
        angle = 2 * np.pi * 5 / ellipse.node_count
        original = boundary_residual(ellipse, 0.3)
        rotated = boundary_residual(ellipse.rotated(angle), 0.3)
        np.testing.assert_allclose(rotated, original, atol=1e-12)

    def test_best_fit_omega(self, ellipse, disc):
        assert best_fit_omega(ellipse) == pytest.approx(2.0 / 9.0, abs=1e-10)
        assert best_fit_omega(Contour.ellipse(3.0, 1.0)) == pytest.approx(3.0 / 16.0, abs=1e-10)


class TestClosedForms:
    @pytest.mark.parametrize(("a", "b", "expected"), [(1, 1, 0.25), (2, 1, 2 / 9), (3, 1, 3 / 16)])
    def test_kirchhoff(self, a, b, expected):
        assert kirchhoff_omega(a, b) == pytest.approx(expected)

    def test_kirchhoff_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            kirchhoff_omega(0.0, 1.0)

    @pytest.mark.parametrize(("m", "expected"), [(2, 0.25), (3, 1 / 3), (4, 3 / 8)])
    def test_bifurcation(self, m, expected):
        assert bifurcation_omega(m) == pytest.approx(expected)

    def test_bifurcation_needs_two_fold_symmetry(self):
        with pytest.raises(DomainError):
            bifurcation_omega(1)

    @pytest.mark.parametrize(("a", "b"), [(2.0, 1.0), (3.0, 1.0), (1.5, 1.0)])
    def test_speed_search_recovers_kirchhoff(self, a, b):
        omega, sup = kirchhoff_speed_search(Contour.ellipse(a, b, nodes=256))
        assert omega == pytest.approx(kirchhoff_omega(a, b), abs=1e-6)
        assert sup < 1e-8


class TestProblem:
    def test_too_many_unknowns(self):
        with pytest.raises(DomainError):
            VStateProblem(PolarShape(3, 1.0, (0.0,) * 50), 0.3, nodes=256)

    def test_needs_an_unknown(self):
        with pytest.raises(DomainError):
            VStateProblem(PolarShape(3, 1.0, ()), 0.3)

    def test_near_disc(self):
        problem = VStateProblem.near_disc(4, -0.1, amplitude=0.02, terms=8)
        assert problem.m == 4
        assert problem.branch_parameter == 0.02
        assert problem.shape.cosines[1:] == (0.0,) * 7


class TestLinearization:
    def test_singular_at_bifurcation(self):
        problem = VStateProblem.near_disc(3, 1.0 / 3.0, terms=4, nodes=256)
        assert linearization_smallest_singular_value(problem) < 1e-5

    def test_regular_away_from_bifurcation(self):
        problem = VStateProblem.near_disc(3, 0.2, terms=4, nodes=256)
        assert linearization_smallest_singular_value(problem) > 1e-2

    def test_scan_brackets_bifurcation(self):
        scan = bifurcation_scan(3, np.arange(0.30, 0.3601, 0.005))
        assert scan.omega_min == pytest.approx(1.0 / 3.0, abs=5e-4)
        assert scan.sigma_min < 1e-4
        assert len(scan.omegas) == len(scan.singular_values)

    def test_scan_two_fold(self):
        scan = bifurcation_scan(2, np.linspace(0.1, 0.35, 11), refine=False)
        assert scan.omega_min == pytest.approx(0.25)

    def test_generalized_eigenvalues(self):
        points = bifurcation_points(3, terms=4)
        expected = [(k - 1) / (2 * k) for k in (3, 6, 9, 12)]
        for omega in expected:
            assert np.min(np.abs(points - omega)) < 1e-6


class TestNewton:
    @pytest.mark.parametrize(("m", "omega"), [(2, -0.1), (3, -0.2), (4, -0.3)])
    def test_negative_speed_returns_to_disc(self, m, omega):
        problem = VStateProblem.near_disc(m, omega, amplitude=0.05, terms=8, nodes=256)
        solution = newton_solve(problem)
        assert np.max(np.abs(solution.shape.cosines)) < 1e-8
        assert solution.omega == omega
        assert solution.residual_norm <= 1e-10

    def test_kirchhoff_start_is_already_converged(self):
        problem = VStateProblem(PolarShape.ellipse(2.0, 1.0, 32), 2.0 / 9.0, nodes=512)
        solution = newton_solve(problem)
        assert solution.iterations <= 2
        np.testing.assert_allclose(solution.shape.cosines, problem.shape.cosines, atol=1e-10)

    def test_singular_at_bifurcation_with_fixed_speed(self):
        problem = VStateProblem.near_disc(3, 1.0 / 3.0, terms=4, nodes=256)
        with pytest.raises(SingularSystemError) as info:
            newton_solve(problem, tolerance=0.0)
        assert info.value.witness["smallest_singular_value"] < 1e-6

    def test_divergence_reports_last_iterate(self):
        problem = VStateProblem.near_disc(3, -0.2, amplitude=0.05, terms=4, nodes=256)
        with pytest.raises(DivergenceError) as info:
            newton_solve(problem, max_iter=0)
        assert info.value.witness["cosines"][0] == pytest.approx(0.05)
        assert info.value.witness["residual_norm"] > 1e-10

    @pytest.mark.slow
    def test_fixed_speed_below_bifurcation_finds_the_branch(self):
        problem = VStateProblem.near_disc(3, 0.32, amplitude=0.05, terms=16, nodes=512)
        solution = newton_solve(problem)
        assert solution.omega == 0.32
        assert 0.1 < solution.branch_parameter < 0.25
        assert solution.residual_norm <= 1e-10
        assert np.abs(boundary_residual(solution.contour(), 0.32)).max() <= 1e-10


@pytest.mark.slow
class TestContinuation:
    @pytest.mark.parametrize("m", [3, 4])
    def test_branch_leaves_the_disc_at_bifurcation(self, m):
        start = bifurcation_omega(m)
        problem = VStateProblem.near_disc(m, start, amplitude=0.01, free_omega=True)
        branch = continuation(problem, [0.01, 0.02, 0.03, 0.04, 0.05])
        assert len(branch) == 5
        assert branch[0].omega == pytest.approx(start, abs=1e-3)
        for solution in branch:
            assert 0.0 < solution.omega < 0.5
            assert solution.residual_norm <= 1e-10
            spread = boundary_mu_spread(solution.contour(), solution.omega)
            assert spread <= 10 * solution.residual_norm + 1e-13
            doubled = boundary_residual(solution.contour(2 * solution.nodes), solution.omega)
            assert abs(np.abs(doubled).max() - solution.residual_norm) <= 1e-10
        assert [s.branch_parameter for s in branch] == pytest.approx([0.01, 0.02, 0.03, 0.04, 0.05])

    def test_nontrivial_three_fold_state(self):
        problem = VStateProblem.near_disc(3, 1.0 / 3.0, amplitude=0.01, free_omega=True)
        branch = continuation(problem, np.linspace(0.01, 0.08, 8))
        last = branch[-1]
        assert np.max(np.abs(last.shape.cosines)) > 1e-3
        assert np.abs(boundary_residual(last.contour(), last.omega)).max() <= 1e-10

    def test_branch_grows_terms_past_the_truncation_floor(self):
        problem = VStateProblem.near_disc(3, 1.0 / 3.0, amplitude=0.01, free_omega=True)
        branch = continuation(problem, np.linspace(0.01, 0.18, 18))
        assert len(branch) == 18
        omegas = [s.omega for s in branch]
        assert omegas == sorted(omegas, reverse=True)
        assert omegas[-1] < 0.325
        assert branch[-1].shape.terms > 16
        for solution in branch:
            assert solution.residual_norm <= 1e-9
            spread = boundary_mu_spread(solution.contour(), solution.omega)
            assert spread <= 10 * solution.residual_norm + 1e-13

    def test_aborted_branch_keeps_partial_results(self):
        problem = VStateProblem.near_disc(3, 1.0 / 3.0, amplitude=0.01, terms=4, nodes=256, free_omega=True)
        with pytest.raises(BranchAbortedError) as info:
            continuation(problem, [0.01, 0.02], max_iter=0)
        assert info.value.partial == []
        assert info.value.witness["amplitude"] == pytest.approx(0.01)
