# SPDX-FileCopyrightText: Copyright (c) 2026 provide.io llc. All rights reserved.
# SPDX-License-Identifier: MIT

from __future__ import annotations

import numpy as np
import pytest

from vpatch import dynamics
from vpatch.dynamics import (
    EvolutionState,
    TimeStepConfig,
    boundary_velocity,
    evolve,
    renodalize,
    rigid_rotation_error,
    step,
)
from vpatch.errors import DomainError, EvolutionBreakdownError
from vpatch.geometry import hausdorff_distance


class TestConfig:
    @pytest.mark.parametrize("dt", [0.0, -1e-3])
    def test_dt_positive(self, dt):
        with pytest.raises(DomainError):
            TimeStepConfig(dt)

    def test_renode_interval(self):
        with pytest.raises(DomainError):
            TimeStepConfig(0.1, renode_every=0)

    def test_time_nonnegative(self, disc):
        with pytest.raises(DomainError):
            EvolutionState(disc, time=-1.0)


class TestBoundaryVelocity:
    def test_ellipse_tip_moves_vertically(self, ellipse):
        v = boundary_velocity(ellipse)
        assert abs(v[0].real) < 1e-8
        assert v[0].imag == pytest.approx(2.0 / 3.0, abs=1e-8)


class TestStep:
    def test_disc_is_steady(self, disc):
        state = step(EvolutionState(disc), TimeStepConfig(0.01))
        assert state.step_index == 1
        assert state.time == pytest.approx(0.01)
        assert hausdorff_distance(state.contour, disc) < 1e-12

    def test_breakdown_keeps_last_state(self, disc, monkeypatch):
        dt = 0.1
        # half a step of this field pinches the circle at theta = pi
        monkeypatch.setattr(dynamics, "boundary_velocity", lambda c: np.exp(2j * c.theta) / dt)
        start = EvolutionState(disc)
        with pytest.raises(EvolutionBreakdownError) as info:
            step(start, TimeStepConfig(dt))
        assert info.value.last_state is start
        assert info.value.witness["step"] == 1


class TestRenodalize:
    def test_keeps_curve_and_area(self, ellipse):
        out = renodalize(ellipse)
        assert out.area == pytest.approx(ellipse.area, abs=1e-12)
        assert hausdorff_distance(out, ellipse) < 1e-9
        spacing = np.abs(np.diff(np.append(out.points, out.points[0])))
        assert spacing.max() / spacing.min() < 1.01

    def test_rescales_to_target_area(self, peanut):
        out = renodalize(peanut, area=1.1 * peanut.area)
        assert out.area == pytest.approx(1.1 * peanut.area, rel=1e-12)
        assert abs(out.barycenter - peanut.barycenter) < 1e-10


class TestEvolve:
    def test_snapshot_schedule(self, disc):
        seen = []
        config = TimeStepConfig(0.01, steps=4)
        final, rows = evolve(EvolutionState(disc), config, snapshot_every=2, callback=seen.append)
        assert [row["step"] for row in rows] == [0, 2, 4]
        assert len(seen) == 3
        assert final.step_index == 4
        assert final.time == pytest.approx(0.04)

    def test_resumed_state_ends_on_last_step(self, disc):
        _, rows = evolve(EvolutionState(disc, 1.0, 10), TimeStepConfig(0.01, steps=3), snapshot_every=2)
        assert [row["step"] for row in rows] == [10, 12, 13]

    @pytest.mark.slow
    def test_kirchhoff_ellipse_rotates_rigidly(self, ellipse):
        omega = 2.0 / 9.0
        final, rows = evolve(EvolutionState(ellipse), TimeStepConfig(1e-3, steps=1000))
        assert final.time == pytest.approx(1.0)
        assert rigid_rotation_error(ellipse, final.contour, omega, final.time) < 1e-4
        assert abs(rows[-1]["area"] - ellipse.area) < 1e-8
        drift = abs(complex(rows[-1]["barycenter_x"], rows[-1]["barycenter_y"]) - ellipse.barycenter)
        assert drift < 1e-8 * ellipse.diameter

    def test_rotation_equivariance(self, peanut):
        angle = 0.7
        config = TimeStepConfig(0.01, steps=10, renode_every=5)
        rotated_first, _ = evolve(EvolutionState(peanut.rotated(angle)), config)
        rotated_last, _ = evolve(EvolutionState(peanut), config)
        np.testing.assert_allclose(
            rotated_first.contour.points, rotated_last.contour.rotated(angle).points, atol=1e-12
        )

    def test_fourth_order_in_time(self, ellipse):
        omega = 2.0 / 9.0
        errors = []
        for dt in (0.2, 0.1, 0.05):
            config = TimeStepConfig(dt, steps=round(1.0 / dt), renode_every=1000)
            final, _ = evolve(EvolutionState(ellipse), config)
            errors.append(rigid_rotation_error(ellipse, final.contour, omega, final.time))
        assert errors[0] / errors[1] >= 8.0
        assert errors[1] / errors[2] >= 8.0


class TestRigidRotationError:
    def test_disc(self, disc):
        assert rigid_rotation_error(disc, disc.rotated(0.4), 0.3, 1.0) < 1e-12

    def test_wrong_speed(self, ellipse):
        rotated = ellipse.rotated(2.0 / 9.0)
        assert rigid_rotation_error(ellipse, rotated, 2.0 / 9.0, 1.0) < 1e-12
        assert rigid_rotation_error(ellipse, rotated, 0.3, 1.0) > 0.05
