# SPDX-FileCopyrightText: Copyright (c) 2026 provide.io llc. All rights reserved.
# SPDX-License-Identifier: MIT

"""Lagrangian contour dynamics.

Boundary nodes move with the self-induced velocity (bounded Cauchy kernel),
advanced by classical RK4. Every ``renode_every`` steps the curve is
reparametrized by arc length, filtered and rescaled to the area it had before
the refit.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import NDArray

from vpatch.errors import ContourError, DomainError, EvolutionBreakdownError
from vpatch.geometry import Contour, hausdorff_distance
from vpatch.potential import boundary_velocity_values

logger = logging.getLogger(__name__)

ComplexArray = NDArray[np.complex128]

FILTER_LEVEL = 1e-14
_ARC_NEWTON_STEPS = 8


@dataclass(frozen=True)
class EvolutionState:
    contour: Contour
    time: float = 0.0
    step_index: int = 0

    def __post_init__(self) -> None:
        if self.time < 0:
            raise DomainError("time must be nonnegative", {"time": self.time})


@dataclass(frozen=True)
class TimeStepConfig:
    dt: float
    steps: int = 1
    renode_every: int = 20

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise DomainError("dt must be positive", {"dt": self.dt})
        if self.steps < 0 or self.renode_every < 1:
            raise DomainError(
                "steps must be >= 0 and renode_every >= 1",
                {"steps": self.steps, "renode_every": self.renode_every},
            )


def boundary_velocity(contour: Contour) -> ComplexArray:
    """Velocity vx + i vy at every node."""
    return boundary_velocity_values(contour)


def _arc_length_nodes(contour: Contour) -> NDArray[np.float64]:
    """Parameters theta_j splitting the curve into N arcs of equal length."""
    n = contour.node_count
    fine = 2 * n
    _, dz = contour.oversampled(2)
    speed = np.abs(dz)
    spectrum = np.fft.fft(speed) / fine
    k = np.fft.fftfreq(fine, d=1.0 / fine)
    mean = spectrum[0].real
    integrated = np.zeros_like(spectrum)
    nonzero = k != 0
    integrated[nonzero] = spectrum[nonzero] / (1j * k[nonzero])

    def arc(theta: NDArray[np.float64]) -> NDArray[np.float64]:
        periodic = (np.exp(1j * np.outer(theta, k)) @ integrated).real
        return mean * theta + periodic - integrated.sum().real

    total = 2.0 * np.pi * mean
    target = total * np.arange(n) / n
    grid = 2.0 * np.pi * np.arange(fine + 1) / fine
    theta = np.interp(target, arc(grid), grid)
    for _ in range(_ARC_NEWTON_STEPS):
        correction = (arc(theta) - target) / np.abs(contour.derivative_at(theta))
        theta = theta - correction
        if np.abs(correction).max() < 1e-15:
            break
    return theta


def renodalize(contour: Contour, area: float | None = None) -> Contour:
    """Equal-arc-length nodes, round-off filter, and rescaling to ``area`` about the barycenter."""
    target = contour.area if area is None else area
    z, _ = contour.at(_arc_length_nodes(contour))
    refit = Contour.from_samples(z, contour.tolerances)
    c = refit.coefficients.copy()
    c[np.abs(c) < FILTER_LEVEL * np.abs(c).max()] = 0.0
    refit = Contour(c, refit.node_count, contour.tolerances)
    return refit.scaled(np.sqrt(target / refit.area), refit.barycenter)


def _stage(points: ComplexArray, like: Contour) -> Contour:
    return Contour.from_samples(points, like.tolerances)


def step(state: EvolutionState, config: TimeStepConfig) -> EvolutionState:
    """One RK4 step of all nodes, renodalizing on schedule."""
    dt = config.dt
    contour = state.contour
    z0 = contour.points
    try:
        k1 = boundary_velocity(contour)
        k2 = boundary_velocity(_stage(z0 + 0.5 * dt * k1, contour))
        k3 = boundary_velocity(_stage(z0 + 0.5 * dt * k2, contour))
        k4 = boundary_velocity(_stage(z0 + dt * k3, contour))
        advanced = _stage(z0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), contour)
        index = state.step_index + 1
        if index % config.renode_every == 0:
            advanced = renodalize(advanced)
        advanced.check_simple()
    except ContourError as e:
        raise EvolutionBreakdownError(
            f"contour broke down at step {state.step_index + 1}: {e}",
            state,
            {"step": state.step_index + 1, "time": state.time + dt, **e.witness},
        ) from e
    return EvolutionState(advanced, state.time + dt, index)


def snapshot_row(state: EvolutionState) -> dict[str, float]:
    centre = state.contour.barycenter
    return {
        "step": state.step_index,
        "time": state.time,
        "area": state.contour.area,
        "barycenter_x": centre.real,
        "barycenter_y": centre.imag,
    }


def evolve(
    state: EvolutionState,
    config: TimeStepConfig,
    snapshot_every: int | None = None,
    callback: Callable[[EvolutionState], Any] | None = None,
) -> tuple[EvolutionState, list[dict[str, float]]]:
    """Run ``config.steps`` steps; returns the final state and one manifest row per snapshot.

    Snapshots are taken at the start, every ``snapshot_every`` steps and at the end.
    """
    rows = [snapshot_row(state)]
    if callback is not None:
        callback(state)
    for taken in range(1, config.steps + 1):
        state = step(state, config)
        if taken == config.steps or (snapshot_every and taken % snapshot_every == 0):
            rows.append(snapshot_row(state))
            logger.info("step %d t=%.6g area=%.15g", state.step_index, state.time, state.contour.area)
            if callback is not None:
                callback(state)
    return state, rows


def rigid_rotation_error(initial: Contour, evolved: Contour, omega: float, t: float) -> float:
    """Hausdorff distance between ``evolved`` and ``initial`` rotated by omega t about the origin."""
    return hausdorff_distance(evolved, initial.rotated(omega * t))
