# SPDX-FileCopyrightText: Copyright (c) 2026 provide.io llc. All rights reserved.
# SPDX-License-Identifier: MIT

"""Sampled membership test for the class of slightly convex domains.

A domain D with barycenter 0 belongs to the class of half-angle alpha when,
at every boundary point x0 with outward normal nu:

1. x0 . nu >= 0;
2. no point of D lies in the sector {x : (x - x0)/|x - x0| . nu >= cos(alpha)};
3. the part of D above the tangent line at x0, reflected across that line,
   stays inside D.

Every decision here is made on samples (boundary nodes and an interior grid)
and reports its worst margin and the sampling resolution. A pass is evidence,
not a certificate.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import NDArray

from vpatch.errors import DomainError
from vpatch.geometry import Contour, ReflectionFrame, contains, reflect
from vpatch.parallel import map_chunks

logger = logging.getLogger(__name__)

ComplexArray = NDArray[np.complex128]

CRITICAL_ALPHA = float(np.arccos(1.0 / np.sqrt(5.0)))
DEFAULT_INTERIOR_SAMPLES = 10_000
DEFAULT_REFLECTION_SAMPLES = 2_000


@dataclass(frozen=True)
class SectorSpec:
    alpha: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 0.5 * np.pi + 1e-15:
            raise DomainError("alpha must lie in [0, pi/2]", {"alpha": self.alpha})

    @property
    def threshold(self) -> float:
        return float(np.cos(self.alpha))

    @classmethod
    def critical(cls) -> SectorSpec:
        return cls(CRITICAL_ALPHA)


@dataclass(frozen=True)
class ConditionRecord:
    """Outcome of one condition: the extreme sampled value and where it occurs."""

    name: str
    passed: bool
    value: float
    witness: dict[str, Any] | None = None
    count: int = 0
    details: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class SigmaReport:
    alpha: float
    threshold: float
    condition1: ConditionRecord
    condition2: ConditionRecord
    condition3: ConditionRecord
    boundary_nodes: int
    interior_samples: int
    tolerance: float

    @property
    def verdict(self) -> bool:
        return self.condition1.passed and self.condition2.passed and self.condition3.passed

    @property
    def conditions(self) -> tuple[ConditionRecord, ConditionRecord, ConditionRecord]:
        return self.condition1, self.condition2, self.condition3


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def interior_samples(contour: Contour, count: int = DEFAULT_INTERIOR_SAMPLES) -> ComplexArray:
    """Bounding-box grid filtered to the interior, dropping points within the boundary delta."""
    pts = contour.points
    lo = complex(pts.real.min(), pts.imag.min())
    hi = complex(pts.real.max(), pts.imag.max())
    box = (hi.real - lo.real) * (hi.imag - lo.imag)
    spacing = np.sqrt(contour.area / max(count, 1))
    nx = max(2, int(np.ceil((hi.real - lo.real) / spacing)))
    ny = max(2, int(np.ceil((hi.imag - lo.imag) / spacing)))
    logger.debug("interior grid %dx%d over a box of area %.4g", nx, ny, box)
    # cell centres, so the grid never lands on an axis-aligned tangent point
    x = lo.real + (np.arange(nx) + 0.5) * (hi.real - lo.real) / nx
    y = lo.imag + (np.arange(ny) + 0.5) * (hi.imag - lo.imag) / ny
    grid = (x[None, :] + 1j * y[:, None]).ravel()
    delta = contour.tolerances.boundary_delta * contour.diameter
    grid = grid[contour.distance_to_boundary(grid) >= delta]
    return grid[contains(contour, grid, delta)]


def check_condition1(contour: Contour) -> ConditionRecord:
    """min over nodes of x0 . nu after moving the barycenter to the origin.

    The value is a length, so its margin is ``geometric`` times the diameter.
    """
    centred = contour.recentered()
    support = (centred.points * np.conj(centred.normal)).real
    i = int(np.argmin(support))
    tol = centred.tolerances.geometric * centred.diameter
    passed = bool(support[i] >= -tol)
    return ConditionRecord(
        "support",
        passed,
        float(support[i]),
        None if passed else {"point": _pair(centred.points[i]), "theta": float(centred.theta[i])},
        details={"tolerance": tol, "tolerance_scale": "diameter"},
    )


def _sector_dots(contour: Contour, samples: ComplexArray) -> NDArray[np.float64]:
    """Per node: max sector dot product over the samples and the arg-max sample index."""
    base, normal = contour.points, contour.normal

    def block(nodes: NDArray[np.int64]) -> NDArray[np.float64]:
        chord = samples[None, :] - base[nodes, None]
        length = np.abs(chord)
        dots = (chord * np.conj(normal[nodes, None])).real / np.where(length > 0, length, 1.0)
        j = np.argmax(dots, axis=1)
        return np.column_stack((dots[np.arange(nodes.size), j], j.astype(np.float64)))

    return map_chunks(block, np.arange(contour.node_count), chunk=32)


def check_condition2(
    contour: Contour, sector: SectorSpec, samples: ComplexArray | None = None
) -> ConditionRecord:
    """max over (node, interior sample) of the sector dot product against cos(alpha).

    The dot product is taken with the unit chord, so it is dimensionless and the
    margin is ``geometric`` itself, not scaled by the diameter as in condition 1.
    """
    if samples is None:
        samples = interior_samples(contour)
    tol = contour.tolerances.geometric
    if samples.size == 0:
        return ConditionRecord(
            "sector", True, -1.0, details={"tolerance": tol, "tolerance_scale": "unit", "samples": 0}
        )
    table = _sector_dots(contour, samples)
    i = int(np.argmax(table[:, 0]))
    value = float(table[i, 0])
    passed = value < sector.threshold - tol
    witness = None
    if not passed:
        y = samples[int(table[i, 1])]
        witness = {"base_point": _pair(contour.points[i]), "sample": _pair(y), "dot": value}
    return ConditionRecord(
        "sector",
        passed,
        value,
        witness,
        details={
            "tolerance": tol,
            "tolerance_scale": "unit",
            "threshold": sector.threshold,
            "samples": int(samples.size),
        },
    )


def check_condition3(
    contour: Contour, samples: ComplexArray | None = None, max_samples: int = DEFAULT_REFLECTION_SAMPLES
) -> ConditionRecord:
    """Reflect the interior samples above each tangent line and test that they stay in D."""
    if samples is None:
        samples = interior_samples(contour)
    if samples.size > max_samples:
        samples = samples[:: int(np.ceil(samples.size / max_samples))]

    tol = contour.tolerances
    delta = tol.boundary_delta * contour.diameter
    above_total = outside = excluded = 0
    worst: dict[str, Any] | None = None
    worst_depth = -np.inf
    for i in range(contour.node_count):
        frame = ReflectionFrame.at_node(contour, i)
        above = samples[frame.height(samples) >= 0]
        if above.size == 0:
            continue
        above_total += above.size
        images = np.atleast_1d(reflect(frame, above))
        dist = contour.distance_to_boundary(images)
        ambiguous = dist < delta
        excluded += int(ambiguous.sum())
        images, above, dist = images[~ambiguous], above[~ambiguous], dist[~ambiguous]
        if images.size == 0:
            continue
        escaped = ~np.asarray(contains(contour, images, delta))
        outside += int(escaped.sum())
        if escaped.any():
            k = int(np.argmax(np.where(escaped, dist, -np.inf)))
            if dist[k] > worst_depth:
                worst_depth = float(dist[k])
                worst = {
                    "base_point": _pair(frame.base_point),
                    "sample": _pair(above[k]),
                    "reflected": _pair(images[k]),
                    "distance": worst_depth,
                }

    flagged = above_total > 0 and excluded > tol.reflection_exclusion * above_total
    passed = outside == 0 and not flagged
    logger.debug(
        "reflection check: %d above-tangent samples, %d escaped, %d excluded", above_total, outside, excluded
    )
    return ConditionRecord(
        "reflection",
        passed,
        float(worst_depth) if worst is not None else 0.0,
        worst,
        count=outside,
        details={"above_tangent": above_total, "excluded": excluded, "exclusions_flagged": bool(flagged)},
    )


def classify(
    contour: Contour, alpha: float = CRITICAL_ALPHA, interior_count: int = DEFAULT_INTERIOR_SAMPLES
) -> SigmaReport:
    """Run the three conditions on the recentred contour."""
    sector = SectorSpec(alpha)
    centred = contour.recentered()
    samples = interior_samples(centred, interior_count)
    report = SigmaReport(
        alpha=sector.alpha,
        threshold=sector.threshold,
        condition1=check_condition1(centred),
        condition2=check_condition2(centred, sector, samples),
        condition3=check_condition3(centred, samples),
        boundary_nodes=centred.node_count,
        interior_samples=int(samples.size),
        tolerance=centred.tolerances.geometric,
    )
    logger.info(
        "classification at alpha=%.6f: %s (%s)",
        alpha,
        "pass" if report.verdict else "fail",
        ", ".join(f"{c.name}={'pass' if c.passed else 'fail'}" for c in report.conditions),
    )
    return report


def estimate_max_alpha(contour: Contour, interior_count: int = DEFAULT_INTERIOR_SAMPLES) -> float | None:
    """Sampled estimate of the largest alpha passing the sector condition.

    Returns None unless the support and reflection conditions hold, since
    the estimate is meaningless for a domain outside every class.
    """
    centred = contour.recentered()
    samples = interior_samples(centred, interior_count)
    if not (check_condition1(centred).passed and check_condition3(centred, samples).passed):
        return None
    if samples.size == 0:
        return 0.5 * np.pi
    worst = float(_sector_dots(centred, samples)[:, 0].max())
    return float(np.arccos(np.clip(worst + centred.tolerances.geometric, 0.0, 1.0)))
