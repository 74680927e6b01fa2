# SPDX-FileCopyrightText: Copyright (c) 2026 provide.io llc. All rights reserved.
# SPDX-License-Identifier: MIT

"""Numerical probes of the rigidity statements for rotating patches.

Each probe samples one inequality or identity and returns a
:class:`ProbeReport` with the worst signed margin, the sample attaining it
and the tolerances in force. Strict inequalities are tested against the
``strict`` slack; points within ``collar_spacings`` node spacings of the
boundary are dropped from sign tests.

Sampling is deterministic: generated samples come from
``numpy.random.default_rng(seed)``.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from vpatch.errors import DomainError, MonotonicityViolationError, ProbeRefusedError
from vpatch.geometry import Contour, as_complex, contains
from vpatch.potential import (
    PatchField,
    boundary_cauchy_values,
    boundary_stream_values,
    cauchy_transform,
    relative_stream,
    stream_gradient,
)
from vpatch.sigma import CRITICAL_ALPHA, classify, interior_samples
from vpatch.vstate import boundary_residual

logger = logging.getLogger(__name__)

ComplexArray = NDArray[np.complex128]
FloatArray = NDArray[np.float64]

DEFAULT_T_GRID = tuple(np.linspace(0.0, 3.0, 31).tolist())
DEFAULT_LAMBDAS = tuple(np.round(np.arange(0.1, 2.0001, 0.1), 10).tolist())
SLOPE_STEP = 1e-5
IDENTITY_TOLERANCE = 1e-8
LAPLACIAN_TOLERANCE = 1e-5
RADIAL_TOLERANCE = 1e-8


@dataclass(frozen=True)
class HalfPlaneFrame:
    """Half plane {x1 < lam}, its edge {x1 = lam} and the mirror x -> (2 lam - x1, x2)."""

    lam: float

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise DomainError("lambda must be positive", {"lambda": self.lam})

    def reflect(self, x: ArrayLike) -> Any:
        return 2.0 * self.lam - np.conj(as_complex(x))

    def in_half_plane(self, x: ArrayLike) -> Any:
        return as_complex(x).real < self.lam


@dataclass(frozen=True)
class ProbeReport:
    probe: str
    verdict: bool
    margin: float
    witness: dict[str, Any] | None
    samples: int
    tolerances: dict[str, float]
    details: dict[str, Any] = field(default_factory=dict)
    notes: tuple[str, ...] = ()


def phi_lambda(field: PatchField, frame: HalfPlaneFrame, x: ArrayLike) -> Any:
    """phi(x) - phi(x_lam)."""
    z = as_complex(x)
    return relative_stream(field, z) - relative_stream(field, frame.reflect(z))


# ---- helpers ---------------------------------------------------------------


def _pair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _first_extreme(values: FloatArray, largest: bool, slack: float = 1e-12) -> int:
    """Index of the first sample within ``slack`` of the extreme value."""
    target = values.max() if largest else values.min()
    close = values >= target - slack if largest else values <= target + slack
    return int(np.flatnonzero(close)[0])


def _collar(contour: Contour) -> float:
    return contour.tolerances.collar_spacings * contour.node_spacing


def _clear_of_collar(contour: Contour, points: ComplexArray) -> ComplexArray:
    points = np.atleast_1d(as_complex(points)).ravel()
    if points.size == 0:
        return points
    return points[contour.distance_to_boundary(points) >= _collar(contour)]


def default_samples(
    contour: Contour, count: int = 1000, seed: int = 0, extent: float = 3.0
) -> tuple[ComplexArray, ComplexArray]:
    """Seeded uniform interior and exterior samples outside the boundary collar.

    Exterior samples fill the square of half-width ``extent`` times the
    largest barycentric radius.
    """
    rng = np.random.default_rng(seed)
    pts = contour.points
    lo = complex(pts.real.min(), pts.imag.min())
    hi = complex(pts.real.max(), pts.imag.max())
    inner = lo.real + (hi.real - lo.real) * rng.random(4 * count) + 1j * (
        lo.imag + (hi.imag - lo.imag) * rng.random(4 * count)
    )
    inner = _clear_of_collar(contour, inner)
    inner = inner[contains(contour, inner)][:count]

    centre = contour.barycenter
    half = extent * float(np.abs(pts - centre).max())
    outer = centre + half * (rng.uniform(-1.0, 1.0, 2 * count) + 1j * rng.uniform(-1.0, 1.0, 2 * count))
    outer = _clear_of_collar(contour, outer)
    outer = outer[~np.asarray(contains(contour, outer))][:count]
    return inner, outer


def _vstate_defect(contour: Contour, omega: float) -> float:
    return float(np.abs(boundary_residual(contour, omega)).max())


def _require_vstate(field: PatchField, probe: str) -> float:
    defect = _vstate_defect(field.contour, field.omega)
    guard = field.contour.tolerances.vstate_guard
    if defect > guard:
        raise ProbeRefusedError(
            f"{probe}: contour is not a V-state at omega={field.omega}",
            {"residual": defect, "guard": guard},
        )
    return defect


def _require_negative_omega(field: PatchField, probe: str) -> None:
    if not field.omega < 0:
        raise ProbeRefusedError(f"{probe}: needs omega < 0", {"omega": field.omega})


# ---- probes ----------------------------------------------------------------


def phi_sign_probe(
    field: PatchField,
    interior: ArrayLike | None = None,
    exterior: ArrayLike | None = None,
    count: int = 1000,
    seed: int = 0,
) -> ProbeReport:
    """phi > 0 inside the patch and phi < 0 outside it."""
    _require_negative_omega(field, "phi-sign")
    defect = _require_vstate(field, "phi-sign")
    contour = field.contour
    if interior is None or exterior is None:
        gen_in, gen_out = default_samples(contour, count, seed)
        interior = gen_in if interior is None else interior
        exterior = gen_out if exterior is None else exterior
    inner = _clear_of_collar(contour, as_complex(interior))
    outer = _clear_of_collar(contour, as_complex(exterior))

    strict = contour.tolerances.strict
    phi_in = np.asarray(relative_stream(field, inner)) if inner.size else np.array([np.inf])
    phi_out = np.asarray(relative_stream(field, outer)) if outer.size else np.array([-np.inf])
    i_min = _first_extreme(phi_in, largest=False)
    o_max = _first_extreme(phi_out, largest=True)
    margin = float(min(phi_in[i_min], -phi_out[o_max]))
    if phi_in[i_min] <= -phi_out[o_max]:
        point = _pair(inner[i_min]) if inner.size else None
        witness = {"point": point, "phi": float(phi_in[i_min]), "side": "interior"}
    else:
        point = _pair(outer[o_max]) if outer.size else None
        witness = {"point": point, "phi": float(phi_out[o_max]), "side": "exterior"}

    on_boundary = field.mu + 0.5 * field.omega * np.abs(contour.points) ** 2 - boundary_stream_values(contour)
    return ProbeReport(
        "phi-sign",
        margin > strict,
        margin,
        witness,
        int(inner.size + outer.size),
        contour.tolerances.as_dict(),
        {
            "interior_min": float(phi_in[i_min]),
            "exterior_max": float(phi_out[o_max]),
            "boundary_max_abs": float(np.abs(on_boundary).max()),
            "vstate_residual": defect,
        },
    )


def g_monotonicity_probe(field: PatchField, t_grid: Sequence[float] = DEFAULT_T_GRID) -> ProbeReport:
    """g(t) = phi(x0 + t nu(x0)) decreases along every outward normal ray."""
    _require_negative_omega(field, "g-monotonicity")
    contour = field.contour
    t = np.asarray(t_grid, dtype=float)
    base, normal = contour.points, contour.normal
    ray = base[:, None] + t[None, :] * normal[:, None]
    step = SLOPE_STEP * normal[:, None]
    ahead = np.asarray(relative_stream(field, (ray + step).ravel())).reshape(ray.shape)
    behind = np.asarray(relative_stream(field, (ray - step).ravel())).reshape(ray.shape)
    slope = (ahead - behind) / (2.0 * SLOPE_STEP)

    flat = slope.ravel()
    k = _first_extreme(flat, largest=True)
    node, j = divmod(k, t.size)
    strict = contour.tolerances.strict
    margin = float(flat[k])
    return ProbeReport(
        "g-monotonicity",
        margin <= -strict,
        margin,
        {"base_point": _pair(base[node]), "t": float(t[j]), "slope": margin},
        int(flat.size),
        contour.tolerances.as_dict(),
        {"max_slope": margin, "t_grid": t.tolist(), "step": SLOPE_STEP},
    )


def normal_derivative_bound_probe(
    field: PatchField, t_grid: Sequence[float] = DEFAULT_T_GRID, interior_count: int = 4000
) -> ProbeReport:
    """grad psi . nu(x0) >= 0 along outward normal rays of a domain in the critical class."""
    contour = field.contour
    report = classify(contour, CRITICAL_ALPHA, interior_count)
    if not report.verdict:
        raise ProbeRefusedError(
            "normal-bound: contour is outside the critical class",
            {"failed": [c.name for c in report.conditions if not c.passed]},
            report=report,
        )
    t = np.asarray(t_grid, dtype=float)
    base, normal = contour.points, contour.normal
    ray = (base[:, None] + t[None, :] * normal[:, None]).ravel()
    grad = np.asarray(stream_gradient(contour, ray)).reshape(base.size, t.size)
    values = (grad * np.conj(normal)[:, None]).real

    flat = values.ravel()
    k = _first_extreme(flat, largest=False)
    node, j = divmod(k, t.size)
    strict = contour.tolerances.strict
    margin = float(flat[k])
    return ProbeReport(
        "normal-bound",
        margin >= -strict,
        margin,
        {"base_point": _pair(base[node]), "t": float(t[j]), "value": margin},
        int(flat.size),
        contour.tolerances.as_dict(),
        {"min_value": margin, "t_grid": t.tolist()},
    )


def moving_plane_probe(
    field: PatchField,
    lambdas: Sequence[float] = DEFAULT_LAMBDAS,
    grid: int = 100,
    extent: float | None = None,
) -> ProbeReport:
    """phi_lam > 0 on H_lam and d/dx1 phi_lam < 0 on T_lam, for every lambda."""
    _require_negative_omega(field, "moving-plane")
    defect = _require_vstate(field, "moving-plane")
    contour = field.contour
    strict = contour.tolerances.strict
    reach = extent if extent is not None else 2.0 * float(np.abs(contour.points).max())

    worst_positive = np.inf
    worst_slope = -np.inf
    positive_witness: dict[str, Any] = {}
    slope_witness: dict[str, Any] = {}
    per_lambda = []
    total = 0
    for lam in lambdas:
        frame = HalfPlaneFrame(float(lam))
        x1 = frame.lam - (reach + frame.lam) * np.arange(1, grid + 1) / grid
        x2 = np.linspace(-reach, reach, grid)
        pts = (x1[None, :] + 1j * x2[:, None]).ravel()
        values = np.asarray(phi_lambda(field, frame, pts))
        i = _first_extreme(values, largest=False)

        edge = frame.lam + 1j * x2
        ahead = np.asarray(phi_lambda(field, frame, edge + SLOPE_STEP))
        behind = np.asarray(phi_lambda(field, frame, edge - SLOPE_STEP))
        slope = (ahead - behind) / (2.0 * SLOPE_STEP)
        j = _first_extreme(slope, largest=True)

        total += pts.size + edge.size
        per_lambda.append(
            {"lambda": frame.lam, "min_phi_lambda": float(values[i]), "max_edge_slope": float(slope[j])}
        )
        if values[i] < worst_positive:
            worst_positive = float(values[i])
            positive_witness = {"lambda": frame.lam, "point": _pair(pts[i]), "phi_lambda": worst_positive}
        if slope[j] > worst_slope:
            worst_slope = float(slope[j])
            slope_witness = {"lambda": frame.lam, "point": _pair(edge[j]), "slope": worst_slope}
        logger.debug(
            "moving plane lambda=%.4g: min phi_lam %.3e, max edge slope %.3e", lam, values[i], slope[j]
        )

    margin = float(min(worst_positive, -worst_slope))
    witness = positive_witness if worst_positive <= -worst_slope else slope_witness
    return ProbeReport(
        "moving-plane",
        worst_positive > strict and worst_slope < -strict,
        margin,
        witness,
        total,
        contour.tolerances.as_dict(),
        {
            "min_phi_lambda": worst_positive,
            "max_edge_slope": worst_slope,
            "lambdas": per_lambda,
            "grid": grid,
            "vstate_residual": defect,
        },
    )


def _circle_samples(contour: Contour, radii: FloatArray, samples: int) -> list[ComplexArray]:
    theta = 2.0 * np.pi * np.arange(samples) / samples
    return [_clear_of_collar(contour, r * np.exp(1j * theta)) for r in radii]


def _default_radii(contour: Contour) -> FloatArray:
    return np.linspace(0.1, 3.0, 30) * float(np.abs(contour.points).max())


def radial_symmetry_measure(
    field: PatchField,
    radii: Sequence[float] | None = None,
    samples: int = 64,
    tolerance: float = RADIAL_TOLERANCE,
) -> float:
    """Largest angular standard deviation of phi over circles about the origin.

    When the field is radial to within ``tolerance`` the radial derivative is
    also checked, and a non-decreasing radius raises MonotonicityViolationError.
    """
    contour = field.contour
    r = np.asarray(radii, dtype=float) if radii is not None else _default_radii(contour)
    rings = _circle_samples(contour, r, samples)
    spread = [float(np.std(relative_stream(field, ring))) for ring in rings if ring.size > 1]
    measure = max(spread, default=0.0)
    if measure > tolerance:
        return measure

    strict = contour.tolerances.strict
    theta = 2.0 * np.pi * np.arange(samples) / samples
    direction = np.exp(1j * theta)
    for radius in r:
        outward = np.asarray(relative_stream(field, (radius + SLOPE_STEP) * direction))
        inward = np.asarray(relative_stream(field, (radius - SLOPE_STEP) * direction))
        slope = float(np.mean(outward - inward) / (2.0 * SLOPE_STEP))
        if slope > -strict:
            raise MonotonicityViolationError(
                "radial field does not decrease strictly",
                {"radius": float(radius), "slope": slope, "measure": measure},
            )
    return measure


def radial_symmetry_probe(
    field: PatchField, radii: Sequence[float] | None = None, samples: int = 64
) -> ProbeReport:
    """Report form of :func:`radial_symmetry_measure`: pass iff radial and strictly decreasing."""
    contour = field.contour
    notes: tuple[str, ...] = ()
    witness = None
    try:
        measure = radial_symmetry_measure(field, radii, samples)
        monotone = True
    except MonotonicityViolationError as e:
        measure, monotone = float(e.witness["measure"]), False
        witness = e.witness
        notes = ("radial but not strictly decreasing",)
    radial = measure <= RADIAL_TOLERANCE
    if not radial:
        notes = ("field is not radial",)
    r = np.asarray(radii, dtype=float) if radii is not None else _default_radii(contour)
    return ProbeReport(
        "radial",
        radial and monotone,
        measure,
        witness,
        int(r.size * samples),
        contour.tolerances.as_dict(),
        {"measure": measure, "radial": radial, "monotone": monotone, "radii": r.tolist()},
        notes,
    )


def half_omega_identity_probe(
    contour: Contour, interior: ArrayLike | None = None, count: int = 2000, seed: int = 0
) -> ProbeReport:
    """sup over the closed patch of |C(chi_D)(z) + conj(z)|, after recentering.

    Boundary nodes are sampled first, so ties resolve to the first node.
    Also reports sup |Im z C(z)| on exterior samples and the boundary
    variance of |z|^2.
    """
    centred = contour.recentered()
    defect = _vstate_defect(centred, 0.5)
    notes: tuple[str, ...] = ()
    if defect > centred.tolerances.vstate_guard:
        notes = ("not an omega=1/2 V-state; identity margin is diagnostic only",)

    if interior is None:
        inner = interior_samples(centred, count)
    else:
        inner = np.atleast_1d(as_complex(interior)).ravel()
    closure = np.concatenate((centred.points, inner))
    transform = np.concatenate(
        (boundary_cauchy_values(centred), np.atleast_1d(cauchy_transform(centred, inner)))
    )
    gap = np.abs(transform + np.conj(closure))
    k = _first_extreme(gap, largest=True)
    margin = float(gap[k])

    _, outer = default_samples(centred, count // 4 or 1, seed)
    g_imag = 0.0
    if outer.size:
        g_imag = float(np.abs((outer * np.asarray(cauchy_transform(centred, outer))).imag).max())
    variance = float(np.var(np.abs(centred.points) ** 2))
    return ProbeReport(
        "half-omega",
        margin <= IDENTITY_TOLERANCE and variance <= IDENTITY_TOLERANCE,
        margin,
        {"point": _pair(closure[k]), "gap": margin},
        int(closure.size + outer.size),
        centred.tolerances.as_dict(),
        {
            "identity_margin": margin,
            "exterior_imag_g": g_imag,
            "boundary_variance": variance,
            "vstate_residual": defect,
        },
        notes,
    )


def _five_point(field: PatchField, points: ComplexArray, eta: float) -> FloatArray:
    stencil = np.array([eta, -eta, 1j * eta, -1j * eta])
    around = np.asarray(relative_stream(field, (points[:, None] + stencil[None, :]).ravel())).reshape(-1, 4)
    centre = np.asarray(relative_stream(field, points))
    return (around.sum(axis=1) - 4.0 * centre) / eta**2


def laplacian_dichotomy_probe(
    field: PatchField,
    interior: ArrayLike | None = None,
    exterior: ArrayLike | None = None,
    count: int = 200,
    seed: int = 0,
) -> ProbeReport:
    """Five-point Laplacian of phi equals 2 Omega - 1 inside and 2 Omega outside."""
    contour = field.contour
    eta = contour.tolerances.laplacian_spacing
    if interior is None or exterior is None:
        gen_in, gen_out = default_samples(contour, count, seed)
        interior = gen_in if interior is None else interior
        exterior = gen_out if exterior is None else exterior
    inner = _clear_of_collar(contour, as_complex(interior))
    outer = _clear_of_collar(contour, as_complex(exterior))

    expected_in, expected_out = 2.0 * field.omega - 1.0, 2.0 * field.omega
    dev_in = np.abs(_five_point(field, inner, eta) - expected_in) if inner.size else np.zeros(1)
    dev_out = np.abs(_five_point(field, outer, eta) - expected_out) if outer.size else np.zeros(1)
    deviations = np.concatenate((dev_in, dev_out))
    points = np.concatenate((inner if inner.size else [np.nan], outer if outer.size else [np.nan]))
    k = _first_extreme(deviations, largest=True)
    margin = float(deviations[k])
    side = "interior" if k < dev_in.size else "exterior"
    return ProbeReport(
        "laplacian",
        margin <= LAPLACIAN_TOLERANCE,
        margin,
        {"point": _pair(points[k]), "deviation": margin, "side": side},
        int(inner.size + outer.size),
        contour.tolerances.as_dict(),
        {
            "expected_interior": expected_in,
            "expected_exterior": expected_out,
            "max_interior_deviation": float(dev_in.max()),
            "max_exterior_deviation": float(dev_out.max()),
            "spacing": eta,
        },
    )


@dataclass(frozen=True)
class ScanEntry:
    index: int
    in_class: bool
    phi_sign: ProbeReport | None
    moving_plane: ProbeReport | None
    refused: str | None = None

    @property
    def violates(self) -> bool:
        reports = [r for r in (self.phi_sign, self.moving_plane) if r is not None]
        return any(not r.verdict for r in reports)


def counterexample_scan(
    contours: Sequence[Contour],
    omega: float,
    lambdas: Sequence[float] = DEFAULT_LAMBDAS,
    grid: int = 50,
) -> list[ScanEntry]:
    """Run the sign and moving-plane probes on user-supplied candidate V-states."""
    entries = []
    for index, contour in enumerate(contours):
        field = PatchField.canonical(contour, omega)
        in_class = classify(contour).verdict
        try:
            sign = phi_sign_probe(field)
            plane = moving_plane_probe(field, lambdas, grid)
        except ProbeRefusedError as e:
            logger.info("candidate %d refused: %s", index, e)
            entries.append(ScanEntry(index, in_class, None, None, str(e)))
            continue
        entry = ScanEntry(index, in_class, sign, plane)
        if entry.violates:
            logger.info("candidate %d violates the rigidity probes", index)
        entries.append(entry)
    return entries
