# SPDX-FileCopyrightText: Copyright (c) 2026 provide.io llc. All rights reserved.
# SPDX-License-Identifier: MIT

"""Boundary-integral evaluation of the patch potentials.

Conventions (boundary oriented counterclockwise):

* psi(x) = (1/2 pi) int_D log|x - y| dA(y), reduced to the boundary by the
  divergence theorem.
* C(z) = (1/pi) int_D dA(xi) / (xi - z) = (1/2 pi i) closed int (conj(xi) - conj(z)) / (xi - z) d xi,
  so that 4 d_z psi = -C.
* v = grad-perp psi = -(i/2) conj(C), returned as the complex number vx + i vy.
* phi = mu + Omega |x|^2 / 2 - psi.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from vpatch.errors import BarycenterError, LemmaViolationError
from vpatch.geometry import Contour, as_complex, contains
from vpatch.quadrature import integrate, kress_log_weights

logger = logging.getLogger(__name__)

ComplexArray = NDArray[np.complex128]
FloatArray = NDArray[np.float64]

_EXACT_FAR_FIELD = 1e-12


def _stream_kernel(x: ComplexArray, xi: ComplexArray, dxi: ComplexArray) -> NDArray:
    diff = xi - x
    flux = (diff * 1j * np.conj(dxi)).real
    square = np.abs(diff) ** 2
    singular = square == 0.0
    log_term = np.log(np.where(singular, 1.0, square))
    values = (log_term - 1.0) * flux / (8.0 * np.pi)
    return np.where(singular, 0.0, values)


def _cauchy_kernel(x: ComplexArray, xi: ComplexArray, dxi: ComplexArray) -> ComplexArray:
    diff = xi - x
    singular = diff == 0.0
    ratio = np.conj(diff) / np.where(singular, 1.0, diff)
    return np.where(singular, 0.0, ratio) * dxi / (2j * np.pi)


def _restore(template: Any, values: NDArray) -> Any:
    if np.ndim(as_complex(template)) == 0:
        return values[0].item()
    return values.reshape(np.shape(as_complex(template)))


def stream_function(contour: Contour, x: ArrayLike) -> Any:
    """psi at one point or an array of points (on-boundary points allowed)."""
    z = np.atleast_1d(as_complex(x)).ravel()
    return _restore(x, integrate(contour, z, _stream_kernel, contour.tolerances).real)


def cauchy_transform(contour: Contour, x: ArrayLike) -> Any:
    """C(chi_D) at one point or an array of points."""
    z = np.atleast_1d(as_complex(x)).ravel()
    return _restore(x, integrate(contour, z, _cauchy_kernel, contour.tolerances))


def velocity(contour: Contour, x: ArrayLike) -> Any:
    """Induced velocity vx + i vy."""
    return -0.5j * np.conj(cauchy_transform(contour, x))


def stream_gradient(contour: Contour, x: ArrayLike) -> Any:
    """grad psi as d_x psi + i d_y psi."""
    return -0.5 * np.conj(cauchy_transform(contour, x))


# ---- node-exact boundary rules ---------------------------------------------


def boundary_stream_values(contour: Contour) -> FloatArray:
    """psi at the contour nodes by logarithmic product quadrature."""
    n = contour.node_count
    z, dz, theta = contour.points, contour.derivative, contour.theta
    diff = z[None, :] - z[:, None]  # [i, j] = z_j - z_i
    flux = (diff * 1j * np.conj(dz)[None, :]).real
    sine = 4.0 * np.sin(0.5 * (theta[None, :] - theta[:, None])) ** 2
    np.fill_diagonal(sine, 1.0)
    squared = np.abs(diff) ** 2
    np.fill_diagonal(squared, 1.0)
    smooth = np.log(squared / sine)
    np.fill_diagonal(smooth, np.log(np.abs(dz) ** 2))

    weights = kress_log_weights(n)
    index = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    singular = (weights[index] * flux).sum(axis=1)
    regular = (2.0 * np.pi / n) * ((smooth - 1.0) * flux).sum(axis=1)
    return (singular + regular) / (8.0 * np.pi)


def boundary_cauchy_values(contour: Contour) -> ComplexArray:
    """C(chi_D) at the contour nodes; the diagonal uses the limit conj(z')/z'."""
    n = contour.node_count
    z, dz = contour.points, contour.derivative
    diff = z[None, :] - z[:, None]
    np.fill_diagonal(diff, 1.0)
    kernel = np.conj(diff) / diff
    np.fill_diagonal(kernel, np.conj(dz) / dz)
    return (kernel * dz[None, :]).sum(axis=1) * (2.0 * np.pi / n) / (2j * np.pi)


def boundary_velocity_values(contour: Contour) -> ComplexArray:
    return -0.5j * np.conj(boundary_cauchy_values(contour))


# ---- Lagrange constant and patch fields --------------------------------------


def _boundary_bernoulli(contour: Contour, omega: float) -> tuple[FloatArray, FloatArray]:
    values = boundary_stream_values(contour) - 0.5 * omega * np.abs(contour.points) ** 2
    weights = contour.speed / contour.speed.sum()
    return values, weights


def compute_mu(contour: Contour, omega: float) -> float:
    """Arc-length weighted boundary mean of psi - Omega |x|^2 / 2."""
    values, weights = _boundary_bernoulli(contour, omega)
    return float(np.sum(weights * values))


def boundary_mu_spread(contour: Contour, omega: float) -> float:
    """Arc-length weighted standard deviation of psi - Omega |x|^2 / 2 on the boundary."""
    values, weights = _boundary_bernoulli(contour, omega)
    mean = np.sum(weights * values)
    return float(np.sqrt(np.sum(weights * (values - mean) ** 2)))


@dataclass(frozen=True)
class PatchField:
    """Relative stream function phi = mu + Omega |x|^2 / 2 - psi of a patch."""

    contour: Contour
    omega: float
    mu: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "mu", float(self.mu))

    @classmethod
    def canonical(cls, contour: Contour, omega: float) -> PatchField:
        """Field whose mu is the boundary mean (exact for V-states)."""
        return cls(contour, omega, compute_mu(contour, omega))

    def with_mu(self, mu: float) -> PatchField:
        return PatchField(self.contour, self.omega, mu)

    def phi(self, x: ArrayLike) -> Any:
        return relative_stream(self, x)


def relative_stream(field: PatchField, x: ArrayLike) -> Any:
    z = as_complex(x)
    psi = stream_function(field.contour, z)
    return field.mu + 0.5 * field.omega * np.abs(z) ** 2 - psi


@dataclass(frozen=True)
class FieldSample:
    """Everything the field evaluator reports at a set of points."""

    points: ComplexArray
    psi: FloatArray
    velocity: ComplexArray
    phi: FloatArray
    cauchy: ComplexArray


def sample_field(field: PatchField, points: ArrayLike) -> FieldSample:
    z = np.atleast_1d(as_complex(points)).ravel()
    psi = np.asarray(stream_function(field.contour, z))
    c = np.asarray(cauchy_transform(field.contour, z))
    phi = field.mu + 0.5 * field.omega * np.abs(z) ** 2 - psi
    return FieldSample(z, psi, -0.5j * np.conj(c), phi, c)


def integral_equation_residual(
    field: PatchField, sample_points: ArrayLike, delta: float | None = None
) -> float:
    """Fixed-point defect of phi = mu + Omega |x|^2/2 - psi_{phi > 0}.

    The domain {phi > 0} is realized by winding-number membership after
    checking that it agrees with phi's sign at every sample. The right-hand
    side uses the boundary-mean mu and a node-doubled copy of the contour.
    """
    z = np.atleast_1d(as_complex(sample_points)).ravel()
    phi = np.asarray(relative_stream(field, z))
    inside = np.asarray(contains(field.contour, z, delta))
    mismatch = (phi > 0) != inside
    if mismatch.any():
        i = int(np.flatnonzero(mismatch)[0])
        raise LemmaViolationError(
            "sign of phi disagrees with membership in the patch",
            {"point": [float(z[i].real), float(z[i].imag)], "phi": float(phi[i]), "inside": bool(inside[i])},
        )
    mu = compute_mu(field.contour, field.omega)
    psi = np.asarray(stream_function(field.contour.refined(2), z))
    rhs = mu + 0.5 * field.omega * np.abs(z) ** 2 - psi
    residual = float(np.max(np.abs(phi - rhs)))
    logger.debug("integral equation residual %.3e over %d samples", residual, z.size)
    return residual


# ---- far field -------------------------------------------------------------


@dataclass(frozen=True)
class FarFieldModel:
    """psi = (|D| / 2 pi) log|x| + h(x) with |h(x)| <= remainder_bound |x|^-2."""

    area: float
    remainder_bound: float
    omega: float = 0.0
    decay_exponent: float | None = None  # None when h vanishes to round-off
    radii: tuple[float, ...] = ()
    max_remainder: tuple[float, ...] = field(default=())

    def remainder_ratio(self) -> float | None:
        if len(self.max_remainder) < 2 or self.max_remainder[0] == 0.0:
            return None
        return self.max_remainder[1] / self.max_remainder[0]


def far_field_fit(
    contour: Contour,
    omega: float = 0.0,
    radius: float | None = None,
    samples: int = 64,
    min_exponent: float = 1.8,
) -> FarFieldModel:
    """Fit the decay of h = psi - (|D|/2 pi) log|x| on circles of radius R, 2R, 4R.

    R defaults to three diameters. The contour is used as given: an
    off-centre barycenter leaves a dipole term and raises BarycenterError.
    """
    area = contour.area
    r0 = radius if radius is not None else 3.0 * contour.diameter
    radii = r0 * np.array([1.0, 2.0, 4.0])
    theta = 2.0 * np.pi * np.arange(samples) / samples
    peaks = []
    for r in radii:
        ring = r * np.exp(1j * theta)
        h = np.asarray(stream_function(contour, ring)) - area / (2.0 * np.pi) * np.log(r)
        peaks.append(float(np.abs(h).max()))
    peak = np.array(peaks)
    bound = float(np.max(peak * radii**2))

    if peak.max() <= _EXACT_FAR_FIELD * max(area, 1.0):
        logger.debug("far field exact to round-off (max |h| = %.3e)", peak.max())
        return FarFieldModel(area, bound, omega, None, tuple(radii), tuple(peaks))

    slope, _ = np.polyfit(np.log(radii), np.log(np.maximum(peak, 1e-300)), 1)
    exponent = float(-slope)
    logger.debug("far field decay exponent %.4f (peaks %s)", exponent, peaks)
    if exponent < min_exponent:
        raise BarycenterError(
            "far-field remainder decays too slowly; recenter the contour",
            {"decay_exponent": exponent, "barycenter": [contour.barycenter.real, contour.barycenter.imag]},
        )
    return FarFieldModel(area, bound, omega, exponent, tuple(radii), tuple(peaks))
