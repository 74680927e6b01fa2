# SPDX-FileCopyrightText: Copyright (c) 2026 provide.io llc. All rights reserved.
# SPDX-License-Identifier: MIT

"""Periodic boundary quadrature.

All boundary integrals are written as integrals over the curve parameter
theta in [0, 2*pi). Three rules are used depending on how close the target
point lies to the curve:

* equispaced trapezoid on the contour nodes (spectrally accurate far away),
* the same rule on oversampled nodes,
* dyadically graded Gauss-Legendre panels centred at the nearest boundary
  parameter, which also handles targets on the curve itself.

Targets exactly at the equispaced nodes are served by the dedicated node
rules in :mod:`vpatch.potential` (logarithmic product quadrature and the
diagonal limit of the Cauchy kernel).
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import NDArray
from scipy import special

from vpatch.config import DEFAULT_TOLERANCES, Tolerances
from vpatch.parallel import map_chunks

if TYPE_CHECKING:
    from vpatch.geometry import Contour

logger = logging.getLogger(__name__)

ComplexArray = NDArray[np.complex128]
FloatArray = NDArray[np.float64]

# kernel(x, xi, dxi) -> integrand values; x has shape (M, 1), xi and dxi (1, n) or (M, n)
Kernel = Callable[[ComplexArray, ComplexArray, ComplexArray], NDArray]

PANEL_ORDER = 16
_MATRIX_BUDGET = 4_000_000


@lru_cache(maxsize=8)
def gauss_legendre(order: int) -> tuple[FloatArray, FloatArray]:
    nodes, weights = special.roots_legendre(order)
    return np.asarray(nodes), np.asarray(weights)


@lru_cache(maxsize=16)
def kress_log_weights(n: int) -> FloatArray:
    """Weights R[d] with  int log(4 sin^2((t-s)/2)) f(s) ds ~ sum_j R[(i-j) mod n] f(s_j).

    The target t is the i-th of n equispaced nodes. Exact for trigonometric
    polynomials f of degree below n/2.
    """
    d = np.arange(n)
    angle = 2.0 * np.pi * d / n
    half = n // 2
    if n % 2 == 0:
        m = np.arange(1, half)
        r = -(4.0 * np.pi / n) * (np.cos(np.outer(angle, m)) / m).sum(axis=1)
        r -= (4.0 * np.pi / n**2) * np.cos(half * angle)
    else:
        m = np.arange(1, half + 1)
        r = -(4.0 * np.pi / n) * (np.cos(np.outer(angle, m)) / m).sum(axis=1)
    r.setflags(write=False)
    return r


def graded_panel_rule(
    center: float, min_width: float, order: int = PANEL_ORDER
) -> tuple[FloatArray, FloatArray]:
    """Gauss-Legendre panels on [center - pi, center + pi] refined dyadically toward ``center``.

    The innermost panels have parameter width ``min_width`` (at least), and
    every panel is as long as its distance to the centre, which resolves
    integrands that are nearly singular at ``center``.
    """
    levels = max(1, int(np.ceil(np.log2(np.pi / max(min_width, 1e-15)))))
    offsets = np.concatenate(([0.0], np.pi * 2.0 ** -np.arange(levels, -1, -1)))
    gx, gw = gauss_legendre(order)
    lo, hi = offsets[:-1], offsets[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    right = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
    weights = (half[:, None] * gw[None, :]).ravel()
    theta = np.concatenate((center + right, center - right))
    return theta, np.concatenate((weights, weights))


def _trapezoid(kernel: Kernel, targets: ComplexArray, xi: ComplexArray, dxi: ComplexArray) -> NDArray:
    weight = 2.0 * np.pi / xi.size
    chunk = max(1, _MATRIX_BUDGET // xi.size)

    def block(part: ComplexArray) -> NDArray:
        return kernel(part[:, None], xi[None, :], dxi[None, :]).sum(axis=1) * weight

    return map_chunks(block, targets, chunk=chunk)


def _graded(contour: Contour, kernel: Kernel, target: complex, theta_star: float, distance: float) -> complex:
    speed = max(abs(complex(contour.derivative_at(np.array([theta_star]))[0])), 1e-300)
    theta, weights = graded_panel_rule(theta_star, max(0.25 * distance / speed, 1e-14))
    xi, dxi = contour.at(theta)
    values = kernel(np.array([[target]]), xi[None, :], dxi[None, :])[0]
    return complex(np.sum(values * weights))


def integrate(
    contour: Contour,
    targets: ComplexArray,
    kernel: Kernel,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> ComplexArray:
    """Evaluate the boundary integral of ``kernel`` at every target point."""
    targets = np.atleast_1d(np.asarray(targets, dtype=np.complex128))
    out = np.zeros(targets.shape, dtype=np.complex128)
    if targets.size == 0:
        return out

    spacing = contour.node_spacing
    fine_spacing = spacing / tolerances.oversampling
    coarse = contour.coarse_distance(targets)

    far = coarse >= tolerances.near_spacings * spacing
    mid = ~far & (coarse >= tolerances.near_spacings * fine_spacing)
    near = ~(far | mid)
    logger.debug("quadrature tiers: far=%d mid=%d near=%d", far.sum(), mid.sum(), near.sum())

    if far.any():
        out[far] = _trapezoid(kernel, targets[far], contour.points, contour.derivative)
    if mid.any():
        xi, dxi = contour.oversampled(tolerances.oversampling)
        out[mid] = _trapezoid(kernel, targets[mid], xi, dxi)
    if near.any():
        idx = np.flatnonzero(near)
        theta_star, dist = contour.project(targets[idx])
        for i, t, d in zip(idx, theta_star, dist, strict=True):
            out[i] = _graded(contour, kernel, complex(targets[i]), float(t), float(d))
    return out
