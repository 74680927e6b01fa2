# SPDX-FileCopyrightText: Copyright (c) 2026 provide.io llc. All rights reserved.
# SPDX-License-Identifier: MIT

"""Spectral representation of closed patch boundaries.

A boundary is a truncated Fourier series z(theta) = sum_k c_k exp(i k theta)
sampled on N equispaced nodes. Points in the plane are complex numbers
throughout; :func:`as_complex` converts ``(x, y)`` pairs.

Orientation is normalized to counterclockwise on construction, so the
outward normal is ``-1j * tangent``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, overload

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg
from scipy.spatial import ConvexHull, cKDTree
from scipy.spatial.distance import pdist

from vpatch.config import DEFAULT_TOLERANCES, Tolerances
from vpatch.errors import (
    BoundaryAmbiguityError,
    DegenerateTangentError,
    DomainError,
    OrientationError,
    SelfIntersectionError,
)
from vpatch.quadrature import integrate

logger = logging.getLogger(__name__)

ComplexArray = NDArray[np.complex128]
FloatArray = NDArray[np.float64]

_PROJECTION_OVERSAMPLING = 16
_NEWTON_STEPS = 12


def as_complex(points: ArrayLike) -> ComplexArray:
    """Convert complex numbers or ``(..., 2)`` real pairs to a complex array.

    A real array whose last axis has length 2 is read as ``x + i y``; a bare
    length-2 real sequence is one point.
    """
    arr = np.asarray(points)
    if np.iscomplexobj(arr):
        return arr.astype(np.complex128)
    arr = arr.astype(np.float64)
    if arr.ndim == 0:
        return arr.astype(np.complex128)
    if arr.shape[-1] != 2:
        raise DomainError(f"Real point arrays need a trailing axis of length 2, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def to_pairs(points: ArrayLike) -> FloatArray:
    z = np.atleast_1d(as_complex(points))
    return np.column_stack((z.real, z.imag))


@dataclass(frozen=True)
class PolarShape:
    """m-fold symmetric polar graph R(theta) = r0 + sum_j a_j cos(j m theta)."""

    symmetry: int
    base_radius: float
    cosines: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if int(self.symmetry) < 1:
            raise DomainError("symmetry must be a positive integer", {"symmetry": self.symmetry})
        if not self.base_radius > 0:
            raise DomainError("base_radius must be positive", {"base_radius": self.base_radius})
        object.__setattr__(self, "symmetry", int(self.symmetry))
        object.__setattr__(self, "base_radius", float(self.base_radius))
        object.__setattr__(self, "cosines", tuple(float(a) for a in self.cosines))
        theta = np.linspace(0.0, 2.0 * np.pi, 4096, endpoint=False)
        radius = self.radius(theta)
        if radius.min() <= 0:
            i = int(np.argmin(radius))
            raise DomainError(
                "polar radius must stay positive",
                {"theta": float(theta[i]), "radius": float(radius[i])},
            )

    @property
    def terms(self) -> int:
        return len(self.cosines)

    def radius(self, theta: ArrayLike) -> FloatArray:
        theta = np.asarray(theta, dtype=np.float64)
        r = np.full(theta.shape, self.base_radius)
        for j, a in enumerate(self.cosines, start=1):
            r = r + a * np.cos(j * self.symmetry * theta)
        return r

    def with_cosines(self, cosines: ArrayLike) -> PolarShape:
        return PolarShape(self.symmetry, self.base_radius, tuple(np.asarray(cosines, dtype=float)))

    def to_contour(self, nodes: int = 256) -> Contour:
        return Contour.from_polar(self, nodes)

    @classmethod
    def ellipse(cls, a: float, b: float, terms: int = 32) -> PolarShape:
        """Polar cosine series of the ellipse with semi-axes a (along x) and b."""
        if a <= 0 or b <= 0:
            raise DomainError("semi-axes must be positive", {"a": a, "b": b})
        n = max(1024, 8 * terms)
        theta = 2.0 * np.pi * np.arange(n) / n
        radius = a * b / np.sqrt((b * np.cos(theta)) ** 2 + (a * np.sin(theta)) ** 2)
        spectrum = np.fft.rfft(radius) / n
        cosines = 2.0 * spectrum[2 : 2 * terms + 1 : 2].real
        return cls(2, float(spectrum[0].real), tuple(cosines))


@dataclass(frozen=True)
class BoundaryPoint:
    point: complex | ComplexArray
    tangent: complex | ComplexArray
    normal: complex | ComplexArray


@dataclass(frozen=True, eq=False)
class Contour:
    """Closed C^1 curve z(theta) = sum_{k=-K..K} c_k exp(i k theta) on N nodes.

    ``coefficients`` is ordered k = -K, ..., K. Construction normalizes the
    orientation to counterclockwise (reversing the parametrization when the
    signed area is negative) and rejects degenerate tangents; simplicity is
    checked by :meth:`check_simple`, which every external constructor calls.
    """

    coefficients: ComplexArray
    node_count: int = 256
    tolerances: Tolerances = field(default=DEFAULT_TOLERANCES, repr=False)

    def __post_init__(self) -> None:
        c = np.array(self.coefficients, dtype=np.complex128).ravel()
        if c.size % 2 != 1:
            raise DomainError("coefficient count must be odd (k = -K..K)", {"count": int(c.size)})
        n = int(self.node_count)
        if n < c.size:
            raise DomainError("node_count must be at least 2K+1", {"node_count": n, "coefficients": c.size})
        if not np.isfinite(c).all():
            raise DomainError("coefficients must be finite")

        k = np.arange(-(c.size // 2), c.size // 2 + 1)
        signed = float(np.pi * np.sum(k * np.abs(c) ** 2))
        if signed == 0.0:
            raise OrientationError("contour encloses zero area", {"signed_area": signed})
        if signed < 0:
            c = c[::-1].copy()
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "node_count", n)

        speed = self.speed
        scale = np.sqrt(abs(signed) / np.pi)
        if speed.min() <= self.tolerances.degenerate_speed * scale:
            i = int(np.argmin(speed))
            raise DegenerateTangentError(
                "tangent degenerates on the node set",
                {"theta": float(self.theta[i]), "speed": float(speed[i])},
            )

    # ---- spectral data -------------------------------------------------

    @property
    def modes(self) -> int:
        """K, the highest retained wavenumber."""
        return self.coefficients.size // 2

    @cached_property
    def wavenumbers(self) -> NDArray[np.int64]:
        return np.arange(-self.modes, self.modes + 1)

    @cached_property
    def _active(self) -> tuple[NDArray[np.int64], ComplexArray]:
        c = self.coefficients
        keep = np.abs(c) > 1e-16 * np.abs(c).max()
        return self.wavenumbers[keep], c[keep]

    def _synthesize(self, order: int, n: int) -> ComplexArray:
        k = self.wavenumbers
        buf = np.zeros(n, dtype=np.complex128)
        np.add.at(buf, k % n, self.coefficients * (1j * k) ** order)
        return n * np.fft.ifft(buf)

    # ---- node data -----------------------------------------------------

    @cached_property
    def theta(self) -> FloatArray:
        return 2.0 * np.pi * np.arange(self.node_count) / self.node_count

    @cached_property
    def points(self) -> ComplexArray:
        return self._synthesize(0, self.node_count)

    @cached_property
    def derivative(self) -> ComplexArray:
        return self._synthesize(1, self.node_count)

    @cached_property
    def second_derivative(self) -> ComplexArray:
        return self._synthesize(2, self.node_count)

    @cached_property
    def speed(self) -> FloatArray:
        return np.abs(self.derivative)

    @cached_property
    def tangent(self) -> ComplexArray:
        return self.derivative / self.speed

    @cached_property
    def normal(self) -> ComplexArray:
        return -1j * self.tangent

    @cached_property
    def curvature(self) -> FloatArray:
        return (np.conj(self.derivative) * self.second_derivative).imag / self.speed**3

    @cached_property
    def node_spacing(self) -> float:
        """Largest arc length between consecutive nodes (first order)."""
        return float(self.speed.max() * 2.0 * np.pi / self.node_count)

    @cached_property
    def perimeter(self) -> float:
        return float(self.speed.sum() * 2.0 * np.pi / self.node_count)

    @cached_property
    def signed_area(self) -> float:
        # 1/2 closed integral of (x dy - y dx); exact on the nodes for N >= 2K+1
        integrand = (np.conj(self.points) * self.derivative).imag
        return float(0.5 * np.sum(integrand) * 2.0 * np.pi / self.node_count)

    @property
    def area(self) -> float:
        return self.signed_area

    @cached_property
    def barycenter(self) -> complex:
        # int_D z dA = (1/2i) closed integral of |z|^2 dz; integrand degree 3K
        n = max(self.node_count, 3 * self.modes + 1)
        z = self._synthesize(0, n)
        dz = self._synthesize(1, n)
        moment = np.sum(np.abs(z) ** 2 * dz) * (2.0 * np.pi / n) / 2j
        return complex(moment / self.signed_area)

    @cached_property
    def diameter(self) -> float:
        xy = to_pairs(self.points)
        if len(xy) > 3:
            try:
                xy = xy[ConvexHull(xy).vertices]
            except Exception:  # degenerate hull; fall back to all nodes
                logger.debug("convex hull failed; using all nodes for the diameter")
        return float(pdist(xy).max())

    def oversampled(self, factor: int) -> tuple[ComplexArray, ComplexArray]:
        """Points and derivatives on ``factor * N`` equispaced nodes."""
        key = f"_oversampled_{factor}"
        cached = self.__dict__.get(key)
        if cached is None:
            n = factor * self.node_count
            cached = (self._synthesize(0, n), self._synthesize(1, n))
            self.__dict__[key] = cached
        return cached

    @cached_property
    def _tree(self) -> cKDTree:
        fine, _ = self.oversampled(_PROJECTION_OVERSAMPLING)
        return cKDTree(to_pairs(fine))

    # ---- evaluation at arbitrary parameters ------------------------------

    def at(self, theta: ArrayLike) -> tuple[ComplexArray, ComplexArray]:
        """z(theta) and z'(theta) by direct summation over the active modes."""
        theta = np.asarray(theta, dtype=np.float64)
        k, c = self._active
        phase = np.exp(1j * np.multiply.outer(theta, k))
        return phase @ c, phase @ (1j * k * c)

    def derivative_at(self, theta: ArrayLike) -> ComplexArray:
        return self.at(theta)[1]

    def second_derivative_at(self, theta: ArrayLike) -> ComplexArray:
        theta = np.asarray(theta, dtype=np.float64)
        k, c = self._active
        return np.exp(1j * np.multiply.outer(theta, k)) @ (-(k**2) * c)

    # ---- nearest-point queries -----------------------------------------

    def coarse_distance(self, targets: ArrayLike) -> FloatArray:
        """Distance to the oversampled node set (over-estimates by at most the chord sagitta)."""
        z = np.atleast_1d(as_complex(targets))
        dist, _ = self._tree.query(to_pairs(z))
        return np.asarray(dist, dtype=np.float64)

    def project(self, targets: ArrayLike) -> tuple[FloatArray, FloatArray]:
        """Foot-point parameter and distance to the curve for each target."""
        z = np.atleast_1d(as_complex(targets))
        coarse, index = self._tree.query(to_pairs(z))
        n_fine = _PROJECTION_OVERSAMPLING * self.node_count
        h = 2.0 * np.pi / n_fine
        theta = h * np.asarray(index, dtype=np.float64)
        for _ in range(_NEWTON_STEPS):
            p, dp = self.at(theta)
            ddp = self.second_derivative_at(theta)
            diff = p - z
            f = (diff * np.conj(dp)).real
            fp = np.abs(dp) ** 2 + (diff * np.conj(ddp)).real
            step = np.where(fp > 0, f / np.where(fp > 0, fp, 1.0), 0.0)
            step = np.clip(step, -h, h)
            theta = theta - step
            if np.abs(step).max() < 1e-15:
                break
        dist = np.abs(self.at(theta)[0] - z)
        worse = dist > coarse
        theta = np.where(worse, h * np.asarray(index, dtype=np.float64), theta)
        dist = np.where(worse, coarse, dist)
        return np.mod(theta, 2.0 * np.pi), dist

    def distance_to_boundary(self, targets: ArrayLike) -> FloatArray:
        return self.project(targets)[1]

    # ---- validation ----------------------------------------------------

    def check_simple(self) -> Contour:
        """Raise SelfIntersectionError if two non-adjacent node segments cross."""
        a = self.points
        d = np.roll(a, -1) - a
        n = a.size
        rel_a = a[None, :] - a[:, None]
        rel_b = np.roll(a, -1)[None, :] - a[:, None]
        o1 = (np.conj(d)[:, None] * rel_a).imag
        o2 = (np.conj(d)[:, None] * rel_b).imag
        straddle = (o1 * o2) < 0
        crossing = straddle & straddle.T
        i, j = np.indices((n, n))
        gap = np.abs(i - j)
        crossing &= (gap > 1) & (gap < n - 1)
        if crossing.any():
            si, sj = (int(v) for v in np.argwhere(crossing)[0])
            raise SelfIntersectionError(
                "contour segments intersect",
                {"segments": [si, sj], "point": [float(a[si].real), float(a[si].imag)]},
            )
        return self

    # ---- rigid motions and resampling ------------------------------------

    def _with(self, coefficients: ComplexArray, node_count: int | None = None) -> Contour:
        return Contour(coefficients, node_count or self.node_count, self.tolerances)

    def rotated(self, angle: float, center: complex = 0j) -> Contour:
        c = self.coefficients * np.exp(1j * angle)
        c[self.modes] += center - center * np.exp(1j * angle)
        return self._with(c)

    def translated(self, shift: complex) -> Contour:
        c = self.coefficients.copy()
        c[self.modes] += complex(shift)
        return self._with(c)

    def scaled(self, factor: float, center: complex = 0j) -> Contour:
        if factor <= 0:
            raise DomainError("scale factor must be positive", {"factor": factor})
        c = self.coefficients * factor
        c[self.modes] += center * (1.0 - factor)
        return self._with(c)

    def recentered(self) -> Contour:
        return self.translated(-self.barycenter)

    def resampled(self, node_count: int) -> Contour:
        """Same curve on a different node count (truncating modes that no longer fit)."""
        keep = min(self.modes, (node_count - 1) // 2)
        c = self.coefficients[self.modes - keep : self.modes + keep + 1]
        return self._with(c, node_count)

    def refined(self, factor: int = 2) -> Contour:
        return self.resampled(factor * self.node_count)

    def to_polyline(self, n: int | None = None) -> ComplexArray:
        if n is None or n == self.node_count:
            return self.points.copy()
        if n >= self.coefficients.size:
            return self._synthesize(0, n)
        return self.at(2.0 * np.pi * np.arange(n) / n)[0]

    # ---- constructors --------------------------------------------------

    @classmethod
    def from_samples(cls, points: ArrayLike, tolerances: Tolerances = DEFAULT_TOLERANCES) -> Contour:
        """Trigonometric interpolant through equispaced samples z(2 pi j / n)."""
        z = np.atleast_1d(as_complex(points))
        n = z.size
        spectrum = np.fft.fft(z) / n
        half = (n - 1) // 2
        k = np.arange(-half, half + 1)
        return cls(spectrum[k % n], n, tolerances)

    @classmethod
    def circle(cls, radius: float = 1.0, center: complex = 0j, nodes: int = 256) -> Contour:
        if radius <= 0:
            raise DomainError("radius must be positive", {"radius": radius})
        return cls(np.array([0.0, center, radius], dtype=np.complex128), nodes)

    @classmethod
    def ellipse(
        cls, a: float, b: float, center: complex = 0j, angle: float = 0.0, nodes: int = 256
    ) -> Contour:
        """z = a cos(theta) + i b sin(theta), rotated by ``angle`` and shifted to ``center``."""
        if a <= 0 or b <= 0:
            raise DomainError("semi-axes must be positive", {"a": a, "b": b})
        rot = np.exp(1j * angle)
        return cls(np.array([0.5 * (a - b) * rot, center, 0.5 * (a + b) * rot]), nodes)

    @classmethod
    def from_polar(
        cls, shape: PolarShape, nodes: int = 256, tolerances: Tolerances = DEFAULT_TOLERANCES
    ) -> Contour:
        theta = 2.0 * np.pi * np.arange(nodes) / nodes
        return cls.from_samples(shape.radius(theta) * np.exp(1j * theta), tolerances).check_simple()

    @classmethod
    def from_polyline(
        cls,
        points: ArrayLike,
        nodes: int = 256,
        modes: int | None = None,
        tolerances: Tolerances = DEFAULT_TOLERANCES,
    ) -> Contour:
        """Least-squares Fourier fit to a closed polyline parametrized by arc length."""
        p = np.atleast_1d(as_complex(points))
        if p.size > 1 and abs(p[0] - p[-1]) <= 1e-14 * np.abs(p - p.mean()).max():
            p = p[:-1]
        if p.size < 3:
            raise DomainError("a polyline needs at least three distinct vertices", {"vertices": int(p.size)})
        seg = np.abs(np.roll(p, -1) - p)
        t = 2.0 * np.pi * np.concatenate(([0.0], np.cumsum(seg)[:-1])) / seg.sum()
        k_max = modes if modes is not None else min((nodes - 1) // 2, (p.size - 1) // 2)
        k = np.arange(-k_max, k_max + 1)
        design = np.exp(1j * np.outer(t, k))
        c, *_ = linalg.lstsq(design, p)
        return cls(c, nodes, tolerances).check_simple()

    def __repr__(self) -> str:
        return f"Contour(modes={self.modes}, node_count={self.node_count}, area={self.area:.6g})"


def evaluate(contour: Contour, theta: float | ArrayLike) -> BoundaryPoint:
    """Point, unit tangent and outward unit normal at parameter(s) theta."""
    scalar = np.ndim(theta) == 0
    z, dz = contour.at(np.atleast_1d(np.asarray(theta, dtype=np.float64)))
    speed = np.abs(dz)
    if speed.min() <= contour.tolerances.degenerate_speed * max(contour.diameter, 1e-300):
        i = int(np.argmin(speed))
        raise DegenerateTangentError("tangent degenerates", {"theta": float(np.atleast_1d(theta)[i])})
    tangent = dz / speed
    normal = -1j * tangent
    if scalar:
        return BoundaryPoint(complex(z[0]), complex(tangent[0]), complex(normal[0]))
    return BoundaryPoint(z, tangent, normal)


def area_and_barycenter(contour: Contour) -> tuple[float, complex]:
    area = contour.area
    if area <= 0:
        raise OrientationError("nonpositive area", {"area": area})
    return area, contour.barycenter


def _winding_kernel(x: ComplexArray, xi: ComplexArray, dxi: ComplexArray) -> ComplexArray:
    return dxi / (xi - x) / (2j * np.pi)


def winding_number(contour: Contour, targets: ArrayLike) -> FloatArray:
    """Cauchy index (1/2 pi i) closed integral of d xi / (xi - x), real part."""
    z = np.atleast_1d(as_complex(targets))
    return integrate(contour, z, _winding_kernel, contour.tolerances).real


@overload
def contains(contour: Contour, x: complex | tuple[float, float], delta: float | None = ...) -> bool: ...
@overload
def contains(contour: Contour, x: ArrayLike, delta: float | None = ...) -> Any: ...
def contains(contour: Contour, x: Any, delta: float | None = None) -> Any:
    """True where the winding number of the boundary around x equals 1.

    Raises BoundaryAmbiguityError when any query point lies within ``delta``
    of the boundary (default: boundary_delta times the diameter).
    """
    z = as_complex(x)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if delta is None:
        delta = contour.tolerances.boundary_delta * contour.diameter
    dist = contour.distance_to_boundary(z)
    if (dist < delta).any():
        i = int(np.argmin(dist))
        raise BoundaryAmbiguityError(
            "query point too close to the boundary",
            {"point": [float(z[i].real), float(z[i].imag)], "distance": float(dist[i]), "delta": float(delta)},
        )
    inside = np.rint(winding_number(contour, z)) == 1
    return bool(inside[0]) if scalar else inside


@dataclass(frozen=True)
class ReflectionFrame:
    """Tangent line at a boundary point, used to reflect across it."""

    base_point: complex
    normal: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "base_point", complex(self.base_point))
        object.__setattr__(self, "normal", complex(self.normal))
        if abs(abs(self.normal) - 1.0) > 1e-12:
            raise DomainError("normal must be a unit vector", {"norm": abs(self.normal)})

    @classmethod
    def at_node(cls, contour: Contour, index: int) -> ReflectionFrame:
        return cls(contour.points[index], contour.normal[index])

    @classmethod
    def at(cls, contour: Contour, theta: float) -> ReflectionFrame:
        bp = evaluate(contour, theta)
        return cls(complex(bp.point), complex(bp.normal))

    def height(self, y: ArrayLike) -> Any:
        """Signed distance (y - x0) . nu."""
        return ((as_complex(y) - self.base_point) * np.conj(self.normal)).real


def reflect(frame: ReflectionFrame, y: Any) -> Any:
    """y - 2[(y - x0) . nu] nu, for a point or an array of points."""
    z = as_complex(y)
    out = z - 2.0 * frame.height(z) * frame.normal
    return complex(out) if np.ndim(out) == 0 else out


def _directed(a: Contour, b: Contour, factor: int) -> float:
    pts, _ = a.oversampled(factor)
    return float(b.distance_to_boundary(pts).max())


def hausdorff_distance(a: Contour, b: Contour, factor: int = 4) -> float:
    """Symmetric Hausdorff distance of the sampled curves, refined by projection onto the other curve."""
    return max(_directed(a, b, factor), _directed(b, a, factor))
