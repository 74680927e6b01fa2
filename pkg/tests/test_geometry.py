# SPDX-FileCopyrightText: Copyright (c) 2026 provide.io llc. All rights reserved.
# SPDX-License-Identifier: MIT

from __future__ import annotations

import numpy as np
import pytest

from vpatch.errors import (
    BoundaryAmbiguityError,
    DomainError,
    OrientationError,
    SelfIntersectionError,
)
from vpatch.geometry import (
    Contour,
    PolarShape,
    ReflectionFrame,
    area_and_barycenter,
    as_complex,
    contains,
    evaluate,
    hausdorff_distance,
    reflect,
    winding_number,
)


def ray_cast(polygon: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Even-odd rule against a closed polyline."""
    x, y = points.real[:, None], points.imag[:, None]
    a, b = polygon[None, :], np.roll(polygon, -1)[None, :]
    straddles = (a.imag > y) != (b.imag > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        cross_x = a.real + (y - a.imag) * (b.real - a.real) / (b.imag - a.imag)
    hits = straddles & (x < cross_x)
    return hits.sum(axis=1) % 2 == 1


class TestConversions:
    def test_pairs_and_complex(self):
        assert as_complex((1.0, 2.0)) == 1 + 2j
        np.testing.assert_array_equal(as_complex([[1.0, 0.0], [0.0, 1.0]]), [1, 1j])
        assert as_complex(3 + 4j) == 3 + 4j

    def test_rejects_bad_shape(self):
        with pytest.raises(DomainError):
            as_complex([1.0, 2.0, 3.0])


class TestEvaluate:
    def test_circle_at_zero(self, disc):
        bp = evaluate(disc, 0.0)
        assert bp.point == pytest.approx(1.0, abs=1e-14)
        assert bp.tangent == pytest.approx(1j, abs=1e-14)
        assert bp.normal == pytest.approx(1.0, abs=1e-14)

    def test_circle_at_quarter_turn(self, disc):
        bp = evaluate(disc, np.pi / 2)
        assert bp.point == pytest.approx(1j, abs=1e-14)
        assert bp.normal == pytest.approx(1j, abs=1e-14)

    def test_ellipse(self, ellipse):
        bp = evaluate(ellipse, 0.0)
        assert bp.point == pytest.approx(2.0, abs=1e-14)
        assert bp.normal == pytest.approx(1.0, abs=1e-14)

    def test_vectorized(self, ellipse):
        theta = np.linspace(0, 2 * np.pi, 7)
        bp = evaluate(ellipse, theta)
        np.testing.assert_allclose(bp.point, 2 * np.cos(theta) + 1j * np.sin(theta), atol=1e-14)
        np.testing.assert_allclose(np.abs(bp.normal), 1.0)
        np.testing.assert_allclose((bp.normal * np.conj(bp.tangent)).real, 0.0, atol=1e-14)


class TestAreaAndBarycenter:
    def test_circle(self, disc):
        area, centre = area_and_barycenter(disc)
        assert area == pytest.approx(np.pi, rel=1e-14)
        assert abs(centre) < 1e-14

    def test_ellipse(self, ellipse):
        area, centre = area_and_barycenter(ellipse)
        assert area == pytest.approx(2 * np.pi, rel=1e-14)
        assert abs(centre) < 1e-14

    def test_translated_circle(self):
        _, centre = area_and_barycenter(Contour.circle(1.0, center=1.0))
        assert centre == pytest.approx(1.0, abs=1e-14)

    def test_rigid_motion_equivariance(self, peanut):
        shifted = peanut.translated(0.3 - 0.2j)
        moved = shifted.rotated(0.7)
        a0, c0 = area_and_barycenter(shifted)
        a1, c1 = area_and_barycenter(moved)
        assert a1 == pytest.approx(a0, abs=1e-12)
        assert abs(c1 - np.exp(0.7j) * c0) < 1e-12

    def test_node_doubling(self, peanut):
        fine = peanut.refined(2)
        assert abs(fine.area - peanut.area) < 1e-10
        assert abs(fine.barycenter - peanut.barycenter) < 1e-10
        np.testing.assert_allclose(fine.normal[::2], peanut.normal, atol=1e-10)


class TestConstruction:
    def test_clockwise_input_is_reversed(self):
        c = Contour(np.array([1.0, 0.0, 0.0]), 64)
        assert c.area == pytest.approx(np.pi)
        np.testing.assert_allclose(c.coefficients, [0.0, 0.0, 1.0])

    def test_zero_area(self):
        with pytest.raises(OrientationError):
            Contour(np.zeros(3), 16)

    def test_even_coefficient_count(self):
        with pytest.raises(DomainError):
            Contour(np.array([0.0, 1.0]), 16)

    def test_self_intersection(self):
        # z = e^{i t} + e^{2 i t} crosses itself at -1
        looped = Contour(np.array([0, 0, 0, 1, 1], dtype=complex), 128)
        with pytest.raises(SelfIntersectionError) as info:
            looped.check_simple()
        assert "segments" in info.value.witness

    def test_polar_radius_must_stay_positive(self):
        with pytest.raises(DomainError):
            PolarShape(2, 1.0, (1.2,))

    def test_polar_symmetry(self):
        shape = PolarShape(3, 1.0, (0.1, -0.02))
        c = shape.to_contour(240)
        assert hausdorff_distance(c, c.rotated(2 * np.pi / 3)) < 1e-12

    def test_polar_ellipse_matches_ellipse(self, ellipse):
        polar = PolarShape.ellipse(2.0, 1.0, 32).to_contour(512)
        assert hausdorff_distance(polar, ellipse) < 1e-10

    def test_polyline_fit_of_circle(self, disc):
        theta = 2 * np.pi * np.arange(200) / 200
        fitted = Contour.from_polyline(np.column_stack((np.cos(theta), np.sin(theta))), nodes=128)
        assert hausdorff_distance(fitted, disc) < 1e-10

    def test_resampled_keeps_curve(self, peanut):
        assert hausdorff_distance(peanut.resampled(512), peanut) < 1e-12


class TestContains:
    def test_examples(self, disc, ellipse):
        assert contains(disc, 0j)
        assert not contains(disc, (2.0, 0.0))
        assert contains(ellipse, (1.5, 0.5))

    def test_boundary_ambiguity(self, disc):
        with pytest.raises(BoundaryAmbiguityError) as info:
            contains(disc, 1.0)
        assert info.value.witness["distance"] < 1e-12

    def test_explicit_delta(self, disc):
        assert contains(disc, 0.95, delta=0.01)
        with pytest.raises(BoundaryAmbiguityError):
            contains(disc, 0.95, delta=0.1)

    def test_winding_number_values(self, peanut):
        w = winding_number(peanut, np.array([0.0, 0.0 + 0.3j, 3.0, 0.7 + 0.0j]))
        np.testing.assert_allclose(w, [1, 1, 0, 1], atol=1e-10)

    def test_agrees_with_ray_casting(self, peanut, rng):
        points = rng.uniform(-2, 2, 1000) + 1j * rng.uniform(-1, 1, 1000)
        points = points[peanut.distance_to_boundary(points) > 1e-3]
        dense = peanut.to_polyline(8192)
        np.testing.assert_array_equal(contains(peanut, points), ray_cast(dense, points))


class TestReflect:
    def test_vertical_mirror(self):
        frame = ReflectionFrame(1.0, 1.0)
        assert reflect(frame, 1.5 + 2j) == pytest.approx(0.5 + 2j)

    def test_horizontal_mirror(self):
        frame = ReflectionFrame(1j, 1j)
        assert reflect(frame, 3 + 1.2j) == pytest.approx(3 + 0.8j)

    def test_base_point_fixed(self, peanut):
        frame = ReflectionFrame.at_node(peanut, 17)
        assert reflect(frame, frame.base_point) == pytest.approx(frame.base_point)

    def test_isometric_involution(self, peanut, rng):
        frame = ReflectionFrame.at_node(peanut, 40)
        y = rng.normal(size=50) + 1j * rng.normal(size=50)
        image = reflect(frame, y)
        np.testing.assert_allclose(reflect(frame, image), y, atol=1e-14)
        np.testing.assert_allclose(
            np.abs(image[:, None] - image[None, :]), np.abs(y[:, None] - y[None, :]), atol=1e-13
        )

    def test_rejects_non_unit_normal(self):
        with pytest.raises(DomainError):
            ReflectionFrame(0j, 2.0)


class TestHausdorff:
    def test_identical(self, peanut):
        assert hausdorff_distance(peanut, peanut) < 1e-14

    def test_concentric_circles(self, disc):
        assert hausdorff_distance(disc, Contour.circle(1.1)) == pytest.approx(0.1, abs=1e-12)

    def test_rotated_circle(self, disc):
        assert hausdorff_distance(disc, disc.rotated(0.123)) < 1e-12


class TestQueries:
    def test_projection_on_circle(self, disc):
        theta, dist = disc.project(np.array([2.0, 0.5j, -3.0]))
        np.testing.assert_allclose(dist, [1.0, 0.5, 2.0], atol=1e-13)
        np.testing.assert_allclose(np.exp(1j * theta), [1.0, 1j, -1.0], atol=1e-12)

    def test_diameter_and_perimeter(self, disc, ellipse):
        assert disc.diameter == pytest.approx(2.0, rel=1e-6)
        assert ellipse.diameter == pytest.approx(4.0, rel=1e-6)
        assert disc.perimeter == pytest.approx(2 * np.pi, rel=1e-14)

    def test_curvature_of_circle(self):
        np.testing.assert_allclose(Contour.circle(2.0).curvature, 0.5, rtol=1e-13)
