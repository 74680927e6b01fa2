# SPDX-FileCopyrightText: Copyright (c) 2026 provide.io llc. All rights reserved.
# SPDX-License-Identifier: MIT

from __future__ import annotations

import numpy as np
import pytest

from vpatch.errors import DomainError
from vpatch.geometry import Contour, contains
from vpatch.sigma import (
    CRITICAL_ALPHA,
    SectorSpec,
    check_condition1,
    check_condition2,
    check_condition3,
    classify,
    estimate_max_alpha,
    interior_samples,
)

SAMPLES = 2000


class TestSectorSpec:
    def test_critical_threshold(self):
        assert SectorSpec.critical().threshold == pytest.approx(1.0 / np.sqrt(5.0), rel=1e-14)
        assert CRITICAL_ALPHA == pytest.approx(1.1071487177940904)

    @pytest.mark.parametrize("alpha", [-0.1, 2.0])
    def test_range(self, alpha):
        with pytest.raises(DomainError):
            SectorSpec(alpha)


class TestInteriorSamples:
    def test_inside_and_sized(self, peanut):
        samples = interior_samples(peanut, SAMPLES)
        assert SAMPLES / 2 <= samples.size <= 2 * SAMPLES
        assert np.all(contains(peanut, samples))


class TestConditions:
    def test_support_on_disc(self, disc):
        record = check_condition1(disc)
        assert record.passed
        assert record.value == pytest.approx(1.0, abs=1e-12)

    def test_support_on_ellipse(self, ellipse):
        record = check_condition1(ellipse)
        assert record.passed
        assert record.value > 0

    def test_support_holds_for_polar_graphs(self, peanut):
        # x . nu = R^2 / |z'| on any star-shaped polar graph
        assert check_condition1(peanut).passed

    def test_sector_on_disc(self, disc):
        record = check_condition2(disc, SectorSpec.critical(), interior_samples(disc, SAMPLES))
        assert record.passed
        assert record.value < 0

    def test_sector_fails_across_the_waist(self, peanut):
        record = check_condition2(peanut, SectorSpec.critical(), interior_samples(peanut, SAMPLES))
        assert not record.passed
        assert record.value >= SectorSpec.critical().threshold
        base = complex(*record.witness["base_point"])
        sample = complex(*record.witness["sample"])
        i = int(np.argmin(np.abs(peanut.points - base)))
        chord = sample - base
        dot = (chord * np.conj(peanut.normal[i])).real / abs(chord)
        assert dot == pytest.approx(record.value, abs=1e-12)

    def test_margins_scale_with_their_units(self):
        big = Contour.circle(10.0, nodes=256)
        geometric = big.tolerances.geometric
        support = check_condition1(big)
        sector = check_condition2(big, SectorSpec.critical(), interior_samples(big, SAMPLES))
        assert support.details["tolerance"] == pytest.approx(geometric * big.diameter)
        assert support.details["tolerance_scale"] == "diameter"
        assert sector.details["tolerance"] == geometric
        assert sector.details["tolerance_scale"] == "unit"

    def test_reflection_vacuous_on_convex(self, ellipse):
        record = check_condition3(ellipse, interior_samples(ellipse, SAMPLES))
        assert record.passed
        assert record.count == 0

    def test_reflection_fails_on_peanut(self, peanut):
        record = check_condition3(peanut, interior_samples(peanut, SAMPLES))
        assert not record.passed
        assert record.count > 0
        reflected = complex(*record.witness["reflected"])
        assert not contains(peanut, reflected)


class TestClassify:
    def test_disc(self, disc):
        report = classify(disc, interior_count=SAMPLES)
        assert report.verdict
        assert report.boundary_nodes == disc.node_count
        assert report.threshold == pytest.approx(1.0 / np.sqrt(5.0))

    @pytest.mark.parametrize("alpha", [CRITICAL_ALPHA, 0.5 * np.pi])
    def test_ellipse(self, ellipse, alpha):
        assert classify(ellipse, alpha, SAMPLES).verdict

    def test_peanut(self, peanut):
        report = classify(peanut, interior_count=SAMPLES)
        assert not report.verdict
        assert report.condition1.passed
        assert not report.condition2.passed
        assert not report.condition3.passed
        assert report.condition2.witness is not None
        assert report.condition3.witness is not None

    def test_off_centre_input_is_recentred(self):
        assert classify(Contour.circle(1.0, center=3 - 2j), interior_count=SAMPLES).verdict

    def test_monotone_in_alpha(self, peanut, ellipse):
        alphas = [0.2, 0.5, 0.8, CRITICAL_ALPHA, 1.3, 0.5 * np.pi]
        for contour in (peanut, ellipse):
            samples = interior_samples(contour, SAMPLES)
            passes = [check_condition2(contour, SectorSpec(a), samples).passed for a in alphas]
            for smaller, larger in zip(passes, passes[1:]):
                assert smaller or not larger

    def test_rotation_invariant(self, peanut, ellipse):
        assert not classify(peanut.rotated(0.3), interior_count=SAMPLES).verdict
        assert classify(ellipse.rotated(0.3), interior_count=SAMPLES).verdict

    @pytest.mark.slow
    def test_stable_under_refinement(self, peanut, disc):
        assert not classify(peanut.refined(2), interior_count=2 * SAMPLES).verdict
        assert classify(disc.refined(2), interior_count=2 * SAMPLES).verdict


class TestEstimateMaxAlpha:
    def test_convex(self, disc, ellipse):
        assert estimate_max_alpha(disc, SAMPLES) == pytest.approx(0.5 * np.pi, abs=0.05)
        assert estimate_max_alpha(ellipse, SAMPLES) >= CRITICAL_ALPHA

    def test_outside_every_class(self, peanut):
        assert estimate_max_alpha(peanut, SAMPLES) is None
