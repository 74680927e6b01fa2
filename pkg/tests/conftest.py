# SPDX-FileCopyrightText: Copyright (c) 2026 provide.io llc. All rights reserved.
# SPDX-License-Identifier: MIT

"""Shared contours and fields."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from vpatch.geometry import Contour, PolarShape
from vpatch.io import contour_to_json, polar_to_json
from vpatch.parallel import set_threads
from vpatch.potential import PatchField

PEANUT = PolarShape(2, 1.0, (0.6,))


@pytest.fixture(autouse=True)
def single_thread():
    set_threads(1)
    yield
    set_threads(1)


@pytest.fixture
def disc() -> Contour:
    return Contour.circle(1.0, nodes=256)


@pytest.fixture
def ellipse() -> Contour:
    return Contour.ellipse(2.0, 1.0, nodes=256)


@pytest.fixture
def peanut() -> Contour:
    return PEANUT.to_contour(256)


@pytest.fixture
def disc_field(disc: Contour) -> PatchField:
    return PatchField.canonical(disc, -1.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def contour_files(tmp_path: Path, disc: Contour, ellipse: Contour) -> dict[str, Path]:
    files = {
        "disc": contour_to_json(disc),
        "ellipse": contour_to_json(ellipse),
        "peanut": polar_to_json(PEANUT, 256),
    }
    paths = {}
    for name, payload in files.items():
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(payload))
        paths[name] = path
    return paths
