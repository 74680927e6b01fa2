# SPDX-FileCopyrightText: Copyright (c) 2026 provide.io llc. All rights reserved.
# SPDX-License-Identifier: MIT

"""Numerical laboratory for uniformly rotating vortex patches."""

from __future__ import annotations

from vpatch.config import DEFAULT_TOLERANCES, Settings, Tolerances, load_settings
from vpatch.errors import VPatchError
from vpatch.geometry import Contour, PolarShape, ReflectionFrame
from vpatch.potential import PatchField
from vpatch.vstate import VStateProblem, VStateSolution

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOLERANCES",
    "Contour",
    "PatchField",
    "PolarShape",
    "ReflectionFrame",
    "Settings",
    "Tolerances",
    "VPatchError",
    "VStateProblem",
    "VStateSolution",
    "__version__",
    "load_settings",
]
