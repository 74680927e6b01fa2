# SPDX-FileCopyrightText: Copyright (c) 2026 provide.io llc. All rights reserved.
# SPDX-License-Identifier: MIT

"""Tolerances and run settings.

Defaults live in code; a YAML file can override them::

    tolerances:
      geometric: 1.0e-9
      strict: 1.0e-10
    nodes:
      evaluation: 256
      solve: 512

``VPATCH_THREADS`` is the only environment variable consulted.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from vpatch.errors import ConfigurationError

THREADS_ENV = "VPATCH_THREADS"


@dataclass(frozen=True)
class Tolerances:
    """Every numerical tolerance used by the library.

    Lengths marked *relative* are multiplied by the contour diameter.
    """

    geometric: float = 1e-9  # relative; Sigma-class margins
    boundary_delta: float = 1e-8  # relative; contains() ambiguity band
    degenerate_speed: float = 1e-10  # relative; min |z'| allowed
    strict: float = 1e-10  # strict inequalities are tested as <= -strict
    jacobian_step: float = 1e-6
    damping_floor: float = 2.0**-10
    near_spacings: float = 5.0  # upgrade quadrature below this many node spacings
    collar_spacings: float = 3.0  # probes ignore this band around the boundary
    oversampling: int = 16
    vstate_guard: float = 1e-6  # probes refuse contours with a larger residual
    laplacian_spacing: float = 1e-3
    reflection_exclusion: float = 0.01  # fraction of excluded reflected samples that flags condition 3

    def as_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class Settings:
    tolerances: Tolerances = field(default_factory=Tolerances)
    evaluation_nodes: int = 256
    solve_nodes: int = 512
    threads: int = 1


DEFAULT_TOLERANCES = Tolerances()


def _threads_from_env() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError as e:
        raise ConfigurationError(f"{THREADS_ENV} must be an integer, got {raw!r}") from e
    if value < 1:
        raise ConfigurationError(f"{THREADS_ENV} must be >= 1, got {value}")
    return value


def _overlay(defaults: Any, overrides: dict[str, Any], section: str) -> dict[str, Any]:
    known = {f.name for f in dataclasses.fields(defaults)}
    unknown = sorted(set(overrides) - known)
    if unknown:
        raise ConfigurationError(f"Unknown keys in '{section}': {', '.join(unknown)}", {"keys": unknown})
    return {name: type(getattr(defaults, name))(value) for name, value in overrides.items()}


def load_settings(path: Path | None = None, threads: int | None = None) -> Settings:
    """Build settings from defaults, an optional YAML file and the thread count."""
    data: dict[str, Any] = {}
    if path is not None:
        try:
            with path.open() as f:
                data = yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as e:
            raise ConfigurationError(f"Could not read settings file {path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigurationError(f"Settings file {path} must contain a mapping")

    unknown = sorted(set(data) - {"tolerances", "nodes"})
    if unknown:
        raise ConfigurationError(f"Unknown sections: {', '.join(unknown)}", {"sections": unknown})

    tolerances = dataclasses.replace(
        DEFAULT_TOLERANCES, **_overlay(DEFAULT_TOLERANCES, data.get("tolerances") or {}, "tolerances")
    )
    nodes = data.get("nodes") or {}
    extra = sorted(set(nodes) - {"evaluation", "solve"})
    if extra:
        raise ConfigurationError(f"Unknown keys in 'nodes': {', '.join(extra)}", {"keys": extra})

    return Settings(
        tolerances=tolerances,
        evaluation_nodes=int(nodes.get("evaluation", 256)),
        solve_nodes=int(nodes.get("solve", 512)),
        threads=threads if threads is not None else _threads_from_env(),
    )
