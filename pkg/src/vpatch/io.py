# SPDX-FileCopyrightText: Copyright (c) 2026 provide.io llc. All rights reserved.
# SPDX-License-Identifier: MIT

"""File formats: contour JSON, report payloads, CSV tables and run manifests.

Every payload is validated against the versioned schema shipped in
``vpatch/schemas`` before it is written or after it is read.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from vpatch import __version__
from vpatch.config import DEFAULT_TOLERANCES, Tolerances
from vpatch.errors import ContourError, DomainError, SchemaError, UsageError
from vpatch.geometry import Contour, PolarShape
from vpatch.potential import FarFieldModel
from vpatch.probes import ProbeReport
from vpatch.sigma import ConditionRecord, SigmaReport
from vpatch.vstate import BifurcationScan, VStateSolution

CONTOUR = "contour.v1"
SOLUTION = "vstate-solution.v1"
BRANCH = "branch.v1"
RESIDUAL = "residual.v1"
SIGMA_REPORT = "sigma-report.v1"
PROBE_REPORT = "probe-report.v1"
BIFURCATION_SCAN = "bifurcation-scan.v1"
FAR_FIELD = "far-field.v1"
RUN_MANIFEST = "run-manifest.v1"

DEFAULT_POLYLINE_NODES = 256


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict[str, Any]:
    text = resources.files("vpatch").joinpath("schemas", f"{name}.schema.json").read_text()
    return dict(json.loads(text))


def validate(payload: dict[str, Any], name: str) -> dict[str, Any]:
    """Raise SchemaError unless ``payload`` validates against schema ``name``."""
    try:
        jsonschema.validate(payload, load_schema(name))
    except jsonschema.ValidationError as e:
        path = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise SchemaError(f"{name}: {e.message} at {path}", {"schema": name, "path": path}) from e
    return payload


def clean(value: Any) -> Any:
    """Plain-JSON copy of ``value``: numpy scalars unwrapped, non-finite floats as None."""
    if isinstance(value, dict):
        return {str(k): clean(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return clean(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, complex):
        return [clean(value.real), clean(value.imag)]
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def dump_json(payload: dict[str, Any], path: Path, schema: str | None = None) -> Path:
    payload = clean(payload)
    if schema is not None:
        validate(payload, schema)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2) + "\n")
    return path


def read_json(path: Path) -> dict[str, Any]:
    try:
        data = json.loads(path.read_text())
    except OSError as e:
        raise UsageError(f"Could not read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise UsageError(f"Malformed JSON in {path}: {e}", {"line": e.lineno, "column": e.colno}) from e
    if not isinstance(data, dict):
        raise UsageError(f"{path} must contain a JSON object")
    return data


def write_csv(path: Path, header: list[str], rows: np.ndarray) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.atleast_2d(rows), fmt="%.17g", delimiter=",", header=",".join(header), comments="")
    return path


# ---- contours ---------------------------------------------------------------


def contour_to_json(contour: Contour) -> dict[str, Any]:
    c = contour.coefficients
    return {
        "kind": "complex-fourier",
        "coefficients": [[float(v.real), float(v.imag)] for v in c],
        "k_min": -contour.modes,
        "k_max": contour.modes,
        "nodes": contour.node_count,
    }


def polar_to_json(shape: PolarShape, nodes: int | None = None) -> dict[str, Any]:
    payload: dict[str, Any] = {
        "kind": "polar-fourier",
        "symmetry": shape.symmetry,
        "base_radius": shape.base_radius,
        "cosines": list(shape.cosines),
    }
    if nodes is not None:
        payload["nodes"] = nodes
    return payload


def polar_from_json(payload: dict[str, Any]) -> PolarShape:
    return PolarShape(int(payload["symmetry"]), float(payload["base_radius"]), tuple(payload["cosines"]))


def contour_from_json(
    payload: dict[str, Any],
    nodes: int | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    default_nodes: int = DEFAULT_POLYLINE_NODES,
) -> Contour:
    """Build a contour from any of the three JSON kinds.

    ``nodes`` overrides the stored node count; ``default_nodes`` applies when neither is given.
    """
    validate(payload, CONTOUR)
    kind = payload["kind"]
    n = nodes or payload.get("nodes") or default_nodes
    if kind == "complex-fourier":
        k_min, k_max = int(payload["k_min"]), int(payload["k_max"])
        coefficients = np.array([complex(re, im) for re, im in payload["coefficients"]])
        if coefficients.size != k_max - k_min + 1:
            raise SchemaError(
                "coefficient count does not match k_min..k_max",
                {"count": int(coefficients.size), "k_min": k_min, "k_max": k_max},
            )
        top = max(abs(k_min), abs(k_max))
        full = np.zeros(2 * top + 1, dtype=np.complex128)
        full[k_min + top : k_max + top + 1] = coefficients
        return Contour(full, max(int(n), 2 * top + 1), tolerances).check_simple()
    if kind == "polar-fourier":
        return Contour.from_polar(polar_from_json(payload), int(n), tolerances)
    return Contour.from_polyline(payload["points"], int(n), tolerances=tolerances)


def load_contour(
    path: Path,
    nodes: int | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    default_nodes: int = DEFAULT_POLYLINE_NODES,
) -> Contour:
    try:
        return contour_from_json(read_json(path), nodes, tolerances, default_nodes)
    except (ContourError, DomainError) as e:
        e.witness.setdefault("file", str(path))
        raise


# ---- solver payloads -------------------------------------------------------


def solution_to_json(solution: VStateSolution) -> dict[str, Any]:
    return {
        "schema": SOLUTION,
        "shape": polar_to_json(solution.shape, solution.nodes),
        "omega": solution.omega,
        "residual_norm": solution.residual_norm,
        "branch_parameter": solution.branch_parameter,
        "iterations": solution.iterations,
        "m": solution.m,
        "nodes": solution.nodes,
    }


def solution_from_json(payload: dict[str, Any]) -> VStateSolution:
    validate(payload, SOLUTION)
    shape = polar_from_json(payload["shape"])
    return VStateSolution(
        shape,
        float(payload["omega"]),
        float(payload["residual_norm"]),
        float(payload.get("branch_parameter", shape.cosines[0] if shape.cosines else 0.0)),
        int(payload["iterations"]),
        int(payload.get("nodes", payload["shape"].get("nodes", 512))),
    )


def branch_to_json(
    m: int, solutions: list[VStateSolution], error: dict[str, Any] | None = None
) -> dict[str, Any]:
    return {
        "schema": BRANCH,
        "m": m,
        "complete": error is None,
        "error": error,
        "solutions": [solution_to_json(s) for s in solutions],
    }


def scan_to_json(scan: BifurcationScan, eigenvalues: list[float] | None = None) -> dict[str, Any]:
    payload = {"schema": BIFURCATION_SCAN, **asdict(scan), "expected": (scan.m - 1) / (2 * scan.m)}
    if eigenvalues is not None:
        payload["eigenvalues"] = eigenvalues
    return payload


def far_field_to_json(model: FarFieldModel) -> dict[str, Any]:
    return {"schema": FAR_FIELD, **asdict(model)}


# ---- reports ----------------------------------------------------------------


def _condition(record: ConditionRecord) -> dict[str, Any]:
    return {
        "name": record.name,
        "pass": record.passed,
        "value": record.value,
        "witness": record.witness,
        "count": record.count,
        "details": record.details,
    }


def sigma_report_to_json(report: SigmaReport, max_alpha: float | None = None) -> dict[str, Any]:
    return {
        "schema": SIGMA_REPORT,
        "alpha": report.alpha,
        "threshold": report.threshold,
        "condition1": _condition(report.condition1),
        "condition2": _condition(report.condition2),
        "condition3": _condition(report.condition3),
        "verdict": report.verdict,
        "boundary_nodes": report.boundary_nodes,
        "interior_samples": report.interior_samples,
        "tolerance": report.tolerance,
        "max_alpha_estimate": max_alpha,
    }


def probe_report_to_json(report: ProbeReport) -> dict[str, Any]:
    return {
        "schema": PROBE_REPORT,
        "probe": report.probe,
        "verdict": report.verdict,
        "margin": report.margin,
        "witness": report.witness,
        "samples": report.samples,
        "tolerances": report.tolerances,
        "details": report.details,
        "notes": list(report.notes),
    }


# ---- run manifests -----------------------------------------------------------


def file_digest(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


@dataclass
class RunManifest:
    """Provenance written next to every output as ``<output>.manifest.json``."""

    command: list[str]
    tolerances: dict[str, float]
    input_digests: dict[str, str] = field(default_factory=dict)
    version: str = __version__
    wall_time: float = 0.0
    outputs: list[str] = field(default_factory=list)

    def add_input(self, path: Path) -> None:
        self.input_digests[str(path)] = file_digest(path)

    def to_json(self) -> dict[str, Any]:
        return {"schema": RUN_MANIFEST, **asdict(self)}

    def write(self, output: Path) -> Path:
        target = output.with_name(output.name + ".manifest.json")
        return dump_json(self.to_json(), target, RUN_MANIFEST)
