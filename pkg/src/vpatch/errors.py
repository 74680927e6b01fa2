# SPDX-FileCopyrightText: Copyright (c) 2026 provide.io llc. All rights reserved.
# SPDX-License-Identifier: MIT

"""Exception hierarchy.

Every error carries a ``witness`` mapping with the data that triggered it
(points, values, last iterate) so callers and the CLI can report it verbatim.
"""

from __future__ import annotations

from typing import Any


class VPatchError(Exception):
    """Base class for all vpatch errors."""

    def __init__(self, message: str, witness: dict[str, Any] | None = None) -> None:
        super().__init__(message)
        self.witness: dict[str, Any] = dict(witness or {})


# Geometry


class ContourError(VPatchError):
    """Invalid boundary geometry."""


class OrientationError(ContourError):
    """Nonpositive enclosed area."""


class DegenerateTangentError(ContourError):
    """|z'(theta)| below tolerance at some parameter."""


class SelfIntersectionError(ContourError):
    """Two non-adjacent discretized segments cross."""


class BoundaryAmbiguityError(ContourError):
    """Query point within the boundary-proximity tolerance of the curve."""


class DomainError(VPatchError, ValueError):
    """Scalar argument outside its admissible range."""


# Solvers


class SolverError(VPatchError):
    """Numerical solve failed."""


class DivergenceError(SolverError):
    """Newton iteration did not reach the tolerance; witness holds the last iterate."""


class SingularSystemError(SolverError):
    """Jacobian is rank deficient (typically at a bifurcation point with fixed omega)."""


class BranchAbortedError(DivergenceError):
    """A continuation step diverged; ``partial`` holds the solutions computed before it."""

    def __init__(self, message: str, partial: list[Any], witness: dict[str, Any] | None = None) -> None:
        super().__init__(message, witness)
        self.partial = partial


# Probes and potential theory


class LemmaViolationError(VPatchError):
    """Sign of the relative stream function disagrees with membership in the patch."""


class BarycenterError(VPatchError):
    """Far-field remainder decays slower than |x|^-2 (patch not centred)."""


class ProbeRefusedError(VPatchError):
    """A probe precondition does not hold; the probe was not run."""

    def __init__(self, message: str, witness: dict[str, Any] | None = None, report: Any = None) -> None:
        super().__init__(message, witness)
        self.report = report


class MonotonicityViolationError(VPatchError):
    """A radial field failed the strict radial decrease check."""


class EvolutionBreakdownError(VPatchError):
    """Contour lost simplicity or regularity during time stepping."""

    def __init__(self, message: str, last_state: Any, witness: dict[str, Any] | None = None) -> None:
        super().__init__(message, witness)
        self.last_state = last_state


# Surface


class ConfigurationError(VPatchError):
    """Malformed settings file."""


class UsageError(VPatchError):
    """Bad command-line usage or malformed input file."""


class SchemaError(VPatchError):
    """Payload does not validate against its shipped schema."""
