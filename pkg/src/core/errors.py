"""Exception hierarchy for the ERBM toolkit.

Every error carries a stable ``code`` (the name reports and the CLI print) and
an optional ``details`` mapping with the numbers that triggered it.

InputError subclasses describe bad inputs (exit code 2 at the CLI when they
concern the domain file); ComputationError subclasses describe numerical
failures on valid inputs (exit code 1).
"""

from typing import Any, Dict, Optional


class ErbmError(Exception):
    """Base class for all toolkit errors."""

    code = "ErbmError"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.details = dict(details or {})

    def __str__(self) -> str:
        return f"{self.code}: {super().__str__()}"


class InputError(ErbmError, ValueError):
    code = "InputError"


class ComputationError(ErbmError, RuntimeError):
    code = "ComputationError"


# ============================================================================
# INPUT ERRORS
# ============================================================================


class DomainParseError(InputError):
    """Malformed domain file; ``details['line']`` holds the 1-based line."""

    code = "DomainParseError"


class InvalidDomain(InputError):
    """Domain violates its invariants; ``details['issues']`` lists them."""

    code = "InvalidDomain"


class NonSimpleCurve(InputError):
    code = "NonSimpleCurve"


class DegenerateCurve(InputError):
    code = "DegenerateCurve"


class ArcsNotDisjoint(InputError):
    code = "ArcsNotDisjoint"


class PointsTooClose(InputError):
    code = "PointsTooClose"


class PoleTooCloseToBoundary(InputError):
    code = "PoleTooCloseToBoundary"


class PathTooCloseToBoundary(InputError):
    code = "PathTooCloseToBoundary"


class CurveTouchesBoundary(InputError):
    code = "CurveTouchesBoundary"


class PlateauLevel(InputError):
    code = "PlateauLevel"


# ============================================================================
# COMPUTATION ERRORS
# ============================================================================


class SolverSingular(ComputationError):
    """Boundary integral system is numerically rank deficient."""

    code = "SolverSingular"


class IllConditioned(ComputationError):
    code = "IllConditioned"


class ClearanceTooSmall(ComputationError):
    code = "ClearanceTooSmall"


class GradientVanished(ComputationError):
    code = "GradientVanished"


class PlateauDegeneracy(ComputationError):
    code = "PlateauDegeneracy"


class MaxStepsExceeded(ComputationError):
    code = "MaxStepsExceeded"
