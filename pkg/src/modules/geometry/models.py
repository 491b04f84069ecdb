"""Vocabularies for the geometry module.

- CurveKind: the parametric families a boundary curve can belong to
- DomainIssue: the invariant violations validate_domain can report
"""

import enum


class CurveKind(enum.Enum):
    """Parametric family of a smooth closed curve."""

    CIRCLE = "circle"
    ELLIPSE = "ellipse"
    FOURIER = "fourier"


class DomainIssue(enum.Enum):
    """Invariant violations reported by validate_domain."""

    NON_SIMPLE_CURVE = "NonSimpleCurve"
    DEGENERATE_CURVE = "DegenerateCurve"
    NOT_COUNTERCLOCKWISE = "NotCounterclockwise"
    HOLE_OUTSIDE_OUTER = "HoleOutsideOuter"
    HOLE_CROSSES_OUTER = "HoleCrossesOuter"
    HOLES_INTERSECT = "HolesIntersect"
    INSUFFICIENT_CLEARANCE = "InsufficientClearance"
