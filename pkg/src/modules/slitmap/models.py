"""Vocabularies for the slitmap module."""

import enum


class MapKind(enum.Enum):
    """Canonical slit-domain class of a conformal map."""

    CHORDAL = "chordal"
    BILATERAL = "bilateral"
    RADIAL = "radial"


class ConjugateRole(enum.Enum):
    """Which part of f = u + i·v the given field is.

    IMAGINARY: the field is v, the conjugate integrates du = v_y dx − v_x dy.
    REAL: the field is u, the conjugate integrates dv = −u_y dx + u_x dy.
    """

    IMAGINARY = "imaginary"
    REAL = "real"
