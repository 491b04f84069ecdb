"""Vocabularies for the cli module.

- Command: the mutually exclusive subcommands of ``run``
- ExitCode: process exit status
"""

import enum


class Command(enum.Enum):
    """Subcommand names as typed on the command line."""

    PK = "pk"
    ER_PK = "er-pk"
    GREEN = "green"
    ER_GREEN = "er-green"
    CHAIN = "chain"
    MAP_CHORDAL = "map-chordal"
    MAP_BILATERAL = "map-bilateral"
    MAP_RADIAL = "map-radial"
    TRACE = "trace"
    SAMPLE = "sample"
    VALIDATE = "validate"


class ExitCode(enum.IntEnum):
    """0 success, 1 computation failure, 2 usage or parse error."""

    SUCCESS = 0
    COMPUTATION = 1
    USAGE = 2
