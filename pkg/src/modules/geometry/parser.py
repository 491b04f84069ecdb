"""Domain file tokenizer.

Line-oriented format (UTF-8):

    # comment
    outer circle  cx cy r
    hole  ellipse cx cy a b rot
    hole  fourier cx cy K  reC-K imC-K ... reCK imCK

Exactly one ``outer`` statement, zero or more ``hole`` statements. This module
only checks syntax and arity; curve construction happens in service.py.
"""

import math
from typing import List, NamedTuple, Tuple

from src.core.errors import DomainParseError
from src.modules.geometry.models import CurveKind

ROLES = ("outer", "hole")


class CurveStatement(NamedTuple):
    role: str
    kind: CurveKind
    values: Tuple[float, ...]
    line: int


def _expected_arity(kind: CurveKind, values: List[float], line: int) -> int:
    if kind is CurveKind.CIRCLE:
        return 3
    if kind is CurveKind.ELLIPSE:
        return 5
    if len(values) < 3:
        raise DomainParseError(f"line {line}: fourier needs cx cy K", {"line": line})
    K = values[2]
    if K != int(K) or K < 1:
        raise DomainParseError(
            f"line {line}: fourier mode count K must be a positive integer", {"line": line}
        )
    return 3 + 2 * (2 * int(K) + 1)


def parse_statements(text: str, source: str = "<string>") -> List[CurveStatement]:
    """Split a domain file into curve statements.

    Args:
        text: File contents
        source: Name used in error messages

    Returns:
        list[CurveStatement]: Statements in file order

    Raises:
        DomainParseError: On unknown keywords, bad numbers or wrong arity
    """
    statements: List[CurveStatement] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if not content:
            continue
        tokens = content.split()
        if len(tokens) < 2:
            raise DomainParseError(
                f"{source}: line {number}: expected '<outer|hole> <curve> ...'",
                {"line": number},
            )
        role, kind_name, numbers = tokens[0].lower(), tokens[1].lower(), tokens[2:]
        if role not in ROLES:
            raise DomainParseError(
                f"{source}: line {number}: unknown statement '{tokens[0]}'", {"line": number}
            )
        try:
            kind = CurveKind(kind_name)
        except ValueError as e:
            raise DomainParseError(
                f"{source}: line {number}: unknown curve form '{tokens[1]}'", {"line": number}
            ) from e
        try:
            values = [float(token) for token in numbers]
        except ValueError as e:
            raise DomainParseError(
                f"{source}: line {number}: non-numeric parameter", {"line": number}
            ) from e
        if not all(math.isfinite(v) for v in values):
            raise DomainParseError(
                f"{source}: line {number}: parameters must be finite", {"line": number}
            )
        expected = _expected_arity(kind, values, number)
        if len(values) != expected:
            raise DomainParseError(
                f"{source}: line {number}: {kind.value} takes {expected} numbers, got {len(values)}",
                {"line": number},
            )
        statements.append(CurveStatement(role, kind, tuple(values), number))

    outers = [s for s in statements if s.role == "outer"]
    if len(outers) != 1:
        line = outers[1].line if len(outers) > 1 else 0
        raise DomainParseError(
            f"{source}: exactly one 'outer' statement required, found {len(outers)}",
            {"line": line},
        )
    return statements
