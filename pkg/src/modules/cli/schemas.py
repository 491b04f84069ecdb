"""Pydantic schemas for the cli module: report entries and the report document.

A report renders as plain text, one ``key = value # annotation`` line per
entry. Numeric entries always carry an annotation (tolerance, standard error
or ``exact``); timing lines are dropped when rendering without timestamps.
"""

from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

Value = Union[str, int, float, bool]


def format_value(value: Value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def format_vector(values: Sequence[float]) -> str:
    return "[" + ", ".join(format_value(float(v)) for v in values) + "]"


def format_matrix(rows) -> str:
    return "[" + "; ".join(format_vector(row) for row in np.atleast_2d(rows)) + "]"


class ReportEntry(BaseModel):
    """One report line."""

    model_config = ConfigDict(frozen=True)

    key: str
    value: str
    note: str = ""
    timing: bool = False

    def render(self) -> str:
        line = f"{self.key} = {self.value}"
        return f"{line} # {self.note}" if self.note else line


class CheckResult(BaseModel):
    """Outcome of one invariant check."""

    model_config = ConfigDict(frozen=True)

    suite: str
    name: str
    value: float
    tolerance: float
    passed: bool
    error: Optional[str] = None


class Report(BaseModel):
    """Key-value document printed to stdout and written to the output directory."""

    command: str
    entries: List[ReportEntry] = Field(default_factory=list)
    checks: List[CheckResult] = Field(default_factory=list)

    def echo(self, key: str, value: Value) -> None:
        """Input parameter; numbers are annotated ``exact``."""
        note = "" if isinstance(value, str) else "exact"
        self.entries.append(ReportEntry(key=key, value=format_value(value), note=note))

    def value(self, key: str, value: Value, tolerance: Optional[float] = None, stderr: Optional[float] = None) -> None:
        if stderr is not None:
            note = f"stderr {stderr:.3g}"
        elif tolerance is not None:
            note = f"tol {tolerance:.1e}"
        else:
            note = "exact"
        self.entries.append(ReportEntry(key=key, value=format_value(value), note=note))

    def vector(self, key: str, values, tolerance: float) -> None:
        self.entries.append(ReportEntry(key=key, value=format_vector(values), note=f"tol {tolerance:.1e}"))

    def matrix(self, key: str, rows, tolerance: Optional[float] = None, stderr=None) -> None:
        if stderr is not None:
            note = f"stderr {format_matrix(stderr)}"
        else:
            note = f"tol {tolerance:.1e}"
        self.entries.append(ReportEntry(key=key, value=format_matrix(rows), note=note))

    def text(self, key: str, value: str) -> None:
        self.entries.append(ReportEntry(key=key, value=value))

    def timing(self, key: str, value: str, note: str = "") -> None:
        self.entries.append(ReportEntry(key=key, value=value, note=note, timing=True))

    def check(self, result: CheckResult) -> CheckResult:
        self.checks.append(result)
        status = "pass" if result.passed else f"FAIL {result.error}" if result.error else "FAIL"
        self.entries.append(
            ReportEntry(
                key=f"check.{result.suite}.{result.name}",
                value=format_value(result.value),
                note=f"tol {result.tolerance:.1e} {status}",
            )
        )
        return result

    def bound(self, suite: str, name: str, value: float, tolerance: float) -> CheckResult:
        """Record value ≤ tolerance as a check."""
        return self.check(
            CheckResult(suite=suite, name=name, value=value, tolerance=tolerance, passed=value <= tolerance)
        )

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def render(self, timestamps: bool = True) -> str:
        lines = [f"[{self.command}]"]
        lines += [e.render() for e in self.entries if timestamps or not e.timing]
        return "\n".join(lines) + "\n"

    def write(self, directory: Path, timestamps: bool = True) -> Path:
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"{self.command}.report.txt"
        path.write_text(self.render(timestamps), encoding="utf-8")
        return path
