#!/usr/bin/env python3
"""Ordered check reports with human and machine renderings."""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from typing import Any

from errors import EXIT_CHECK_FAILED, EXIT_OK

PASS = "pass"
FAIL = "fail"
INFO = "info"
VERDICTS = (PASS, FAIL, INFO)


def allow_unbounded_int_text() -> None:
    """Lift the interpreter limit on int <-> str digits; dimension counts run to thousands of digits."""
    setter = getattr(sys, "set_int_max_str_digits", None)
    if setter is not None:
        setter(0)


def render_value(value: Any) -> str:
    """Base-10 integers, unabridged; containers as compact sorted JSON."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        allow_unbounded_int_text()
        text = str(value)
    elif isinstance(value, str):
        text = value
    elif value is None:
        text = "null"
    else:
        allow_unbounded_int_text()
        text = json.dumps(value, sort_keys=True, separators=(",", ":"), default=str)
    return text.replace("\t", " ").replace("\n", " ")


@dataclass(frozen=True)
class ReportEntry:
    name: str
    verdict: str
    value: Any
    warning: str = ""


@dataclass
class Report:
    command: str
    entries: list[ReportEntry] = field(default_factory=list)

    def add(self, name: str, verdict: str, value: Any, warning: str = "") -> None:
        if verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {verdict!r}")
        self.entries.append(ReportEntry(name, verdict, value, warning or ""))

    def info(self, name: str, value: Any) -> None:
        self.add(name, INFO, value)

    def check(self, name: str, passed: bool, value: Any, warning: str = "") -> None:
        self.add(name, PASS if passed else FAIL, value, warning)

    def extend_checks(self, prefix: str, checks: list[dict[str, Any]]) -> None:
        for entry in checks:
            self.add(f"{prefix}.{entry['check']}", entry["verdict"], entry.get("details"), entry.get("warning", ""))

    @property
    def passed(self) -> bool:
        return all(entry.verdict != FAIL for entry in self.entries)

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.passed else EXIT_CHECK_FAILED

    def warnings(self) -> list[str]:
        return [f"{entry.name}: {entry.warning}" for entry in self.entries if entry.warning]

    def render_machine(self) -> str:
        lines = [f"{entry.name}\t{entry.verdict}\t{render_value(entry.value)}" for entry in self.entries]
        lines.append(f"overall\t{PASS if self.passed else FAIL}\t{len(self.entries)}")
        return "\n".join(lines) + "\n"

    def render_human(self) -> str:
        width = max((len(entry.name) for entry in self.entries), default=0)
        lines = [f"== {self.command} =="]
        for entry in self.entries:
            lines.append(f"{entry.name.ljust(width)}  {entry.verdict.upper():4}  {render_value(entry.value)}")
            if entry.warning:
                lines.append(f"{' ' * width}  WARN  {entry.warning}")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "overall": PASS if self.passed else FAIL,
            "entries": [
                {
                    "name": entry.name,
                    "verdict": entry.verdict,
                    "value": render_value(entry.value),
                    "warning": entry.warning,
                }
                for entry in self.entries
            ],
        }
