"""Run reports shared by the human table renderer and the JSON writer.

Every numeric cell records the formula that produced it.  Rounding
happens only in ``render``; JSON output keeps full precision.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

PASS, FAIL, FLAGGED = "pass", "FAIL", "reference-inconsistent; formula value shown"


@dataclass(frozen=True)
class Cell:
    value: Any
    formula: str = ""

    def text(self) -> str:
        v = self.value
        if isinstance(v, bool) or v is None:
            return str(v)
        if isinstance(v, float):
            return "nan" if math.isnan(v) else f"{v:.4g}"
        return str(v)

    def to_json(self) -> dict[str, Any]:
        v = self.value
        if isinstance(v, float) and not math.isfinite(v):
            v = None
        return {"value": v, "formula": self.formula}


@dataclass
class Table:
    title: str
    columns: list[str]
    rows: list[list[Cell]] = field(default_factory=list)

    def add(self, *cells: Cell) -> None:
        if len(cells) != len(self.columns):
            raise ValueError(f"row has {len(cells)} cells, table {self.title!r} has {len(self.columns)}")
        self.rows.append(list(cells))

    def render(self) -> str:
        body = [[c.text() for c in row] for row in self.rows]
        widths = [max([len(h)] + [len(r[i]) for r in body]) for i, h in enumerate(self.columns)]
        line = "  ".join(h.ljust(w) for h, w in zip(self.columns, widths))
        out = [self.title, line, "-" * len(line)]
        out += ["  ".join(v.ljust(w) for v, w in zip(r, widths)) for r in body]
        return "\n".join(out)

    def to_json(self) -> dict[str, Any]:
        return {
            "title": self.title,
            "columns": self.columns,
            "rows": [[c.to_json() for c in row] for row in self.rows],
        }


@dataclass(frozen=True)
class Check:
    """Computed value against a reference value at a stated tolerance.

    With ``mode="below"`` the check instead requires ``computed < expected``.
    """

    label: str
    computed: float
    expected: float
    tolerance: float
    formula: str = ""
    flagged: bool = False
    mode: str = "abs"

    @property
    def passed(self) -> bool:
        if self.mode == "below":
            return self.computed < self.expected
        return abs(self.computed - self.expected) <= self.tolerance

    @property
    def status(self) -> str:
        if self.flagged:
            return FLAGGED
        return PASS if self.passed else FAIL

    def to_json(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "computed": self.computed,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "formula": self.formula,
            "mode": self.mode,
            "status": self.status,
        }


@dataclass
class RunReport:
    command: str
    inputs: dict[str, Any]
    tables: list[Table] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)
    oracle: list[Table] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    messages: list[str] = field(default_factory=list)

    @property
    def failed_checks(self) -> list[Check]:
        return [c for c in self.checks if c.status == FAIL]

    def render(self) -> str:
        parts = [f"== {self.command} =="]
        parts += self.messages
        parts += [t.render() for t in self.tables]
        if self.checks:
            tab = Table("reference checks", ["quantity", "computed", "reference", "tol", "status"])
            for c in self.checks:
                tab.add(Cell(c.label), Cell(c.computed, c.formula), Cell(c.expected),
                        Cell(c.tolerance), Cell(c.status))
            parts.append(tab.render())
        if self.oracle:
            parts.append("-- oracle cross-check --")
            parts += [t.render() for t in self.oracle]
        parts += [f"warning: {w}" for w in self.warnings]
        return "\n\n".join(parts)

    def to_json(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "messages": self.messages,
            "tables": [t.to_json() for t in self.tables],
            "checks": [c.to_json() for c in self.checks],
            "oracle": [t.to_json() for t in self.oracle],
            "warnings": self.warnings,
        }

    def write_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")
