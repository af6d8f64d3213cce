"""Self-describing run reports with JSON and CSV renderings.

A report is a list of named checks (measured vs expected at a tolerance,
with a pass flag, provenance of the expected value, and units) plus
scenario data payloads.  Rendering is deterministic: the same values
always produce the same bytes, so reports are diffable and hashable apart
from the wall-time field.  Floats are emitted as shortest round-trip
decimals, which carry the full precision of the value.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .errors import ConfigError

__all__ = ["CheckRecord", "DataTable", "RunReport", "render_json", "render_csv",
           "write_report"]


@dataclass(frozen=True)
class CheckRecord:
    """One verified quantity.

    provenance says where the expected value comes from: "closed-form",
    "independent-oracle", "exact-count", or "definition".
    """

    name: str
    measured: float | int | str | bool
    expected: float | int | str | bool
    tolerance: float | None
    passed: bool
    provenance: str
    units: str

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "measured": self.measured,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "provenance": self.provenance,
            "units": self.units,
        }


@dataclass(frozen=True)
class DataTable:
    """Plot-ready rectangular data (becomes the CSV body when present)."""

    columns: tuple[str, ...]
    rows: tuple[tuple, ...]

    def to_dict(self) -> dict:
        return {"columns": list(self.columns), "rows": [list(r) for r in self.rows]}


@dataclass
class RunReport:
    scenario: str
    config: dict
    checks: list[CheckRecord] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    table: DataTable | None = None
    wall_time_s: float = 0.0
    version: str = "0.1.0"

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, measured, expected, tolerance, passed: bool,
            provenance: str, units: str) -> None:
        self.checks.append(CheckRecord(
            name, measured, expected, tolerance, bool(passed), provenance, units))

    def check_close(self, name: str, measured: float, expected: float,
                    tolerance: float, provenance: str, units: str) -> None:
        """Record |measured - expected| <= tolerance."""
        self.add(name, float(measured), float(expected), float(tolerance),
                 abs(measured - expected) <= tolerance, provenance, units)

    def check_le(self, name: str, measured: float, bound: float,
                 provenance: str, units: str) -> None:
        """Record measured <= bound."""
        self.add(name, float(measured), float(bound), None,
                 measured <= bound, provenance, units)

    def check_true(self, name: str, flag: bool, provenance: str) -> None:
        self.add(name, bool(flag), True, None, bool(flag), provenance, "boolean")

    def merge(self, other: "RunReport", prefix: str) -> None:
        for c in other.checks:
            self.checks.append(CheckRecord(
                f"{prefix}.{c.name}", c.measured, c.expected, c.tolerance,
                c.passed, c.provenance, c.units))
        self.data[prefix] = dict(other.data)
        if other.table is not None:
            self.data[prefix]["table"] = other.table.to_dict()

    def to_dict(self) -> dict:
        out = {
            "scenario": self.scenario,
            "version": self.version,
            "passed": self.passed,
            "config": self.config,
            "checks": [c.to_dict() for c in self.checks],
            "data": self.data,
        }
        if self.table is not None:
            out["table"] = self.table.to_dict()
        out["wall_time_s"] = self.wall_time_s
        return out


def render_json(report: RunReport) -> str:
    return json.dumps(report.to_dict(), indent=2, allow_nan=True) + "\n"


def render_csv(report: RunReport) -> str:
    """Table rows when a table is attached, one check per row otherwise."""
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
    if report.table is not None:
        writer.writerow(report.table.columns)
        writer.writerows(report.table.rows)
    else:
        writer.writerow(
            ["name", "measured", "expected", "tolerance", "passed", "provenance", "units"])
        for c in report.checks:
            writer.writerow([c.name, c.measured, c.expected,
                             "" if c.tolerance is None else c.tolerance,
                             c.passed, c.provenance, c.units])
    return buf.getvalue()


def write_report(report: RunReport, path: str, fmt: str) -> None:
    if fmt == "json":
        text = render_json(report)
    elif fmt == "csv":
        text = render_csv(report)
    else:
        raise ConfigError(f"unknown output format {fmt!r}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
