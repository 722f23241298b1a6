"""Shared bookkeeping for skipped lines and data oddities.

Feed files are messy, so most parse and lookup failures are counted and
reported rather than raised. A DiagnosticLog collects those incidents; the
CLI writes them out as a tab-separated report so a run can always account
for every line it dropped.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable


@dataclass(frozen=True)
class Diagnostic:
    reason: str
    source: str = ""
    line: int | None = None
    detail: str = ""


class DiagnosticLog:
    """Accumulates diagnostics and tallies them by reason."""

    def __init__(self) -> None:
        self.entries: list[Diagnostic] = []
        self.counts: Counter[str] = Counter()

    def record(self, reason: str, source: str = "", line: int | None = None,
               detail: str = "") -> None:
        self.entries.append(Diagnostic(reason, source, line, detail))
        self.counts[reason] += 1

    def extend(self, other: "DiagnosticLog") -> None:
        self.entries.extend(other.entries)
        self.counts.update(other.counts)

    def __len__(self) -> int:
        return len(self.entries)

    def report_lines(self) -> Iterable[str]:
        for entry in self.entries:
            line = "" if entry.line is None else str(entry.line)
            yield f"{entry.source}\t{line}\t{entry.reason}\t{entry.detail}"

    def write_report(self, path: Path | str) -> None:
        path = Path(path)
        with path.open("w", encoding="utf-8") as fh:
            fh.write("source\tline\treason\tdetail\n")
            for line in self.report_lines():
                fh.write(line + "\n")
