"""Direct/indirect classification of event root codes.

The twenty root codes split into actions aimed at a target's person or
circumstances (direct: investigations, demands, threats, protests, force)
and actions routed through statements or third parties (indirect: public
statements, appeals, cooperation, aid, disapproval). The split is a strict
partition; events whose root code failed to parse land in an explicit
unclassified bucket and stay out of the percentages.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Protocol

from xenomap.model import ActionCategory, RootCode

INDIRECT_ROOT_VALUES = frozenset({1, 2, 3, 4, 5, 6, 7, 8, 11, 12})
DIRECT_ROOT_VALUES = frozenset({9, 10, 13, 14, 15, 16, 17, 18, 19, 20})

ROOT_CODE_LABELS = {
    1: "Make Public Statement",
    2: "Appeal",
    3: "Express Intent to Cooperate",
    4: "Consult",
    5: "Engage in Diplomatic Cooperation",
    6: "Engage in Material Cooperation",
    7: "Provide Aid",
    8: "Yield",
    9: "Investigate",
    10: "Demand",
    11: "Disapprove",
    12: "Reject",
    13: "Threaten",
    14: "Protest",
    15: "Exhibit Force Posture",
    16: "Reduce Relations",
    17: "Coerce",
    18: "Assault",
    19: "Fight",
    20: "Use Unconventional Mass",
}


class HasCountryAndRoot(Protocol):
    country: str

    @property
    def event_root_code(self) -> Optional[RootCode]: ...


@dataclass(frozen=True)
class ActionTaxonomy:
    """A direct/indirect partition of the twenty root codes."""

    direct: frozenset[int]
    indirect: frozenset[int]

    def __post_init__(self) -> None:
        overlap = self.direct & self.indirect
        if overlap:
            raise ValueError(f"codes in both categories: {sorted(overlap)}")
        covered = self.direct | self.indirect
        expected = set(range(1, 21))
        if covered != expected:
            missing = sorted(expected - covered)
            extra = sorted(covered - expected)
            raise ValueError(
                f"taxonomy must cover 01..20 exactly (missing {missing}, "
                f"extra {extra})")

    @classmethod
    def default(cls) -> "ActionTaxonomy":
        return cls(DIRECT_ROOT_VALUES, INDIRECT_ROOT_VALUES)

    def categorize(self, root: RootCode) -> ActionCategory:
        if root.value in self.direct:
            return ActionCategory.DIRECT
        return ActionCategory.INDIRECT


def categorize(root: RootCode,
               taxonomy: ActionTaxonomy | None = None) -> ActionCategory:
    """Category of a root code under the (default) taxonomy."""
    taxonomy = taxonomy if taxonomy is not None else ActionTaxonomy.default()
    return taxonomy.categorize(root)


def percent_pair(direct: int, indirect: int) -> tuple[int, int]:
    """Integer percentages (direct, indirect) that always sum to 100.

    The direct share is rounded half-up and the indirect share is its
    complement. Returns (0, 0) when there are no classified events.
    """
    total = direct + indirect
    if total == 0:
        return (0, 0)
    direct_pct = (200 * direct + total) // (2 * total)
    return (direct_pct, 100 - direct_pct)


@dataclass(frozen=True)
class CountryBreakdown:
    """Direct/indirect/unclassified counts for one country."""

    country: str
    direct: int
    indirect: int
    unclassified: int = 0

    def __post_init__(self) -> None:
        if min(self.direct, self.indirect, self.unclassified) < 0:
            raise ValueError(f"{self.country}: negative counts")

    @property
    def total(self) -> int:
        """Classified events only; the unclassified bucket sits apart."""
        return self.direct + self.indirect

    @property
    def percentages(self) -> tuple[int, int]:
        return percent_pair(self.direct, self.indirect)


def breakdown_by_country(events: Iterable[HasCountryAndRoot],
                         taxonomy: ActionTaxonomy | None = None
                         ) -> list[CountryBreakdown]:
    """Per-country category counts, sorted by country code."""
    taxonomy = taxonomy if taxonomy is not None else ActionTaxonomy.default()
    tallies: dict[str, dict[str, int]] = {}
    for event in events:
        tally = tallies.setdefault(event.country,
                                   {"direct": 0, "indirect": 0,
                                    "unclassified": 0})
        root = event.event_root_code
        if root is None:
            tally["unclassified"] += 1
        elif taxonomy.categorize(root) is ActionCategory.DIRECT:
            tally["direct"] += 1
        else:
            tally["indirect"] += 1
    return [CountryBreakdown(country, t["direct"], t["indirect"],
                             t["unclassified"])
            for country, t in sorted(tallies.items())]


def overall_breakdown(breakdowns: Iterable[CountryBreakdown],
                      label: str = "TOTAL") -> CountryBreakdown:
    """Sum per-country breakdowns into a single global row."""
    direct = indirect = unclassified = 0
    for b in breakdowns:
        direct += b.direct
        indirect += b.indirect
        unclassified += b.unclassified
    return CountryBreakdown(label, direct, indirect, unclassified)


BREAKDOWN_COLUMNS = ["CC", "Indirect", "Direct", "Total", "Unclassified",
                     "IndirectPct", "DirectPct"]


def write_breakdown_csv(path: Path | str,
                        breakdowns: Iterable[CountryBreakdown]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(BREAKDOWN_COLUMNS)
        for b in breakdowns:
            direct_pct, indirect_pct = b.percentages
            writer.writerow([b.country, b.indirect, b.direct, b.total,
                             b.unclassified, indirect_pct, direct_pct])


def read_breakdown_csv(path: Path | str) -> list[CountryBreakdown]:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = set(reader.fieldnames or ())
        missing = {"CC", "Indirect", "Direct"} - header
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        return [CountryBreakdown(
                    country=row["CC"],
                    direct=int(row["Direct"]),
                    indirect=int(row["Indirect"]),
                    unclassified=int(row.get("Unclassified") or 0),
                ) for row in reader]
