"""Core value types shared across the pipeline.

Everything here is an immutable value object: parsed feed records, the
population inputs, per-country results, and the counters that describe how
the filter cascade narrowed the data. Parsing rules that belong to the
domain (root codes) live here too.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from datetime import date, datetime


class RootCodeError(ValueError):
    """A string could not be read as an event root code."""


class NonNumericRootCode(RootCodeError):
    """Root code text that is not a number at all."""


class OutOfRangeRootCode(RootCodeError):
    """Numeric root code outside the defined 01..20 range."""


@dataclass(frozen=True, order=True)
class RootCode:
    """A CAMEO event root code, the two-digit top level of the hierarchy."""

    value: int

    def __post_init__(self) -> None:
        if not 1 <= self.value <= 20:
            raise OutOfRangeRootCode(f"root code {self.value} not in 01..20")

    def __str__(self) -> str:
        return f"{self.value:02d}"


def parse_root_code(text: str) -> RootCode:
    """Parse a two-digit root code string such as "14".

    Raises NonNumericRootCode for text that is not an integer and
    OutOfRangeRootCode for integers outside 1..20 (e.g. "00", "21", "99").
    """
    try:
        value = int(text)
    except (TypeError, ValueError):
        raise NonNumericRootCode(f"root code {text!r} is not numeric") from None
    return RootCode(value)


class ActionCategory(enum.Enum):
    """Whether an action is aimed at its target directly or indirectly."""

    DIRECT = "direct"
    INDIRECT = "indirect"


@dataclass(frozen=True)
class EventRecord:
    """One row of the event table, reduced to the fields the pipeline uses.

    Actor codes and country codes are kept as raw text; normalization
    against the country registry happens later, where failures can be
    counted per stage. ``warnings`` carries per-field oddities (actor code
    length not a multiple of three, unparseable root code) that flag a
    record without rejecting it.
    """

    global_event_id: int
    event_date: date
    actor1_code: str | None
    actor2_code: str | None
    actor1_country: str | None
    actor2_country: str | None
    event_root_code: RootCode | None
    action_geo_country: str | None
    date_added: datetime
    source_url: str
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class MentionRecord:
    """One row of the mentions table: a document mentioning an event."""

    global_event_id: int
    mention_identifier: str
    mention_tone: float


@dataclass(frozen=True)
class GkgRecord:
    """One row of the knowledge-graph table: a document and its themes.

    ``themes`` holds (name, character offset) pairs in document order.
    """

    gkg_record_id: str
    document_identifier: str
    themes: tuple[tuple[str, int], ...]

    def theme_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.themes)


@dataclass(frozen=True)
class PopulationRecord:
    """Refugee and total population for one country, same reference period."""

    country: str
    refugee_population: int
    total_population: int
    as_of: str = ""

    def __post_init__(self) -> None:
        if self.refugee_population < 0:
            raise ValueError(f"{self.country}: negative refugee population")
        if self.total_population <= 0:
            raise ValueError(f"{self.country}: total population must be positive")
        if self.refugee_population > self.total_population:
            raise ValueError(
                f"{self.country}: refugee population exceeds total population")


@dataclass(frozen=True)
class CountryMetrics:
    """Event frequency for one country scaled by its population balance.

    ``scaled_frequency`` is frequency * total_population / refugee_population,
    computed in one division at full float precision. ``refugee_ratio`` is
    refugee_population / total_population. Rounding is left to rendering.
    """

    country: str
    frequency: int
    refugee_population: int
    total_population: int
    refugee_ratio: float
    scaled_frequency: float

    @classmethod
    def compute(cls, country: str, frequency: int, refugee_population: int,
                total_population: int) -> "CountryMetrics":
        if frequency < 1:
            raise ValueError(f"{country}: frequency must be at least 1")
        if refugee_population <= 0:
            raise ValueError(f"{country}: refugee population must be positive")
        if total_population < refugee_population:
            raise ValueError(f"{country}: total population below refugee count")
        return cls(
            country=country,
            frequency=frequency,
            refugee_population=refugee_population,
            total_population=total_population,
            refugee_ratio=refugee_population / total_population,
            scaled_frequency=frequency * total_population / refugee_population,
        )


@dataclass(frozen=True)
class PipelineCounters:
    """How many records survived each stage of the filter cascade.

    ``initial_records`` counts theme-matched joined rows: one per (document,
    event row) pair after linking matched documents to event-table rows.
    Each later stage can only shrink the set, which __post_init__ enforces.
    """

    initial_records: int
    after_ref_actor: int
    after_country_code: int
    unique_events: int

    def __post_init__(self) -> None:
        stages = (self.initial_records, self.after_ref_actor,
                  self.after_country_code, self.unique_events)
        if any(n < 0 for n in stages):
            raise ValueError(f"counters must be non-negative: {stages}")
        if not (stages[0] >= stages[1] >= stages[2] >= stages[3]):
            raise ValueError(f"counters must be non-increasing: {stages}")

    def as_dict(self) -> dict[str, int]:
        return {
            "initial_records": self.initial_records,
            "after_ref_actor": self.after_ref_actor,
            "after_country_code": self.after_country_code,
            "unique_events": self.unique_events,
        }

    def summary_line(self) -> str:
        return (f"records: {self.initial_records} -> {self.after_ref_actor} "
                f"(ref actor) -> {self.after_country_code} (country) -> "
                f"{self.unique_events} (unique)")
