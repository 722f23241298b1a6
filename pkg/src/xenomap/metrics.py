"""Population loading and the population-scaled frequency measure.

For each country the measure is

    scaled_frequency = frequency * total_population / refugee_population

computed in one division at full float precision; the refugee ratio
(refugee/total) is kept alongside. Rounding (ratio to 4 decimals, scaled
frequency to 2) happens only when a table is written out.
"""

from __future__ import annotations

import csv
from collections import Counter
from pathlib import Path
from typing import Iterable, Mapping, Protocol

from xenomap.countries import (
    CountryLookupError,
    CountryRegistry,
    bundled_registry,
)
from xenomap.diagnostics import DiagnosticLog
from xenomap.model import CountryMetrics, PopulationRecord

DEFAULT_MIN_REFUGEES = 50_000
DEFAULT_TOP_N = 10

# Column defaults match the refugee statistics download format.
REFUGEE_COUNTRY_COLUMN = "Country of asylum"
REFUGEE_COUNT_COLUMNS = (
    "Refugees under UNHCR's mandate",
    "Asylum-seekers",
    "Other people in need of international protection",
)
POPULATION_COUNTRY_COLUMN = "Country"
POPULATION_COUNT_COLUMN = "Population"

FrequencyTable = dict[str, int]


class HasCountry(Protocol):
    country: str


def _parse_count(text: str) -> int:
    """Read a count cell: commas and spaces tolerated, '-' and '' are 0."""
    cleaned = text.strip().replace(",", "").replace(" ", "")
    if cleaned in ("", "-"):
        return 0
    return int(cleaned)


def _load_counts(source: Path | str, country_column: str,
                 count_columns: tuple[str, ...],
                 registry: CountryRegistry,
                 diagnostics: DiagnosticLog,
                 label: str) -> dict[str, int]:
    with Path(source).open(encoding="utf-8-sig", newline="") as fh:
        reader = csv.DictReader(fh)
        header = set(reader.fieldnames or ())
        needed = {country_column, *count_columns}
        missing = needed - header
        if missing:
            raise ValueError(f"{source}: missing columns {sorted(missing)}")
        counts: dict[str, int] = {}
        for lineno, row in enumerate(reader, 2):
            raw_country = row[country_column]
            try:
                country = registry.normalize(raw_country)
            except CountryLookupError:
                diagnostics.record(f"{label}_unresolved_country", str(source),
                                   lineno, raw_country)
                continue
            try:
                value = sum(_parse_count(row[col]) for col in count_columns)
            except ValueError:
                diagnostics.record(f"{label}_bad_count", str(source), lineno,
                                   raw_country)
                continue
            if value < 0:
                diagnostics.record(f"{label}_negative_count", str(source),
                                   lineno, f"{raw_country}: {value}")
                continue
            if country in counts:
                diagnostics.record(f"{label}_duplicate_country", str(source),
                                   lineno, f"{country}: keeping later row")
            counts[country] = value
        return counts


def load_refugee_population(source: Path | str,
                            registry: CountryRegistry | None = None,
                            country_column: str = REFUGEE_COUNTRY_COLUMN,
                            count_columns: Iterable[str] = REFUGEE_COUNT_COLUMNS,
                            diagnostics: DiagnosticLog | None = None
                            ) -> dict[str, int]:
    """Read per-country refugee counts from a CSV.

    ``count_columns`` are summed per row (the default adds refugees,
    asylum-seekers, and others in need of international protection).
    Unresolvable countries and bad counts are skipped with a diagnostic;
    duplicate countries keep the last row and warn.
    """
    registry = registry if registry is not None else bundled_registry()
    diagnostics = diagnostics if diagnostics is not None else DiagnosticLog()
    return _load_counts(source, country_column, tuple(count_columns),
                        registry, diagnostics, "refugee")


def load_total_population(source: Path | str,
                          registry: CountryRegistry | None = None,
                          country_column: str = POPULATION_COUNTRY_COLUMN,
                          count_column: str = POPULATION_COUNT_COLUMN,
                          diagnostics: DiagnosticLog | None = None
                          ) -> dict[str, int]:
    """Read per-country total population from a CSV (same row rules)."""
    registry = registry if registry is not None else bundled_registry()
    diagnostics = diagnostics if diagnostics is not None else DiagnosticLog()
    return _load_counts(source, country_column, (count_column,),
                        registry, diagnostics, "population")


def merge_populations(refugees: Mapping[str, int],
                      totals: Mapping[str, int],
                      as_of: str = "",
                      diagnostics: DiagnosticLog | None = None
                      ) -> dict[str, PopulationRecord]:
    """Combine the two loads into records for countries present in both."""
    diagnostics = diagnostics if diagnostics is not None else DiagnosticLog()
    merged: dict[str, PopulationRecord] = {}
    for country in sorted(set(refugees) | set(totals)):
        if country not in totals:
            diagnostics.record("missing_total_population", detail=country)
            continue
        if country not in refugees:
            diagnostics.record("missing_refugee_population", detail=country)
            continue
        if totals[country] <= 0:
            diagnostics.record("zero_total_population", detail=country)
            continue
        if refugees[country] > totals[country]:
            diagnostics.record("refugees_exceed_population", detail=country)
            continue
        merged[country] = PopulationRecord(
            country=country,
            refugee_population=refugees[country],
            total_population=totals[country],
            as_of=as_of,
        )
    return merged


def count_frequencies(events: Iterable[HasCountry]) -> FrequencyTable:
    """Tally filtered events per country."""
    counter: Counter[str] = Counter(e.country for e in events)
    return dict(sorted(counter.items()))


def compute_country_metrics(frequencies: Mapping[str, int],
                            populations: Mapping[str, PopulationRecord],
                            diagnostics: DiagnosticLog | None = None
                            ) -> list[CountryMetrics]:
    """Scale each country's frequency by its population balance.

    Countries whose population data is missing, or whose refugee count is
    zero, cannot be scaled; they are reported and left out.
    """
    diagnostics = diagnostics if diagnostics is not None else DiagnosticLog()
    out: list[CountryMetrics] = []
    for country in sorted(frequencies):
        frequency = frequencies[country]
        if frequency == 0:
            continue
        record = populations.get(country)
        if record is None:
            diagnostics.record("missing_population_data", detail=country)
            continue
        if record.refugee_population == 0:
            diagnostics.record("zero_refugee_population", detail=country)
            continue
        out.append(CountryMetrics.compute(
            country, frequency,
            record.refugee_population, record.total_population))
    return out


def zero_event_countries(frequencies: Mapping[str, int],
                         populations: Mapping[str, PopulationRecord]
                         ) -> list[str]:
    """Population-complete countries with no filtered events at all."""
    return sorted(c for c in populations
                  if frequencies.get(c, 0) == 0
                  and populations[c].refugee_population > 0)


def top_n(metrics: Iterable[CountryMetrics], n: int = DEFAULT_TOP_N,
          min_refugees: int = DEFAULT_MIN_REFUGEES) -> list[CountryMetrics]:
    """Rank by scaled frequency, keeping countries hosting enough refugees.

    The threshold is inclusive. Ties break by higher frequency, then by
    country code, so the ranking is deterministic.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if min_refugees < 0:
        raise ValueError("min_refugees must be non-negative")
    eligible = [m for m in metrics if m.refugee_population >= min_refugees]
    eligible.sort(key=lambda m: (-m.scaled_frequency, -m.frequency, m.country))
    return eligible[:n]


METRICS_COLUMNS = ["CC", "F", "RP", "TP", "RT", "ScaledFrequency"]


def write_metrics_csv(path: Path | str, metrics: Iterable[CountryMetrics],
                      extended: bool = True) -> None:
    """Write the metrics CSV; RT and ScaledFrequency are display-rounded.

    With ``extended`` a ScaledFrequencyFull column keeps the unrounded
    value for inspection (later stages recompute from F, RP, TP anyway).
    """
    columns = METRICS_COLUMNS + (["ScaledFrequencyFull"] if extended else [])
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for m in metrics:
            row = [m.country, m.frequency, m.refugee_population,
                   m.total_population, f"{m.refugee_ratio:.4f}",
                   f"{m.scaled_frequency:.2f}"]
            if extended:
                row.append(repr(m.scaled_frequency))
            writer.writerow(row)


def read_metrics_csv(path: Path | str) -> list[CountryMetrics]:
    """Rebuild full-precision metrics from the CSV's integer columns."""
    with Path(path).open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = set(reader.fieldnames or ())
        missing = set(METRICS_COLUMNS) - header
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        return [CountryMetrics.compute(row["CC"], int(row["F"]),
                                       int(row["RP"]), int(row["TP"]))
                for row in reader]
