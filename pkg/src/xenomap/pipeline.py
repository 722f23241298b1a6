"""The filter cascade that narrows raw feed records to unique events.

Stages, in order:

1. theme match: keep documents whose themes match the configured set;
2. linkage: map those documents to the events they mention;
3. actor filter: keep events with a REF (refugee) actor segment;
4. country assignment: resolve each event to a country, dropping events
   that cannot be resolved;
5. dedupe: collapse duplicate event rows to one output per event id.

Every stage only removes or merges, so the stage counters are guaranteed
non-increasing. A "candidate" below is one (document, event row) pair; the
initial counter counts candidates, i.e. theme-matched joined rows.
"""

from __future__ import annotations

import csv
import enum
from collections import Counter
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Iterable, Mapping

from xenomap.countries import (
    CountryRegistry,
    MissingCountryCode,
    UnknownCountryCode,
    bundled_registry,
)
from xenomap.diagnostics import DiagnosticLog
from xenomap.model import (
    EventRecord,
    GkgRecord,
    MentionRecord,
    PipelineCounters,
    RootCode,
    parse_root_code,
)

REF_SEGMENT = "REF"

THEME_PREFIX = "DISCRIMINATION_IMMIGRATION"

# The discrimination-against-immigrants theme family, for exact matching.
GKG_REF_THEMES = (
    "DISCRIMINATION_IMMIGRATION_XENOPHOBIA",
    "DISCRIMINATION_IMMIGRATION_ANTIIMMIGRANTS",
    "DISCRIMINATION_IMMIGRATION_OPPOSED_TO_IMMIGRANTS",
    "DISCRIMINATION_IMMIGRATION_AGAINST_IMMIGRANTS",
    "DISCRIMINATION_IMMIGRATION_ATTACKS_ON_IMMIGRANTS",
    "DISCRIMINATION_IMMIGRATION_ATTACKS_AGAINST_IMMIGRANTS",
    "DISCRIMINATION_IMMIGRATION_XENOPHOBE",
    "DISCRIMINATION_IMMIGRATION_XENOPHOBES",
)

_THEME_CHARS = frozenset("ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")


class MatchMode(enum.Enum):
    PREFIX = "prefix"
    EXACT = "exact"


class CountryStrategy(enum.Enum):
    """How an event is attributed to a country."""

    ACTOR1_FIRST = "actor1-first"
    NON_REF_ACTOR = "non-ref-actor"
    ACTION_GEO = "action-geo"


@dataclass(frozen=True)
class ThemeSet:
    """Theme names to match, either as prefixes or exactly."""

    themes: tuple[str, ...]
    match_mode: MatchMode = MatchMode.PREFIX

    def __post_init__(self) -> None:
        if not self.themes:
            raise ValueError("theme set must not be empty")
        for name in self.themes:
            if not name or not set(name) <= _THEME_CHARS:
                raise ValueError(
                    f"theme {name!r} must be uppercase letters, digits, "
                    "and underscores")

    @classmethod
    def default_prefix(cls) -> "ThemeSet":
        return cls((THEME_PREFIX,), MatchMode.PREFIX)

    @classmethod
    def exact_names(cls) -> "ThemeSet":
        return cls(GKG_REF_THEMES, MatchMode.EXACT)

    def matching_names(self, record: GkgRecord) -> tuple[str, ...]:
        """The record's theme names that match, sorted and deduplicated."""
        names = record.theme_names()
        if self.match_mode is MatchMode.PREFIX:
            hits = {n for n in names
                    if any(n.startswith(p) for p in self.themes)}
        else:
            wanted = set(self.themes)
            hits = {n for n in names if n in wanted}
        return tuple(sorted(hits))


def match_gkg_ref(record: GkgRecord, theme_set: ThemeSet) -> bool:
    """True when the document's themes match the configured set."""
    return bool(theme_set.matching_names(record))


def actor_code_segments(code: str) -> tuple[tuple[str, ...], str]:
    """Split an actor code into 3-character segments plus any tail.

    "USAREF" -> (("USA", "REF"), ""); "REFUGE" -> (("REF", "UGE"), "");
    "USAG" -> (("USA",), "G"). The tail is returned, never interpreted.
    """
    segments = tuple(code[i:i + 3] for i in range(0, len(code) - len(code) % 3, 3))
    return segments, code[len(code) - len(code) % 3:]


def has_ref_actor(event: EventRecord) -> bool:
    """True when either actor code contains a REF segment."""
    for code in (event.actor1_code, event.actor2_code):
        if code and REF_SEGMENT in actor_code_segments(code)[0]:
            return True
    return False


def link_documents_to_events(
        mentions: Iterable[MentionRecord],
        matched_documents: Iterable[str],
        diagnostics: DiagnosticLog | None = None) -> dict[str, set[int]]:
    """Map each matched document to the set of event ids it mentions.

    Documents that no mention row refers to are reported (they cannot
    reach any event) and appear in the result with an empty set.
    """
    links: dict[str, set[int]] = {doc: set() for doc in matched_documents}
    for mention in mentions:
        events = links.get(mention.mention_identifier)
        if events is not None:
            events.add(mention.global_event_id)
    if diagnostics is not None:
        for doc, events in links.items():
            if not events:
                diagnostics.record("document_without_mentions", detail=doc)
    return links


def _normalize_or_none(raw: str | None, registry: CountryRegistry,
                       diagnostics: DiagnosticLog | None) -> str | None:
    if raw is None:
        return None
    try:
        return registry.normalize(raw)
    except MissingCountryCode:
        return None
    except UnknownCountryCode:
        if diagnostics is not None:
            diagnostics.record("unmappable_country_code", detail=raw)
        return None


def assign_event_country(event: EventRecord,
                         strategy: CountryStrategy,
                         registry: CountryRegistry | None = None,
                         diagnostics: DiagnosticLog | None = None
                         ) -> str | None:
    """Resolve the event's country under the given strategy, or None.

    Unmappable raw codes are counted and treated as absent, so the
    strategy's fallback order keeps going.
    """
    registry = registry if registry is not None else bundled_registry()
    if strategy is CountryStrategy.ACTION_GEO:
        candidates = [event.action_geo_country]
    elif strategy is CountryStrategy.ACTOR1_FIRST:
        candidates = [event.actor1_country, event.actor2_country]
    elif strategy is CountryStrategy.NON_REF_ACTOR:
        actors = [(event.actor1_code, event.actor1_country),
                  (event.actor2_code, event.actor2_country)]
        non_ref = [country for code, country in actors
                   if not (code and REF_SEGMENT in actor_code_segments(code)[0])]
        ref = [country for code, country in actors
               if code and REF_SEGMENT in actor_code_segments(code)[0]]
        candidates = non_ref + ref
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    for raw in candidates:
        resolved = _normalize_or_none(raw, registry, diagnostics)
        if resolved is not None:
            return resolved
    return None


@dataclass(frozen=True)
class FilteredEvent:
    """A unique event that survived the cascade, with its audit trail."""

    event: EventRecord
    country: str
    matched_themes: tuple[str, ...]
    source_documents: tuple[str, ...]

    @property
    def global_event_id(self) -> int:
        return self.event.global_event_id

    @property
    def event_date(self) -> date:
        return self.event.event_date

    @property
    def event_root_code(self) -> RootCode | None:
        return self.event.event_root_code


@dataclass(frozen=True)
class _Candidate:
    """One (document, event row) pair flowing through the cascade."""

    document: str
    event: EventRecord


def _retained(rows: list[EventRecord]) -> EventRecord:
    return min(rows, key=lambda r: (r.date_added, r.source_url))


def dedupe_events(candidates: Iterable[tuple[EventRecord, str, tuple[str, ...], str]],
                  diagnostics: DiagnosticLog | None = None
                  ) -> list[FilteredEvent]:
    """Collapse per-candidate tuples into one FilteredEvent per event id.

    Each input is (event row, assigned country, matched theme names, source
    document). The retained row is the earliest by date_added, breaking
    ties with the lexicographically lowest source URL. When candidate
    countries disagree the majority wins; a tie falls back to the retained
    row's country, and either way the conflict is reported.
    """
    by_id: dict[int, list[tuple[EventRecord, str, tuple[str, ...], str]]] = {}
    for item in candidates:
        by_id.setdefault(item[0].global_event_id, []).append(item)

    out: list[FilteredEvent] = []
    for event_id in sorted(by_id):
        group = by_id[event_id]
        rows = [item[0] for item in group]
        retained = _retained(rows)
        retained_country = next(item[1] for item in group if item[0] == retained)
        votes = Counter(item[1] for item in group)
        if len(votes) > 1:
            ranked = votes.most_common()
            top_count = ranked[0][1]
            leaders = [c for c, n in ranked if n == top_count]
            country = leaders[0] if len(leaders) == 1 else retained_country
            if diagnostics is not None:
                diagnostics.record(
                    "conflicting_country", detail=f"event {event_id}: "
                    + ", ".join(f"{c}={n}" for c, n in sorted(votes.items()))
                    + f" -> {country}")
        else:
            country = retained_country
        themes = sorted({name for item in group for name in item[2]})
        documents = sorted({item[3] for item in group})
        out.append(FilteredEvent(
            event=retained,
            country=country,
            matched_themes=tuple(themes),
            source_documents=tuple(documents),
        ))
    return out


def run_filter_pipeline(events: Iterable[EventRecord],
                        mentions: Iterable[MentionRecord],
                        gkgs: Iterable[GkgRecord],
                        theme_set: ThemeSet | None = None,
                        strategy: CountryStrategy = CountryStrategy.ACTOR1_FIRST,
                        registry: CountryRegistry | None = None,
                        diagnostics: DiagnosticLog | None = None
                        ) -> tuple[list[FilteredEvent], PipelineCounters]:
    """Run the whole cascade and return (unique events, stage counters).

    The result is sorted by event id and does not depend on input order.
    """
    theme_set = theme_set if theme_set is not None else ThemeSet.default_prefix()
    registry = registry if registry is not None else bundled_registry()
    diagnostics = diagnostics if diagnostics is not None else DiagnosticLog()

    matched_docs: dict[str, set[str]] = {}
    for record in gkgs:
        names = theme_set.matching_names(record)
        if names:
            matched_docs.setdefault(record.document_identifier,
                                    set()).update(names)

    links = link_documents_to_events(mentions, matched_docs, diagnostics)

    events_by_id: dict[int, list[EventRecord]] = {}
    for event in events:
        events_by_id.setdefault(event.global_event_id, []).append(event)

    candidates: list[_Candidate] = []
    for doc in sorted(links):
        for event_id in sorted(links[doc]):
            rows = events_by_id.get(event_id)
            if rows is None:
                diagnostics.record("link_without_event",
                                   detail=f"{doc} -> event {event_id}")
                continue
            for row in sorted(rows, key=lambda r: (r.date_added, r.source_url)):
                candidates.append(_Candidate(doc, row))
    initial_records = len(candidates)

    with_ref = [c for c in candidates if has_ref_actor(c.event)]
    after_ref_actor = len(with_ref)

    located: list[tuple[EventRecord, str, tuple[str, ...], str]] = []
    for candidate in with_ref:
        country = assign_event_country(candidate.event, strategy, registry,
                                       diagnostics)
        if country is None:
            diagnostics.record(
                "event_without_country",
                detail=f"event {candidate.event.global_event_id}")
            continue
        located.append((candidate.event, country,
                        tuple(sorted(matched_docs[candidate.document])),
                        candidate.document))
    after_country_code = len(located)

    unique = dedupe_events(located, diagnostics)
    counters = PipelineCounters(
        initial_records=initial_records,
        after_ref_actor=after_ref_actor,
        after_country_code=after_country_code,
        unique_events=len(unique),
    )
    return unique, counters


# --- CSV round trip -------------------------------------------------------

FILTERED_EVENT_COLUMNS = ["global_event_id", "country", "event_root_code",
                          "matched_themes", "n_source_documents", "event_date"]


@dataclass(frozen=True)
class FilteredEventRow:
    """One row of the filtered-events CSV (the cross-stage hand-off)."""

    global_event_id: int
    country: str
    event_root_code: RootCode | None
    matched_themes: tuple[str, ...]
    n_source_documents: int
    event_date: date


def write_filtered_events(path: Path | str,
                          events: Iterable[FilteredEvent]) -> None:
    """Write the filtered-events CSV consumed by the later stages."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(FILTERED_EVENT_COLUMNS)
        for fe in events:
            root = str(fe.event_root_code) if fe.event_root_code else ""
            writer.writerow([
                fe.global_event_id,
                fe.country,
                root,
                "|".join(fe.matched_themes),
                len(fe.source_documents),
                fe.event_date.isoformat(),
            ])


def read_filtered_events(path: Path | str) -> list[FilteredEventRow]:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = set(reader.fieldnames or ())
        missing = set(FILTERED_EVENT_COLUMNS) - header
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        rows = []
        for row in reader:
            root_text = row["event_root_code"]
            themes = tuple(t for t in row["matched_themes"].split("|") if t)
            rows.append(FilteredEventRow(
                global_event_id=int(row["global_event_id"]),
                country=row["country"],
                event_root_code=parse_root_code(root_text) if root_text else None,
                matched_themes=themes,
                n_source_documents=int(row["n_source_documents"]),
                event_date=date.fromisoformat(row["event_date"]),
            ))
        return rows


def write_counters(path: Path | str, counters: PipelineCounters,
                   extras: Mapping[str, int] | None = None) -> None:
    """Write the stage counters: a summary line plus key=value pairs."""
    lines = [counters.summary_line()]
    for key, value in counters.as_dict().items():
        lines.append(f"{key}={value}")
    for key, value in (extras or {}).items():
        lines.append(f"{key}={value}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_counters(path: Path | str) -> PipelineCounters:
    values: dict[str, int] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if "=" in line:
            key, _, value = line.partition("=")
            values[key.strip()] = int(value.strip())
    return PipelineCounters(
        initial_records=values["initial_records"],
        after_ref_actor=values["after_ref_actor"],
        after_country_code=values["after_country_code"],
        unique_events=values["unique_events"],
    )
