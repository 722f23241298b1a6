"""Line parsers for the three tab-separated feed tables.

Parsing is deliberately lenient at the file level: a bad line is counted
with a reason and skipped, never fatal, so parsed + skipped always adds up
to the number of data lines seen. At the line level each parser raises a
LineParseError subclass naming what was wrong.

Some field problems do not kill a line. Actor codes whose length is not a
multiple of three and root codes that fail to parse are kept as warnings on
the record, because the row is still usable for linkage and counting.
"""

from __future__ import annotations

from datetime import datetime
from typing import Callable, Iterable, Iterator

from xenomap.diagnostics import DiagnosticLog
from xenomap.model import (
    EventRecord,
    GkgRecord,
    MentionRecord,
    NonNumericRootCode,
    OutOfRangeRootCode,
    parse_root_code,
)
from xenomap.ingest.schemas import (
    EVENT_SCHEMA,
    GKG_SCHEMA,
    MENTIONS_SCHEMA,
    FileKind,
    SchemaDescriptor,
)


class LineParseError(ValueError):
    """A data line could not be turned into a record."""

    reason = "line_parse_error"


class ColumnCountMismatch(LineParseError):
    reason = "column_count_mismatch"


class BadEventId(LineParseError):
    reason = "bad_event_id"


class BadFieldValue(LineParseError):
    reason = "bad_field_value"


class EmptyMentionIdentifier(LineParseError):
    reason = "empty_mention_identifier"


class EmptyDocumentIdentifier(LineParseError):
    reason = "empty_document_identifier"


def _split_columns(line: str, schema: SchemaDescriptor) -> list[str]:
    columns = line.rstrip("\r\n").split("\t")
    if len(columns) != schema.column_count:
        raise ColumnCountMismatch(
            f"expected {schema.column_count} columns, got {len(columns)}")
    return columns


def parse_v2themes(text: str, warnings: list[str] | None = None
                   ) -> tuple[tuple[str, int], ...]:
    """Parse a themes field like "THEME_A,10;THEME_B,20;".

    Entries are ``name,offset`` separated by semicolons; empty segments are
    ignored. A missing or malformed offset keeps the theme with offset 0
    and appends a note to ``warnings``; an entry with no name is dropped.
    """
    themes: list[tuple[str, int]] = []
    for segment in text.split(";"):
        if not segment:
            continue
        name, sep, offset_text = segment.rpartition(",")
        if not sep:
            name, offset_text = segment, ""
        if not name:
            if warnings is not None:
                warnings.append(f"theme entry without name: {segment!r}")
            continue
        offset = 0
        if offset_text:
            try:
                offset = int(offset_text)
            except ValueError:
                offset = -1
        if offset < 0:
            if warnings is not None:
                warnings.append(f"bad theme offset in {segment!r}")
            offset = 0
        elif not offset_text:
            if warnings is not None:
                warnings.append(f"theme entry without offset: {segment!r}")
        themes.append((name, offset))
    return tuple(themes)


def serialize_v2themes(themes: Iterable[tuple[str, int]]) -> str:
    return "".join(f"{name},{offset};" for name, offset in themes)


def parse_event_line(line: str, schema: SchemaDescriptor = EVENT_SCHEMA
                     ) -> EventRecord:
    """Parse one event-table line into an EventRecord."""
    columns = _split_columns(line, schema)

    def col(name: str) -> str:
        return columns[schema.index_of(name)]

    id_text = col("global_event_id")
    try:
        global_event_id = int(id_text)
    except ValueError:
        raise BadEventId(f"event id {id_text!r} is not an integer") from None

    date_text = col("event_date")
    try:
        event_date = datetime.strptime(date_text, "%Y%m%d").date()
    except ValueError:
        raise BadFieldValue(f"event date {date_text!r} is not YYYYMMDD") from None

    added_text = col("date_added")
    try:
        date_added = datetime.strptime(added_text, "%Y%m%d%H%M%S")
    except ValueError:
        raise BadFieldValue(
            f"date added {added_text!r} is not YYYYMMDDHHMMSS") from None

    warnings: list[str] = []

    def actor_code(name: str) -> str | None:
        code = col(name)
        if not code:
            return None
        if len(code) % 3 != 0:
            warnings.append(f"{name} length {len(code)} not a multiple of 3")
        return code

    actor1_code = actor_code("actor1_code")
    actor2_code = actor_code("actor2_code")

    root_text = col("event_root_code")
    event_root_code = None
    if root_text:
        try:
            event_root_code = parse_root_code(root_text)
        except (NonNumericRootCode, OutOfRangeRootCode):
            warnings.append(f"unparseable root code {root_text!r}")

    return EventRecord(
        global_event_id=global_event_id,
        event_date=event_date,
        actor1_code=actor1_code,
        actor2_code=actor2_code,
        actor1_country=col("actor1_country") or None,
        actor2_country=col("actor2_country") or None,
        event_root_code=event_root_code,
        action_geo_country=col("action_geo_country") or None,
        date_added=date_added,
        source_url=col("source_url"),
        warnings=tuple(warnings),
    )


def parse_mention_line(line: str, schema: SchemaDescriptor = MENTIONS_SCHEMA
                       ) -> MentionRecord:
    """Parse one mentions-table line into a MentionRecord."""
    columns = _split_columns(line, schema)
    id_text = columns[schema.index_of("global_event_id")]
    try:
        global_event_id = int(id_text)
    except ValueError:
        raise BadEventId(f"event id {id_text!r} is not an integer") from None
    identifier = columns[schema.index_of("mention_identifier")]
    if not identifier:
        raise EmptyMentionIdentifier("mention has no document identifier")
    tone_text = columns[schema.index_of("mention_tone")]
    try:
        mention_tone = float(tone_text)
    except ValueError:
        raise BadFieldValue(f"tone {tone_text!r} is not a number") from None
    return MentionRecord(global_event_id, identifier, mention_tone)


def parse_gkg_line(line: str, schema: SchemaDescriptor = GKG_SCHEMA
                   ) -> GkgRecord:
    """Parse one knowledge-graph line into a GkgRecord."""
    columns = _split_columns(line, schema)
    record_id = columns[schema.index_of("gkg_record_id")]
    if not record_id:
        raise BadFieldValue("record id is empty")
    identifier = columns[schema.index_of("document_identifier")]
    if not identifier:
        raise EmptyDocumentIdentifier("record has no document identifier")
    themes = parse_v2themes(columns[schema.index_of("themes")])
    return GkgRecord(record_id, identifier, themes)


def _blank_row(schema: SchemaDescriptor) -> list[str]:
    return [""] * schema.column_count


def serialize_event(record: EventRecord,
                    schema: SchemaDescriptor = EVENT_SCHEMA) -> str:
    """Write an EventRecord back to a tab-separated line.

    Only the schema-mapped columns are populated; everything else is empty.
    For records parsed without warnings this reproduces the mapped columns
    of the original line byte for byte.
    """
    row = _blank_row(schema)

    def put(name: str, value: str) -> None:
        row[schema.index_of(name)] = value

    put("global_event_id", str(record.global_event_id))
    put("event_date", f"{record.event_date:%Y%m%d}")
    put("actor1_code", record.actor1_code or "")
    put("actor2_code", record.actor2_code or "")
    put("actor1_country", record.actor1_country or "")
    put("actor2_country", record.actor2_country or "")
    put("event_root_code",
        str(record.event_root_code) if record.event_root_code else "")
    put("action_geo_country", record.action_geo_country or "")
    put("date_added", f"{record.date_added:%Y%m%d%H%M%S}")
    put("source_url", record.source_url)
    return "\t".join(row)


def serialize_mention(record: MentionRecord,
                      schema: SchemaDescriptor = MENTIONS_SCHEMA) -> str:
    row = _blank_row(schema)
    row[schema.index_of("global_event_id")] = str(record.global_event_id)
    row[schema.index_of("mention_identifier")] = record.mention_identifier
    row[schema.index_of("mention_tone")] = repr(record.mention_tone)
    return "\t".join(row)


def serialize_gkg(record: GkgRecord,
                  schema: SchemaDescriptor = GKG_SCHEMA) -> str:
    row = _blank_row(schema)
    row[schema.index_of("gkg_record_id")] = record.gkg_record_id
    row[schema.index_of("document_identifier")] = record.document_identifier
    row[schema.index_of("themes")] = serialize_v2themes(record.themes)
    return "\t".join(row)


def _stream(lines: Iterable[str], parse_line: Callable, schema: SchemaDescriptor,
            diagnostics: DiagnosticLog | None, source: str) -> Iterator:
    diagnostics = diagnostics if diagnostics is not None else DiagnosticLog()
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            yield parse_line(line, schema)
        except LineParseError as exc:
            diagnostics.record(exc.reason, source, lineno, str(exc))


def parse_event_stream(lines: Iterable[str],
                       schema: SchemaDescriptor = EVENT_SCHEMA,
                       diagnostics: DiagnosticLog | None = None,
                       source: str = "") -> Iterator[EventRecord]:
    return _stream(lines, parse_event_line, schema, diagnostics, source)


def parse_mention_stream(lines: Iterable[str],
                         schema: SchemaDescriptor = MENTIONS_SCHEMA,
                         diagnostics: DiagnosticLog | None = None,
                         source: str = "") -> Iterator[MentionRecord]:
    return _stream(lines, parse_mention_line, schema, diagnostics, source)


def parse_gkg_stream(lines: Iterable[str],
                     schema: SchemaDescriptor = GKG_SCHEMA,
                     diagnostics: DiagnosticLog | None = None,
                     source: str = "") -> Iterator[GkgRecord]:
    return _stream(lines, parse_gkg_line, schema, diagnostics, source)


_STREAMS = {
    FileKind.EVENT: parse_event_stream,
    FileKind.MENTIONS: parse_mention_stream,
    FileKind.GKG: parse_gkg_stream,
}


def read_records(path, schema: SchemaDescriptor,
                 diagnostics: DiagnosticLog | None = None) -> list:
    """Read a whole feed file, returning its parseable records.

    Decoding replaces invalid bytes rather than failing; skipped lines are
    recorded against the file name.
    """
    stream = _STREAMS[schema.file_kind]
    with open(path, encoding="utf-8", errors="replace") as fh:
        return list(stream(fh, schema, diagnostics, source=str(path)))
