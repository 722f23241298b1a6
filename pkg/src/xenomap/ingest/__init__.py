"""Acquisition and parsing of the raw 15-minute feed files."""

from xenomap.ingest.fetch import (
    ChecksumMismatch,
    CorruptArchive,
    FetchError,
    NetworkFailure,
    RemoteFileMissing,
    cache_path_for,
    fetch_file,
    fetch_many,
)
from xenomap.ingest.masterlist import (
    MASTER_LIST_URLS,
    UpdateFileRef,
    list_update_files,
    parse_master_list_line,
)
from xenomap.ingest.parsers import (
    BadEventId,
    BadFieldValue,
    ColumnCountMismatch,
    EmptyDocumentIdentifier,
    EmptyMentionIdentifier,
    LineParseError,
    parse_event_line,
    parse_event_stream,
    parse_gkg_line,
    parse_gkg_stream,
    parse_mention_line,
    parse_mention_stream,
    parse_v2themes,
    read_records,
    serialize_event,
    serialize_gkg,
    serialize_mention,
)
from xenomap.ingest.schemas import (
    EVENT_SCHEMA,
    GKG_SCHEMA,
    MENTIONS_SCHEMA,
    Feed,
    FileKind,
    SchemaDescriptor,
    default_schema,
    load_schema_overrides,
)

__all__ = [
    "ChecksumMismatch",
    "CorruptArchive",
    "FetchError",
    "NetworkFailure",
    "RemoteFileMissing",
    "cache_path_for",
    "fetch_file",
    "fetch_many",
    "MASTER_LIST_URLS",
    "UpdateFileRef",
    "list_update_files",
    "parse_master_list_line",
    "BadEventId",
    "BadFieldValue",
    "ColumnCountMismatch",
    "EmptyDocumentIdentifier",
    "EmptyMentionIdentifier",
    "LineParseError",
    "parse_event_line",
    "parse_event_stream",
    "parse_gkg_line",
    "parse_gkg_stream",
    "parse_mention_line",
    "parse_mention_stream",
    "parse_v2themes",
    "read_records",
    "serialize_event",
    "serialize_gkg",
    "serialize_mention",
    "EVENT_SCHEMA",
    "GKG_SCHEMA",
    "MENTIONS_SCHEMA",
    "Feed",
    "FileKind",
    "SchemaDescriptor",
    "default_schema",
    "load_schema_overrides",
]
