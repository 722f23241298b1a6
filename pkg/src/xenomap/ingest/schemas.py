"""Column layouts for the three feed tables.

The feeds are tab-separated files with fixed column counts and no header
row, so every parser works from a SchemaDescriptor that names the columns
it needs. The defaults below follow the published v2 layouts; an override
file can remap columns if an upstream layout ever shifts.
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Mapping


class FileKind(enum.Enum):
    """Which of the three tables a feed file carries."""

    EVENT = "export"
    MENTIONS = "mentions"
    GKG = "gkg"


class Feed(enum.Enum):
    """Source feed: native English or machine-translated coverage."""

    ENGLISH = "english"
    TRANSLINGUAL = "translingual"


# Stable orderings used when sorting refs for deterministic output.
KIND_ORDER = {FileKind.EVENT: 0, FileKind.MENTIONS: 1, FileKind.GKG: 2}
FEED_ORDER = {Feed.ENGLISH: 0, Feed.TRANSLINGUAL: 1}


@dataclass(frozen=True)
class SchemaDescriptor:
    """Maps the field names a parser needs onto 0-based column indexes."""

    file_kind: FileKind
    column_count: int
    fields: Mapping[str, int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "fields", MappingProxyType(dict(self.fields)))
        if self.column_count < 1:
            raise ValueError("column_count must be positive")
        seen: dict[int, str] = {}
        for name, index in self.fields.items():
            if not 0 <= index < self.column_count:
                raise ValueError(
                    f"{name}: index {index} outside 0..{self.column_count - 1}")
            if index in seen:
                raise ValueError(
                    f"{name} and {seen[index]} both mapped to column {index}")
            seen[index] = name

    def index_of(self, name: str) -> int:
        return self.fields[name]


EVENT_SCHEMA = SchemaDescriptor(FileKind.EVENT, 61, {
    "global_event_id": 0,
    "event_date": 1,
    "actor1_code": 5,
    "actor1_country": 7,
    "actor2_code": 15,
    "actor2_country": 17,
    "event_root_code": 28,
    "action_geo_country": 53,
    "date_added": 59,
    "source_url": 60,
})

MENTIONS_SCHEMA = SchemaDescriptor(FileKind.MENTIONS, 16, {
    "global_event_id": 0,
    "mention_identifier": 5,
    "mention_tone": 13,
})

GKG_SCHEMA = SchemaDescriptor(FileKind.GKG, 27, {
    "gkg_record_id": 0,
    "document_identifier": 4,
    "themes": 8,
})

_DEFAULTS = {
    FileKind.EVENT: EVENT_SCHEMA,
    FileKind.MENTIONS: MENTIONS_SCHEMA,
    FileKind.GKG: GKG_SCHEMA,
}


def default_schema(kind: FileKind) -> SchemaDescriptor:
    return _DEFAULTS[kind]


def load_schema_overrides(source: Path | str | io.TextIOBase,
                          base: SchemaDescriptor) -> SchemaDescriptor:
    """Apply a field=index override file on top of a default schema.

    The file holds one ``field_name = index`` assignment per line; blank
    lines and ``#`` comments are ignored. The special name ``column_count``
    adjusts the expected width. Unknown field names are rejected so typos
    do not silently leave a column unmapped.
    """
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source.read()
    fields = dict(base.fields)
    column_count = base.column_count
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected name = index, got {raw!r}")
        name, _, value = line.partition("=")
        name = name.strip()
        try:
            index = int(value.strip())
        except ValueError:
            raise ValueError(f"line {lineno}: {value.strip()!r} is not an integer")
        if name == "column_count":
            column_count = index
        elif name in fields:
            fields[name] = index
        else:
            raise ValueError(f"line {lineno}: unknown field {name!r} for "
                             f"{base.file_kind.value} schema")
    return SchemaDescriptor(base.file_kind, column_count, fields)
