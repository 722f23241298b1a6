"""Master file list handling: which 15-minute files exist upstream.

The upstream project publishes one master list per feed. Each line reads
``<size> <md5> <url>`` and the URL basename starts with the file's UTC
timestamp, e.g. ``20220314151500.export.CSV.zip`` (translated coverage adds
a ``.translation.`` marker). Malformed lines are counted and skipped so a
single bad entry never sinks a run.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from typing import Iterable

from xenomap.diagnostics import DiagnosticLog
from xenomap.ingest.schemas import FEED_ORDER, KIND_ORDER, Feed, FileKind

MASTER_LIST_URLS = {
    Feed.ENGLISH: "http://data.gdeltproject.org/gdeltv2/masterfilelist.txt",
    Feed.TRANSLINGUAL:
        "http://data.gdeltproject.org/gdeltv2/masterfilelist-translation.txt",
}

VALID_MINUTES = (0, 15, 30, 45)


@dataclass(frozen=True)
class UpdateFileRef:
    """One downloadable file from a master list."""

    url: str
    timestamp: datetime
    file_kind: FileKind
    feed: Feed
    size_bytes: int
    checksum: str

    def __post_init__(self) -> None:
        if self.size_bytes < 0:
            raise ValueError(f"{self.url}: negative size")
        if (self.timestamp.minute not in VALID_MINUTES
                or self.timestamp.second != 0):
            raise ValueError(
                f"{self.url}: timestamp {self.timestamp} is not on a "
                "15-minute boundary")
        if len(self.checksum) != 32 or any(
                c not in "0123456789abcdef" for c in self.checksum.lower()):
            raise ValueError(f"{self.url}: checksum is not a 32-char hex digest")

    @property
    def basename(self) -> str:
        return self.url.rsplit("/", 1)[-1]


def _classify_basename(basename: str) -> tuple[datetime, FileKind, Feed]:
    stamp_text = basename.split(".", 1)[0]
    timestamp = datetime.strptime(stamp_text, "%Y%m%d%H%M%S")
    lowered = basename.lower()
    if ".export." in lowered:
        kind = FileKind.EVENT
    elif ".mentions." in lowered:
        kind = FileKind.MENTIONS
    elif ".gkg." in lowered:
        kind = FileKind.GKG
    else:
        raise ValueError(f"cannot tell file kind from {basename!r}")
    feed = Feed.TRANSLINGUAL if ".translation." in lowered else Feed.ENGLISH
    return timestamp, kind, feed


def parse_master_list_line(line: str, feed_hint: Feed | None = None
                           ) -> UpdateFileRef:
    """Parse one ``size md5 url`` line into an UpdateFileRef.

    Raises ValueError for anything malformed. ``feed_hint`` is accepted for
    symmetry but the feed is always derivable from the URL itself.
    """
    parts = line.split()
    if len(parts) != 3:
        raise ValueError(f"expected 3 fields, got {len(parts)}")
    size_text, checksum, url = parts
    size_bytes = int(size_text)
    timestamp, kind, feed = _classify_basename(url.rsplit("/", 1)[-1])
    if feed_hint is not None and feed is not feed_hint:
        raise ValueError(f"{url}: feed marker disagrees with list feed")
    return UpdateFileRef(url, timestamp, kind, feed, size_bytes, checksum)


def list_update_files(start: datetime, end: datetime,
                      feeds: Iterable[Feed],
                      master_list: str | Iterable[str],
                      diagnostics: DiagnosticLog | None = None,
                      source: str = "master list") -> list[UpdateFileRef]:
    """Select the update files covering [start, end] for the wanted feeds.

    ``master_list`` is the list text (or an iterable of its lines). Returns
    refs sorted by timestamp, then table kind, then feed; duplicates by URL
    are dropped. Raises ValueError if start is after end.
    """
    if start > end:
        raise ValueError(f"start {start} is after end {end}")
    wanted = set(feeds)
    if isinstance(master_list, str):
        lines: Iterable[str] = master_list.splitlines()
    else:
        lines = master_list
    diagnostics = diagnostics if diagnostics is not None else DiagnosticLog()

    refs: dict[str, UpdateFileRef] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line:
            continue
        try:
            ref = parse_master_list_line(line)
        except ValueError as exc:
            diagnostics.record("malformed_list_line", source, lineno, str(exc))
            continue
        if ref.feed not in wanted:
            continue
        if not start <= ref.timestamp <= end:
            continue
        if ref.url in refs:
            diagnostics.record("duplicate_list_entry", source, lineno, ref.url)
            continue
        refs[ref.url] = ref

    return sorted(refs.values(),
                  key=lambda r: (r.timestamp, KIND_ORDER[r.file_kind],
                                 FEED_ORDER[r.feed], r.url))
