"""Download, verify, and cache feed files.

Each zip is fetched once, its MD5 checked against the master list entry,
and the decompressed payload stored under the cache directory next to a
small JSON sidecar recording the checksums. Later calls re-hash the cached
payload before trusting it; corruption triggers one re-download. Fetches of
different files may run in parallel, so each cache path has its own lock.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import zipfile
from datetime import datetime, timezone
from io import BytesIO
from pathlib import Path
from concurrent.futures import ThreadPoolExecutor, as_completed

import requests

from xenomap.diagnostics import DiagnosticLog
from xenomap.ingest.masterlist import UpdateFileRef

log = logging.getLogger(__name__)

REQUEST_TIMEOUT = 60.0


class FetchError(Exception):
    """A feed file could not be brought into the cache."""


class NetworkFailure(FetchError):
    """The HTTP request failed or returned a server error."""


class RemoteFileMissing(FetchError):
    """The server says the file does not exist."""


class ChecksumMismatch(FetchError):
    """The downloaded bytes do not hash to the advertised checksum."""


class CorruptArchive(FetchError):
    """The verified download is not a usable single-member zip."""


_locks_guard = threading.Lock()
_path_locks: dict[Path, threading.Lock] = {}


def _lock_for(path: Path) -> threading.Lock:
    with _locks_guard:
        lock = _path_locks.get(path)
        if lock is None:
            lock = _path_locks.setdefault(path, threading.Lock())
        return lock


def _md5(data: bytes) -> str:
    return hashlib.md5(data).hexdigest()


def cache_path_for(ref: UpdateFileRef, cache_dir: Path | str) -> Path:
    """Where the decompressed payload for ``ref`` lives in the cache."""
    basename = ref.basename
    if basename.lower().endswith(".zip"):
        basename = basename[: -len(".zip")]
    return Path(cache_dir) / basename


def _meta_path(payload_path: Path) -> Path:
    return payload_path.with_name(payload_path.name + ".meta.json")


def _cached_payload_ok(ref: UpdateFileRef, payload_path: Path,
                       diagnostics: DiagnosticLog) -> bool:
    meta_path = _meta_path(payload_path)
    if not (payload_path.exists() and meta_path.exists()):
        return False
    try:
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
    except (OSError, ValueError):
        diagnostics.record("cache_corruption", str(meta_path),
                           detail="unreadable sidecar")
        return False
    if meta.get("ref_checksum") != ref.checksum.lower():
        # Upstream republished the file; the cached copy is stale.
        diagnostics.record("cache_stale", str(payload_path),
                           detail="master list checksum changed")
        return False
    if _md5(payload_path.read_bytes()) != meta.get("payload_md5"):
        diagnostics.record("cache_corruption", str(payload_path),
                           detail="payload hash mismatch")
        return False
    return True


def _download(ref: UpdateFileRef, session: requests.Session) -> bytes:
    try:
        response = session.get(ref.url, timeout=REQUEST_TIMEOUT)
    except requests.RequestException as exc:
        raise NetworkFailure(f"{ref.url}: {exc}") from exc
    if response.status_code == 404:
        raise RemoteFileMissing(f"{ref.url}: 404 from server")
    if response.status_code != 200:
        raise NetworkFailure(f"{ref.url}: HTTP {response.status_code}")
    content = response.content
    if _md5(content) != ref.checksum.lower():
        raise ChecksumMismatch(
            f"{ref.url}: download hashed {_md5(content)}, "
            f"master list says {ref.checksum.lower()}")
    return content


def _unzip_single(content: bytes, url: str) -> bytes:
    try:
        with zipfile.ZipFile(BytesIO(content)) as archive:
            names = archive.namelist()
            if len(names) != 1:
                raise CorruptArchive(
                    f"{url}: expected one archive member, found {len(names)}")
            return archive.read(names[0])
    except zipfile.BadZipFile as exc:
        raise CorruptArchive(f"{url}: not a zip archive") from exc


def _write_atomic(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def fetch_file(ref: UpdateFileRef, cache_dir: Path | str,
               session: requests.Session | None = None,
               diagnostics: DiagnosticLog | None = None) -> Path:
    """Ensure ``ref`` is cached and verified; return the payload path.

    A warm, intact cache entry costs one hash and no network traffic.
    Transient failures (network errors, checksum mismatches) are retried
    once before the error is raised.
    """
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    diagnostics = diagnostics if diagnostics is not None else DiagnosticLog()
    payload_path = cache_path_for(ref, cache_dir)

    with _lock_for(payload_path):
        if _cached_payload_ok(ref, payload_path, diagnostics):
            return payload_path

        own_session = session is None
        session = session or requests.Session()
        try:
            last_error: FetchError | None = None
            for attempt in (1, 2):
                try:
                    content = _download(ref, session)
                    break
                except (NetworkFailure, ChecksumMismatch) as exc:
                    last_error = exc
                    log.warning("fetch attempt %d failed: %s", attempt, exc)
            else:
                assert last_error is not None
                raise last_error

            payload = _unzip_single(content, ref.url)
            _write_atomic(payload_path, payload)
            meta = {
                "url": ref.url,
                "ref_checksum": ref.checksum.lower(),
                "payload_md5": _md5(payload),
                "size_bytes": len(content),
                "fetched_at": datetime.now(timezone.utc).isoformat(),
            }
            _write_atomic(_meta_path(payload_path),
                          json.dumps(meta, indent=2).encode("utf-8"))
            return payload_path
        finally:
            if own_session:
                session.close()


def fetch_many(refs: list[UpdateFileRef], cache_dir: Path | str,
               jobs: int = 4,
               session: requests.Session | None = None,
               diagnostics: DiagnosticLog | None = None,
               ) -> tuple[list[tuple[UpdateFileRef, Path]],
                          list[tuple[UpdateFileRef, FetchError]]]:
    """Fetch several refs in parallel.

    Returns (fetched, failures) where fetched preserves the input order.
    Failures carry the FetchError that survived the retry.
    """
    if jobs < 1:
        raise ValueError("jobs must be at least 1")
    diagnostics = diagnostics if diagnostics is not None else DiagnosticLog()
    own_session = session is None
    session = session or requests.Session()
    paths: dict[UpdateFileRef, Path] = {}
    failures: list[tuple[UpdateFileRef, FetchError]] = []
    try:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = {
                pool.submit(fetch_file, ref, cache_dir, session, diagnostics): ref
                for ref in refs
            }
            for future in as_completed(futures):
                ref = futures[future]
                try:
                    paths[ref] = future.result()
                except FetchError as exc:
                    failures.append((ref, exc))
    finally:
        if own_session:
            session.close()
    fetched = [(ref, paths[ref]) for ref in refs if ref in paths]
    failures.sort(key=lambda item: refs.index(item[0]))
    return fetched, failures
