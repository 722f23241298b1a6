"""Command line interface.

Subcommands mirror the pipeline stages and hand data to each other only
through documented files in the output directory:

    fetch    -> manifest.csv (plus the verified cache)
    filter   -> events.csv, counters.txt, skipped.txt
    metrics  -> metrics.csv, zero_event_countries.csv
    classify -> breakdown.csv, classify_summary.txt
    report   -> ranked.csv, ranked.md, breakdown.md, map.geojson, map.svg
    run      -> all of the above in order

Configuration precedence: command line flags beat the --config JSON file,
which beats the XENOMAP_CACHE_DIR environment variable, which beats the
built-in defaults. Exit codes: 0 success, 2 bad configuration, and 3 to 7
for a failure in fetch, filter, metrics, classify, or report.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Iterable

import requests

from xenomap import classify as classify_mod
from xenomap import metrics as metrics_mod
from xenomap import render as render_mod
from xenomap.countries import bundled_registry
from xenomap.diagnostics import DiagnosticLog
from xenomap.ingest import (
    MASTER_LIST_URLS,
    Feed,
    FetchError,
    FileKind,
    UpdateFileRef,
    default_schema,
    fetch_many,
    list_update_files,
    load_schema_overrides,
    read_records,
)
from xenomap.ingest.schemas import SchemaDescriptor
from xenomap.pipeline import (
    CountryStrategy,
    ThemeSet,
    read_filtered_events,
    run_filter_pipeline,
    write_counters,
    write_filtered_events,
)

log = logging.getLogger("xenomap")

EXIT_OK = 0
EXIT_CONFIG = 2
STAGE_EXIT_CODES = {"fetch": 3, "filter": 4, "metrics": 5,
                    "classify": 6, "report": 7}

CACHE_ENV_VAR = "XENOMAP_CACHE_DIR"


class ConfigError(Exception):
    """The requested configuration cannot be run."""


class StageError(Exception):
    """A pipeline stage failed; carries the stage name for the exit code."""

    def __init__(self, stage: str, message: str):
        super().__init__(message)
        self.stage = stage


@dataclass
class RunConfig:
    """Everything a full run needs, resolved from flags/config/defaults."""

    start: datetime | None = None
    end: datetime | None = None
    feeds: tuple[Feed, ...] = (Feed.ENGLISH, Feed.TRANSLINGUAL)
    cache_dir: Path = Path("cache")
    out_dir: Path = Path("out")
    themes_mode: str = "prefix"
    country_strategy: CountryStrategy = CountryStrategy.ACTOR1_FIRST
    refugees_csv: Path | None = None
    population_csv: Path | None = None
    min_refugees: int = metrics_mod.DEFAULT_MIN_REFUGEES
    top_n: int = metrics_mod.DEFAULT_TOP_N
    jobs: int = 4
    master_lists: dict[Feed, str] = field(
        default_factory=lambda: dict(MASTER_LIST_URLS))
    include_zero_countries: bool = False
    refugee_country_column: str = metrics_mod.REFUGEE_COUNTRY_COLUMN
    refugee_count_columns: tuple[str, ...] = metrics_mod.REFUGEE_COUNT_COLUMNS
    population_country_column: str = metrics_mod.POPULATION_COUNTRY_COLUMN
    population_count_column: str = metrics_mod.POPULATION_COUNT_COLUMN
    event_schema: Path | None = None
    mentions_schema: Path | None = None
    gkg_schema: Path | None = None

    def theme_set(self) -> ThemeSet:
        if self.themes_mode == "prefix":
            return ThemeSet.default_prefix()
        if self.themes_mode == "exact":
            return ThemeSet.exact_names()
        raise ConfigError(f"themes mode must be prefix or exact, "
                          f"got {self.themes_mode!r}")

    def schema_for(self, kind: FileKind) -> SchemaDescriptor:
        override = {FileKind.EVENT: self.event_schema,
                    FileKind.MENTIONS: self.mentions_schema,
                    FileKind.GKG: self.gkg_schema}[kind]
        base = default_schema(kind)
        if override is None:
            return base
        return load_schema_overrides(override, base)

    def as_json_dict(self) -> dict:
        return {
            "start": self.start.isoformat() if self.start else None,
            "end": self.end.isoformat() if self.end else None,
            "feeds": [f.value for f in self.feeds],
            "cache_dir": str(self.cache_dir),
            "out_dir": str(self.out_dir),
            "themes_mode": self.themes_mode,
            "country_strategy": self.country_strategy.value,
            "refugees_csv": str(self.refugees_csv) if self.refugees_csv else None,
            "population_csv":
                str(self.population_csv) if self.population_csv else None,
            "min_refugees": self.min_refugees,
            "top_n": self.top_n,
            "jobs": self.jobs,
            "master_lists": {f.value: loc for f, loc in
                             sorted(self.master_lists.items(),
                                    key=lambda kv: kv[0].value)},
            "include_zero_countries": self.include_zero_countries,
            "refugee_country_column": self.refugee_country_column,
            "refugee_count_columns": list(self.refugee_count_columns),
            "population_country_column": self.population_country_column,
            "population_count_column": self.population_count_column,
            "event_schema": str(self.event_schema) if self.event_schema else None,
            "mentions_schema":
                str(self.mentions_schema) if self.mentions_schema else None,
            "gkg_schema": str(self.gkg_schema) if self.gkg_schema else None,
        }


def _parse_when(text: str, end_of_day: bool) -> datetime:
    for fmt in ("%Y-%m-%dT%H:%M:%S", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M"):
        try:
            return datetime.strptime(text, fmt)
        except ValueError:
            continue
    try:
        day = datetime.strptime(text, "%Y-%m-%d")
    except ValueError:
        raise ConfigError(
            f"cannot parse {text!r} as a date or datetime") from None
    if end_of_day:
        return day.replace(hour=23, minute=59, second=59)
    return day


def _parse_feeds(text: str) -> tuple[Feed, ...]:
    feeds = []
    for part in text.split(","):
        part = part.strip().lower()
        if not part:
            continue
        try:
            feeds.append(Feed(part))
        except ValueError:
            raise ConfigError(f"unknown feed {part!r}; choose from "
                              f"{[f.value for f in Feed]}") from None
    if not feeds:
        raise ConfigError("feeds must name at least one feed")
    return tuple(dict.fromkeys(feeds))


def _parse_strategy(text: str) -> CountryStrategy:
    try:
        return CountryStrategy(text)
    except ValueError:
        raise ConfigError(
            f"unknown country strategy {text!r}; choose from "
            f"{[s.value for s in CountryStrategy]}") from None


def build_config(args: argparse.Namespace) -> RunConfig:
    """Merge flags over the config file over env over defaults."""
    config = RunConfig()
    if os.environ.get(CACHE_ENV_VAR):
        config.cache_dir = Path(os.environ[CACHE_ENV_VAR])

    file_values: dict = {}
    if getattr(args, "config", None):
        try:
            file_values = json.loads(Path(args.config).read_text("utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}")
        except ValueError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}")
        if not isinstance(file_values, dict):
            raise ConfigError("config file must hold a JSON object")

    def pick(name: str):
        flag = getattr(args, name, None)
        if flag is not None:
            return flag
        return file_values.get(name)

    if pick("start") is not None:
        config.start = _parse_when(str(pick("start")), end_of_day=False)
    if pick("end") is not None:
        config.end = _parse_when(str(pick("end")), end_of_day=True)
    if pick("feeds") is not None:
        raw = pick("feeds")
        config.feeds = _parse_feeds(",".join(raw) if isinstance(raw, list)
                                    else str(raw))
    if pick("cache_dir") is not None:
        config.cache_dir = Path(pick("cache_dir"))
    if pick("out") is not None:
        config.out_dir = Path(pick("out"))
    if pick("themes_mode") is not None:
        config.themes_mode = str(pick("themes_mode"))
    if pick("country_strategy") is not None:
        config.country_strategy = _parse_strategy(str(pick("country_strategy")))
    for name in ("refugees_csv", "population_csv", "event_schema",
                 "mentions_schema", "gkg_schema"):
        if pick(name) is not None:
            setattr(config, name, Path(pick(name)))
    for name in ("min_refugees", "top_n", "jobs"):
        if pick(name) is not None:
            try:
                setattr(config, name, int(pick(name)))
            except ValueError:
                raise ConfigError(f"{name} must be an integer")
    if pick("include_zero_countries") is not None:
        config.include_zero_countries = bool(pick("include_zero_countries"))
    if pick("master_list_english") is not None:
        config.master_lists[Feed.ENGLISH] = str(pick("master_list_english"))
    if pick("master_list_translingual") is not None:
        config.master_lists[Feed.TRANSLINGUAL] = \
            str(pick("master_list_translingual"))
    if pick("refugee_country_column") is not None:
        config.refugee_country_column = str(pick("refugee_country_column"))
    if pick("refugee_count_columns") is not None:
        raw = pick("refugee_count_columns")
        parts = raw if isinstance(raw, list) else str(raw).split(",")
        config.refugee_count_columns = tuple(p.strip() for p in parts if p.strip())
    if pick("population_country_column") is not None:
        config.population_country_column = str(pick("population_country_column"))
    if pick("population_count_column") is not None:
        config.population_count_column = str(pick("population_count_column"))

    if config.min_refugees < 0:
        raise ConfigError("min-refugees must be non-negative")
    if config.top_n < 0:
        raise ConfigError("top-n must be non-negative")
    if config.jobs < 1:
        raise ConfigError("jobs must be at least 1")
    if config.start and config.end and config.start > config.end:
        raise ConfigError("start must not be after end")
    config.theme_set()  # validates themes_mode
    return config


def _write_effective_config(config: RunConfig) -> None:
    config.out_dir.mkdir(parents=True, exist_ok=True)
    path = config.out_dir / "config.json"
    path.write_text(json.dumps(config.as_json_dict(), indent=2, sort_keys=True)
                    + "\n", encoding="utf-8")


# --- fetch ----------------------------------------------------------------

MANIFEST_COLUMNS = ["kind", "feed", "timestamp", "url", "size_bytes",
                    "checksum", "path"]


def _read_master_list(location: str, stage: str) -> str:
    if location.startswith(("http://", "https://")):
        try:
            response = requests.get(location, timeout=60)
            response.raise_for_status()
        except requests.RequestException as exc:
            raise StageError(stage, f"cannot fetch master list: {exc}")
        return response.text
    try:
        return Path(location).read_text(encoding="utf-8")
    except OSError as exc:
        raise StageError(stage, f"cannot read master list: {exc}")


def _write_manifest(path: Path,
                    entries: Iterable[tuple[UpdateFileRef, Path]]) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(MANIFEST_COLUMNS)
        for ref, payload in entries:
            writer.writerow([ref.file_kind.value, ref.feed.value,
                             ref.timestamp.isoformat(), ref.url,
                             ref.size_bytes, ref.checksum, str(payload)])


def _read_manifest(path: Path) -> list[tuple[UpdateFileRef, Path]]:
    try:
        fh = path.open(encoding="utf-8", newline="")
    except OSError as exc:
        raise StageError("filter", f"cannot read manifest: {exc}")
    with fh:
        reader = csv.DictReader(fh)
        header = set(reader.fieldnames or ())
        missing = set(MANIFEST_COLUMNS) - header
        if missing:
            raise StageError("filter",
                             f"{path}: missing columns {sorted(missing)}")
        entries = []
        for row in reader:
            ref = UpdateFileRef(
                url=row["url"],
                timestamp=datetime.fromisoformat(row["timestamp"]),
                file_kind=FileKind(row["kind"]),
                feed=Feed(row["feed"]),
                size_bytes=int(row["size_bytes"]),
                checksum=row["checksum"],
            )
            entries.append((ref, Path(row["path"])))
        return entries


def cmd_fetch(config: RunConfig) -> None:
    if config.start is None or config.end is None:
        raise ConfigError("fetch needs --start and --end")
    _write_effective_config(config)
    diagnostics = DiagnosticLog()
    refs: list[UpdateFileRef] = []
    for feed in config.feeds:
        location = config.master_lists[feed]
        log.info("reading %s master list from %s", feed.value, location)
        text = _read_master_list(location, "fetch")
        refs.extend(list_update_files(config.start, config.end, [feed], text,
                                      diagnostics, source=location))
    log.info("%d files cover %s..%s", len(refs), config.start, config.end)
    fetched, failures = fetch_many(refs, config.cache_dir, jobs=config.jobs,
                                   diagnostics=diagnostics)
    _write_manifest(config.out_dir / "manifest.csv", fetched)
    diagnostics.write_report(config.out_dir / "fetch_skipped.txt")
    log.info("fetched %d files into %s", len(fetched), config.cache_dir)
    if failures:
        for ref, error in failures:
            log.error("failed: %s (%s)", ref.url, error)
        raise StageError("fetch", f"{len(failures)} files failed to fetch")


# --- filter ----------------------------------------------------------------

def cmd_filter(config: RunConfig) -> None:
    _write_effective_config(config)
    manifest = _read_manifest(config.out_dir / "manifest.csv")
    diagnostics = DiagnosticLog()
    events, mentions, gkgs = [], [], []
    sinks = {FileKind.EVENT: events, FileKind.MENTIONS: mentions,
             FileKind.GKG: gkgs}
    try:
        schemas = {kind: config.schema_for(kind) for kind in FileKind}
    except (OSError, ValueError) as exc:
        raise ConfigError(f"bad schema override: {exc}")
    for ref, payload in manifest:
        try:
            records = read_records(payload, schemas[ref.file_kind], diagnostics)
        except OSError as exc:
            raise StageError("filter", f"cannot read {payload}: {exc}")
        sinks[ref.file_kind].extend(records)
    log.info("parsed %d events, %d mentions, %d knowledge-graph records",
             len(events), len(mentions), len(gkgs))

    filtered, counters = run_filter_pipeline(
        events, mentions, gkgs,
        theme_set=config.theme_set(),
        strategy=config.country_strategy,
        diagnostics=diagnostics,
    )
    write_filtered_events(config.out_dir / "events.csv", filtered)
    extras = {key: diagnostics.counts[key]
              for key in sorted(diagnostics.counts)}
    write_counters(config.out_dir / "counters.txt", counters, extras)
    diagnostics.write_report(config.out_dir / "skipped.txt")
    log.info("%s", counters.summary_line())


# --- metrics ----------------------------------------------------------------

def cmd_metrics(config: RunConfig) -> None:
    if config.refugees_csv is None or config.population_csv is None:
        raise ConfigError("metrics needs --refugees-csv and --population-csv")
    _write_effective_config(config)
    diagnostics = DiagnosticLog()
    try:
        rows = read_filtered_events(config.out_dir / "events.csv")
    except (OSError, ValueError) as exc:
        raise StageError("metrics", f"cannot read filtered events: {exc}")
    try:
        refugees = metrics_mod.load_refugee_population(
            config.refugees_csv,
            country_column=config.refugee_country_column,
            count_columns=config.refugee_count_columns,
            diagnostics=diagnostics)
        totals = metrics_mod.load_total_population(
            config.population_csv,
            country_column=config.population_country_column,
            count_column=config.population_count_column,
            diagnostics=diagnostics)
    except (OSError, ValueError) as exc:
        raise StageError("metrics", f"cannot load population data: {exc}")
    populations = metrics_mod.merge_populations(refugees, totals,
                                                diagnostics=diagnostics)
    frequencies = metrics_mod.count_frequencies(rows)
    results = metrics_mod.compute_country_metrics(frequencies, populations,
                                                  diagnostics)
    metrics_mod.write_metrics_csv(config.out_dir / "metrics.csv", results)
    zero = metrics_mod.zero_event_countries(frequencies, populations)
    (config.out_dir / "zero_event_countries.csv").write_text(
        "\n".join(["CC"] + zero) + "\n", encoding="utf-8")
    diagnostics.write_report(config.out_dir / "metrics_skipped.txt")
    log.info("metrics for %d countries (%d with zero events)",
             len(results), len(zero))


# --- classify ----------------------------------------------------------------

def cmd_classify(config: RunConfig) -> None:
    _write_effective_config(config)
    try:
        rows = read_filtered_events(config.out_dir / "events.csv")
    except (OSError, ValueError) as exc:
        raise StageError("classify", f"cannot read filtered events: {exc}")
    breakdowns = classify_mod.breakdown_by_country(rows)
    classify_mod.write_breakdown_csv(config.out_dir / "breakdown.csv",
                                     breakdowns)
    total = classify_mod.overall_breakdown(breakdowns)
    direct_pct, indirect_pct = total.percentages
    summary = (f"direct={total.direct} ({direct_pct}%) "
               f"indirect={total.indirect} ({indirect_pct}%) "
               f"unclassified={total.unclassified} total={total.total}\n")
    (config.out_dir / "classify_summary.txt").write_text(summary,
                                                         encoding="utf-8")
    log.info("classified %d events across %d countries",
             total.total + total.unclassified, len(breakdowns))


# --- report ----------------------------------------------------------------

def cmd_report(config: RunConfig) -> None:
    _write_effective_config(config)
    try:
        results = metrics_mod.read_metrics_csv(config.out_dir / "metrics.csv")
        breakdowns = classify_mod.read_breakdown_csv(
            config.out_dir / "breakdown.csv")
    except (OSError, ValueError) as exc:
        raise StageError("report", f"cannot read stage inputs: {exc}")

    ranked = metrics_mod.top_n(results, n=config.top_n,
                               min_refugees=config.min_refugees)
    render_mod.write_ranked_csv(config.out_dir / "ranked.csv", ranked)
    render_mod.write_ranked_markdown(config.out_dir / "ranked.md", ranked)

    by_country = {b.country: b for b in breakdowns}
    ranked_breakdowns = [by_country.get(m.country,
                                        classify_mod.CountryBreakdown(
                                            m.country, 0, 0))
                         for m in ranked]
    render_mod.write_breakdown_markdown(
        config.out_dir / "breakdown.md", ranked_breakdowns,
        total_row=classify_mod.overall_breakdown(breakdowns))

    zero: list[str] = []
    if config.include_zero_countries:
        zero_path = config.out_dir / "zero_event_countries.csv"
        if zero_path.exists():
            zero = [line.strip() for line in
                    zero_path.read_text("utf-8").splitlines()[1:]
                    if line.strip()]
    doc = render_mod.build_choropleth(results, breakdowns,
                                      include_zero_countries=zero)
    diagnostics = DiagnosticLog()
    render_mod.emit_choropleth(doc,
                               config.out_dir / "map.geojson",
                               config.out_dir / "map.svg",
                               diagnostics=diagnostics)
    if diagnostics.counts:
        diagnostics.write_report(config.out_dir / "report_skipped.txt")
    log.info("report artifacts written to %s", config.out_dir)


def cmd_run(config: RunConfig) -> None:
    cmd_fetch(config)
    cmd_filter(config)
    cmd_metrics(config)
    cmd_classify(config)
    cmd_report(config)


# --- argument plumbing ------------------------------------------------------

def _add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags win")
    parser.add_argument("--start", help="window start, YYYY-MM-DD[THH:MM]")
    parser.add_argument("--end", help="window end, YYYY-MM-DD[THH:MM]")
    parser.add_argument("--feeds",
                        help="comma-separated: english,translingual")
    parser.add_argument("--cache-dir", dest="cache_dir",
                        help=f"download cache (or ${CACHE_ENV_VAR})")
    parser.add_argument("--out", help="output directory (default: out)")
    parser.add_argument("--themes-mode", dest="themes_mode",
                        choices=["prefix", "exact"],
                        help="theme matching mode (default: prefix)")
    parser.add_argument("--country-strategy", dest="country_strategy",
                        choices=[s.value for s in CountryStrategy],
                        help="country attribution (default: actor1-first)")
    parser.add_argument("--refugees-csv", dest="refugees_csv",
                        help="refugee population CSV")
    parser.add_argument("--population-csv", dest="population_csv",
                        help="total population CSV")
    parser.add_argument("--min-refugees", dest="min_refugees", type=int,
                        help="ranking threshold, inclusive (default: 50000)")
    parser.add_argument("--top-n", dest="top_n", type=int,
                        help="countries in the ranked table (default: 10)")
    parser.add_argument("--jobs", type=int,
                        help="parallel downloads (default: 4)")
    parser.add_argument("--master-list-english", dest="master_list_english",
                        help="path or URL of the English master list")
    parser.add_argument("--master-list-translingual",
                        dest="master_list_translingual",
                        help="path or URL of the translingual master list")
    parser.add_argument("--include-zero-countries", action="store_const",
                        const=True, default=None,
                        dest="include_zero_countries",
                        help="map countries with population data but no events")
    parser.add_argument("--refugee-country-column",
                        dest="refugee_country_column")
    parser.add_argument("--refugee-count-columns",
                        dest="refugee_count_columns",
                        help="comma-separated count columns to sum")
    parser.add_argument("--population-country-column",
                        dest="population_country_column")
    parser.add_argument("--population-count-column",
                        dest="population_count_column")
    parser.add_argument("--event-schema", dest="event_schema",
                        help="field=index override file for the event table")
    parser.add_argument("--mentions-schema", dest="mentions_schema",
                        help="field=index override file for the mentions table")
    parser.add_argument("--gkg-schema", dest="gkg_schema",
                        help="field=index override file for the gkg table")
    parser.add_argument("-v", "--verbose", action="store_true")


COMMANDS = {
    "fetch": cmd_fetch,
    "filter": cmd_filter,
    "metrics": cmd_metrics,
    "classify": cmd_classify,
    "report": cmd_report,
    "run": cmd_run,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xenomap",
        description="Track coverage of xenophobic events against refugee "
                    "populations, country by country.")
    subparsers = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "fetch": "download and verify the update files for a time window",
        "filter": "parse cached files and run the filter cascade",
        "metrics": "compute population-scaled frequencies",
        "classify": "split events into direct and indirect actions",
        "report": "write the ranked tables and the choropleth",
        "run": "run every stage in order",
    }
    for name, description in descriptions.items():
        sub = subparsers.add_parser(name, help=description)
        _add_common_arguments(sub)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(message)s")
    try:
        config = build_config(args)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    try:
        COMMANDS[args.command](config)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except StageError as exc:
        log.error("%s stage failed: %s", exc.stage, exc)
        return STAGE_EXIT_CODES[exc.stage]
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
