"""Shared fixtures: a small synthetic corpus wired for end-to-end runs.

``build_corpus`` lays out everything a full CLI run needs under one
directory: six zipped feed files across two 15-minute slots, a master list
describing them, a warm verified cache (so no test needs the network), and
the two population CSVs. The expected numbers for this corpus are worked
out by hand below and asserted in the CLI and acceptance tests.
"""

import csv
import hashlib
import io
import zipfile
import json
from dataclasses import dataclass
from pathlib import Path

import pytest

from goldens import make_event_line, make_gkg_line, make_mention_line, make_row

URL_BASE = "http://fixture.invalid/gdeltv2/"

SLOT1 = "20220314000000"
SLOT2 = "20220314001500"

D1 = "https://news.test/d1"
D2 = "https://news.test/d2"
D3 = "https://news.test/d3"
D4 = "https://news.test/d4"
D5 = "https://news.test/d5"
D6 = "https://news.test/d6"

# Hand-computed expectations for the corpus built below.
#
# Matched documents: d1, d2, d4, d5 (d3 only has a non-matching theme,
# d6 is matched but never mentioned). Event id 101 has two rows, so the
# (document, event row) join yields 11 candidates; dropping the row pair
# without a REF actor leaves 10; dropping the two rows without a mappable
# country leaves 8; five distinct event ids remain.
E2E_COUNTERS = (11, 10, 8, 5)
E2E_EVENT_COUNTRIES = {101: "USA", 102: "USA", 103: "DEU",
                       107: "SYR", 108: "GBR"}
E2E_FREQUENCIES = {"USA": 2, "DEU": 1, "GBR": 1, "SYR": 1}
# Scaled frequency = F * TP / RP, displayed at two decimals.
E2E_SCALED = {"SYR": "2100.00", "USA": "551.67", "GBR": "223.33",
              "DEU": "138.67"}
# SYR sits below the 50,000 refugee threshold, so the ranking skips it.
E2E_RANKED_ORDER = ["USA", "GBR", "DEU"]
E2E_ZERO_COUNTRIES = ["FRA"]


def _slot1_events() -> list[str]:
    return [
        # survives: REF first actor, country from actor2 (USA), protest
        make_event_line(event_id="101", actor1_code="REF",
                        actor2_code="USAGOV", actor2_country="USA",
                        root="14", date_added=SLOT1,
                        url="https://news.test/e101a"),
        # survives: REF segment inside USAREF, indirect root 01
        make_event_line(event_id="102", actor1_code="USAREF",
                        actor1_country="USA", root="01", date_added=SLOT1,
                        url="https://news.test/e102"),
        # survives: REF second actor, country from actor1 (DEU)
        make_event_line(event_id="103", actor1_code="DEUGOV",
                        actor1_country="DEU", actor2_code="REF",
                        root="18", date_added=SLOT1,
                        url="https://news.test/e103"),
        # dropped at the actor stage: no REF segment on either side
        make_event_line(event_id="104", actor1_code="GBRCOP",
                        actor1_country="GBR", actor2_code="USAGOV",
                        actor2_country="USA", root="19", date_added=SLOT1,
                        url="https://news.test/e104"),
        # dropped at the country stage: no country field at all
        make_event_line(event_id="105", actor1_code="REF", root="02",
                        date_added=SLOT1, url="https://news.test/e105"),
        # dropped at the country stage: ZZZ resolves to nothing
        make_event_line(event_id="106", actor1_code="REFGOV",
                        actor1_country="ZZZ", root="14", date_added=SLOT1,
                        url="https://news.test/e106"),
    ]


def _slot2_events() -> list[str]:
    return [
        # duplicate of event 101; later date_added, so the slot-1 row is
        # retained, and the MEX/USA country vote ties back to the retained row
        make_event_line(event_id="101", actor1_code="MEXREF",
                        actor1_country="MEX", root="03", date_added=SLOT2,
                        url="https://news.test/e101b"),
        make_event_line(event_id="107", actor1_code="SYRREF",
                        actor1_country="SYR", root="20", date_added=SLOT2,
                        url="https://news.test/e107"),
        # root 99 is out of range: kept, but lands in the unclassified bucket
        make_event_line(event_id="108", actor1_code="REF",
                        actor1_country="GBR", root="99", date_added=SLOT2,
                        url="https://news.test/e108"),
        make_event_line(event_id="notanumber", date_added=SLOT2,
                        url="https://news.test/bad"),
    ]


def _slot1_mentions() -> list[str]:
    return [
        make_mention_line(event_id="101", identifier=D1, tone="-2.5"),
        make_mention_line(event_id="104", identifier=D1, tone="-1.0"),
        make_mention_line(event_id="102", identifier=D2, tone="-4.5"),
        make_mention_line(event_id="105", identifier=D2, tone="0.0"),
        make_mention_line(event_id="103", identifier=D3, tone="-6.25"),
    ]


def _slot2_mentions() -> list[str]:
    return [
        make_mention_line(event_id="103", identifier=D4, tone="-5.0"),
        make_mention_line(event_id="106", identifier=D4, tone="-3.0"),
        make_mention_line(event_id="107", identifier=D4, tone="-7.5"),
        make_mention_line(event_id="101", identifier=D5, tone="-2.0"),
        make_mention_line(event_id="108", identifier=D5, tone="-1.5"),
        # mention of an event id absent from the event table
        make_mention_line(event_id="999", identifier=D1, tone="1.0"),
        # unusable: no document identifier
        make_mention_line(event_id="107", identifier="", tone="0.5"),
    ]


def _slot1_gkgs() -> list[str]:
    return [
        make_gkg_line(record_id=f"{SLOT1}-1", identifier=D1,
                      themes="DISCRIMINATION_IMMIGRATION_XENOPHOBIA,120;"),
        make_gkg_line(record_id=f"{SLOT1}-2", identifier=D2,
                      themes="DISCRIMINATION_IMMIGRATION_ANTIIMMIGRANTS,88;"
                             "TAX_FNCACT_PRESIDENT,10;"),
        # only a non-matching theme: d3 never enters the cascade
        make_gkg_line(record_id=f"{SLOT1}-3", identifier=D3,
                      themes="UNHCR,15;"),
    ]


def _slot2_gkgs() -> list[str]:
    return [
        make_gkg_line(
            record_id=f"{SLOT2}-1", identifier=D4,
            themes="DISCRIMINATION_IMMIGRATION_OPPOSED_TO_IMMIGRANTS,300;"),
        make_gkg_line(record_id=f"{SLOT2}-2", identifier=D5,
                      themes="DISCRIMINATION_IMMIGRATION_XENOPHOBIA,55;"),
        # matched but mentioned nowhere: reported, reaches no event
        make_gkg_line(record_id=f"{SLOT2}-3", identifier=D6,
                      themes="DISCRIMINATION_IMMIGRATION_XENOPHOBES,20;"),
        # one column short of the layout: counted and skipped
        make_row(26, {0: f"{SLOT2}-4", 4: D1}),
    ]


REFUGEE_ROWS = [
    ("United States of America", "1,000,000", "150,000", "50,000"),
    ("Germany", "550,000", "50,000", "-"),
    ("United Kingdom of Great Britain and Northern Ireland",
     "250,000", "50,000", ""),
    ("Syrian Arab Republic", "8,000", "2,000", "-"),
    ("France", "45,000", "5,000", "-"),
    ("Narnia", "123", "", ""),
]

POPULATION_ROWS = [
    ("United States", "331000000"),
    ("Germany", "83200000"),
    ("United Kingdom", "67000000"),
    ("Syria", "21000000"),
    ("France", "68000000"),
]


@dataclass(frozen=True)
class Corpus:
    root: Path
    master_list: Path
    cache_dir: Path
    refugees_csv: Path
    population_csv: Path
    zips: dict[str, bytes]  # basename -> raw zip bytes
    checksums: dict[str, str]  # basename -> md5 of the zip


def _zip_payload(basename: str, lines: list[str]) -> tuple[bytes, bytes]:
    payload = ("\n".join(lines) + "\n").encode("utf-8")
    buffer = io.BytesIO()
    member = basename[: -len(".zip")]
    with zipfile.ZipFile(buffer, "w", zipfile.ZIP_DEFLATED) as archive:
        archive.writestr(member, payload)
    return buffer.getvalue(), payload


def build_corpus(root: Path, url_base: str = URL_BASE,
                 seed_cache: bool = True) -> Corpus:
    """Materialize the corpus under ``root`` and return its paths."""
    root.mkdir(parents=True, exist_ok=True)
    cache_dir = root / "cache"
    cache_dir.mkdir(exist_ok=True)

    tables = {
        f"{SLOT1}.export.CSV.zip": _slot1_events(),
        f"{SLOT1}.mentions.CSV.zip": _slot1_mentions(),
        f"{SLOT1}.gkg.csv.zip": _slot1_gkgs(),
        f"{SLOT2}.export.CSV.zip": _slot2_events(),
        f"{SLOT2}.mentions.CSV.zip": _slot2_mentions(),
        f"{SLOT2}.gkg.csv.zip": _slot2_gkgs(),
    }

    zips: dict[str, bytes] = {}
    checksums: dict[str, str] = {}
    list_lines = []
    for basename, lines in tables.items():
        blob, payload = _zip_payload(basename, lines)
        zips[basename] = blob
        checksum = hashlib.md5(blob).hexdigest()
        checksums[basename] = checksum
        list_lines.append(f"{len(blob)} {checksum} {url_base}{basename}")
        if seed_cache:
            payload_path = cache_dir / basename[: -len(".zip")]
            payload_path.write_bytes(payload)
            meta = {
                "url": f"{url_base}{basename}",
                "ref_checksum": checksum,
                "payload_md5": hashlib.md5(payload).hexdigest(),
                "size_bytes": len(blob),
                "fetched_at": "2022-03-15T00:00:00+00:00",
            }
            payload_path.with_name(payload_path.name + ".meta.json").write_text(
                json.dumps(meta, indent=2), encoding="utf-8")

    master_list = root / "masterlist.txt"
    master_list.write_text("\n".join(list_lines) + "\n", encoding="utf-8")

    refugees_csv = root / "refugees.csv"
    with refugees_csv.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["Country of asylum", "Refugees under UNHCR's mandate",
                         "Asylum-seekers",
                         "Other people in need of international protection"])
        writer.writerows(REFUGEE_ROWS)

    population_csv = root / "population.csv"
    # census exports routinely carry a byte-order mark; prove we cope
    with population_csv.open("w", encoding="utf-8-sig", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["Country", "Population"])
        writer.writerows(POPULATION_ROWS)

    return Corpus(root=root, master_list=master_list, cache_dir=cache_dir,
                  refugees_csv=refugees_csv, population_csv=population_csv,
                  zips=zips, checksums=checksums)


@pytest.fixture(scope="session")
def shared_corpus(tmp_path_factory) -> Corpus:
    """A read-only corpus shared across tests; never mutate its files."""
    return build_corpus(tmp_path_factory.mktemp("corpus"))


@pytest.fixture
def no_network(monkeypatch):
    """Make any outgoing HTTP request fail the test loudly."""

    def _refuse(self, method, url, *args, **kwargs):
        raise AssertionError(f"unexpected network request: {method} {url}")

    monkeypatch.setattr("requests.sessions.Session.request", _refuse)
