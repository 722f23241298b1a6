#!/usr/bin/env python3
"""Generate the bundled country registry and world geometry.

Inputs are two npm data packages (not vendored here):

  * world-atlas (countries-110m.json) - Natural Earth 110m boundaries as
    TopoJSON, keyed by ISO-3166 numeric ids. Natural Earth data is public
    domain; the world-atlas packaging is ISC licensed.
  * world-countries (countries.json) - ISO-3166 code table with common and
    official names plus alternative spellings.

Outputs, written into the package data directory:

  * countries.csv      - registry rows: alpha3, name, pipe-separated aliases
  * world-110m.geojson - FeatureCollection keyed by alpha-3 codes

Run (after `npm pack world-atlas world-countries` and extracting):

  python tools/build_assets.py \
      --world-atlas /tmp/world-atlas/countries-110m.json \
      --world-countries /tmp/world-countries/countries.json \
      --out-dir src/xenomap/data
"""

from __future__ import annotations

import argparse
import csv
import json
from pathlib import Path

# Kosovo has no ISO-3166 assignment; world-countries uses the placeholder
# "UNK" while most statistical datasets (World Bank, IMF) use "XKX".
# The registry canonicalises on XKX and keeps UNK as an alias.
KOSOVO_ALPHA3 = "XKX"

# FIPS 10-4 two-letter country codes, which GDELT uses for its geographic
# fields. These diverge from ISO-3166 alpha-2 in famous ways (CH is China,
# not Switzerland), so ISO alpha-2 codes are deliberately NOT registered as
# aliases: the two-letter alias namespace belongs to FIPS alone.
FIPS_TO_ALPHA3 = {
    "AA": "ABW", "AC": "ATG", "AE": "ARE", "AF": "AFG", "AG": "DZA",
    "AJ": "AZE", "AL": "ALB", "AM": "ARM", "AN": "AND", "AO": "AGO",
    "AQ": "ASM", "AR": "ARG", "AS": "AUS", "AU": "AUT", "AV": "AIA",
    "AY": "ATA", "BA": "BHR", "BB": "BRB", "BC": "BWA", "BD": "BMU",
    "BE": "BEL", "BF": "BHS", "BG": "BGD", "BH": "BLZ", "BK": "BIH",
    "BL": "BOL", "BM": "MMR", "BN": "BEN", "BO": "BLR", "BP": "SLB",
    "BR": "BRA", "BT": "BTN", "BU": "BGR", "BX": "BRN", "BY": "BDI",
    "CA": "CAN", "CB": "KHM", "CD": "TCD", "CE": "LKA", "CF": "COG",
    "CG": "COD", "CH": "CHN", "CI": "CHL", "CM": "CMR", "CN": "COM",
    "CO": "COL", "CS": "CRI", "CT": "CAF", "CU": "CUB", "CV": "CPV",
    "CY": "CYP", "DA": "DNK", "DJ": "DJI", "DO": "DMA", "DR": "DOM",
    "EC": "ECU", "EG": "EGY", "EI": "IRL", "EK": "GNQ", "EN": "EST",
    "ER": "ERI", "ES": "SLV", "ET": "ETH", "EZ": "CZE", "FI": "FIN",
    "FJ": "FJI", "FM": "FSM", "FP": "PYF", "FR": "FRA", "GA": "GMB",
    "GB": "GAB", "GG": "GEO", "GH": "GHA", "GJ": "GRD", "GL": "GRL",
    "GM": "DEU", "GR": "GRC", "GT": "GTM", "GV": "GIN", "GY": "GUY",
    "GZ": "PSE", "HA": "HTI", "HK": "HKG", "HO": "HND", "HR": "HRV",
    "HU": "HUN", "IC": "ISL", "ID": "IDN", "IN": "IND", "IR": "IRN",
    "IS": "ISR", "IT": "ITA", "IV": "CIV", "IZ": "IRQ", "JA": "JPN",
    "JM": "JAM", "JO": "JOR", "KE": "KEN", "KG": "KGZ", "KN": "PRK",
    "KR": "KIR", "KS": "KOR", "KU": "KWT", "KV": KOSOVO_ALPHA3,
    "KZ": "KAZ", "LA": "LAO", "LE": "LBN", "LG": "LVA", "LH": "LTU",
    "LI": "LBR", "LO": "SVK", "LS": "LIE", "LT": "LSO", "LU": "LUX",
    "LY": "LBY", "MA": "MDG", "MC": "MAC", "MD": "MDA", "MG": "MNG",
    "MI": "MWI", "MJ": "MNE", "MK": "MKD", "ML": "MLI", "MN": "MCO",
    "MO": "MAR", "MP": "MUS", "MR": "MRT", "MT": "MLT", "MU": "OMN",
    "MV": "MDV", "MX": "MEX", "MY": "MYS", "MZ": "MOZ", "NC": "NCL",
    "NG": "NER", "NH": "VUT", "NI": "NGA", "NL": "NLD", "NO": "NOR",
    "NP": "NPL", "NR": "NRU", "NS": "SUR", "NU": "NIC", "NZ": "NZL",
    "OD": "SSD", "PA": "PRY", "PE": "PER", "PK": "PAK", "PL": "POL",
    "PM": "PAN", "PO": "PRT", "PP": "PNG", "PS": "PLW", "PU": "GNB",
    "QA": "QAT", "RI": "SRB", "RM": "MHL", "RO": "ROU", "RP": "PHL",
    "RQ": "PRI", "RS": "RUS", "RW": "RWA", "SA": "SAU", "SC": "KNA",
    "SE": "SYC", "SF": "ZAF", "SG": "SEN", "SI": "SVN", "SL": "SLE",
    "SM": "SMR", "SN": "SGP", "SO": "SOM", "SP": "ESP", "ST": "LCA",
    "SU": "SDN", "SW": "SWE", "SY": "SYR", "SZ": "CHE", "TC": "ARE",
    "TD": "TTO", "TH": "THA", "TI": "TJK", "TN": "TON", "TO": "TGO",
    "TP": "STP", "TS": "TUN", "TT": "TLS", "TU": "TUR", "TV": "TUV",
    "TW": "TWN", "TX": "TKM", "TZ": "TZA", "UG": "UGA", "UK": "GBR",
    "UP": "UKR", "US": "USA", "UV": "BFA", "UY": "URY", "UZ": "UZB",
    "VC": "VCT", "VE": "VEN", "VM": "VNM", "VT": "VAT", "WA": "NAM",
    "WE": "PSE", "WI": "ESH", "WS": "WSM", "WZ": "SWZ", "YM": "YEM",
    "ZA": "ZMB", "ZI": "ZWE",
}

# Legacy three-letter actor codes that appear in event data but are not
# ISO-3166 alpha-3 (mostly frozen at the turn of the millennium).
LEGACY_ALPHA3 = {
    "ROM": "ROU",  # Romania
    "TMP": "TLS",  # East Timor
    "ZAR": "COD",  # Zaire
    "KSV": KOSOVO_ALPHA3,
    "WSB": "PSE",  # West Bank
    "GZS": "PSE",  # Gaza Strip
    "UKG": "GBR",  # United Kingdom in older actor dictionaries
}

# Name variants used by refugee statistics exports and census tables that
# the world-countries alternative spellings do not already cover.
EXTRA_NAMES = {
    "ARE": ["UAE"],
    "BHS": ["Bahamas, The"],
    "BOL": ["Bolivia (Plurinational State of)"],
    "CAF": ["Central African Rep."],
    "CIV": ["Cote d'Ivoire", "Ivory Coast"],
    "COD": ["Dem. Rep. of the Congo", "Congo (Kinshasa)", "DR Congo"],
    "COG": ["Congo (Brazzaville)", "Rep. of the Congo"],
    "CPV": ["Cape Verde"],
    "CZE": ["Czech Republic"],
    "FSM": ["Micronesia, Federated States of"],
    "GBR": ["Britain", "Great Britain"],
    "GMB": ["Gambia, The"],
    "HKG": ["China, Hong Kong SAR", "Hong Kong SAR"],
    "IRN": ["Iran (Islamic Republic of)", "Iran (Islamic Rep. of)"],
    "KOR": ["Rep. of Korea", "Korea, South", "South Korea"],
    "LAO": ["Lao People's Dem. Rep.", "Lao PDR"],
    "MAC": ["China, Macao SAR", "Macao SAR"],
    "MDA": ["Rep. of Moldova"],
    "MKD": ["Macedonia"],
    "MMR": ["Burma"],
    "PRK": ["Dem. People's Rep. of Korea", "Korea, North", "North Korea"],
    "PSE": ["West Bank", "Gaza Strip", "West Bank and Gaza", "Palestine"],
    "RUS": ["Russia"],
    "SWZ": ["Swaziland"],
    "SYR": ["Syrian Arab Rep.", "Syria"],
    "TUR": ["Türkiye", "Turkiye", "Turkey"],
    "TZA": ["United Rep. of Tanzania"],
    "USA": ["United States", "US", "U.S."],
    "VEN": ["Venezuela (Bolivarian Republic of)",
            "Venezuela (Bolivarian Rep. of)"],
    "VNM": ["Viet Nam", "Vietnam"],
    "XKX": ["Kosovo", "UNK", "XK", "Republic of Kosovo"],
}


def load_country_table(path: Path) -> list[dict]:
    entries = json.loads(path.read_text(encoding="utf-8"))
    table = []
    for entry in entries:
        alpha3 = entry["cca3"]
        if alpha3 == "UNK":
            alpha3 = KOSOVO_ALPHA3
        table.append({
            "alpha3": alpha3,
            "ccn3": entry.get("ccn3") or None,
            "name": entry["name"]["common"],
            "official": entry["name"].get("official", ""),
            "alt": entry.get("altSpellings", []),
        })
    return table


def build_registry_rows(table: list[dict]) -> list[tuple[str, str, list[str]]]:
    fips_by_alpha3: dict[str, list[str]] = {}
    for fips, alpha3 in FIPS_TO_ALPHA3.items():
        fips_by_alpha3.setdefault(alpha3, []).append(fips)
    legacy_by_alpha3: dict[str, list[str]] = {}
    for legacy, alpha3 in LEGACY_ALPHA3.items():
        legacy_by_alpha3.setdefault(alpha3, []).append(legacy)

    raw_rows = []
    for entry in table:
        alpha3 = entry["alpha3"]
        aliases = set()
        if entry["official"] and entry["official"] != entry["name"]:
            aliases.add(entry["official"])
        for alt in entry["alt"]:
            # Drop the ISO alpha-2 spellings; two-letter aliases are FIPS.
            if len(alt) == 2 and alt.isupper():
                continue
            if alt != entry["name"]:
                aliases.add(alt)
        aliases.update(fips_by_alpha3.get(alpha3, []))
        aliases.update(legacy_by_alpha3.get(alpha3, []))
        aliases.update(EXTRA_NAMES.get(alpha3, []))
        aliases.discard(entry["name"])
        aliases.discard(alpha3)
        raw_rows.append((alpha3, entry["name"], aliases))

    # An alias is only useful if it resolves to exactly one country. Keep a
    # claim that matches a row's own canonical name; otherwise drop the
    # alias from every claimant.
    claims: dict[str, list[str]] = {}
    canonical_names = {row[1].casefold(): row[0] for row in raw_rows}
    for alpha3, _, aliases in raw_rows:
        for alias in aliases:
            claims.setdefault(alias.casefold(), []).append(alpha3)
    ambiguous = set()
    for key, claimants in claims.items():
        owners = set(claimants)
        if key in canonical_names:
            owners.add(canonical_names[key])
        if len(owners) > 1:
            ambiguous.add(key)
            print(f"  dropping ambiguous alias {key!r} claimed by {sorted(owners)}")

    rows = []
    for alpha3, name, aliases in raw_rows:
        kept = sorted(
            a for a in aliases
            if a.casefold() not in ambiguous
            and (a.casefold() not in canonical_names
                 or canonical_names[a.casefold()] == alpha3)
        )
        rows.append((alpha3, name, kept))
    rows.sort()
    return rows


def write_registry(rows: list[tuple[str, str, list[str]]], path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha3", "name", "aliases"])
        for alpha3, name, aliases in rows:
            writer.writerow([alpha3, name, "|".join(aliases)])
    print(f"wrote {path} ({len(rows)} countries)")


def decode_arcs(topo: dict) -> list[list[tuple[float, float]]]:
    scale_x, scale_y = topo["transform"]["scale"]
    translate_x, translate_y = topo["transform"]["translate"]
    arcs = []
    for arc in topo["arcs"]:
        x = y = 0
        points = []
        for dx, dy in arc:
            x += dx
            y += dy
            points.append((x * scale_x + translate_x, y * scale_y + translate_y))
        arcs.append(points)
    return arcs


def stitch_ring(arc_indexes: list[int], arcs: list[list[tuple[float, float]]],
                precision: int) -> list[list[float]]:
    points: list[tuple[float, float]] = []
    for index in arc_indexes:
        arc = arcs[index] if index >= 0 else list(reversed(arcs[~index]))
        if points:
            arc = arc[1:]  # the join point repeats the previous arc's tail
        points.extend(arc)
    ring: list[list[float]] = []
    for lon, lat in points:
        pt = [round(lon, precision) + 0.0, round(lat, precision) + 0.0]
        if not ring or pt != ring[-1]:
            ring.append(pt)
    if ring and ring[0] != ring[-1]:
        ring.append(list(ring[0]))
    return ring if len(ring) >= 4 else []


def geometry_to_geojson(geom: dict, arcs, precision: int) -> dict | None:
    if geom["type"] == "Polygon":
        rings = [stitch_ring(r, arcs, precision) for r in geom["arcs"]]
        rings = [r for r in rings if r]
        if not rings:
            return None
        return {"type": "Polygon", "coordinates": rings}
    if geom["type"] == "MultiPolygon":
        polygons = []
        for poly in geom["arcs"]:
            rings = [stitch_ring(r, arcs, precision) for r in poly]
            rings = [r for r in rings if r]
            if rings:
                polygons.append(rings)
        if not polygons:
            return None
        if len(polygons) == 1:
            return {"type": "Polygon", "coordinates": polygons[0]}
        return {"type": "MultiPolygon", "coordinates": polygons}
    raise ValueError(f"unexpected geometry type {geom['type']}")


def build_geojson(topo_path: Path, table: list[dict], precision: int) -> dict:
    topo = json.loads(topo_path.read_text(encoding="utf-8"))
    arcs = decode_arcs(topo)
    alpha3_by_ccn3 = {e["ccn3"]: e["alpha3"] for e in table if e["ccn3"]}
    name_by_alpha3 = {e["alpha3"]: e["name"] for e in table}
    # Entities without an ISO numeric id, matched by Natural Earth name.
    by_name = {"Kosovo": KOSOVO_ALPHA3}

    features = []
    skipped = []
    for geom in topo["objects"]["countries"]["geometries"]:
        ne_name = geom.get("properties", {}).get("name", "")
        alpha3 = alpha3_by_ccn3.get(geom.get("id")) or by_name.get(ne_name)
        if alpha3 is None:
            skipped.append(ne_name or geom.get("id"))
            continue
        geometry = geometry_to_geojson(geom, arcs, precision)
        if geometry is None:
            skipped.append(ne_name)
            continue
        features.append({
            "type": "Feature",
            "properties": {
                "alpha3": alpha3,
                "name": name_by_alpha3.get(alpha3, ne_name),
            },
            "geometry": geometry,
        })
    features.sort(key=lambda f: f["properties"]["alpha3"])
    if skipped:
        print(f"  skipped geometries without ISO codes: {skipped}")
    return {"type": "FeatureCollection", "features": features}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--world-atlas", type=Path, required=True,
                        help="path to world-atlas countries-110m.json")
    parser.add_argument("--world-countries", type=Path, required=True,
                        help="path to world-countries countries.json")
    parser.add_argument("--out-dir", type=Path, required=True)
    parser.add_argument("--precision", type=int, default=2,
                        help="coordinate decimal places (default 2)")
    args = parser.parse_args()

    args.out_dir.mkdir(parents=True, exist_ok=True)
    table = load_country_table(args.world_countries)

    rows = build_registry_rows(table)
    write_registry(rows, args.out_dir / "countries.csv")

    collection = build_geojson(args.world_atlas, table, args.precision)
    geo_path = args.out_dir / "world-110m.geojson"
    with geo_path.open("w", encoding="utf-8") as fh:
        json.dump(collection, fh, separators=(",", ":"), sort_keys=True)
    print(f"wrote {geo_path} ({len(collection['features'])} features)")


if __name__ == "__main__":
    main()
