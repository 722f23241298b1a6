"""Choropleth and table rendering.

The choropleth pairs a bundled low-resolution world boundary file with the
per-country results: fill color runs from light blue (lowest scaled
frequency) to dark purple (highest), countries without data stay gray.
Output is deterministic byte for byte; there are no timestamps and every
collection is emitted in sorted order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from xenomap.classify import CountryBreakdown
from xenomap.countries import CountryRegistry, bundled_registry
from xenomap.diagnostics import DiagnosticLog
from xenomap.model import CountryMetrics

COLOR_LOW = (0xBF, 0xE3, 0xF0)   # light blue
COLOR_HIGH = (0x3B, 0x0F, 0x70)  # dark purple
COLOR_NO_DATA = "#cccccc"        # gray

SVG_WIDTH = 960
SVG_HEIGHT = 480


@lru_cache(maxsize=1)
def bundled_geometry() -> dict:
    """The world boundary FeatureCollection shipped with the package."""
    ref = resources.files("xenomap").joinpath("data/world-110m.geojson")
    with ref.open(encoding="utf-8") as fh:
        return json.load(fh)


@dataclass(frozen=True)
class ChoroplethEntry:
    scaled_frequency: float
    frequency: int
    direct: int
    indirect: int


@dataclass(frozen=True)
class ChoroplethDocument:
    """Per-country map data plus the color scale bounds."""

    entries: Mapping[str, ChoroplethEntry]
    scale_min: float
    scale_max: float

    def intensity(self, scaled_frequency: float) -> float:
        """Position of a value on the color scale, 0 (low) to 1 (high)."""
        span = self.scale_max - self.scale_min
        if span <= 0:
            return 1.0 if scaled_frequency > 0 else 0.0
        t = (scaled_frequency - self.scale_min) / span
        return min(1.0, max(0.0, t))


def color_for_intensity(t: float) -> str:
    """Linear blend from light blue to dark purple, as #rrggbb."""
    t = min(1.0, max(0.0, t))
    channels = (round(lo + t * (hi - lo))
                for lo, hi in zip(COLOR_LOW, COLOR_HIGH))
    return "#" + "".join(f"{c:02x}" for c in channels)


def build_choropleth(metrics: Iterable[CountryMetrics],
                     breakdowns: Iterable[CountryBreakdown] = (),
                     include_zero_countries: Iterable[str] = ()
                     ) -> ChoroplethDocument:
    """Assemble map entries from metrics plus optional breakdown counts.

    ``include_zero_countries`` adds countries that had population data but
    no events, pinned at the bottom of the color scale.
    """
    by_country = {b.country: b for b in breakdowns}
    entries: dict[str, ChoroplethEntry] = {}
    for m in metrics:
        b = by_country.get(m.country)
        entries[m.country] = ChoroplethEntry(
            scaled_frequency=m.scaled_frequency,
            frequency=m.frequency,
            direct=b.direct if b else 0,
            indirect=b.indirect if b else 0,
        )
    for country in include_zero_countries:
        entries.setdefault(country, ChoroplethEntry(0.0, 0, 0, 0))
    values = [e.scaled_frequency for e in entries.values()]
    return ChoroplethDocument(
        entries=dict(sorted(entries.items())),
        scale_min=min(values) if values else 0.0,
        scale_max=max(values) if values else 0.0,
    )


def _project(lon: float, lat: float) -> tuple[float, float]:
    x = (lon + 180.0) * SVG_WIDTH / 360.0
    y = (90.0 - lat) * SVG_HEIGHT / 180.0
    return x, y


def _svg_path(geometry: dict) -> str:
    polygons = (geometry["coordinates"]
                if geometry["type"] == "MultiPolygon"
                else [geometry["coordinates"]])
    parts = []
    for rings in polygons:
        for ring in rings:
            points = []
            for lon, lat in ring:
                x, y = _project(lon, lat)
                points.append(f"{x:.2f},{y:.2f}")
            parts.append("M" + "L".join(points) + "Z")
    return "".join(parts)


def _feature_fill(doc: ChoroplethDocument, alpha3: str) -> tuple[str, float | None]:
    entry = doc.entries.get(alpha3)
    if entry is None:
        return COLOR_NO_DATA, None
    t = doc.intensity(entry.scaled_frequency)
    return color_for_intensity(t), t


def render_geojson(doc: ChoroplethDocument, geometry: dict) -> str:
    """The map as GeoJSON with per-feature styling properties."""
    features = []
    for feature in sorted(geometry.get("features", []),
                          key=lambda f: f["properties"]["alpha3"]):
        alpha3 = feature["properties"]["alpha3"]
        fill, t = _feature_fill(doc, alpha3)
        entry = doc.entries.get(alpha3)
        properties = {
            "alpha3": alpha3,
            "name": feature["properties"].get("name", alpha3),
            "fill": fill,
            "has_data": entry is not None,
            "scaled_frequency":
                round(entry.scaled_frequency, 6) if entry else None,
            "frequency": entry.frequency if entry else None,
            "direct": entry.direct if entry else None,
            "indirect": entry.indirect if entry else None,
            "intensity": round(t, 6) if t is not None else None,
        }
        features.append({
            "type": "Feature",
            "properties": properties,
            "geometry": feature["geometry"],
        })
    collection = {"type": "FeatureCollection", "features": features}
    return json.dumps(collection, sort_keys=True, separators=(",", ":"))


def render_svg(doc: ChoroplethDocument, geometry: dict,
               title: str = "Scaled event frequency by country") -> str:
    """The map as a standalone SVG string."""
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT + 40}" '
        f'width="{SVG_WIDTH}" height="{SVG_HEIGHT + 40}">',
        f'<rect width="{SVG_WIDTH}" height="{SVG_HEIGHT + 40}" fill="#ffffff"/>',
        f'<title>{title}</title>',
    ]
    for feature in sorted(geometry.get("features", []),
                          key=lambda f: f["properties"]["alpha3"]):
        alpha3 = feature["properties"]["alpha3"]
        fill, _ = _feature_fill(doc, alpha3)
        entry = doc.entries.get(alpha3)
        name = feature["properties"].get("name", alpha3)
        if entry is None:
            tip = f"{name}: no data"
        else:
            tip = (f"{name}: scaled frequency {entry.scaled_frequency:.2f}, "
                   f"{entry.frequency} events")
        path = _svg_path(feature["geometry"])
        lines.append(
            f'<path d="{path}" fill="{fill}" stroke="#ffffff" '
            f'stroke-width="0.4"><title>{_escape(tip)}</title></path>')
    lines.extend(_legend())
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _legend() -> list[str]:
    lines = [f'<g transform="translate(10,{SVG_HEIGHT + 8})">']
    steps = 6
    for i in range(steps):
        color = color_for_intensity(i / (steps - 1))
        lines.append(f'<rect x="{i * 24}" y="0" width="24" height="12" '
                     f'fill="{color}"/>')
    lines.append(f'<rect x="{steps * 24 + 12}" y="0" width="24" height="12" '
                 f'fill="{COLOR_NO_DATA}"/>')
    lines.append(f'<text x="0" y="24" font-size="10" '
                 f'font-family="sans-serif">low</text>')
    lines.append(f'<text x="{steps * 24 - 20}" y="24" font-size="10" '
                 f'font-family="sans-serif">high</text>')
    lines.append(f'<text x="{steps * 24 + 12}" y="24" font-size="10" '
                 f'font-family="sans-serif">no data</text>')
    lines.append("</g>")
    return lines


def emit_choropleth(doc: ChoroplethDocument,
                    out_geojson: Path | str,
                    out_svg: Path | str,
                    geometry: dict | None = None,
                    diagnostics: DiagnosticLog | None = None) -> None:
    """Write the GeoJSON and SVG artifacts for a choropleth document.

    Entries with no matching boundary are reported; boundaries with no
    entry simply render gray.
    """
    geometry = geometry if geometry is not None else bundled_geometry()
    diagnostics = diagnostics if diagnostics is not None else DiagnosticLog()
    known = {f["properties"]["alpha3"] for f in geometry.get("features", [])}
    for alpha3 in sorted(set(doc.entries) - known):
        diagnostics.record("geometry_key_mismatch", detail=alpha3)
    Path(out_geojson).write_text(render_geojson(doc, geometry) + "\n",
                                 encoding="utf-8")
    Path(out_svg).write_text(render_svg(doc, geometry), encoding="utf-8")


# --- tables ---------------------------------------------------------------

RANKED_COLUMNS = ["CC", "F", "RP", "TP", "RT", "ScaledFrequency"]


def ranked_table_rows(ranked: Iterable[CountryMetrics]) -> list[list[str]]:
    """Display-rounded rows: ratio to 4 decimals, scaled frequency to 2."""
    return [[m.country, str(m.frequency), str(m.refugee_population),
             str(m.total_population), f"{m.refugee_ratio:.4f}",
             f"{m.scaled_frequency:.2f}"]
            for m in ranked]


def write_ranked_csv(path: Path | str,
                     ranked: Iterable[CountryMetrics]) -> None:
    lines = [",".join(RANKED_COLUMNS)]
    lines += [",".join(row) for row in ranked_table_rows(ranked)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_ranked_markdown(path: Path | str, ranked: Iterable[CountryMetrics],
                          registry: CountryRegistry | None = None) -> None:
    registry = registry if registry is not None else bundled_registry()
    lines = [
        "| Country | Events | Refugee population | Total population "
        "| Refugee ratio | Scaled frequency |",
        "| --- | ---: | ---: | ---: | ---: | ---: |",
    ]
    for m in ranked:
        name = registry.name_of(m.country) if m.country in registry else m.country
        lines.append(
            f"| {name} ({m.country}) | {m.frequency} "
            f"| {m.refugee_population:,} | {m.total_population:,} "
            f"| {m.refugee_ratio:.4f} | {m.scaled_frequency:,.2f} |")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_breakdown_markdown(path: Path | str,
                             breakdowns: Iterable[CountryBreakdown],
                             registry: CountryRegistry | None = None,
                             total_row: CountryBreakdown | None = None) -> None:
    """Country rows in the given order, cells in "count (pct%)" style."""
    registry = registry if registry is not None else bundled_registry()
    lines = [
        "| Country | Indirect | Direct | Total |",
        "| --- | ---: | ---: | ---: |",
    ]

    def cell(b: CountryBreakdown) -> str:
        direct_pct, indirect_pct = b.percentages
        return (f"| {{name}} | {b.indirect} ({indirect_pct}%) "
                f"| {b.direct} ({direct_pct}%) | {b.total} |")

    for b in breakdowns:
        name = registry.name_of(b.country) if b.country in registry else b.country
        lines.append(cell(b).format(name=f"{name} ({b.country})"))
    if total_row is not None:
        lines.append(cell(total_row).format(name="All countries"))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
