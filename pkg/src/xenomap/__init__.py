"""Map xenophobic event coverage against refugee populations.

The pipeline narrows raw event/mention/knowledge-graph feeds to unique
refugee-related xenophobic events, scales per-country counts by refugee
population share, classifies actions as direct or indirect, and renders
ranked tables plus a world choropleth.
"""

from xenomap.classify import (
    ActionTaxonomy,
    CountryBreakdown,
    breakdown_by_country,
    categorize,
    overall_breakdown,
    percent_pair,
)
from xenomap.countries import (
    Country,
    CountryLookupError,
    CountryRegistry,
    MissingCountryCode,
    UnknownCountryCode,
    bundled_registry,
)
from xenomap.diagnostics import Diagnostic, DiagnosticLog
from xenomap.metrics import (
    compute_country_metrics,
    count_frequencies,
    load_refugee_population,
    load_total_population,
    merge_populations,
    top_n,
)
from xenomap.model import (
    ActionCategory,
    CountryMetrics,
    EventRecord,
    GkgRecord,
    MentionRecord,
    NonNumericRootCode,
    OutOfRangeRootCode,
    PipelineCounters,
    PopulationRecord,
    RootCode,
    RootCodeError,
    parse_root_code,
)
from xenomap.pipeline import (
    CountryStrategy,
    FilteredEvent,
    MatchMode,
    ThemeSet,
    assign_event_country,
    dedupe_events,
    has_ref_actor,
    link_documents_to_events,
    match_gkg_ref,
    run_filter_pipeline,
)
from xenomap.render import (
    ChoroplethDocument,
    ChoroplethEntry,
    build_choropleth,
    bundled_geometry,
    emit_choropleth,
)

__version__ = "0.1.0"

__all__ = [
    "ActionCategory",
    "ActionTaxonomy",
    "ChoroplethDocument",
    "ChoroplethEntry",
    "Country",
    "CountryBreakdown",
    "CountryLookupError",
    "CountryMetrics",
    "CountryRegistry",
    "CountryStrategy",
    "Diagnostic",
    "DiagnosticLog",
    "EventRecord",
    "FilteredEvent",
    "GkgRecord",
    "MatchMode",
    "MentionRecord",
    "MissingCountryCode",
    "NonNumericRootCode",
    "OutOfRangeRootCode",
    "PipelineCounters",
    "PopulationRecord",
    "RootCode",
    "RootCodeError",
    "ThemeSet",
    "UnknownCountryCode",
    "assign_event_country",
    "breakdown_by_country",
    "build_choropleth",
    "bundled_geometry",
    "bundled_registry",
    "categorize",
    "compute_country_metrics",
    "count_frequencies",
    "dedupe_events",
    "emit_choropleth",
    "has_ref_actor",
    "link_documents_to_events",
    "load_refugee_population",
    "load_total_population",
    "match_gkg_ref",
    "merge_populations",
    "overall_breakdown",
    "parse_root_code",
    "percent_pair",
    "run_filter_pipeline",
    "top_n",
]
