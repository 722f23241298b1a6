from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import pytest
from hypothesis import given
from hypothesis import strategies as st

from xenomap.classify import (
    DIRECT_ROOT_VALUES,
    INDIRECT_ROOT_VALUES,
    ROOT_CODE_LABELS,
    ActionTaxonomy,
    CountryBreakdown,
    breakdown_by_country,
    categorize,
    overall_breakdown,
    percent_pair,
    read_breakdown_csv,
    write_breakdown_csv,
)
from xenomap.model import ActionCategory, RootCode


@dataclass
class Event:
    country: str
    event_root_code: Optional[RootCode]


class TestTaxonomy:
    def test_partition_is_exhaustive_and_disjoint(self):
        assert DIRECT_ROOT_VALUES | INDIRECT_ROOT_VALUES == set(range(1, 21))
        assert DIRECT_ROOT_VALUES & INDIRECT_ROOT_VALUES == frozenset()
        assert set(ROOT_CODE_LABELS) == set(range(1, 21))

    def test_default_taxonomy(self):
        taxonomy = ActionTaxonomy.default()
        assert taxonomy.direct == DIRECT_ROOT_VALUES
        assert taxonomy.indirect == INDIRECT_ROOT_VALUES

    def test_overlapping_categories_rejected(self):
        with pytest.raises(ValueError, match="both categories"):
            ActionTaxonomy(frozenset({9, 10, 11}),
                           INDIRECT_ROOT_VALUES)

    def test_missing_code_rejected(self):
        with pytest.raises(ValueError, match="missing \\[20\\]"):
            ActionTaxonomy(DIRECT_ROOT_VALUES - {20}, INDIRECT_ROOT_VALUES)

    def test_out_of_range_code_rejected(self):
        with pytest.raises(ValueError, match="extra \\[21\\]"):
            ActionTaxonomy(DIRECT_ROOT_VALUES | {21}, INDIRECT_ROOT_VALUES)

    @pytest.mark.parametrize("value", sorted(INDIRECT_ROOT_VALUES))
    def test_statement_style_codes_are_indirect(self, value):
        assert categorize(RootCode(value)) is ActionCategory.INDIRECT

    @pytest.mark.parametrize("value", sorted(DIRECT_ROOT_VALUES))
    def test_confrontation_style_codes_are_direct(self, value):
        assert categorize(RootCode(value)) is ActionCategory.DIRECT

    def test_custom_taxonomy_changes_category(self):
        flipped = ActionTaxonomy(INDIRECT_ROOT_VALUES, DIRECT_ROOT_VALUES)
        assert categorize(RootCode(1), flipped) is ActionCategory.DIRECT


class TestPercentPair:
    @pytest.mark.parametrize("direct, indirect, expected", [
        (0, 0, (0, 0)),
        (1, 1, (50, 50)),
        (9, 8, (53, 47)),
        (298, 56, (84, 16)),
        (0, 9, (0, 100)),
        (9, 0, (100, 0)),
        (2418, 360, (87, 13)),
    ])
    def test_known_pairs(self, direct, indirect, expected):
        assert percent_pair(direct, indirect) == expected

    @given(st.integers(0, 100_000), st.integers(0, 100_000))
    def test_matches_half_up_rounding(self, direct, indirect):
        direct_pct, indirect_pct = percent_pair(direct, indirect)
        total = direct + indirect
        if total == 0:
            assert (direct_pct, indirect_pct) == (0, 0)
            return
        expected = int(Fraction(100 * direct, total) + Fraction(1, 2))
        assert direct_pct == expected
        assert direct_pct + indirect_pct == 100
        assert 0 <= direct_pct <= 100


class TestCountryBreakdown:
    def test_total_excludes_unclassified(self):
        b = CountryBreakdown("USA", direct=3, indirect=1, unclassified=2)
        assert b.total == 4
        assert b.percentages == (75, 25)

    def test_negative_counts_rejected(self):
        with pytest.raises(ValueError, match="negative"):
            CountryBreakdown("USA", direct=-1, indirect=0)

    def test_unclassified_defaults_to_zero(self):
        assert CountryBreakdown("USA", 1, 1).unclassified == 0


class TestBreakdownByCountry:
    def test_counts_and_sorting(self):
        events = [
            Event("USA", RootCode(14)),   # protest: direct
            Event("USA", RootCode(1)),    # statement: indirect
            Event("USA", None),           # unparseable root
            Event("DEU", RootCode(18)),   # assault: direct
        ]
        out = breakdown_by_country(events)
        assert out == [
            CountryBreakdown("DEU", direct=1, indirect=0),
            CountryBreakdown("USA", direct=1, indirect=1, unclassified=1),
        ]

    def test_empty(self):
        assert breakdown_by_country([]) == []

    def test_overall_sums_everything(self):
        rows = [CountryBreakdown("DEU", 1, 0),
                CountryBreakdown("USA", 2, 3, unclassified=1)]
        total = overall_breakdown(rows)
        assert total == CountryBreakdown("TOTAL", 3, 3, unclassified=1)
        assert overall_breakdown([], label="ALL").country == "ALL"


class TestBreakdownCsv:
    def test_round_trip(self, tmp_path):
        rows = [CountryBreakdown("DEU", 1, 0),
                CountryBreakdown("USA", 2, 3, unclassified=1)]
        path = tmp_path / "breakdown.csv"
        write_breakdown_csv(path, rows)
        assert read_breakdown_csv(path) == rows

    def test_written_columns(self, tmp_path):
        path = tmp_path / "breakdown.csv"
        write_breakdown_csv(path, [CountryBreakdown("USA", 3, 1)])
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "CC,Indirect,Direct,Total,Unclassified,IndirectPct,DirectPct"
        assert lines[1] == "USA,1,3,4,0,25,75"

    def test_missing_columns_rejected(self, tmp_path):
        path = tmp_path / "breakdown.csv"
        path.write_text("CC,Direct\nUSA,1\n", encoding="utf-8")
        with pytest.raises(ValueError, match="missing columns"):
            read_breakdown_csv(path)

    def test_unclassified_column_optional_on_read(self, tmp_path):
        path = tmp_path / "breakdown.csv"
        path.write_text("CC,Indirect,Direct\nUSA,1,3\n", encoding="utf-8")
        assert read_breakdown_csv(path) == [CountryBreakdown("USA", 3, 1)]
