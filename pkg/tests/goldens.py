"""Hand-built feed lines with their expected parses, plus line builders.

The builders fill a full-width row with empty columns and set only the
named ones, which keeps fixtures readable while staying faithful to the
real tab-separated layouts (61 columns for events, 16 for mentions, 27
for the knowledge graph).
"""

from datetime import date, datetime

from xenomap.model import EventRecord, GkgRecord, MentionRecord, RootCode

EVENT_WIDTH = 61
MENTIONS_WIDTH = 16
GKG_WIDTH = 27


def make_row(width: int, values: dict[int, str]) -> str:
    columns = [""] * width
    for index, value in values.items():
        columns[index] = value
    return "\t".join(columns)


def make_event_line(event_id="1023456789", event_date="20220314",
                    actor1_code="", actor1_country="", actor2_code="",
                    actor2_country="", root="", action_geo="",
                    date_added="20220314151500", url="", **extra_cols) -> str:
    values = {
        0: event_id,
        1: event_date,
        5: actor1_code,
        7: actor1_country,
        15: actor2_code,
        17: actor2_country,
        28: root,
        59: date_added,
        60: url,
        53: action_geo,
    }
    for key, value in extra_cols.items():
        values[int(key)] = value
    return make_row(EVENT_WIDTH, values)


def make_mention_line(event_id="1023456789", identifier="", tone="-3.5",
                      **extra_cols) -> str:
    values = {0: event_id, 5: identifier, 13: tone}
    for key, value in extra_cols.items():
        values[int(key)] = value
    return make_row(MENTIONS_WIDTH, values)


def make_gkg_line(record_id="20220314151500-123", identifier="", themes="",
                  **extra_cols) -> str:
    values = {0: record_id, 4: identifier, 8: themes}
    for key, value in extra_cols.items():
        values[int(key)] = value
    return make_row(GKG_WIDTH, values)


# A realistic event row: a protest (root 14) with a refugee first actor in
# the United States. Non-mapped columns carry plausible values to prove the
# parser ignores them.
GOLDEN_EVENT_LINE = make_row(EVENT_WIDTH, {
    0: "1023456789",
    1: "20220314",
    2: "202203",
    3: "2022",
    4: "2022.1973",
    5: "REF",
    6: "REFUGEE",
    7: "USA",
    15: "USAGOV",
    16: "UNITED STATES",
    17: "USA",
    25: "1",
    26: "1411",
    27: "141",
    28: "14",
    29: "3",
    30: "-6.5",
    31: "10",
    32: "2",
    33: "10",
    34: "-4.25",
    35: "3",
    36: "Phoenix, Arizona, United States",
    37: "US",
    38: "USAZ",
    40: "33.4484",
    41: "-112.074",
    42: "44784",
    51: "3",
    52: "Phoenix, Arizona, United States",
    53: "US",
    54: "USAZ",
    56: "33.4484",
    57: "-112.074",
    58: "44784",
    59: "20220314151500",
    60: "https://example.com/news/refugee-protest",
})

GOLDEN_EVENT_RECORD = EventRecord(
    global_event_id=1023456789,
    event_date=date(2022, 3, 14),
    actor1_code="REF",
    actor2_code="USAGOV",
    actor1_country="USA",
    actor2_country="USA",
    event_root_code=RootCode(14),
    action_geo_country="US",
    date_added=datetime(2022, 3, 14, 15, 15, 0),
    source_url="https://example.com/news/refugee-protest",
)

GOLDEN_MENTION_LINE = make_row(MENTIONS_WIDTH, {
    0: "1023456789",
    1: "20220314151500",
    2: "20220314151500",
    3: "1",
    4: "example.com",
    5: "https://example.com/news/refugee-protest",
    6: "2",
    7: "120",
    8: "240",
    9: "180",
    10: "1",
    11: "80",
    12: "3800",
    13: "-3.5",
})

GOLDEN_MENTION_RECORD = MentionRecord(
    global_event_id=1023456789,
    mention_identifier="https://example.com/news/refugee-protest",
    mention_tone=-3.5,
)

GOLDEN_GKG_LINE = make_row(GKG_WIDTH, {
    0: "20220314151500-123",
    1: "20220314151500",
    2: "1",
    3: "example.com",
    4: "https://example.com/news/refugee-protest",
    7: "DISCRIMINATION_IMMIGRATION_XENOPHOBIA;UNHCR;",
    8: "DISCRIMINATION_IMMIGRATION_XENOPHOBIA,432;UNHCR,88;",
    15: "-4.25,2.1,6.35,8.46,21.2,0,387",
    17: "wc:387,c12.1:5",
})

GOLDEN_GKG_RECORD = GkgRecord(
    gkg_record_id="20220314151500-123",
    document_identifier="https://example.com/news/refugee-protest",
    themes=(("DISCRIMINATION_IMMIGRATION_XENOPHOBIA", 432), ("UNHCR", 88)),
)

# Master list lines in the published "size md5 url" shape, including one
# malformed entry that should be counted and skipped.
MASTER_LIST_TEXT = "\n".join([
    "145824 ab54d495d59e09b3c9e4471a2089bc12"
    " http://data.example.org/gdeltv2/20220314151500.export.CSV.zip",
    "88231 bb54d495d59e09b3c9e4471a2089bc34"
    " http://data.example.org/gdeltv2/20220314151500.mentions.CSV.zip",
    "301299 cb54d495d59e09b3c9e4471a2089bc56"
    " http://data.example.org/gdeltv2/20220314151500.gkg.csv.zip",
    "145000 db54d495d59e09b3c9e4471a2089bc78"
    " http://data.example.org/gdeltv2/20220314153000.export.CSV.zip",
    "101500 eb54d495d59e09b3c9e4471a2089bc90"
    " http://data.example.org/gdeltv2/20220314153000.translation.export.CSV.zip",
    "populated-wrong-line-without-three-fields",
    "99000 fb54d495d59e09b3c9e4471a2089bcab"
    " http://data.example.org/gdeltv2/20220314154500.gkg.csv.zip",
])
