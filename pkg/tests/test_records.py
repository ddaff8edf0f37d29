"""Ingestion: parsing, validation, and temporal spreading."""

import io

import numpy as np
import pytest

from urndist import (ConfigError, FindRecord, OutsideWindowError, ParseError,
                     StudyWindow, ValidationError, map_to_intervals,
                     parse_categories, parse_records, scan_records,
                     spread_records)

CATS = ["amphora", "bowl", "plate", "jar"]
HEADER = "key,project,region,category,count,date_start,date_end\n"


def parse(text, cats=CATS):
    return parse_records(io.StringIO(HEADER + text), cats)


def test_single_row_field_mapping():
    (rec,) = parse("r1,P1,etr,bowl,4,-150,-120\n")
    assert rec == FindRecord(key="r1", project="P1", region="etr",
                             category="bowl", count=4.0, date_start=-150,
                             date_end=-120)


def test_unknown_category_names_the_label():
    with pytest.raises(ValidationError, match="chalice"):
        parse("r1,P1,etr,chalice,4,-150,-120\n")


@pytest.mark.parametrize("count", ["0", "-3", "nan", "inf"])
def test_nonpositive_count_rejected(count):
    with pytest.raises(ValidationError, match="count"):
        parse(f"r1,P1,etr,bowl,{count},-150,-120\n")


def test_count_not_a_number_is_parse_error():
    with pytest.raises(ParseError, match="not a number"):
        parse("r1,P1,etr,bowl,four,-150,-120\n")


def test_reversed_dates_rejected_with_line_number():
    with pytest.raises(ValidationError, match="line 3"):
        parse("ok,P1,etr,bowl,1,-150,-120\nr2,P1,etr,bowl,1,-120,-150\n")


def test_non_integer_dates_are_parse_errors():
    with pytest.raises(ParseError, match="signed integer"):
        parse("r1,P1,etr,bowl,1,-150.5,-120\n")


def test_duplicate_key_rejected():
    with pytest.raises(ValidationError, match="duplicate record key"):
        parse("r1,P1,etr,bowl,1,-150,-120\nr1,P2,etr,jar,1,-150,-120\n")


def test_wrong_field_count_is_parse_error_with_line():
    with pytest.raises(ParseError, match="line 2"):
        parse("r1,P1,etr,bowl,4,-150\n")


def test_missing_header_column_rejected():
    bad = "key,project,category,count,date_start,date_end\nr1,P1,bowl,1,-150,-120\n"
    with pytest.raises(ParseError, match="region"):
        parse_records(io.StringIO(bad), CATS)


def test_comments_blanks_and_extra_columns_ignored():
    text = ("# a comment\n"
            "key,project,region,category,count,date_start,date_end,frtype\n"
            "\n"
            "r1,P1,etr,bowl,2.5,-150,-120,rim\n")
    (rec,) = parse_records(io.StringIO(text), CATS)
    assert rec.count == 2.5


def test_header_column_order_is_free():
    text = ("count,key,date_end,date_start,category,region,project\n"
            "7,r9,-120,-150,jar,apu,P3\n")
    (rec,) = parse_records(io.StringIO(text), CATS)
    assert (rec.key, rec.project, rec.count) == ("r9", "P3", 7.0)


def test_scan_collects_all_problems_in_order():
    text = ("r1,P1,etr,bowl,0,-150,-120\n"
            "r2,P1,etr,chalice,1,-150,-120\n"
            "r3,P1,etr,bowl,1,-150,-120\n")
    records, problems = scan_records(io.StringIO(HEADER + text), CATS)
    assert [r.key for r in records] == ["r3"]
    assert [p.line for p in problems] == [2, 3]


def test_file_order_preserved():
    text = "".join(f"r{i},P1,etr,bowl,1,-150,-120\n" for i in range(20))
    records = parse(text)
    assert [r.key for r in records] == [f"r{i}" for i in range(20)]


def test_parse_categories_order_and_errors(tmp_path):
    path = tmp_path / "cats.txt"
    path.write_text("# forms\namphora\nbowl\n\nplate\n")
    assert parse_categories(path) == ["amphora", "bowl", "plate"]
    path.write_text("amphora\namphora\n")
    with pytest.raises(ValidationError, match="duplicate"):
        parse_categories(path)
    path.write_text("amphora\n")
    with pytest.raises(ValidationError, match="at least 2"):
        parse_categories(path)


# --- study window ---------------------------------------------------------

def test_window_defaults_and_interval_count():
    w = StudyWindow()
    assert (w.start_year, w.end_year, w.interval_length) == (-200, 20, 10)
    assert w.interval_count == 22
    assert w.year_range(0) == (-200, -190)
    assert w.year_range(21) == (10, 20)


def test_window_span_must_be_multiple_of_interval():
    with pytest.raises(ConfigError):
        StudyWindow(start_year=-200, end_year=15)
    with pytest.raises(ConfigError):
        StudyWindow(start_year=0, end_year=0)


# --- temporal spreading ---------------------------------------------------

def rec(count, a, b):
    return FindRecord(key="k", project="P", region="r", category="c",
                      count=count, date_start=a, date_end=b)


def test_uniform_split_over_five_intervals():
    w = StudyWindow()
    sp = map_to_intervals(rec(10, -200, -151), w)
    assert (sp.first_interval, sp.last_interval) == (0, 4)
    assert sp.value == 2.0
    dense = sp.per_interval
    assert dense.shape == (22,)
    assert list(dense[:5]) == [2.0] * 5 and dense[5:].sum() == 0


def test_single_year_range_lands_in_one_interval():
    sp = map_to_intervals(rec(4, -155, -155), StudyWindow())
    assert sp.first_interval == sp.last_interval == 4
    assert sp.value == 4.0


def test_clipped_range_spreads_full_count_over_clipped_span():
    # -205..-185 clipped to -200..-185: two intervals, 3.0 each
    sp = map_to_intervals(rec(6, -205, -185), StudyWindow())
    assert (sp.first_interval, sp.last_interval) == (0, 1)
    assert sp.value == 3.0
    assert sp.total == 6.0


def test_range_clipped_at_the_upper_edge():
    sp = map_to_intervals(rec(2, 15, 40), StudyWindow())
    assert sp.first_interval == sp.last_interval == 21
    assert sp.value == 2.0


def test_wholly_outside_window_raises():
    with pytest.raises(OutsideWindowError, match="outside"):
        map_to_intervals(rec(1, -400, -300), StudyWindow())
    with pytest.raises(OutsideWindowError):
        map_to_intervals(rec(1, 20, 50), StudyWindow())  # end_year exclusive


def test_spread_records_separates_skips():
    w = StudyWindow()
    records = [
        FindRecord("a", "P", "r", "bowl", 1, -150, -120),
        FindRecord("b", "P", "r", "bowl", 1, -500, -300),
    ]
    spreads, skipped = spread_records(records, w, {"bowl": 0})
    assert [s.record_key for s in spreads] == ["a"]
    assert [r.key for r in skipped] == ["b"]


def test_spread_properties_random_sweep():
    # conservation, uniformity, and the per-interval cap over random records
    rng = np.random.default_rng(2024)
    w = StudyWindow()
    for _ in range(500):
        a = int(rng.integers(-260, 60))
        b = a + int(rng.integers(0, 120))
        count = float(rng.uniform(0.5, 40))
        r = rec(count, a, b)
        if b < w.start_year or a > w.end_year - 1:
            with pytest.raises(OutsideWindowError):
                map_to_intervals(r, w)
            continue
        sp = map_to_intervals(r, w)
        dense = sp.per_interval
        nz = dense[dense > 0]
        assert abs(dense.sum() - count) <= 1e-9 * count  # mass conserved
        assert np.all(nz == nz[0])                       # uniform spread
        assert nz.max() <= count + 1e-12                 # never exceeds count
        assert 0 <= sp.first_interval <= sp.last_interval < w.interval_count


def test_parsing_is_deterministic():
    text = HEADER + "".join(
        f"r{i},P{i%3},etr,bowl,{i+1},-180,-{150-i}\n" for i in range(50))
    assert parse_records(io.StringIO(text), CATS) == \
        parse_records(io.StringIO(text), CATS)
