"""Ingestion: parse find records, assign category indices, spread counts over
decade intervals.

Input format
------------
Records arrive as UTF-8 comma-delimited text with a header row naming at
least ``key,project,region,category,count,date_start,date_end`` (extra
columns are ignored, column order is free).  Lines whose first non-blank
character is ``#`` are comments.  A separate parameterization file lists one
category label per line; the line order defines the category index.

Dates are signed years (BCE negative) on a plain integer timeline with no
year-zero correction.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence, TextIO

import numpy as np

from .errors import OutsideWindowError, ParseError, ValidationError

REQUIRED_COLUMNS = ("key", "project", "region", "category", "count",
                    "date_start", "date_end")


@dataclass(frozen=True, slots=True)
class FindRecord:
    """One quantified observation: a counted, categorized, dated find."""

    key: str
    project: str
    region: str
    category: str
    count: float
    date_start: int
    date_end: int


@dataclass(frozen=True)
class StudyWindow:
    """Contiguous span of equal-length year intervals.

    Interval ``j`` (0-based) covers the years
    ``[start_year + j*interval_length, start_year + (j+1)*interval_length)``.
    """

    start_year: int = -200
    end_year: int = 20
    interval_length: int = 10

    def __post_init__(self):
        from .errors import ConfigError

        if self.interval_length < 1:
            raise ConfigError("interval_length must be a positive integer")
        span = self.end_year - self.start_year
        if span <= 0:
            raise ConfigError("end_year must be greater than start_year")
        if span % self.interval_length != 0:
            raise ConfigError(
                f"window span {span} is not a multiple of the interval "
                f"length {self.interval_length}"
            )

    @property
    def interval_count(self) -> int:
        return (self.end_year - self.start_year) // self.interval_length

    def interval_of(self, year: int) -> int:
        """Interval index of a year; may fall outside [0, interval_count)."""
        return (year - self.start_year) // self.interval_length

    def year_range(self, j: int) -> tuple[int, int]:
        """Inclusive first year and exclusive last year of interval ``j``."""
        lo = self.start_year + j * self.interval_length
        return lo, lo + self.interval_length


@dataclass(frozen=True)
class TemporalSpread:
    """A record's count divided uniformly over the intervals it covers.

    The spread is uniform, so it is stored as the covered index range plus
    the constant per-interval value.  ``per_interval`` materializes the dense
    length-J vector.
    """

    record_key: str
    category_index: int
    first_interval: int
    last_interval: int
    value: float
    interval_count: int

    @property
    def total(self) -> float:
        return self.value * (self.last_interval - self.first_interval + 1)

    @property
    def per_interval(self) -> np.ndarray:
        out = np.zeros(self.interval_count)
        out[self.first_interval:self.last_interval + 1] = self.value
        return out


def parse_categories(source: str | Path | TextIO) -> list[str]:
    """Read a parameterization file: one category label per line.

    Blank lines and ``#`` comments are skipped.  Order defines the category
    index.  Duplicate labels are rejected.
    """
    close = False
    if isinstance(source, (str, Path)):
        source = open(source, encoding="utf-8")
        close = True
    try:
        labels: list[str] = []
        seen = set()
        for lineno, raw in enumerate(source, start=1):
            label = raw.strip()
            if not label or label.startswith("#"):
                continue
            if label in seen:
                raise ValidationError(f"duplicate category label {label!r}",
                                      line=lineno)
            seen.add(label)
            labels.append(label)
    finally:
        if close:
            source.close()
    if len(labels) < 2:
        raise ValidationError(
            f"a parameterization needs at least 2 categories, got {len(labels)}"
        )
    return labels


def _open_text(source) -> tuple[TextIO, bool]:
    """Paths are opened; anything else is treated as a text stream."""
    if isinstance(source, (str, Path)):
        return open(source, encoding="utf-8", newline=""), True
    return source, False


def iter_record_rows(
    source: str | Path | TextIO,
    categories: Sequence[str],
) -> Iterator[tuple[int, FindRecord | Exception]]:
    """Yield ``(line_number, FindRecord)`` per data row, or the error raised
    by that row in place of the record.

    Strict callers re-raise on the first error; ``scan_records`` collects all
    of them for the validation report.  Rows are parsed line by line, so
    quoted fields must not contain newlines.
    """
    stream, close = _open_text(source)
    category_set = set(categories)
    seen_keys: set[str] = set()
    header = None
    try:
        for lineno, raw in enumerate(stream, start=1):
            if not raw.strip() or raw.lstrip().startswith("#"):
                continue
            row = next(csv.reader([raw]))
            if header is None:
                header = [c.strip().lower() for c in row]
                missing = [c for c in REQUIRED_COLUMNS if c not in header]
                if missing:
                    yield lineno, ParseError(
                        "header is missing required columns: "
                        + ", ".join(missing),
                        line=lineno,
                    )
                    return
                continue
            yield lineno, _parse_row(row, header, lineno, category_set,
                                     seen_keys)
        if header is None:
            yield 0, ParseError("input contains no header row")
    finally:
        if close:
            stream.close()


def _parse_row(row, header, lineno, category_set, seen_keys):
    if len(row) != len(header):
        return ParseError(
            f"expected {len(header)} fields, got {len(row)}", line=lineno
        )
    fields = dict(zip(header, (c.strip() for c in row)))

    key = fields["key"]
    if not key:
        return ValidationError("empty record key", line=lineno)
    if key in seen_keys:
        return ValidationError("duplicate record key", line=lineno, key=key)

    for name in ("project", "region"):
        if not fields[name]:
            return ValidationError(f"empty {name} field", line=lineno, key=key)

    category = fields["category"]
    if category not in category_set:
        return ValidationError(
            f"unknown category {category!r}; not in the declared "
            f"parameterization ({len(category_set)} labels)",
            line=lineno, key=key,
        )

    try:
        count = float(fields["count"])
    except ValueError:
        return ParseError(f"count {fields['count']!r} is not a number",
                          line=lineno)
    if not math.isfinite(count) or count <= 0:
        return ValidationError(f"count must be > 0, got {fields['count']}",
                               line=lineno, key=key)

    try:
        date_start = int(fields["date_start"])
        date_end = int(fields["date_end"])
    except ValueError:
        return ParseError(
            f"dates must be signed integer years, got "
            f"{fields['date_start']!r}..{fields['date_end']!r}",
            line=lineno,
        )
    if date_end < date_start:
        return ValidationError(
            f"date_end {date_end} precedes date_start {date_start}",
            line=lineno, key=key,
        )

    seen_keys.add(key)
    return FindRecord(key=key, project=fields["project"],
                      region=fields["region"], category=category,
                      count=count, date_start=date_start, date_end=date_end)


def parse_records(
    source: str | Path | TextIO,
    categories: Sequence[str],
) -> list[FindRecord]:
    """Parse and validate all records; raise on the first bad row.

    File order is preserved: it is the canonical pre-permutation order.
    """
    records = []
    for _, item in iter_record_rows(source, categories):
        if isinstance(item, Exception):
            raise item
        records.append(item)
    return records


def scan_records(
    source: str | Path | TextIO,
    categories: Sequence[str],
) -> tuple[list[FindRecord], list[Exception]]:
    """Parse all rows, collecting every problem instead of raising."""
    records, problems = [], []
    for _, item in iter_record_rows(source, categories):
        if isinstance(item, Exception):
            problems.append(item)
        else:
            records.append(item)
    return records, problems


def map_to_intervals(
    record: FindRecord,
    window: StudyWindow,
    category_index: dict[str, int] | Sequence[str] | None = None,
) -> TemporalSpread:
    """Spread a record's count uniformly over the intervals its date range
    covers.

    The date range is clipped to the window first; the whole count is then
    divided evenly over the clipped span, so each covered interval receives
    ``count / (number of covered intervals)``.  A range wholly outside the
    window raises :class:`OutsideWindowError` (skip-with-warning signal).
    """
    if isinstance(category_index, dict):
        cat_idx = category_index[record.category]
    elif category_index is not None:
        cat_idx = list(category_index).index(record.category)
    else:
        cat_idx = 0

    last_year = window.end_year - 1
    lo = max(record.date_start, window.start_year)
    hi = min(record.date_end, last_year)
    if lo > hi:
        raise OutsideWindowError(record.key, record.date_start,
                                 record.date_end, window)
    j_a = window.interval_of(lo)
    j_b = window.interval_of(hi)
    span = j_b - j_a + 1
    return TemporalSpread(
        record_key=record.key,
        category_index=cat_idx,
        first_interval=j_a,
        last_interval=j_b,
        value=record.count / span,
        interval_count=window.interval_count,
    )


def spread_records(
    records: Iterable[FindRecord],
    window: StudyWindow,
    category_index: dict[str, int],
) -> tuple[list[TemporalSpread], list[FindRecord]]:
    """Spread many records; out-of-window records are returned separately."""
    spreads, skipped = [], []
    for rec in records:
        try:
            spreads.append(map_to_intervals(rec, window, category_index))
        except OutsideWindowError:
            skipped.append(rec)
    return spreads, skipped
