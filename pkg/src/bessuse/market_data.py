"""Hourly market price ingestion, validation and alignment.

Canonical CSV schema: header ``timestamp,price,zone,kind`` with ISO-8601 UTC
timestamps, ``.`` decimal separator, UTF-8. Raw exports with other column
names can be adapted through a :class:`CsvSchema` mapping.

Negative prices are valid input throughout: European day-ahead prices go
negative in high-renewables hours and the payoff max-operator downstream
handles them naturally.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone
from enum import Enum
from math import isfinite
from pathlib import Path
from typing import Iterable, Sequence
from zoneinfo import ZoneInfo

from .errors import (
    CurrencyMismatch,
    DuplicateTimestamp,
    MalformedRow,
    NonMonotonicTimestamp,
    WrongKind,
)

HOUR = timedelta(hours=1)

KNOWN_CURRENCIES = frozenset({"EUR", "GBP", "NOK", "DKK", "SEK", "CHF", "PLN"})


class PriceKind(str, Enum):
    DAY_AHEAD_ENERGY = "day_ahead_energy"
    RESERVE_CAPACITY = "reserve_capacity"


_KIND_ALIASES = {
    "day_ahead_energy": PriceKind.DAY_AHEAD_ENERGY,
    "dayahead": PriceKind.DAY_AHEAD_ENERGY,
    "energy": PriceKind.DAY_AHEAD_ENERGY,
    "reserve_capacity": PriceKind.RESERVE_CAPACITY,
    "capacity": PriceKind.RESERVE_CAPACITY,
}


def parse_kind(text: str) -> PriceKind:
    try:
        return _KIND_ALIASES[text.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown price kind {text!r}") from None


@dataclass(frozen=True)
class BiddingZone:
    """One wholesale price area, e.g. FR, DK1, IT-Centre-South, GB."""

    code: str
    currency: str = "EUR"

    def __post_init__(self):
        if not self.code:
            raise ValueError("zone code must be non-empty")
        if self.currency not in KNOWN_CURRENCIES:
            raise ValueError(f"unknown currency {self.currency!r}")


@dataclass(frozen=True)
class CurrencyRate:
    from_currency: str
    to_currency: str
    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError("conversion rate must be positive")


@dataclass(frozen=True)
class PriceSeries:
    """Immutable hourly price series for one zone and one price kind.

    Prices are currency/MWh for energy and currency/MW/h for capacity.
    Timestamps are strictly increasing, hour-aligned, UTC.
    """

    zone: BiddingZone
    kind: PriceKind
    points: tuple[tuple[datetime, float], ...]

    def __post_init__(self):
        prev = None
        for ts, price in self.points:
            if ts.tzinfo is None or ts.utcoffset() != timedelta(0):
                raise ValueError(f"timestamp {ts} is not UTC")
            if ts.minute or ts.second or ts.microsecond:
                raise ValueError(f"timestamp {ts} is not hour-aligned")
            if prev is not None:
                if ts == prev:
                    raise DuplicateTimestamp(ts)
                if ts < prev:
                    raise NonMonotonicTimestamp(ts)
            if not isfinite(price):
                raise ValueError(f"non-finite price at {ts}")
            prev = ts

    def __len__(self) -> int:
        return len(self.points)

    def timestamps(self) -> tuple[datetime, ...]:
        return tuple(ts for ts, _ in self.points)

    def prices(self) -> tuple[float, ...]:
        return tuple(p for _, p in self.points)

    def price_at(self) -> dict[datetime, float]:
        return dict(self.points)

    def slice(self, start: datetime, end: datetime) -> "PriceSeries":
        """Points with start <= ts <= end."""
        pts = tuple(p for p in self.points if start <= p[0] <= end)
        return PriceSeries(self.zone, self.kind, pts)


@dataclass(frozen=True)
class CsvSchema:
    """Maps source CSV columns onto the canonical ones.

    ``timestamp_format`` is a ``strptime`` pattern; ``None`` means ISO-8601
    (a trailing ``Z`` is accepted). Naive timestamps are taken as UTC.
    """

    timestamp_col: str = "timestamp"
    price_col: str = "price"
    zone_col: str | None = "zone"
    kind_col: str | None = "kind"
    timestamp_format: str | None = None

    @classmethod
    def from_file(cls, path: str | Path) -> "CsvSchema":
        """Load a mapping from a small ``key=value`` or JSON file."""
        text = Path(path).read_text(encoding="utf-8").strip()
        if text.startswith("{"):
            raw = json.loads(text)
        else:
            raw = {}
            for line in text.splitlines():
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, _, value = line.partition("=")
                raw[key.strip()] = value.strip() or None
        allowed = {"timestamp_col", "price_col", "zone_col", "kind_col", "timestamp_format"}
        unknown = set(raw) - allowed
        if unknown:
            raise ValueError(f"unknown schema keys: {sorted(unknown)}")
        return cls(**raw)


CANONICAL_SCHEMA = CsvSchema()


@dataclass(frozen=True)
class RejectedRow:
    line: int
    reason: str


@dataclass(frozen=True)
class ParseResult:
    series: PriceSeries
    rejected: tuple[RejectedRow, ...]

    @property
    def input_rows(self) -> int:
        return len(self.series) + len(self.rejected)


def _parse_timestamp(raw: str, fmt: str | None) -> datetime:
    if fmt is not None:
        ts = datetime.strptime(raw, fmt)
    else:
        ts = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def parse_price_csv(
    path: str | Path,
    schema: CsvSchema = CANONICAL_SCHEMA,
    zone: BiddingZone | None = None,
    kind: PriceKind | None = None,
    strict: bool = True,
) -> ParseResult:
    """Parse one hourly price CSV.

    With ``strict=True`` (default) the first malformed row raises
    :class:`MalformedRow`; with ``strict=False`` malformed rows are collected
    in the result so that parsed + rejected always equals the input row
    count. Duplicate and non-monotonic timestamps always raise: they signal
    a broken export, not a bad cell.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))

    points: list[tuple[datetime, float]] = []
    rejected: list[RejectedRow] = []
    seen_zone = zone
    seen_kind = kind
    prev_ts: datetime | None = None

    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise MalformedRow(1, "empty file, no header")
        for col in (schema.timestamp_col, schema.price_col):
            if col not in reader.fieldnames:
                raise MalformedRow(1, f"missing column {col!r}")
        for row in reader:
            line = reader.line_num
            try:
                ts = _parse_timestamp(row[schema.timestamp_col], schema.timestamp_format)
                price = float(row[schema.price_col])
                if not isfinite(price):
                    raise ValueError("non-finite price")
                if ts.minute or ts.second or ts.microsecond:
                    raise ValueError("timestamp not hour-aligned")
            except (ValueError, TypeError) as exc:
                if strict:
                    raise MalformedRow(line, str(exc)) from None
                rejected.append(RejectedRow(line, str(exc)))
                continue
            if prev_ts is not None:
                if ts == prev_ts:
                    raise DuplicateTimestamp(ts)
                if ts < prev_ts:
                    raise NonMonotonicTimestamp(ts)
            prev_ts = ts
            if seen_zone is None and schema.zone_col and row.get(schema.zone_col):
                seen_zone = BiddingZone(row[schema.zone_col])
            if seen_kind is None and schema.kind_col and row.get(schema.kind_col):
                seen_kind = parse_kind(row[schema.kind_col])
            points.append((ts, price))

    if seen_zone is None:
        raise MalformedRow(1, "zone neither given nor present in the file")
    if seen_kind is None:
        seen_kind = PriceKind.DAY_AHEAD_ENERGY
    series = PriceSeries(seen_zone, seen_kind, tuple(points))
    return ParseResult(series, tuple(rejected))


def write_price_csv(series: PriceSeries, path: str | Path | None = None) -> str:
    """Serialize to the canonical schema; returns the CSV text."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["timestamp", "price", "zone", "kind"])
    for ts, price in series.points:
        writer.writerow(
            [ts.strftime("%Y-%m-%dT%H:%M:%SZ"), repr(price), series.zone.code, series.kind.value]
        )
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def convert_currency(series: PriceSeries, rate: CurrencyRate) -> PriceSeries:
    """Multiply every price by the rate and relabel the zone currency."""
    if series.zone.currency != rate.from_currency:
        raise CurrencyMismatch(
            f"series is in {series.zone.currency}, rate converts {rate.from_currency}"
        )
    zone = BiddingZone(series.zone.code, rate.to_currency)
    points = tuple((ts, price * rate.rate) for ts, price in series.points)
    return PriceSeries(zone, series.kind, points)


@dataclass(frozen=True)
class CoverageReport:
    zone: str
    kind: str
    span: tuple[datetime, datetime]
    hours_present: int
    gaps: tuple[tuple[datetime, datetime], ...]
    coverage_fraction: float

    def to_dict(self) -> dict:
        return {
            "zone": self.zone,
            "kind": self.kind,
            "span": [self.span[0].isoformat(), self.span[1].isoformat()],
            "hours_present": self.hours_present,
            "gaps": [[a.isoformat(), b.isoformat()] for a, b in self.gaps],
            "coverage_fraction": self.coverage_fraction,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def validate_series(
    series: PriceSeries, expected_span: tuple[datetime, datetime]
) -> CoverageReport:
    """Report hour coverage against an expected span. Does not mutate input.

    The span is inclusive of both endpoint hours. Gaps are maximal runs of
    missing hours, reported as (first missing, last missing).
    """
    start, end = expected_span
    if end < start:
        raise ValueError("expected_span end precedes start")
    total = int((end - start) / HOUR) + 1
    present = set(series.timestamps())
    gaps: list[tuple[datetime, datetime]] = []
    hours_present = 0
    gap_start: datetime | None = None
    ts = start
    while ts <= end:
        if ts in present:
            hours_present += 1
            if gap_start is not None:
                gaps.append((gap_start, ts - HOUR))
                gap_start = None
        elif gap_start is None:
            gap_start = ts
        ts += HOUR
    if gap_start is not None:
        gaps.append((gap_start, end))
    return CoverageReport(
        zone=series.zone.code,
        kind=series.kind.value,
        span=(start, end),
        hours_present=hours_present,
        gaps=tuple(gaps),
        coverage_fraction=hours_present / total,
    )


@dataclass(frozen=True)
class DailyPriceBlock:
    """All hourly points of one calendar day in the reporting time zone."""

    day: date
    points: tuple[tuple[datetime, float], ...]
    incomplete: bool

    def __len__(self) -> int:
        return len(self.points)

    def prices(self) -> tuple[float, ...]:
        return tuple(p for _, p in self.points)


DEFAULT_MIN_HOURS = 20


def group_by_day(
    series: PriceSeries,
    reporting_tz: str = "UTC",
    min_hours: int = DEFAULT_MIN_HOURS,
) -> list[DailyPriceBlock]:
    """Partition a day-ahead series into calendar-day blocks.

    Days with fewer than ``min_hours`` points are flagged incomplete (DST
    shifts and outages leave 23-hour days in real exports). Every input
    point lands in exactly one block.
    """
    if series.kind is not PriceKind.DAY_AHEAD_ENERGY:
        raise WrongKind("daily grouping applies to day-ahead energy series only")
    tz = timezone.utc if reporting_tz == "UTC" else ZoneInfo(reporting_tz)
    blocks: dict[date, list[tuple[datetime, float]]] = {}
    for ts, price in series.points:
        day = ts.astimezone(tz).date()
        blocks.setdefault(day, []).append((ts, price))
    return [
        DailyPriceBlock(day, tuple(pts), incomplete=len(pts) < min_hours)
        for day, pts in sorted(blocks.items())
    ]


def series_from_points(
    zone: BiddingZone, kind: PriceKind, points: Iterable[tuple[datetime, float]]
) -> PriceSeries:
    return PriceSeries(zone, kind, tuple(points))


def hourly_span(start: date, end: date) -> tuple[datetime, datetime]:
    """Inclusive hourly span covering the calendar dates [start, end], UTC."""
    if end < start:
        raise ValueError("span end precedes start")
    first = datetime(start.year, start.month, start.day, tzinfo=timezone.utc)
    last = datetime(end.year, end.month, end.day, 23, tzinfo=timezone.utc)
    return first, last
