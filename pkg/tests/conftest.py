from datetime import datetime, timedelta, timezone

import pytest

from bessuse.market_data import BiddingZone, PriceKind, PriceSeries

T0 = datetime(2021, 1, 1, tzinfo=timezone.utc)


def hourly_series(
    prices, start=T0, zone="DE-LU", currency="EUR", kind=PriceKind.DAY_AHEAD_ENERGY
):
    """PriceSeries with consecutive hourly points starting at `start`."""
    points = tuple(
        (start + timedelta(hours=i), float(p)) for i, p in enumerate(prices)
    )
    return PriceSeries(BiddingZone(zone, currency), kind, points)


@pytest.fixture
def flat_week():
    return hourly_series([50.0] * (7 * 24))


@pytest.fixture
def two_level_month():
    """31 days: 12 hours at 10 then 12 hours at 60, every day."""
    prices = ([10.0] * 12 + [60.0] * 12) * 31
    return hourly_series(prices)
