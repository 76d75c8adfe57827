"""Wear-cost sweeps producing utilization curves, and zone comparison.

A sweep re-evaluates the per-period payoff series at each wear cost on the
grid and records the resulting utilization rate, giving PPUR as a function
of wear cost per zone. Payoffs are non-increasing in wear cost, so every
curve is monotone by construction.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from datetime import date, timedelta
from enum import Enum
from pathlib import Path
from typing import Sequence

from .battery import (
    BatterySpec,
    EnergyPriceSource,
    MarketPreset,
    ServiceEnergyProfile,
    ServiceMarketConfig,
)
from .errors import MissingData, OutOfRange
from .market_data import (
    DEFAULT_MIN_HOURS,
    BiddingZone,
    PriceSeries,
    group_by_day,
    hourly_span,
)
from .payoff import arbitrage_daily_margin


class Application(str, Enum):
    ARBITRAGE = "arbitrage"
    FCR = "fcr"
    FCR_N = "fcr-n"


@dataclass(frozen=True)
class SweepConfig:
    wear_min: float
    wear_max: float
    step: float
    application: Application
    zones: tuple[str, ...]
    period: tuple[date, date]  # inclusive calendar dates

    def __post_init__(self):
        if not 0 <= self.wear_min <= self.wear_max:
            raise ValueError("need 0 <= wear_min <= wear_max")
        if self.step <= 0:
            raise ValueError("step must be > 0")
        if self.period[1] < self.period[0]:
            raise ValueError("empty period")

    def wear_grid(self) -> tuple[float, ...]:
        values = []
        k = 0
        while True:
            w = self.wear_min + k * self.step
            if w > self.wear_max + 1e-9:
                break
            values.append(min(w, self.wear_max))
            k += 1
        return tuple(values)


@dataclass(frozen=True)
class UtilizationCurve:
    zone: str
    application: Application
    period: tuple[date, date]
    points: tuple[tuple[float, float], ...]  # (wear_cost EUR/MWh, ppur)
    periods_skipped: int = 0  # periods in the span without usable data

    def __post_init__(self):
        prev_w = None
        prev_r = None
        for w, r in self.points:
            if prev_w is not None and w <= prev_w:
                raise ValueError("wear costs must be strictly increasing")
            if not 0.0 <= r <= 1.0:
                raise ValueError(f"ppur {r} outside [0, 1]")
            if prev_r is not None and r > prev_r:
                raise ValueError("ppur must be non-increasing in wear cost")
            prev_w, prev_r = w, r

    def ppur_at(self, wear_cost: float) -> float:
        """Linear interpolation between adjacent sweep points."""
        if not self.points:
            raise OutOfRange("empty curve")
        lo_w = self.points[0][0]
        hi_w = self.points[-1][0]
        if not lo_w <= wear_cost <= hi_w:
            raise OutOfRange(f"wear cost {wear_cost} outside [{lo_w}, {hi_w}]")
        for (w0, r0), (w1, r1) in zip(self.points, self.points[1:]):
            if wear_cost == w0:
                return r0
            if w0 < wear_cost <= w1:
                frac = (wear_cost - w0) / (w1 - w0)
                return r0 + frac * (r1 - r0)
        return self.points[-1][1]


@dataclass(frozen=True)
class ZoneData:
    """Ingested series for one zone; either side may be absent."""

    day_ahead: PriceSeries | None = None
    capacity: PriceSeries | None = None


def _arbitrage_curve(
    config: SweepConfig,
    zone: str,
    series: PriceSeries,
    discharge_mwh: float,
    efficiency: float,
    reporting_tz: str,
    min_hours: int,
    strict_ordering: bool,
) -> UtilizationCurve:
    start, end = config.period
    total_days = (end - start).days + 1
    span = hourly_span(start, end)
    blocks = [
        b
        for b in group_by_day(series.slice(*span), reporting_tz, min_hours)
        if start <= b.day <= end
    ]
    usable = [b for b in blocks if not b.incomplete]
    margins = [
        arbitrage_daily_margin(b, efficiency, strict_ordering)[0] for b in usable
    ]
    points = []
    for wear in config.wear_grid():
        positive = sum(1 for m in margins if (m - wear) * discharge_mwh > 0)
        points.append((wear, positive / total_days))
    return UtilizationCurve(
        zone, config.application, config.period, tuple(points),
        periods_skipped=total_days - len(usable),
    )


def _fcr_hour_bases(
    capacity: PriceSeries,
    spot: PriceSeries | None,
    profile: ServiceEnergyProfile,
    market: ServiceMarketConfig,
    spec_template: BatterySpec,
    capacity_mw: float,
) -> list[float]:
    """Per-hour payoff at zero wear cost; payoff(W) = max(base - W*delivered, 0)."""
    needs_spot = (
        (market.service_energy_paid or market.balancing_energy_paid)
        and market.energy_price_source is EnergyPriceSource.DAY_AHEAD_SPOT
    )
    spot_at = spot.price_at() if spot is not None else {}
    bases = []
    for ts, cap_price in capacity.points:
        spot_price = spot_at.get(ts)
        if needs_spot and spot_price is None:
            continue  # hour lacks a price for a paid leg; skip, never fabricate
        # raw margin before the wear term and the max-operator, so the wear
        # subtraction in the sweep loop stays linear
        service_price = spot_price if (market.service_energy_paid and spot_price is not None) else 0.0
        balancing_price = spot_price if (market.balancing_energy_paid and spot_price is not None) else 0.0
        raw = (
            (cap_price if market.capacity_paid else 0.0) * capacity_mw
            + service_price * (profile.service_discharge - profile.service_charge) * capacity_mw
            + balancing_price * (profile.balancing_discharge - profile.balancing_charge) * capacity_mw
            - spec_template.opex
        )
        bases.append(raw)
    return bases


def run_sweep(
    config: SweepConfig,
    data: dict[str, ZoneData],
    spec_template: BatterySpec,
    profile: ServiceEnergyProfile | None = None,
    market: ServiceMarketConfig | None = None,
    discharge_mwh: float = 1.0,
    capacity_mw: float = 1.0,
    reporting_tz: str = "UTC",
    min_hours: int = DEFAULT_MIN_HOURS,
    strict_ordering: bool = False,
) -> list[UtilizationCurve]:
    """One utilization curve per configured zone.

    Arbitrage uses daily periods (T = calendar days in the span, incomplete
    days skipped but still counted in T); reserve services use hourly
    periods (T = hours in the span, hours lacking a required price skipped
    but counted).
    """
    curves = []
    for zone in config.zones:
        zdata = data.get(zone)
        if config.application is Application.ARBITRAGE:
            if zdata is None or zdata.day_ahead is None:
                raise MissingData(zone, "day-ahead energy prices")
            curves.append(
                _arbitrage_curve(
                    config, zone, zdata.day_ahead, discharge_mwh,
                    spec_template.efficiency, reporting_tz, min_hours, strict_ordering,
                )
            )
        else:
            if zdata is None or zdata.capacity is None:
                raise MissingData(zone, "reserve capacity prices")
            if profile is None or market is None:
                raise ValueError("reserve sweeps need a profile and a market config")
            start, end = config.period
            span = hourly_span(start, end)
            total_hours = int((span[1] - span[0]) / timedelta(hours=1)) + 1
            capacity = zdata.capacity.slice(*span)
            spot = zdata.day_ahead.slice(*span) if zdata.day_ahead is not None else None
            bases = _fcr_hour_bases(
                capacity, spot, profile, market, spec_template, capacity_mw
            )
            delivered = profile.delivered_energy * capacity_mw
            points = []
            for wear in config.wear_grid():
                positive = sum(1 for b in bases if b - wear * delivered > 0)
                points.append((wear, positive / total_hours))
            curves.append(
                UtilizationCurve(
                    zone, config.application, config.period, tuple(points),
                    periods_skipped=total_hours - len(bases),
                )
            )
    return curves


def compare_zones(
    curves: Sequence[UtilizationCurve], at_wear: float
) -> list[tuple[str, float]]:
    """Zones ranked by interpolated PPUR at a wear cost, descending.

    Ties break lexicographically by zone code.
    """
    ranked = [(c.zone, c.ppur_at(at_wear)) for c in curves]
    return sorted(ranked, key=lambda zr: (-zr[1], zr[0]))


def curves_to_csv(curves: Sequence[UtilizationCurve], path: str | Path | None = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["zone", "application", "wear_cost_eur_mwh", "ppur"])
    for curve in curves:
        for wear, ppur in curve.points:
            writer.writerow([curve.zone, curve.application.value, repr(wear), repr(ppur)])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def curves_to_json(curves: Sequence[UtilizationCurve], path: str | Path | None = None) -> str:
    payload = [
        {
            "zone": c.zone,
            "application": c.application.value,
            "period": [c.period[0].isoformat(), c.period[1].isoformat()],
            "periods_skipped": c.periods_skipped,
            "points": [{"wear_cost_eur_mwh": w, "ppur": r} for w, r in c.points],
        }
        for c in curves
    ]
    text = json.dumps(payload, indent=2)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def curve_to_plot_data(curve: UtilizationCurve, path: str | Path | None = None) -> str:
    """Two-column whitespace-separated data file, one row per sweep point."""
    lines = [f"{w:.6f} {r:.6f}" for w, r in curve.points]
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
