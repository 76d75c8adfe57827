"""Option-style payoff model for storage services, plus utilization metrics.

The per-period payoff is max(S + B - O, 0): service remuneration S
(capacity payment plus priced regulating energy), balancing term B
(restoring the state of charge), operating expenses O (wear cost on every
MWh delivered, plus marginal opex). The max-operator reflects that a
flexible asset simply sits idle when operating would lose money.

PPUT counts the periods whose payoff is strictly positive; PPUR divides
that count by the full number of periods in the analysis span.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .battery import (
    BatterySpec,
    EnergyPriceSource,
    ServiceEnergyProfile,
    ServiceMarketConfig,
    check_energy_balance,
)
from .errors import IncompleteDay, UnpricedEnergyLeg, ZeroTotalPeriods
from .market_data import DailyPriceBlock


@dataclass(frozen=True)
class GeneralPayoffInputs:
    """One period's prices and energies for the general payoff."""

    capacity_price: float = 0.0  # EUR/MW/h
    capacity_mw: float = 0.0
    service_discharge_price: float = 0.0  # EUR/MWh
    service_charge_price: float = 0.0
    balancing_discharge_price: float = 0.0
    balancing_charge_price: float = 0.0
    service_discharge_mwh: float = 0.0
    service_charge_mwh: float = 0.0
    balancing_discharge_mwh: float = 0.0
    balancing_charge_mwh: float = 0.0
    spec: BatterySpec = BatterySpec(wear_cost=0.0)

    def __post_init__(self):
        if self.capacity_mw < 0:
            raise ValueError("capacity_mw must be >= 0")
        for name in (
            "service_discharge_mwh",
            "service_charge_mwh",
            "balancing_discharge_mwh",
            "balancing_charge_mwh",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


def general_payoff(inputs: GeneralPayoffInputs) -> float:
    """max(S + B - O, 0) for one period; always >= 0."""
    service = (
        inputs.capacity_price * inputs.capacity_mw
        + inputs.service_discharge_price * inputs.service_discharge_mwh
        - inputs.service_charge_price * inputs.service_charge_mwh
    )
    balancing = (
        inputs.balancing_discharge_price * inputs.balancing_discharge_mwh
        - inputs.balancing_charge_price * inputs.balancing_charge_mwh
    )
    delivered = inputs.service_discharge_mwh + inputs.balancing_discharge_mwh
    expenses = inputs.spec.wear_cost * delivered + inputs.spec.opex
    return max(service + balancing - expenses, 0.0)


@dataclass(frozen=True)
class ArbitrageResult:
    payoff: float
    charge_hour: int  # index into the day's hourly points
    discharge_hour: int


def arbitrage_daily_margin(
    block: DailyPriceBlock, efficiency: float, strict_ordering: bool = False
) -> tuple[float, int, int]:
    """Best per-MWh margin before wear cost: P_discharge - P_charge/efficiency.

    Returns (margin, charge_hour, discharge_hour) with hours as indices into
    the day's points. Ties go to the earliest hour. With strict_ordering the
    charge hour must precede the discharge hour.
    """
    prices = block.prices()
    if strict_ordering:
        if len(prices) < 2:
            raise IncompleteDay(f"day {block.day} too short for ordered arbitrage")
        best = None
        for i in range(len(prices) - 1):
            for j in range(i + 1, len(prices)):
                margin = prices[j] - prices[i] / efficiency
                if best is None or margin > best[0]:
                    best = (margin, i, j)
        return best
    discharge_hour = max(range(len(prices)), key=lambda i: (prices[i], -i))
    charge_hour = min(range(len(prices)), key=lambda i: (prices[i], i))
    margin = prices[discharge_hour] - prices[charge_hour] / efficiency
    return margin, charge_hour, discharge_hour


def arbitrage_daily_payoff(
    block: DailyPriceBlock,
    spec: BatterySpec,
    discharge_mwh: float = 1.0,
    strict_ordering: bool = False,
) -> ArbitrageResult:
    """Perfect-foresight daily arbitrage payoff for one calendar day.

    Discharges at the day's maximum hourly price, charges at the minimum;
    charging draws discharge_mwh / efficiency. With strict_ordering the
    charge hour must precede the discharge hour (a deviation from the
    perfect-foresight baseline, where the order inside the day does not
    matter).
    """
    if block.incomplete:
        raise IncompleteDay(f"day {block.day} has only {len(block)} hours")
    if discharge_mwh <= 0:
        raise ValueError("discharge_mwh must be > 0")
    margin, charge_hour, discharge_hour = arbitrage_daily_margin(
        block, spec.efficiency, strict_ordering
    )
    payoff = max((margin - spec.wear_cost) * discharge_mwh, 0.0)
    return ArbitrageResult(payoff, charge_hour, discharge_hour)


def fcr_hourly_payoff(
    capacity_price: float,
    spot_price: float | None,
    profile: ServiceEnergyProfile,
    config: ServiceMarketConfig,
    spec: BatterySpec,
    capacity_mw: float = 1.0,
) -> float:
    """Hourly reserve-service payoff per the market's payment flags.

    Paid energy legs are valued at the same-hour day-ahead spot price;
    unpaid legs enter at price zero (the energy still wears the battery).
    """
    if capacity_mw <= 0:
        raise ValueError("capacity_mw must be > 0")
    needs_spot = config.service_energy_paid or config.balancing_energy_paid
    if needs_spot and config.energy_price_source is EnergyPriceSource.DAY_AHEAD_SPOT:
        if spot_price is None:
            raise UnpricedEnergyLeg("paid energy leg but no spot price for this hour")
    spot = spot_price if spot_price is not None else 0.0
    service_price = spot if config.service_energy_paid else 0.0
    balancing_price = spot if config.balancing_energy_paid else 0.0
    inputs = GeneralPayoffInputs(
        capacity_price=capacity_price if config.capacity_paid else 0.0,
        capacity_mw=capacity_mw,
        service_discharge_price=service_price,
        service_charge_price=service_price,
        balancing_discharge_price=balancing_price,
        balancing_charge_price=balancing_price,
        service_discharge_mwh=profile.service_discharge * capacity_mw,
        service_charge_mwh=profile.service_charge * capacity_mw,
        balancing_discharge_mwh=profile.balancing_discharge * capacity_mw,
        balancing_charge_mwh=profile.balancing_charge * capacity_mw,
        spec=spec,
    )
    return general_payoff(inputs)


class PeriodKind(str, Enum):
    HOURLY = "hourly"
    DAILY = "daily"


@dataclass(frozen=True)
class PayoffEntry:
    period: str  # ISO date (daily) or ISO datetime (hourly)
    payoff: float
    profitable: bool


@dataclass(frozen=True)
class PayoffSeries:
    period_kind: PeriodKind
    entries: tuple[PayoffEntry, ...]

    def __post_init__(self):
        for e in self.entries:
            if e.payoff < 0:
                raise ValueError(f"negative payoff at {e.period}")
            if e.profitable != (e.payoff > 0):
                raise ValueError(f"profitable flag inconsistent at {e.period}")

    @classmethod
    def from_values(
        cls, period_kind: PeriodKind, values: Iterable[tuple[str, float]]
    ) -> "PayoffSeries":
        return cls(
            period_kind,
            tuple(PayoffEntry(p, v, v > 0) for p, v in values),
        )

    def __len__(self) -> int:
        return len(self.entries)

    def payoffs(self) -> tuple[float, ...]:
        return tuple(e.payoff for e in self.entries)

    def to_csv(self, path: str | Path | None = None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["period", "payoff_eur", "profitable"])
        for e in self.entries:
            writer.writerow([e.period, repr(e.payoff), str(e.profitable).lower()])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text

    def to_json(self, path: str | Path | None = None) -> str:
        payload = {
            "period_kind": self.period_kind.value,
            "entries": [
                {"period": e.period, "payoff_eur": e.payoff, "profitable": e.profitable}
                for e in self.entries
            ],
        }
        text = json.dumps(payload, indent=2)
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text


def ppu_time(series: PayoffSeries) -> int:
    """Count of periods with strictly positive payoff."""
    return sum(1 for e in series.entries if e.payoff > 0)


def ppu_rate(series: PayoffSeries, total_periods: int) -> float:
    """ppu_time over the full span length, including periods with no data."""
    if total_periods <= 0:
        raise ZeroTotalPeriods("total_periods must be > 0")
    if total_periods < len(series):
        raise ValueError("total_periods smaller than number of computed entries")
    return ppu_time(series) / total_periods
