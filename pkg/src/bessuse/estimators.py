"""Estimator-style wrappers around the payoff engine.

These follow the scikit-learn convention: constructor arguments are plain
hyperparameters retrievable via ``get_params`` / settable via
``set_params``, ``fit`` consumes price data and leaves computed results in
trailing-underscore attributes, so the models clone and compose with the
wider ecosystem (grid search over wear cost, pipelines, joblib dumps).

``X`` is a :class:`~bessuse.market_data.PriceSeries` (or a pair of them
for reserve services) rather than a feature matrix; validation happens in
``fit``.
"""
from __future__ import annotations

from datetime import date

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .battery import (
    BatterySpec,
    ServiceEnergyProfile,
    ServiceMarketConfig,
    check_energy_balance,
)
from .errors import MissingData
from .market_data import (
    DEFAULT_MIN_HOURS,
    PriceKind,
    PriceSeries,
    group_by_day,
    hourly_span,
)
from .payoff import (
    PayoffSeries,
    PeriodKind,
    arbitrage_daily_payoff,
    fcr_hourly_payoff,
    ppu_rate,
    ppu_time,
)
from .sweep import Application, SweepConfig, UtilizationCurve, ZoneData, run_sweep


def _check_series(X, kind: PriceKind, what: str) -> PriceSeries:
    if not isinstance(X, PriceSeries):
        raise TypeError(f"{what} must be a PriceSeries, got {type(X).__name__}")
    if X.kind is not kind:
        raise ValueError(f"{what} must have kind {kind.value}, got {X.kind.value}")
    return X


class ArbitragePayoffModel(BaseEstimator):
    """Daily perfect-foresight arbitrage payoffs over a day-ahead series.

    After ``fit(X)`` with X a day-ahead PriceSeries:
      payoff_series_ : PayoffSeries of daily payoffs (complete days only)
      pput_          : count of profitable days
      ppur_          : pput_ over all calendar days spanned by the data
      skipped_days_  : incomplete days excluded from evaluation
    """

    def __init__(
        self,
        wear_cost: float = 0.0,
        efficiency: float = 0.85,
        opex: float = 0.0,
        discharge_mwh: float = 1.0,
        reporting_tz: str = "UTC",
        min_hours: int = DEFAULT_MIN_HOURS,
        strict_ordering: bool = False,
    ):
        self.wear_cost = wear_cost
        self.efficiency = efficiency
        self.opex = opex
        self.discharge_mwh = discharge_mwh
        self.reporting_tz = reporting_tz
        self.min_hours = min_hours
        self.strict_ordering = strict_ordering

    def fit(self, X: PriceSeries, y=None):
        X = _check_series(X, PriceKind.DAY_AHEAD_ENERGY, "X")
        spec = BatterySpec(self.wear_cost, self.efficiency, self.opex)
        blocks = group_by_day(X, self.reporting_tz, self.min_hours)
        if not blocks:
            raise MissingData(X.zone.code, "day-ahead energy prices")
        values = []
        skipped = 0
        for block in blocks:
            if block.incomplete:
                skipped += 1
                continue
            result = arbitrage_daily_payoff(
                block, spec, self.discharge_mwh, self.strict_ordering
            )
            values.append((block.day.isoformat(), result.payoff))
        self.payoff_series_ = PayoffSeries.from_values(PeriodKind.DAILY, values)
        self.skipped_days_ = skipped
        total_days = (blocks[-1].day - blocks[0].day).days + 1
        self.total_periods_ = total_days
        self.pput_ = ppu_time(self.payoff_series_)
        self.ppur_ = ppu_rate(self.payoff_series_, total_days)
        return self

    def predict(self, X: PriceSeries):
        """Daily payoffs for X under the fitted parameters."""
        return type(self)(**self.get_params()).fit(X).payoff_series_


class ReservePayoffModel(BaseEstimator):
    """Hourly FCR / FCR-N payoffs from capacity prices and optional spot.

    ``fit(X)`` takes X = (capacity PriceSeries, spot PriceSeries or None).
    Hours lacking a price for a paid leg are skipped, never fabricated.
    """

    def __init__(
        self,
        profile: ServiceEnergyProfile = None,
        market: ServiceMarketConfig = None,
        wear_cost: float = 0.0,
        efficiency: float = 0.85,
        opex: float = 0.0,
        capacity_mw: float = 1.0,
    ):
        self.profile = profile
        self.market = market
        self.wear_cost = wear_cost
        self.efficiency = efficiency
        self.opex = opex
        self.capacity_mw = capacity_mw

    def fit(self, X, y=None):
        if self.profile is None or self.market is None:
            raise ValueError("profile and market must be set before fit")
        if not check_energy_balance(self.profile).passed:
            raise ValueError("service energy profile fails the energy-balance check")
        capacity, spot = X if isinstance(X, tuple) else (X, None)
        capacity = _check_series(capacity, PriceKind.RESERVE_CAPACITY, "capacity series")
        if spot is not None:
            spot = _check_series(spot, PriceKind.DAY_AHEAD_ENERGY, "spot series")
        spec = BatterySpec(self.wear_cost, self.efficiency, self.opex)
        spot_at = spot.price_at() if spot is not None else {}
        needs_spot = self.market.service_energy_paid or self.market.balancing_energy_paid
        values = []
        skipped = 0
        for ts, cap_price in capacity.points:
            spot_price = spot_at.get(ts)
            if needs_spot and spot_price is None:
                skipped += 1
                continue
            payoff = fcr_hourly_payoff(
                cap_price, spot_price, self.profile, self.market, spec, self.capacity_mw
            )
            values.append((ts.isoformat(), payoff))
        self.payoff_series_ = PayoffSeries.from_values(PeriodKind.HOURLY, values)
        self.skipped_hours_ = skipped
        total = len(values) + skipped
        if total == 0:
            raise MissingData(capacity.zone.code, "reserve capacity prices")
        self.total_periods_ = total
        self.pput_ = ppu_time(self.payoff_series_)
        self.ppur_ = ppu_rate(self.payoff_series_, total)
        return self


class UtilizationSweep(BaseEstimator):
    """Sweep wear cost and fit utilization curves, one per zone.

    ``fit(X)`` takes X as a mapping of zone code to ZoneData. Results land
    in ``curves_`` (list of UtilizationCurve, configured zone order).
    """

    def __init__(
        self,
        wear_min: float = 0.0,
        wear_max: float = 100.0,
        step: float = 1.0,
        application: Application = Application.ARBITRAGE,
        period: tuple[date, date] = None,
        efficiency: float = 0.85,
        opex: float = 0.0,
        profile: ServiceEnergyProfile = None,
        market: ServiceMarketConfig = None,
        discharge_mwh: float = 1.0,
        capacity_mw: float = 1.0,
        reporting_tz: str = "UTC",
        min_hours: int = DEFAULT_MIN_HOURS,
        strict_ordering: bool = False,
    ):
        self.wear_min = wear_min
        self.wear_max = wear_max
        self.step = step
        self.application = application
        self.period = period
        self.efficiency = efficiency
        self.opex = opex
        self.profile = profile
        self.market = market
        self.discharge_mwh = discharge_mwh
        self.capacity_mw = capacity_mw
        self.reporting_tz = reporting_tz
        self.min_hours = min_hours
        self.strict_ordering = strict_ordering

    def _infer_period(self, data: dict[str, ZoneData]) -> tuple[date, date]:
        stamps = []
        for zdata in data.values():
            for series in (zdata.day_ahead, zdata.capacity):
                if series is not None and len(series):
                    stamps.append(series.points[0][0])
                    stamps.append(series.points[-1][0])
        if not stamps:
            raise ValueError("no data to infer a sweep period from")
        return min(stamps).date(), max(stamps).date()

    def fit(self, X: dict[str, ZoneData], y=None):
        period = self.period if self.period is not None else self._infer_period(X)
        config = SweepConfig(
            self.wear_min, self.wear_max, self.step,
            Application(self.application), tuple(X.keys()), period,
        )
        spec = BatterySpec(0.0, self.efficiency, self.opex)
        self.curves_ = run_sweep(
            config, X, spec,
            profile=self.profile, market=self.market,
            discharge_mwh=self.discharge_mwh, capacity_mw=self.capacity_mw,
            reporting_tz=self.reporting_tz, min_hours=self.min_hours,
            strict_ordering=self.strict_ordering,
        )
        return self

    @property
    def fitted_curves(self) -> list[UtilizationCurve]:
        if not hasattr(self, "curves_"):
            raise NotFittedError("call fit first")
        return self.curves_
