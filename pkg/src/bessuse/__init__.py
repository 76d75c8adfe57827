"""Utilization analytics for battery storage in European electricity markets."""

from .battery import (
    BUILTIN_PROFILES,
    MARKET_PRESETS,
    BalanceReport,
    BatterySpec,
    EnergyPriceSource,
    MarketPreset,
    Service,
    ServiceEnergyProfile,
    ServiceMarketConfig,
    check_energy_balance,
    wear_cost_from_capex,
)
from .estimators import ArbitragePayoffModel, ReservePayoffModel, UtilizationSweep
from .market_data import (
    BiddingZone,
    CoverageReport,
    CsvSchema,
    CurrencyRate,
    DailyPriceBlock,
    PriceKind,
    PriceSeries,
    convert_currency,
    group_by_day,
    parse_price_csv,
    validate_series,
    write_price_csv,
)
from .payoff import (
    GeneralPayoffInputs,
    PayoffSeries,
    PeriodKind,
    arbitrage_daily_payoff,
    fcr_hourly_payoff,
    general_payoff,
    ppu_rate,
    ppu_time,
)
from .sweep import (
    Application,
    SweepConfig,
    UtilizationCurve,
    ZoneData,
    compare_zones,
    curves_to_csv,
    curves_to_json,
    run_sweep,
)

__version__ = "0.1.0"


def bundled_data_dir():
    """Directory holding the packaged sample price CSVs."""
    from pathlib import Path

    return Path(__file__).parent / "data"
