"""Battery economics and reserve-service energy profiles.

Wear cost is capex per kWh divided by equivalent full cycle life, charged
per MWh delivered. Service profiles carry the expected per-MW hourly
regulating and balancing energies for a reserve product; built-in profiles
cover the French FCR market (2019 to Sep 2021, plus per-year rows and the
2014 German simulation study) and the Finnish FCR-N market (Jan-Sep 2021).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import NonPositiveCycleLife, ServiceNotRemunerated


@dataclass(frozen=True)
class BatterySpec:
    """Economic parameters of the storage asset.

    wear_cost: EUR per MWh delivered (discharged) from the battery.
    efficiency: round-trip efficiency in (0, 1].
    opex: EUR of other marginal operating expenses per period.
    """

    wear_cost: float
    efficiency: float = 0.85
    opex: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.efficiency <= 1.0:
            raise ValueError(f"efficiency must be in (0, 1], got {self.efficiency}")
        if self.wear_cost < 0:
            raise ValueError("wear_cost must be >= 0")
        if self.opex < 0:
            raise ValueError("opex must be >= 0")

    def with_wear_cost(self, wear_cost: float) -> "BatterySpec":
        return BatterySpec(wear_cost, self.efficiency, self.opex)


def wear_cost_from_capex(capex_eur_per_kwh: float, cycle_life: float) -> float:
    """Battery wear cost in EUR/MWh delivered.

    capex/cycle_life gives EUR per kWh cycled; x1000 converts to per MWh.
    300 EUR/kWh over 3000 equivalent full cycles -> 100 EUR/MWh.
    """
    if cycle_life <= 0:
        raise NonPositiveCycleLife(f"cycle_life must be > 0, got {cycle_life}")
    if capex_eur_per_kwh < 0:
        raise ValueError("capex must be >= 0")
    return capex_eur_per_kwh / cycle_life * 1000.0


class Service(str, Enum):
    FCR = "fcr"
    FCR_N = "fcr_n"


DEFAULT_BALANCE_TOLERANCE = 0.001  # one unit in the last published decimal place


@dataclass(frozen=True)
class ServiceEnergyProfile:
    """Expected per-MW hourly energies (MWh/MW/h) for one reserve service.

    service_discharge / service_charge: energy delivered / absorbed while
    regulating (upward / downward response). balancing_discharge /
    balancing_charge: energy traded to restore the state of charge
    afterwards. A balanced profile satisfies
    service_discharge + balancing_discharge
        = efficiency * (service_charge + balancing_charge).
    """

    service: Service
    service_discharge: float
    service_charge: float
    balancing_discharge: float
    balancing_charge: float
    efficiency: float
    provenance: str = ""

    def __post_init__(self):
        for name in ("service_discharge", "service_charge", "balancing_discharge", "balancing_charge"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not 0.0 < self.efficiency <= 1.0:
            raise ValueError("efficiency must be in (0, 1]")

    @property
    def delivered_energy(self) -> float:
        """Total MWh discharged per MW per hour; the wear-bearing quantity."""
        return self.service_discharge + self.balancing_discharge

    @property
    def balance_residual(self) -> float:
        return self.delivered_energy - self.efficiency * (
            self.service_charge + self.balancing_charge
        )


@dataclass(frozen=True)
class BalanceReport:
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return abs(self.residual) <= self.tolerance


def check_energy_balance(
    profile: ServiceEnergyProfile, tolerance: float = DEFAULT_BALANCE_TOLERANCE
) -> BalanceReport:
    """Check the charge/discharge energy balance of a profile.

    Published profiles are rounded to three decimals, so exact balance
    cannot hold; the default tolerance is one unit in the last place.
    """
    return BalanceReport(residual=profile.balance_residual, tolerance=tolerance)


BUILTIN_PROFILES: dict[str, ServiceEnergyProfile] = {
    "france-2019": ServiceEnergyProfile(
        Service.FCR, 0.056, 0.057, 0.026, 0.040, 0.850,
        provenance="French FCR hourly operational data, 2019",
    ),
    "france-2020": ServiceEnergyProfile(
        Service.FCR, 0.051, 0.052, 0.022, 0.035, 0.850,
        provenance="French FCR hourly operational data, 2020",
    ),
    "france-2021": ServiceEnergyProfile(
        Service.FCR, 0.054, 0.051, 0.020, 0.036, 0.850,
        provenance="French FCR hourly operational data, Jan-Sep 2021",
    ),
    "germany-2014": ServiceEnergyProfile(
        Service.FCR, 0.035, 0.036, 0.019, 0.033, 0.776,
        provenance="Simulated 5MW BESS on German frequency data, 2014",
    ),
    "france-2019-2021": ServiceEnergyProfile(
        Service.FCR, 0.054, 0.053, 0.023, 0.037, 0.850,
        provenance="French FCR hourly operational data, 2019 to Sep 2021",
    ),
    "finland-2021": ServiceEnergyProfile(
        Service.FCR_N, 0.091, 0.093, 0.079, 0.107, 0.850,
        provenance="Finnish FCR-N hourly operational data, Jan-Sep 2021",
    ),
}


class EnergyPriceSource(str, Enum):
    DAY_AHEAD_SPOT = "day_ahead_spot"
    NONE = "none"


@dataclass(frozen=True)
class ServiceMarketConfig:
    """Which payoff legs a reserve market remunerates.

    Paid energy legs are valued at the same-hour day-ahead spot price;
    regulating-power prices are not ingested, so spot is the proxy for
    every paid leg.
    """

    capacity_paid: bool
    service_energy_paid: bool
    balancing_energy_paid: bool
    energy_price_source: EnergyPriceSource = EnergyPriceSource.DAY_AHEAD_SPOT

    def __post_init__(self):
        if (self.service_energy_paid or self.balancing_energy_paid) and (
            self.energy_price_source is EnergyPriceSource.NONE
        ):
            raise ValueError("paid energy legs need an energy price source")


@dataclass(frozen=True)
class MarketPreset:
    """Per-zone reserve market design: payment flags plus default profile."""

    key: str
    zone_code: str
    service: Service
    config: ServiceMarketConfig | None  # None: mandatory, not remunerated
    profile_key: str | None
    note: str = ""

    @property
    def remunerated(self) -> bool:
        return self.config is not None


MARKET_PRESETS: dict[str, MarketPreset] = {
    p.key: p
    for p in [
        MarketPreset(
            "fr-fcr", "FR", Service.FCR,
            ServiceMarketConfig(True, True, True),
            "france-2019-2021",
            note="capacity paid, energy paid at reference spot price",
        ),
        MarketPreset(
            "de-fcr", "DE-LU", Service.FCR,
            ServiceMarketConfig(True, False, False, EnergyPriceSource.NONE),
            "france-2019-2021",
            note="capacity paid, no energy payment",
        ),
        MarketPreset(
            "dk1-fcr", "DK1", Service.FCR,
            ServiceMarketConfig(True, False, True),
            "france-2019-2021",
            note="capacity paid, balancing settled as ordinary imbalance",
        ),
        MarketPreset(
            "dk2-fcrn", "DK2", Service.FCR_N,
            ServiceMarketConfig(True, True, True),
            "finland-2021",
            note="capacity paid, energy paid at regulating power price (spot proxy)",
        ),
        MarketPreset(
            "no-fcrn", "NO", Service.FCR_N,
            ServiceMarketConfig(True, True, True),
            "finland-2021",
            note="capacity paid, energy paid at regulating power price (spot proxy)",
        ),
        MarketPreset(
            "es-fcr", "ES", Service.FCR, None, None,
            note="primary reserve mandatory and not remunerated",
        ),
        MarketPreset(
            "it-fcr", "IT", Service.FCR, None, None,
            note="primary reserve mandatory and not remunerated",
        ),
    ]
}


def get_preset(key: str) -> MarketPreset:
    try:
        preset = MARKET_PRESETS[key]
    except KeyError:
        raise KeyError(
            f"unknown preset {key!r}; available: {', '.join(sorted(MARKET_PRESETS))}"
        ) from None
    return preset


def require_remunerated(preset: MarketPreset) -> MarketPreset:
    if not preset.remunerated:
        raise ServiceNotRemunerated(
            f"{preset.zone_code}: {preset.note}; no payoff can be computed"
        )
    return preset


PROFILE_CSV_HEADER = ["service", "E_sd", "E_sc", "E_bd", "E_bc", "eta", "provenance"]


def load_profiles_csv(path: str | Path) -> dict[str, ServiceEnergyProfile]:
    """Load custom profiles from CSV: service,E_sd,E_sc,E_bd,E_bc,eta,provenance.

    Profiles are keyed by their provenance string (or a running index when
    blank).
    """
    profiles: dict[str, ServiceEnergyProfile] = {}
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(PROFILE_CSV_HEADER[:-1]) - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"profile CSV missing columns: {sorted(missing)}")
        for i, row in enumerate(reader):
            service = Service(row["service"].strip().lower().replace("-", "_"))
            profile = ServiceEnergyProfile(
                service,
                float(row["E_sd"]),
                float(row["E_sc"]),
                float(row["E_bd"]),
                float(row["E_bc"]),
                float(row["eta"]),
                provenance=(row.get("provenance") or "").strip(),
            )
            profiles[profile.provenance or f"profile-{i}"] = profile
    return profiles


def resolve_profile(name_or_path: str) -> ServiceEnergyProfile:
    """Look up a built-in profile by name, or load the first row of a CSV."""
    if name_or_path in BUILTIN_PROFILES:
        return BUILTIN_PROFILES[name_or_path]
    path = Path(name_or_path)
    if path.exists():
        loaded = load_profiles_csv(path)
        if not loaded:
            raise ValueError(f"no profiles in {path}")
        return next(iter(loaded.values()))
    raise KeyError(
        f"unknown profile {name_or_path!r}; built-ins: {', '.join(sorted(BUILTIN_PROFILES))}"
    )
