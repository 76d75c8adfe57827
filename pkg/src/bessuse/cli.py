"""Command-line interface: validate, arbitrage, fcr, sweep, profiles.

Every run writes its outputs into a sub-directory of ``--out`` keyed by a
hash of the command, flags and input file digests, next to a
``manifest.json`` describing the run. Exit codes: 0 success, 1 data
error, 2 usage error.
"""
from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass
from datetime import date, datetime, timezone
from pathlib import Path

import click

from . import __version__
from .battery import (
    BUILTIN_PROFILES,
    MARKET_PRESETS,
    BatterySpec,
    check_energy_balance,
    get_preset,
    require_remunerated,
    resolve_profile,
)
from .errors import DataError, ServiceNotRemunerated
from .estimators import ArbitragePayoffModel, ReservePayoffModel
from .market_data import (
    DEFAULT_MIN_HOURS,
    BiddingZone,
    CsvSchema,
    CurrencyRate,
    PriceKind,
    PriceSeries,
    convert_currency,
    hourly_span,
    parse_price_csv,
    validate_series,
)
from .sweep import (
    Application,
    SweepConfig,
    ZoneData,
    curve_to_plot_data,
    curves_to_csv,
    curves_to_json,
    run_sweep,
)


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class RunManifest:
    command: str
    config: dict
    input_digests: dict[str, str]
    coverage: list[dict]
    version: str = __version__

    @property
    def run_key(self) -> str:
        # timestamp deliberately excluded: identical inputs must map to the
        # same run directory and byte-identical outputs
        payload = json.dumps(
            {"command": self.command, "config": self.config, "inputs": self.input_digests},
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:12]

    def write(self, run_dir: Path) -> None:
        payload = {
            "command": self.command,
            "config": self.config,
            "input_digests": self.input_digests,
            "coverage": self.coverage,
            "version": self.version,
            "run_key": self.run_key,
            "created": datetime.now(timezone.utc).isoformat(),
        }
        (run_dir / "manifest.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8"
        )


def _prepare_run(out: str, command: str, config: dict, inputs: list[Path]) -> tuple[Path, RunManifest]:
    manifest = RunManifest(
        command=command,
        config=config,
        input_digests={str(p): _sha256(p) for p in inputs},
        coverage=[],
    )
    run_dir = Path(out) / manifest.run_key
    run_dir.mkdir(parents=True, exist_ok=True)
    return run_dir, manifest


def _load_series(
    path: str,
    kind: PriceKind,
    zone: str | None,
    schema_path: str | None,
    currency_rate: str | None,
) -> PriceSeries:
    schema = CsvSchema.from_file(schema_path) if schema_path else CsvSchema()
    zone_obj = None
    if zone:
        currency = "EUR"
        if currency_rate:
            currency = currency_rate.split(":")[0]
        zone_obj = BiddingZone(zone, currency)
    result = parse_price_csv(path, schema=schema, zone=zone_obj, kind=kind)
    series = result.series
    if currency_rate:
        src, dst, rate = currency_rate.split(":")
        if series.zone.currency == src:
            series = convert_currency(series, CurrencyRate(src, dst, float(rate)))
    return series


def _parse_date(text: str) -> date:
    return date.fromisoformat(text)


def _span_from_flags(series: PriceSeries, date_from: str | None, date_to: str | None) -> tuple[date, date]:
    start = _parse_date(date_from) if date_from else series.points[0][0].date()
    end = _parse_date(date_to) if date_to else series.points[-1][0].date()
    return start, end


class _Cli(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except ServiceNotRemunerated as exc:
            click.echo(f"refused: {exc}", err=True)
            sys.exit(1)
        except DataError as exc:
            click.echo(f"data error: {exc}", err=True)
            sys.exit(1)
        except FileNotFoundError as exc:
            click.echo(f"data error: file not found: {exc}", err=True)
            sys.exit(1)


@click.group(cls=_Cli)
@click.version_option(__version__)
def main():
    """Battery storage utilization analytics for European electricity markets."""


@main.command()
@click.option("--prices", "price_files", multiple=True, required=True,
              type=click.Path(), help="Price CSV file(s) to validate.")
@click.option("--schema", "schema_path", type=click.Path(exists=True), default=None,
              help="Column-mapping file for non-canonical CSVs.")
@click.option("--zone", default=None, help="Zone code when absent from the file.")
@click.option("--from", "date_from", default=None, help="Expected span start (YYYY-MM-DD).")
@click.option("--to", "date_to", default=None, help="Expected span end (YYYY-MM-DD).")
@click.option("--out", default="out", type=click.Path(), help="Output directory.")
def validate(price_files, schema_path, zone, date_from, date_to, out):
    """Parse price files and emit one coverage report per file."""
    paths = [Path(p) for p in price_files]
    if not paths:
        click.echo("no input series", err=True)
        sys.exit(1)
    failures = 0
    run_dir, manifest = _prepare_run(
        out, "validate",
        {"zone": zone, "from": date_from, "to": date_to},
        [p for p in paths if p.exists()],
    )
    for path in paths:
        try:
            schema = CsvSchema.from_file(schema_path) if schema_path else CsvSchema()
            zone_obj = BiddingZone(zone) if zone else None
            result = parse_price_csv(path, schema=schema, zone=zone_obj)
            series = result.series
            start, end = _span_from_flags(series, date_from, date_to)
            report = validate_series(series, hourly_span(start, end))
            manifest.coverage.append(report.to_dict())
            report_path = run_dir / f"coverage_{path.stem}.json"
            report_path.write_text(report.to_json(), encoding="utf-8")
            click.echo(
                f"{path}: {len(series)} rows, coverage "
                f"{report.coverage_fraction:.4f}, {len(report.gaps)} gap(s)"
            )
        except (DataError, FileNotFoundError, ValueError) as exc:
            failures += 1
            click.echo(f"{path}: ERROR {exc}", err=True)
    manifest.write(run_dir)
    sys.exit(1 if failures else 0)


def _battery_options(fn):
    fn = click.option("--efficiency", default=0.85, show_default=True,
                      help="Round-trip efficiency.")(fn)
    fn = click.option("--wear-cost", default=0.0, show_default=True,
                      help="Battery wear cost, EUR per MWh delivered.")(fn)
    fn = click.option("--opex", default=0.0, show_default=True,
                      help="Other marginal operating expenses per period, EUR.")(fn)
    return fn


def _io_options(fn):
    fn = click.option("--schema", "schema_path", type=click.Path(exists=True), default=None,
                      help="Column-mapping file for non-canonical CSVs.")(fn)
    fn = click.option("--zone", default=None, help="Zone code when absent from the file.")(fn)
    fn = click.option("--from", "date_from", default=None, help="Span start (YYYY-MM-DD).")(fn)
    fn = click.option("--to", "date_to", default=None, help="Span end (YYYY-MM-DD).")(fn)
    fn = click.option("--currency-rate", default=None, metavar="FROM:TO:RATE",
                      help="Fixed conversion, e.g. GBP:EUR:1.12.")(fn)
    fn = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
                      show_default=True)(fn)
    fn = click.option("--out", default="out", type=click.Path(), help="Output directory.")(fn)
    return fn


@main.command()
@click.option("--prices", required=True, type=click.Path(exists=True),
              help="Day-ahead price CSV.")
@_io_options
@_battery_options
@click.option("--discharge-mwh", default=1.0, show_default=True,
              help="Energy discharged per daily cycle, MWh.")
@click.option("--min-hours", default=DEFAULT_MIN_HOURS, show_default=True,
              help="Minimum hours for a day to count as complete.")
@click.option("--strict-ordering", is_flag=True,
              help="Require the charge hour to precede the discharge hour.")
@click.option("--reporting-tz", default="UTC", show_default=True,
              help="Time zone for daily grouping.")
def arbitrage(prices, schema_path, zone, date_from, date_to, currency_rate, fmt, out,
              efficiency, wear_cost, opex, discharge_mwh, min_hours, strict_ordering,
              reporting_tz):
    """Daily perfect-foresight arbitrage payoffs, PPUT and PPUR."""
    series = _load_series(prices, PriceKind.DAY_AHEAD_ENERGY, zone, schema_path, currency_rate)
    start, end = _span_from_flags(series, date_from, date_to)
    series = series.slice(*hourly_span(start, end))
    config = {
        "prices": str(prices), "zone": series.zone.code,
        "from": start.isoformat(), "to": end.isoformat(),
        "efficiency": efficiency, "wear_cost": wear_cost, "opex": opex,
        "discharge_mwh": discharge_mwh, "min_hours": min_hours,
        "strict_ordering": strict_ordering, "reporting_tz": reporting_tz,
        "currency_rate": currency_rate, "format": fmt,
    }
    run_dir, manifest = _prepare_run(out, "arbitrage", config, [Path(prices)])
    model = ArbitragePayoffModel(
        wear_cost=wear_cost, efficiency=efficiency, opex=opex,
        discharge_mwh=discharge_mwh, reporting_tz=reporting_tz,
        min_hours=min_hours, strict_ordering=strict_ordering,
    ).fit(series)
    total_days = (end - start).days + 1
    ppur = model.pput_ / total_days
    if fmt == "json":
        model.payoff_series_.to_json(run_dir / "payoffs.json")
    else:
        model.payoff_series_.to_csv(run_dir / "payoffs.csv")
    manifest.coverage.append(
        {"days_total": total_days, "days_skipped": model.skipped_days_}
    )
    manifest.write(run_dir)
    click.echo(f"zone {series.zone.code}: {total_days} days, "
               f"{model.skipped_days_} skipped")
    click.echo(f"PPUT: {model.pput_}")
    click.echo(f"PPUR: {ppur:.6f}")
    click.echo(f"outputs: {run_dir}")


@main.command()
@click.option("--capacity-prices", required=True, type=click.Path(exists=True),
              help="Reserve capacity price CSV (EUR/MW/h).")
@click.option("--prices", default=None, type=click.Path(exists=True),
              help="Day-ahead spot CSV for paid energy legs.")
@click.option("--preset", required=True,
              type=click.Choice(sorted(MARKET_PRESETS)),
              help="Zone-service market preset.")
@click.option("--profile", "profile_name", default=None,
              help="Built-in profile name or profile CSV path (preset default otherwise).")
@_io_options
@_battery_options
@click.option("--capacity-mw", default=1.0, show_default=True,
              help="Reserve capacity provided, MW.")
def fcr(capacity_prices, prices, preset, profile_name, schema_path, zone, date_from,
        date_to, currency_rate, fmt, out, efficiency, wear_cost, opex, capacity_mw):
    """Hourly FCR / FCR-N payoffs, PPUT and PPUR."""
    preset_obj = require_remunerated(get_preset(preset))
    profile = resolve_profile(profile_name or preset_obj.profile_key)
    cap_series = _load_series(
        capacity_prices, PriceKind.RESERVE_CAPACITY,
        zone or preset_obj.zone_code, schema_path, currency_rate,
    )
    spot_series = None
    if prices:
        spot_series = _load_series(
            prices, PriceKind.DAY_AHEAD_ENERGY,
            zone or preset_obj.zone_code, schema_path, currency_rate,
        )
    start, end = _span_from_flags(cap_series, date_from, date_to)
    span = hourly_span(start, end)
    cap_series = cap_series.slice(*span)
    if spot_series is not None:
        spot_series = spot_series.slice(*span)
    config = {
        "capacity_prices": str(capacity_prices), "prices": prices,
        "preset": preset, "profile": profile.provenance,
        "from": start.isoformat(), "to": end.isoformat(),
        "efficiency": efficiency, "wear_cost": wear_cost, "opex": opex,
        "capacity_mw": capacity_mw, "currency_rate": currency_rate, "format": fmt,
    }
    inputs = [Path(capacity_prices)] + ([Path(prices)] if prices else [])
    run_dir, manifest = _prepare_run(out, "fcr", config, inputs)
    model = ReservePayoffModel(
        profile=profile, market=preset_obj.config,
        wear_cost=wear_cost, efficiency=efficiency, opex=opex,
        capacity_mw=capacity_mw,
    ).fit((cap_series, spot_series))
    if fmt == "json":
        model.payoff_series_.to_json(run_dir / "payoffs.json")
    else:
        model.payoff_series_.to_csv(run_dir / "payoffs.csv")
    manifest.coverage.append(
        {"hours_total": model.total_periods_, "hours_skipped": model.skipped_hours_}
    )
    manifest.write(run_dir)
    click.echo(f"zone {cap_series.zone.code} ({preset_obj.service.value}): "
               f"{model.total_periods_} hours, {model.skipped_hours_} skipped")
    click.echo(f"PPUT: {model.pput_}")
    click.echo(f"PPUR: {model.ppur_:.6f}")
    click.echo(f"outputs: {run_dir}")


@main.command()
@click.option("--application", type=click.Choice([a.value for a in Application]),
              default=Application.ARBITRAGE.value, show_default=True)
@click.option("--prices", "price_files", multiple=True, type=click.Path(exists=True),
              help="Day-ahead CSV(s), one per zone.")
@click.option("--capacity-prices", "capacity_files", multiple=True,
              type=click.Path(exists=True), help="Capacity CSV(s), one per zone.")
@click.option("--preset", default=None, type=click.Choice(sorted(MARKET_PRESETS)),
              help="Market preset for reserve sweeps.")
@click.option("--profile", "profile_name", default=None,
              help="Profile name or CSV path for reserve sweeps.")
@click.option("--wear-min", default=0.0, show_default=True)
@click.option("--wear-max", default=100.0, show_default=True)
@click.option("--wear-step", default=1.0, show_default=True)
@_io_options
@click.option("--efficiency", default=0.85, show_default=True)
@click.option("--opex", default=0.0, show_default=True)
@click.option("--min-hours", default=DEFAULT_MIN_HOURS, show_default=True)
@click.option("--strict-ordering", is_flag=True)
@click.option("--reporting-tz", default="UTC", show_default=True)
@click.option("--plot-data", is_flag=True,
              help="Also write two-column plot data files per zone.")
def sweep(application, price_files, capacity_files, preset, profile_name,
          wear_min, wear_max, wear_step, schema_path, zone, date_from, date_to,
          currency_rate, fmt, out, efficiency, opex, min_hours, strict_ordering,
          reporting_tz, plot_data):
    """Sweep wear cost and write PPUR utilization curves per zone."""
    application = Application(application)
    data: dict[str, ZoneData] = {}
    for path in price_files:
        series = _load_series(path, PriceKind.DAY_AHEAD_ENERGY, zone, schema_path, currency_rate)
        prev = data.get(series.zone.code, ZoneData())
        data[series.zone.code] = ZoneData(day_ahead=series, capacity=prev.capacity)
    for path in capacity_files:
        series = _load_series(path, PriceKind.RESERVE_CAPACITY, zone, schema_path, currency_rate)
        prev = data.get(series.zone.code, ZoneData())
        data[series.zone.code] = ZoneData(day_ahead=prev.day_ahead, capacity=series)
    if not data:
        click.echo("no input series", err=True)
        sys.exit(1)

    all_points = [
        s.points
        for z in data.values()
        for s in (z.day_ahead, z.capacity)
        if s is not None and len(s)
    ]
    start = _parse_date(date_from) if date_from else min(p[0][0] for p in all_points).date()
    end = _parse_date(date_to) if date_to else max(p[-1][0] for p in all_points).date()

    profile = market = None
    if application is not Application.ARBITRAGE:
        if preset is None:
            raise click.UsageError("reserve sweeps need --preset")
        preset_obj = require_remunerated(get_preset(preset))
        profile = resolve_profile(profile_name or preset_obj.profile_key)
        market = preset_obj.config

    config = SweepConfig(
        wear_min, wear_max, wear_step, application, tuple(sorted(data)), (start, end)
    )
    snapshot = {
        "application": application.value, "zones": sorted(data),
        "from": start.isoformat(), "to": end.isoformat(),
        "wear_min": wear_min, "wear_max": wear_max, "wear_step": wear_step,
        "efficiency": efficiency, "opex": opex, "preset": preset,
        "profile": profile.provenance if profile else None,
        "min_hours": min_hours, "strict_ordering": strict_ordering,
        "reporting_tz": reporting_tz, "currency_rate": currency_rate, "format": fmt,
    }
    inputs = [Path(p) for p in list(price_files) + list(capacity_files)]
    run_dir, manifest = _prepare_run(out, "sweep", snapshot, inputs)
    spec = BatterySpec(0.0, efficiency, opex)
    curves = run_sweep(
        config, data, spec, profile=profile, market=market,
        reporting_tz=reporting_tz, min_hours=min_hours,
        strict_ordering=strict_ordering,
    )
    if fmt == "json":
        curves_to_json(curves, run_dir / "curves.json")
    else:
        curves_to_csv(curves, run_dir / "curves.csv")
    if plot_data:
        for curve in curves:
            curve_to_plot_data(curve, run_dir / f"curve_{curve.zone}.dat")
    manifest.coverage = [
        {"zone": c.zone, "periods_skipped": c.periods_skipped} for c in curves
    ]
    manifest.write(run_dir)
    for curve in curves:
        click.echo(
            f"{curve.zone}: {len(curve.points)} points, "
            f"ppur {curve.points[0][1]:.4f} -> {curve.points[-1][1]:.4f}, "
            f"{curve.periods_skipped} period(s) skipped"
        )
    click.echo(f"outputs: {run_dir}")


@main.group()
def profiles():
    """Inspect bundled service energy profiles and market presets."""


@profiles.command("list")
def profiles_list():
    """List built-in profiles and per-zone market presets."""
    click.echo("service energy profiles (MWh per MW per hour):")
    for name, p in sorted(BUILTIN_PROFILES.items()):
        report = check_energy_balance(p)
        click.echo(
            f"  {name}: {p.service.value} E_sd={p.service_discharge:.3f} "
            f"E_sc={p.service_charge:.3f} E_bd={p.balancing_discharge:.3f} "
            f"E_bc={p.balancing_charge:.3f} eta={p.efficiency:.3f} "
            f"balance_residual={report.residual:+.4f} -- {p.provenance}"
        )
    click.echo("market presets:")
    for key, preset in sorted(MARKET_PRESETS.items()):
        status = preset.note if preset.note else ("remunerated" if preset.remunerated else "")
        click.echo(f"  {key}: zone {preset.zone_code}, {preset.service.value}; {status}")


if __name__ == "__main__":
    main()
