from datetime import date

import pytest
from sklearn.base import clone

from bessuse.battery import BUILTIN_PROFILES, get_preset
from bessuse.errors import MissingData
from bessuse.estimators import ArbitragePayoffModel, ReservePayoffModel, UtilizationSweep
from bessuse.market_data import PriceKind
from bessuse.sweep import Application, ZoneData

from conftest import hourly_series


class TestArbitrageModel:
    def test_fit_attributes(self, two_level_month):
        model = ArbitragePayoffModel(wear_cost=40.0).fit(two_level_month)
        assert len(model.payoff_series_) == 31
        assert model.pput_ == 31
        assert model.ppur_ == 1.0
        assert model.skipped_days_ == 0
        # margin = 60 - 10/0.85 - 40
        assert model.payoff_series_.payoffs()[0] == pytest.approx(8.2352941176, rel=1e-9)

    def test_high_wear_cost_never_profitable(self, two_level_month):
        model = ArbitragePayoffModel(wear_cost=100.0).fit(two_level_month)
        assert model.ppur_ == 0.0

    def test_incomplete_days_skipped(self):
        prices = [10.0 + (i % 24) for i in range(24 + 5)]  # one full day, one stub
        model = ArbitragePayoffModel().fit(hourly_series(prices))
        assert model.skipped_days_ == 1
        assert len(model.payoff_series_) == 1
        assert model.total_periods_ == 2

    def test_wrong_kind_rejected(self):
        series = hourly_series([1.0] * 24, kind=PriceKind.RESERVE_CAPACITY)
        with pytest.raises(ValueError):
            ArbitragePayoffModel().fit(series)

    def test_get_params_round_trip(self):
        model = ArbitragePayoffModel(wear_cost=12.5, efficiency=0.9)
        params = model.get_params()
        assert params["wear_cost"] == 12.5
        rebuilt = ArbitragePayoffModel(**params)
        assert rebuilt.get_params() == params

    def test_clone_compatible(self):
        model = ArbitragePayoffModel(wear_cost=7.0, strict_ordering=True)
        cloned = clone(model)
        assert cloned.get_params() == model.get_params()

    def test_set_params(self):
        model = ArbitragePayoffModel().set_params(wear_cost=33.0)
        assert model.wear_cost == 33.0


class TestReserveModel:
    def make_model(self, preset_key="de-fcr", **kw):
        preset = get_preset(preset_key)
        return ReservePayoffModel(
            profile=BUILTIN_PROFILES[preset.profile_key],
            market=preset.config,
            **kw,
        )

    def test_capacity_only_fit(self):
        capacity = hourly_series([10.0] * 48, kind=PriceKind.RESERVE_CAPACITY)
        model = self.make_model(wear_cost=100.0).fit(capacity)
        assert model.ppur_ == 1.0
        assert model.payoff_series_.payoffs()[0] == pytest.approx(2.3, rel=1e-12)

    def test_paid_legs_need_spot(self):
        capacity = hourly_series([20.0] * 24, zone="DK2", kind=PriceKind.RESERVE_CAPACITY)
        spot = hourly_series([50.0] * 24, zone="DK2")
        model = self.make_model("dk2-fcrn", wear_cost=100.0).fit((capacity, spot))
        assert model.payoff_series_.payoffs()[0] == pytest.approx(1.5, rel=1e-12)
        assert model.ppur_ == 1.0

    def test_hours_without_spot_are_skipped_and_counted(self):
        capacity = hourly_series([20.0] * 48, zone="DK2", kind=PriceKind.RESERVE_CAPACITY)
        spot = hourly_series([50.0] * 24, zone="DK2")
        model = self.make_model("dk2-fcrn", wear_cost=100.0).fit((capacity, spot))
        assert model.skipped_hours_ == 24
        assert model.total_periods_ == 48
        assert model.ppur_ == pytest.approx(0.5)

    def test_unbalanced_profile_rejected(self):
        from bessuse.battery import Service, ServiceEnergyProfile

        bad = ServiceEnergyProfile(Service.FCR, 0.5, 0.1, 0.0, 0.0, 0.85)
        model = ReservePayoffModel(profile=bad, market=get_preset("de-fcr").config)
        with pytest.raises(ValueError):
            model.fit(hourly_series([10.0] * 24, kind=PriceKind.RESERVE_CAPACITY))

    def test_missing_profile_rejected(self):
        with pytest.raises(ValueError):
            ReservePayoffModel().fit(
                hourly_series([1.0] * 24, kind=PriceKind.RESERVE_CAPACITY)
            )

    def test_empty_capacity_series(self):
        capacity = hourly_series([], kind=PriceKind.RESERVE_CAPACITY)
        with pytest.raises(MissingData):
            self.make_model().fit(capacity)


class TestUtilizationSweep:
    def test_fit_produces_monotone_curves(self, two_level_month):
        sweep = UtilizationSweep(wear_min=0, wear_max=100, step=10).fit(
            {"DE-LU": ZoneData(day_ahead=two_level_month)}
        )
        (curve,) = sweep.curves_
        rates = [r for _, r in curve.points]
        assert rates == sorted(rates, reverse=True)

    def test_period_inferred_from_data(self, two_level_month):
        sweep = UtilizationSweep(step=50).fit(
            {"DE-LU": ZoneData(day_ahead=two_level_month)}
        )
        (curve,) = sweep.curves_
        assert curve.period == (date(2021, 1, 1), date(2021, 1, 31))

    def test_explicit_period(self, two_level_month):
        sweep = UtilizationSweep(
            step=50, period=(date(2021, 1, 1), date(2021, 2, 28))
        ).fit({"DE-LU": ZoneData(day_ahead=two_level_month)})
        (curve,) = sweep.curves_
        assert curve.periods_skipped == 28

    def test_reserve_application(self):
        capacity = hourly_series([10.0] * 48, kind=PriceKind.RESERVE_CAPACITY)
        preset = get_preset("de-fcr")
        sweep = UtilizationSweep(
            wear_min=0, wear_max=200, step=100,
            application=Application.FCR,
            profile=BUILTIN_PROFILES["france-2019-2021"],
            market=preset.config,
        ).fit({"DE-LU": ZoneData(capacity=capacity)})
        (curve,) = sweep.curves_
        assert [r for _, r in curve.points] == [1.0, 1.0, 0.0]

    def test_clone_compatible(self):
        sweep = UtilizationSweep(wear_max=60, step=5)
        assert clone(sweep).get_params()["wear_max"] == 60

    def test_unfitted_access_raises(self):
        from sklearn.exceptions import NotFittedError

        with pytest.raises(NotFittedError):
            UtilizationSweep().fitted_curves
