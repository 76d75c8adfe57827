import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bessuse.battery import (
    BUILTIN_PROFILES,
    MARKET_PRESETS,
    BatterySpec,
    EnergyPriceSource,
    Service,
    ServiceEnergyProfile,
    ServiceMarketConfig,
    check_energy_balance,
    get_preset,
    load_profiles_csv,
    require_remunerated,
    resolve_profile,
    wear_cost_from_capex,
)
from bessuse.errors import NonPositiveCycleLife, ServiceNotRemunerated


class TestWearCost:
    def test_reference_battery(self):
        # 300 EUR/kWh over 3000 equivalent full cycles -> 100 EUR/MWh
        assert wear_cost_from_capex(300, 3000) == 100.0

    def test_zero_capex(self):
        assert wear_cost_from_capex(0, 3000) == 0.0

    def test_cheaper_longer_lived_cell(self):
        assert wear_cost_from_capex(250, 5000) == pytest.approx(50.0)

    def test_non_positive_cycle_life(self):
        with pytest.raises(NonPositiveCycleLife):
            wear_cost_from_capex(300, 0)
        with pytest.raises(NonPositiveCycleLife):
            wear_cost_from_capex(300, -1)

    @given(
        capex=st.floats(min_value=0, max_value=5000),
        cycles=st.floats(min_value=1, max_value=50000),
        k=st.floats(min_value=0.01, max_value=100),
    )
    @settings(max_examples=300, deadline=None)
    def test_homogeneity(self, capex, cycles, k):
        base = wear_cost_from_capex(capex, cycles)
        assert wear_cost_from_capex(capex * k, cycles) == pytest.approx(base * k, rel=1e-9)
        assert wear_cost_from_capex(capex, cycles * k) == pytest.approx(base / k, rel=1e-9)


class TestEnergyBalance:
    def test_france_combined_profile(self):
        report = check_energy_balance(BUILTIN_PROFILES["france-2019-2021"])
        assert report.residual == pytest.approx(0.077 - 0.85 * 0.090, abs=1e-12)
        assert report.residual == pytest.approx(0.0005, abs=1e-12)
        assert report.passed

    def test_finland_profile_balances_exactly(self):
        report = check_energy_balance(BUILTIN_PROFILES["finland-2021"])
        assert report.residual == pytest.approx(0.0, abs=1e-12)
        assert report.passed

    def test_all_zero_profile(self):
        profile = ServiceEnergyProfile(Service.FCR, 0, 0, 0, 0, 0.85)
        report = check_energy_balance(profile)
        assert report.residual == 0.0
        assert report.passed

    @pytest.mark.parametrize("name", sorted(BUILTIN_PROFILES))
    def test_every_builtin_profile_balances(self, name):
        assert check_energy_balance(BUILTIN_PROFILES[name]).passed

    def test_unbalanced_profile_fails(self):
        profile = ServiceEnergyProfile(Service.FCR, 0.5, 0.1, 0.0, 0.0, 0.85)
        assert not check_energy_balance(profile).passed


class TestBatterySpec:
    @pytest.mark.parametrize("eta", [0.0, -0.1, 1.01, 2.0])
    def test_rejects_bad_efficiency(self, eta):
        with pytest.raises(ValueError):
            BatterySpec(wear_cost=10, efficiency=eta)

    def test_rejects_negative_costs(self):
        with pytest.raises(ValueError):
            BatterySpec(wear_cost=-1)
        with pytest.raises(ValueError):
            BatterySpec(wear_cost=0, opex=-1)

    def test_with_wear_cost_keeps_other_fields(self):
        spec = BatterySpec(10, 0.9, 2.0)
        new = spec.with_wear_cost(55)
        assert (new.wear_cost, new.efficiency, new.opex) == (55, 0.9, 2.0)

    def test_unity_efficiency_allowed(self):
        assert BatterySpec(0, efficiency=1.0).efficiency == 1.0


class TestMarketConfig:
    def test_paid_leg_requires_price_source(self):
        with pytest.raises(ValueError):
            ServiceMarketConfig(True, True, False, EnergyPriceSource.NONE)

    def test_capacity_only_config_allows_no_source(self):
        config = ServiceMarketConfig(True, False, False, EnergyPriceSource.NONE)
        assert config.capacity_paid

    def test_presets_mandatory_zones_refuse(self):
        for key in ("es-fcr", "it-fcr"):
            with pytest.raises(ServiceNotRemunerated):
                require_remunerated(get_preset(key))

    def test_germany_preset_has_no_energy_payment(self):
        preset = get_preset("de-fcr")
        assert preset.config.capacity_paid
        assert not preset.config.service_energy_paid
        assert not preset.config.balancing_energy_paid

    def test_default_profile_mapping(self):
        assert get_preset("fr-fcr").profile_key == "france-2019-2021"
        assert get_preset("de-fcr").profile_key == "france-2019-2021"
        assert get_preset("dk2-fcrn").profile_key == "finland-2021"
        assert get_preset("no-fcrn").profile_key == "finland-2021"

    def test_unknown_preset(self):
        with pytest.raises(KeyError):
            get_preset("mars-fcr")


class TestProfileLoading:
    def test_csv_round_trip(self, tmp_path):
        path = tmp_path / "profiles.csv"
        path.write_text(
            "service,E_sd,E_sc,E_bd,E_bc,eta,provenance\n"
            "fcr,0.054,0.053,0.023,0.037,0.85,custom france\n"
            "fcr_n,0.091,0.093,0.079,0.107,0.85,custom finland\n",
            encoding="utf-8",
        )
        profiles = load_profiles_csv(path)
        assert set(profiles) == {"custom france", "custom finland"}
        assert profiles["custom france"].service is Service.FCR
        assert profiles["custom finland"].balancing_charge == 0.107

    def test_resolve_builtin_name(self):
        assert resolve_profile("finland-2021") is BUILTIN_PROFILES["finland-2021"]

    def test_resolve_path(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text(
            "service,E_sd,E_sc,E_bd,E_bc,eta,provenance\n"
            "fcr,0.05,0.05,0.02,0.0624,0.85,x\n",
            encoding="utf-8",
        )
        profile = resolve_profile(str(path))
        assert profile.service_discharge == 0.05

    def test_resolve_unknown(self):
        with pytest.raises(KeyError):
            resolve_profile("atlantis-2020")

    def test_missing_columns(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("service,E_sd\nfcr,0.05\n", encoding="utf-8")
        with pytest.raises(ValueError):
            load_profiles_csv(path)


class TestProfileInvariants:
    def test_rejects_negative_energy(self):
        with pytest.raises(ValueError):
            ServiceEnergyProfile(Service.FCR, -0.01, 0.05, 0.02, 0.03, 0.85)

    def test_rejects_bad_efficiency(self):
        with pytest.raises(ValueError):
            ServiceEnergyProfile(Service.FCR, 0.05, 0.05, 0.02, 0.03, 1.2)

    def test_delivered_energy(self):
        profile = BUILTIN_PROFILES["france-2019-2021"]
        assert profile.delivered_energy == pytest.approx(0.077)
