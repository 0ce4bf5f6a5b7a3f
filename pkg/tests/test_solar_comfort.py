import numpy as np
import pytest

from planopt.model import Location, Opening
from planopt.thermal import (
    ComfortModel,
    DiscomfortResult,
    comfort_band,
    comfort_band_series,
    degree_hours,
    discomfort_objective,
    incident_irradiance,
    make_synthetic_weather,
    shading_fraction,
    sun_position,
)
from planopt.thermal.rc import SimResult

EQUINOX = 81  # Cooper declination is zero on day 81


class TestSunPosition:
    def test_equator_equinox_noon(self):
        alt, _ = sun_position(0.0, 0.0, 0.0, EQUINOX, 12.0)
        assert alt == pytest.approx(90.0, abs=1.0)

    def test_40n_equinox_noon(self):
        alt, az = sun_position(40.0, 0.0, 0.0, EQUINOX, 12.0)
        assert alt == pytest.approx(50.0, abs=1.0)
        assert az == pytest.approx(180.0, abs=2.0)

    def test_midnight_below_horizon(self):
        alt, _ = sun_position(40.0, 0.0, 0.0, EQUINOX, 0.0)
        assert alt < 0.0

    def test_morning_sun_is_east(self):
        _, az = sun_position(40.0, 0.0, 0.0, EQUINOX, 8.0)
        assert 60.0 < az < 180.0

    def test_longitude_shifts_solar_noon(self):
        alt_here, _ = sun_position(40.0, -15.0, 0.0, EQUINOX, 13.0)
        alt_noon, _ = sun_position(40.0, 0.0, 0.0, EQUINOX, 12.0)
        assert alt_here == pytest.approx(alt_noon, abs=0.2)


class TestIncidentIrradiance:
    def test_sun_behind_facade_keeps_half_diffuse(self):
        assert incident_irradiance(30.0, 0.0, 500.0, 100.0, 180.0) == pytest.approx(50.0)

    def test_normal_incidence(self):
        assert incident_irradiance(0.0, 180.0, 800.0, 0.0, 180.0) == pytest.approx(800.0)

    def test_night(self):
        assert incident_irradiance(-10.0, 0.0, 500.0, 0.0, 180.0) == 0.0


class TestShadingFraction:
    def window(self, **kw):
        args = dict(overhang_depth=0.0, fin_depth_left=0.0, fin_depth_right=0.0)
        args.update(kw)
        return Opening("window", "S", 0.5, 2.0, 1.0, sill=0.9, **args)

    def test_no_devices(self):
        assert shading_fraction(self.window(), 45.0, 180.0, 180.0) == 0.0

    def test_full_overhang_at_45(self):
        # overhang depth equals window height, profile angle 45 deg
        op = self.window(overhang_depth=1.0)
        assert shading_fraction(op, 45.0, 180.0, 180.0) == pytest.approx(1.0)

    def test_half_overhang_at_45(self):
        op = self.window(overhang_depth=0.5)
        assert shading_fraction(op, 45.0, 180.0, 180.0) == pytest.approx(0.5)

    def test_sun_behind_wall(self):
        op = self.window(overhang_depth=1.0)
        assert shading_fraction(op, 45.0, 0.0, 180.0) == 0.0

    @pytest.mark.parametrize("alt,az", [(20, 150), (45, 180), (60, 210), (10, 120)])
    def test_monotone_in_depths(self, alt, az):
        prev = -1.0
        for d in np.linspace(0, 1.5, 7):
            f = shading_fraction(self.window(overhang_depth=d), alt, az, 180.0)
            assert 0.0 <= f <= 1.0
            assert f >= prev - 1e-12
            prev = f
        prev = -1.0
        for d in np.linspace(0, 1.5, 7):
            f = shading_fraction(
                self.window(fin_depth_left=d, fin_depth_right=d / 2), alt, az, 180.0
            )
            assert 0.0 <= f <= 1.0
            assert f >= prev - 1e-12
            prev = f


class TestComfortBand:
    def test_en15251_cat2_at_20(self):
        lo, hi = comfort_band(ComfortModel.en15251("II"), 20.0)
        assert lo == pytest.approx(22.4, abs=1e-9)
        assert hi == pytest.approx(28.4, abs=1e-9)

    def test_ashrae_80_at_20(self):
        lo, hi = comfort_band(ComfortModel.ashrae55(80), 20.0)
        assert lo == pytest.approx(20.5, abs=1e-9)
        assert hi == pytest.approx(27.5, abs=1e-9)

    def test_fixed_passthrough(self):
        assert comfort_band(ComfortModel.fixed(20, 25), 99.0) == (20, 25)

    def test_trm_clamped(self):
        lo_cold, hi_cold = comfort_band(ComfortModel.en15251("II"), -5.0)
        lo_10, hi_10 = comfort_band(ComfortModel.en15251("II"), 10.0)
        assert (lo_cold, hi_cold) == (lo_10, hi_10)
        lo_hot, hi_hot = comfort_band(ComfortModel.ashrae55(90), 50.0)
        lo_33, hi_33 = comfort_band(ComfortModel.ashrae55(90), 33.5)
        assert (lo_hot, hi_hot) == (lo_33, hi_33)

    @pytest.mark.parametrize(
        "model,width",
        [
            (ComfortModel.en15251("I"), 4.0),
            (ComfortModel.en15251("II"), 6.0),
            (ComfortModel.en15251("III"), 8.0),
            (ComfortModel.ashrae55(90), 5.0),
            (ComfortModel.ashrae55(80), 7.0),
        ],
    )
    def test_band_width(self, model, width):
        for trm in (5.0, 15.0, 25.0, 40.0):
            lo, hi = comfort_band(model, trm)
            assert hi - lo == pytest.approx(width, abs=1e-12)

    def test_invalid_models(self):
        with pytest.raises(ValueError):
            ComfortModel.fixed(25, 20)
        with pytest.raises(ValueError):
            ComfortModel.en15251("IV")
        with pytest.raises(ValueError):
            ComfortModel.ashrae55(85)


def brute_force_degree_hours(temps, occupied, bands):
    """Independent per-hour loop: the oracle the vectorized path must match."""
    heating = 0.0
    cooling = 0.0
    for h in range(8760):
        if not occupied[h]:
            continue
        lo, hi = bands[h // 24]
        if temps[h] < lo:
            heating += lo - temps[h]
        elif temps[h] > hi:
            cooling += temps[h] - hi
    return heating, cooling


class TestDegreeHours:
    def fixed_result(self, temps, occupied):
        return SimResult(
            ("z",), np.asarray(temps)[None, :], np.asarray(occupied, dtype=bool)[None, :]
        )

    def test_simple_cooling_sum(self):
        temps = np.full(8760, 22.0)
        temps[:3] = [26.0, 27.0, 28.0]
        occ = np.ones(8760, dtype=bool)
        r = degree_hours(self.fixed_result(temps, occ), ComfortModel.fixed(20, 25), make_synthetic_weather())
        assert r.per_space["z"] == (0.0, 6.0)

    def test_inside_band(self):
        temps = np.full(8760, 22.0)
        occ = np.ones(8760, dtype=bool)
        r = degree_hours(self.fixed_result(temps, occ), ComfortModel.fixed(20, 25), make_synthetic_weather())
        assert r.per_space["z"] == (0.0, 0.0)

    def test_heating_occupied_only(self):
        temps = np.full(8760, 18.0)
        occ = np.zeros(8760, dtype=bool)
        occ[:3] = True
        r = degree_hours(self.fixed_result(temps, occ), ComfortModel.fixed(20, 25), make_synthetic_weather())
        assert r.per_space["z"] == (6.0, 0.0)

    @pytest.mark.parametrize("seed", range(5))
    def test_oracle_agreement_sampled(self, seed):
        rng = np.random.default_rng(seed)
        w = make_synthetic_weather()
        model = [ComfortModel.fixed(19, 26), ComfortModel.en15251("II"), ComfortModel.ashrae55(80)][seed % 3]
        temps = rng.uniform(5, 40, 8760)
        occ = rng.random(8760) > 0.4
        bands = comfort_band_series(model, w)
        expect = brute_force_degree_hours(temps, occ, bands)
        got = degree_hours(self.fixed_result(temps, occ), model, w).per_space["z"]
        assert got[0] == pytest.approx(expect[0], abs=1e-9)
        assert got[1] == pytest.approx(expect[1], abs=1e-9)


class TestDiscomfortObjective:
    def test_zero(self):
        assert discomfort_objective(DiscomfortResult({"a": (0, 0)})) == 0.0

    def test_weighted(self):
        d = DiscomfortResult({"a": (10.0, 4.0)})
        assert discomfort_objective(d, 1, 1) == pytest.approx(14.0)
        assert discomfort_objective(d, 2, 1) == pytest.approx(24.0)

    def test_totals(self):
        d = DiscomfortResult({"a": (1.0, 2.0), "b": (3.0, 4.0)})
        assert d.total_heating == pytest.approx(4.0)
        assert d.total_cooling == pytest.approx(6.0)
