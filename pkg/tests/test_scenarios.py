import numpy as np
import pytest
from scipy import stats

from firebreak_opt.errors import ConfigurationError, FormatError
from firebreak_opt.fire_engine import firebreak_mask
from firebreak_opt.landscape import DIRECTIONS, synthetic_landscape
from firebreak_opt.scenarios import (ScenarioSampler, central_region,
                                     load_weather_table, make_sampler,
                                     sample_scenario)


def no_breaks(landscape):
    return firebreak_mask(landscape, frozenset())


class TestCentralRegion:
    def test_m1_region_is_one_ninth(self, fixture100):
        r0, r1, c0, c1 = central_region(fixture100)
        assert (r1 - r0) * (c1 - c0) == pytest.approx(10_000 / 9, rel=0.05)
        assert r0 == (100 - (r1 - r0)) // 2

    def test_m1_ignitions_stay_central(self, fixture100):
        samp = make_sampler("m1", fixture100)
        r0, r1, c0, c1 = central_region(fixture100)
        mask = no_breaks(fixture100)
        rng = np.random.default_rng(1)
        for _ in range(500):
            draw = samp.sample(fixture100, mask, rng)
            row, col = divmod(draw.ignition_cell, 100)
            assert r0 <= row < r1 and c0 <= col < c1


class TestM2Uniformity:
    def test_ignition_histogram_chi_square(self):
        # 10,000 draws over a 100-cell landscape: preregistered chi2 bound at
        # the 0.999 quantile of chi2(99).
        ls = synthetic_landscape(10, 10, 0.5)
        samp = make_sampler("m2", ls)
        mask = no_breaks(ls)
        rng = np.random.default_rng(12345)
        counts = np.zeros(100)
        n = 10_000
        for _ in range(n):
            counts[samp.sample(ls, mask, rng).ignition_cell] += 1
        expected = n / 100
        chi2 = float(((counts - expected) ** 2 / expected).sum())
        assert chi2 < stats.chi2.ppf(0.999, df=99)

    def test_weather_uniform_over_compass(self, fixture100):
        samp = make_sampler("m2", fixture100)
        mask = no_breaks(fixture100)
        rng = np.random.default_rng(9)
        seen = {samp.sample(fixture100, mask, rng).weather.wind_direction
                for _ in range(400)}
        assert seen == set(DIRECTIONS)

    def test_fixed_wind_speed(self, fixture100):
        samp = make_sampler("m2", fixture100, wind_speed=17.0)
        mask = no_breaks(fixture100)
        rng = np.random.default_rng(2)
        assert samp.sample(fixture100, mask, rng).weather.wind_speed == 17.0


class TestM3Weather:
    def test_single_row_file_degenerate(self, fixture100, tmp_path):
        wf = tmp_path / "weather.csv"
        wf.write_text("wind_speed,wind_direction,temperature,relative_humidity\n"
                      "22.5,NW,31.0,18.0\n")
        samp = make_sampler("m3", fixture100, weather_file=wf)
        mask = no_breaks(fixture100)
        rng = np.random.default_rng(4)
        for _ in range(10):
            w = samp.sample(fixture100, mask, rng).weather
            assert (w.wind_speed, w.wind_direction) == (22.5, "NW")
            assert (w.temperature, w.relative_humidity) == (31.0, 18.0)

    def test_rows_sampled_uniformly(self, fixture100, tmp_path):
        wf = tmp_path / "weather.csv"
        wf.write_text("wind_speed,wind_direction,temperature,relative_humidity\n"
                      "10,N,20,40\n30,S,25,30\n")
        table = load_weather_table(wf)
        rng = np.random.default_rng(8)
        speeds = [table.sample(rng).wind_speed for _ in range(2000)]
        assert 0.4 < np.mean([s == 10 for s in speeds]) < 0.6

    def test_m3_requires_weather_file(self, fixture100):
        with pytest.raises(ConfigurationError):
            make_sampler("m3", fixture100)

    def test_bad_weather_header(self, fixture100, tmp_path):
        wf = tmp_path / "weather.csv"
        wf.write_text("speed,dir,temp,rh\n10,N,20,40\n")
        with pytest.raises(FormatError):
            load_weather_table(wf)


class TestSampling:
    def test_sample_scenario_deterministic(self, fixture100):
        samp = make_sampler("m2", fixture100)
        a = sample_scenario(samp, fixture100, frozenset(), seed=33)
        b = sample_scenario(samp, fixture100, frozenset(), seed=33)
        assert a == b

    def test_rejects_firebreak_ignitions(self, fixture100):
        samp = make_sampler("m2", fixture100)
        breaks = frozenset(range(5000))
        for seed in range(30):
            draw = sample_scenario(samp, fixture100, breaks, seed=seed)
            assert draw.ignition_cell not in breaks

    def test_empty_region_errors(self):
        ls = synthetic_landscape(6, 6, 0.5)
        samp = make_sampler("m2", ls)
        with pytest.raises(ConfigurationError):
            sample_scenario(samp, ls, frozenset(range(36)), seed=1)

    def test_custom_region_validated(self):
        ls = synthetic_landscape(6, 6, 0.5)
        samp = ScenarioSampler(name="bad", region=(0, 10, 0, 10))
        with pytest.raises(ConfigurationError):
            sample_scenario(samp, ls, frozenset(), seed=1)
