import numpy as np
import pytest

from firebreak_opt.errors import ConfigurationError
from firebreak_opt.fire_engine import SpreadParams
from firebreak_opt.landscape import synthetic_landscape
from firebreak_opt.objective import (estimate_from_losses, evaluate,
                                     evaluate_with_cost, treatment_cost)
from firebreak_opt.placement import Solution, random_solution, default_block_shape
from firebreak_opt.scenarios import ScenarioSampler, make_sampler


class TestEstimateArithmetic:
    def test_fixed_losses(self):
        est = estimate_from_losses([10, 20, 30], flammable_count=100)
        assert est.mean_loss == 20
        # sample std = 10, std err = 10 / sqrt(3)
        assert est.std_err == pytest.approx(5.7735, abs=1e-4)
        assert est.replications == 3
        assert est.percent_burned == pytest.approx(20.0)

    def test_single_replication_has_no_stderr(self):
        est = estimate_from_losses([7], flammable_count=100)
        assert est.std_err is None

    def test_percent_bounds(self):
        est = estimate_from_losses([0, 0], flammable_count=50)
        assert est.percent_burned == 0.0
        est = estimate_from_losses([50, 50], flammable_count=50)
        assert est.percent_burned == 100.0


class TestEvaluate:
    def test_p_zero_landscape(self):
        ls = synthetic_landscape(10, 10, 0.0)
        samp = make_sampler("m2", ls)
        est = evaluate(ls, Solution.empty(), samp, SpreadParams(), 5, master_seed=3)
        assert est.mean_loss == 1.0
        assert est.percent_burned == pytest.approx(1.0)

    def test_enclosure_mean_is_one(self, grid5, default_params):
        ring = frozenset({6, 7, 8, 11, 13, 16, 17, 18})
        sol = Solution.from_cells(ring)
        center_only = ScenarioSampler(name="fixed", region=(2, 3, 2, 3))
        est = evaluate(grid5, sol, center_only, default_params, 10, master_seed=1)
        assert est.mean_loss == 1.0

    def test_deterministic_given_seed(self, fixture100, default_params):
        samp = make_sampler("m2", fixture100)
        sol = random_solution(fixture100, default_block_shape(), 0.05, seed=4)
        a = evaluate(fixture100, sol, samp, default_params, 30, master_seed=9)
        b = evaluate(fixture100, sol, samp, default_params, 30, master_seed=9)
        assert a == b

    def test_requires_two_replications(self, fixture100, default_params):
        samp = make_sampler("m2", fixture100)
        with pytest.raises(ConfigurationError):
            evaluate(fixture100, Solution.empty(), samp, default_params, 1,
                     master_seed=1)

    def test_monotone_under_common_draws(self, fixture100, default_params):
        # Extra blocks added outside the ignition region never raise the mean.
        sampler = ScenarioSampler(name="central", region=(45, 55, 45, 55),
                                  wind_speed=20.0)
        shape = default_block_shape()
        small = random_solution(fixture100, shape, 0.03, seed=8)
        from firebreak_opt.placement import FirebreakBlock, realize_block
        extra_blocks = [FirebreakBlock(fixture100.index(r, c), 0)
                        for r, c in ((5, 5), (5, 70), (80, 10), (75, 70), (20, 30))]
        cells = set(small.cells)
        for b in extra_blocks:
            cells |= realize_block(fixture100, shape, b)
        big = Solution(blocks=small.blocks + tuple(extra_blocks),
                       cells=frozenset(cells))
        e_small = evaluate(fixture100, small, sampler, default_params, 60,
                           master_seed=21)
        e_big = evaluate(fixture100, big, sampler, default_params, 60,
                         master_seed=21)
        assert e_big.mean_loss <= e_small.mean_loss

    def test_stderr_scaling_with_R(self, fixture100, default_params):
        samp = make_sampler("m2", fixture100)
        ratios = []
        for rep in range(4):
            e100 = evaluate(fixture100, Solution.empty(), samp, default_params,
                            100, master_seed=1000 + rep)
            e400 = evaluate(fixture100, Solution.empty(), samp, default_params,
                            400, master_seed=2000 + rep)
            ratios.append(e400.std_err / e100.std_err)
        assert 0.35 < np.mean(ratios) < 0.65


class TestEvaluateWithCost:
    def test_empty_solution_costs_nothing(self, fixture100, default_params):
        samp = make_sampler("m2", fixture100)
        le = evaluate_with_cost(fixture100, Solution.empty(), samp,
                                default_params, 10, master_seed=2)
        assert le.treatment_cost == 0.0
        assert le.total == le.estimate.mean_loss

    def test_total_is_sum(self):
        # mean 650 burned + 1,250 treated = 1,900 lost.
        est = estimate_from_losses([600, 700], flammable_count=10_000)
        assert est.mean_loss + 1250 == 1900

    def test_totals_exact(self, fixture100, default_params):
        samp = make_sampler("m2", fixture100)
        sol = random_solution(fixture100, default_block_shape(), 0.05, seed=6)
        le = evaluate_with_cost(fixture100, sol, samp, default_params, 20,
                                master_seed=5)
        assert le.treatment_cost == len(sol.cells)
        assert le.total == le.estimate.mean_loss + len(sol.cells)

    def test_value_raster_hook(self, fixture100):
        values = np.full(fixture100.n_cells, 2.5)
        sol = Solution.from_cells({1, 2, 3, 4})
        assert treatment_cost(sol, values) == 10.0
        assert treatment_cost(sol) == 4.0
