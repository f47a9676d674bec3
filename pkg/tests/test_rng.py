import numpy as np

from firebreak_opt._rng import (mix64, replication_seed, stream_seed,
                                trial_uniforms)


class TestMixing:
    def test_mix64_is_stable(self):
        # Frozen values: the mixing function is part of the engine contract.
        assert mix64(0) == 0
        assert mix64(1) == 0x5692161D100B05E5
        assert mix64(2) == 0xDBD238973A2B148A

    def test_replication_seeds_distinct(self):
        seeds = {replication_seed(42, r) for r in range(10_000)}
        assert len(seeds) == 10_000

    def test_stream_tags_distinct(self):
        assert stream_seed(1, "init", 0) != stream_seed(1, "init", 1)
        assert stream_seed(1, "init") != stream_seed(1, "eval")
        assert stream_seed(1, 2) != stream_seed(2, 1)

    def test_repeatable(self):
        assert replication_seed(7, 3) == replication_seed(7, 3)
        assert stream_seed(7, "final") == stream_seed(7, "final")


class TestTrialUniforms:
    def test_keyed_by_pair_not_callsite(self):
        src = np.array([5, 6, 7], dtype=np.int64)
        dst = np.array([6, 7, 8], dtype=np.int64)
        a = trial_uniforms(99, src, dst)
        b = trial_uniforms(99, src[::-1].copy(), dst[::-1].copy())
        assert np.allclose(a, b[::-1])

    def test_range_and_spread(self):
        src = np.repeat(np.arange(200, dtype=np.int64), 8)
        dst = np.tile(np.arange(8, dtype=np.int64), 200) + src
        u = trial_uniforms(3, src, dst)
        assert (u >= 0).all() and (u < 1).all()
        # Crude uniformity: mean near 1/2, variance near 1/12.
        assert abs(u.mean() - 0.5) < 0.02
        assert abs(u.var() - 1 / 12) < 0.01

    def test_seed_changes_everything(self):
        src = np.arange(100, dtype=np.int64)
        dst = src + 1
        a = trial_uniforms(1, src, dst)
        b = trial_uniforms(2, src, dst)
        assert not np.allclose(a, b)

    def test_direction_matters(self):
        src = np.array([3], dtype=np.int64)
        dst = np.array([4], dtype=np.int64)
        forward = trial_uniforms(5, src, dst)
        backward = trial_uniforms(5, dst, src)
        assert forward[0] != backward[0]
