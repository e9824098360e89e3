"""gamma-variation exactness and the path experiments."""

import itertools

import numpy as np
import pytest

import symbolkit as sk
from symbolkit import catalog, coefficients as co
from symbolkit.pathstats import growth_experiment, variation_experiment


def brute_force_variation(values, gamma):
    """Enumerate all subpartitions containing both endpoints."""
    v = np.asarray(values, dtype=float)
    n = len(v)
    best = 0.0
    for r in range(n - 1):
        for mids in itertools.combinations(range(1, n - 1), r):
            pts = [0, *mids, n - 1]
            total = sum(abs(v[b] - v[a]) ** gamma for a, b in zip(pts, pts[1:]))
            best = max(best, total)
    return best


class TestGammaVariation:
    def test_monotone_telescopes_at_gamma_one(self):
        res = sk.gamma_variation([0.0, 0.3, 1.0], 1.0)
        assert res.value == pytest.approx(1.0, abs=1e-15)

    def test_updown_beats_endpoints(self):
        res = sk.gamma_variation([0.0, 1.0, 0.0], 2.0)
        assert res.value == pytest.approx(2.0, abs=1e-15)
        assert list(res.partition) == [0, 1, 2]

    def test_sign_change_sums_squares(self):
        res = sk.gamma_variation([0.0, 1.0, -1.0], 2.0)
        assert res.value == pytest.approx(5.0, abs=1e-15)

    def test_invalid_gamma_rejected(self):
        with pytest.raises(ValueError):
            sk.gamma_variation([0.0, 1.0], 0.0)
        with pytest.raises(ValueError):
            sk.gamma_variation([0.0, 1.0], -1.0)

    def test_short_sequence_rejected(self):
        with pytest.raises(ValueError):
            sk.gamma_variation([1.0], 2.0)

    def test_dp_equals_brute_force(self):
        rng = np.random.default_rng(99)
        for trial in range(100):
            n = int(rng.integers(2, 13))
            values = rng.normal(size=n)
            gamma = float(rng.choice([1.5, 2.0, 3.0]))
            res = sk.gamma_variation(values, gamma)
            want = brute_force_variation(values, gamma)
            assert abs(res.value - want) <= 1e-12, (trial, values, gamma)

    def test_dp_handles_plateaus_and_monotone_runs(self):
        for values in ([0.0, 1.0, 1.0, 1.0, 0.0], [0.0, 1.0, 2.0, 3.0],
                       [5.0, 5.0, 5.0], [1.0, -1.0, 1.0, -1.0]):
            for gamma in (1.5, 2.0, 3.0):
                res = sk.gamma_variation(values, gamma)
                assert abs(res.value - brute_force_variation(values, gamma)) <= 1e-12

    def test_partition_invariants(self):
        rng = np.random.default_rng(7)
        values = rng.normal(size=40)
        res = sk.gamma_variation(values, 2.5)
        assert res.partition[0] == 0
        assert res.partition[-1] == len(values) - 1
        assert res.reevaluate(values) == pytest.approx(res.value, abs=1e-12)

    def test_vector_valued_paths(self):
        rng = np.random.default_rng(8)
        values = rng.normal(size=(9, 2))
        res = sk.gamma_variation(values, 2.0)
        # brute force with euclidean increments
        best = 0.0
        n = len(values)
        for r in range(n - 1):
            for mids in itertools.combinations(range(1, n - 1), r):
                pts = [0, *mids, n - 1]
                best = max(best, sum(np.linalg.norm(values[b] - values[a]) ** 2.0
                                     for a, b in zip(pts, pts[1:])))
        assert res.value == pytest.approx(best, abs=1e-12)

    def test_nonincreasing_in_gamma_for_small_increments(self):
        rng = np.random.default_rng(10)
        raw = np.cumsum(rng.normal(size=60))
        values = raw / (2 * np.ptp(raw))       # every increment is <= 1
        gammas = [0.5, 1.0, 1.5, 2.0, 3.0]
        vals = [sk.gamma_variation(values, g).value for g in gammas]
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_refinement_monotone_below_one(self):
        rng = np.random.default_rng(11)
        values = rng.normal(size=30)
        for gamma in (0.5, 0.8, 1.0):
            full = sk.gamma_variation(values, gamma).value
            keep = sorted({0, len(values) - 1, *rng.choice(len(values), 10).tolist()})
            coarse = sk.gamma_variation(values[keep], gamma).value
            assert coarse <= full + 1e-12


class TestVariationExperiment:
    def test_zero_coefficient_vanishes(self):
        model = sk.SdeModel(coefficient=co.zero(), driver=catalog.bm_driver())
        rows = variation_experiment(model, [1.0, 2.0], [4, 6], trials=4, seed=0)
        assert all(r.median == 0.0 for r in rows)

    def test_bm_quadratic_variation_stabilizes(self):
        rows = variation_experiment(catalog.bm_unit(), [2.0], [10, 12],
                                    trials=12, seed=5)
        for r in rows:
            assert abs(r.median - 1.0) <= 0.25

    def test_bm_absolute_variation_grows_sqrt2(self):
        rows = variation_experiment(catalog.bm_unit(), [1.0], [8, 9, 10],
                                    trials=32, seed=6)
        meds = [r.median for r in rows]
        for a, b in zip(meds, meds[1:]):
            assert b / a == pytest.approx(np.sqrt(2.0), rel=0.1)

    def test_quartiles_ordered(self):
        rows = variation_experiment(catalog.bm_unit(), [1.5], [6], trials=16, seed=7)
        for r in rows:
            assert r.q25 <= r.median <= r.q75


class TestGrowthExperiment:
    def test_zero_coefficient_profile(self):
        model = sk.SdeModel(coefficient=co.zero(), driver=catalog.bm_driver())
        profile = growth_experiment(model, 0.0, [1.0, 3.0], [0.01, 0.1],
                                    [10.0, 100.0], paths=64, seed=0,
                                    steps_per_run=16)
        assert all(r.median_max == 0.0 for r in profile.rows)
        assert all(v["toward_zero"] for v in profile.trends.values())

    def test_bm_small_time_threshold(self):
        profile = growth_experiment(catalog.bm_unit(), 0.0, [1.0, 3.0],
                                    [1e-4, 1e-3, 1e-2, 1e-1], [],
                                    paths=2000, seed=1, steps_per_run=128)
        # above the index (lambda=3 > 2): scaled max shrinks toward t=0
        assert profile.trends[("small", 3.0)]["toward_zero"]
        # below it (lambda=1 < 2): it blows up instead
        assert not profile.trends[("small", 1.0)]["toward_zero"]

    def test_bm_large_time_threshold(self):
        profile = growth_experiment(catalog.bm_unit(), 0.0, [1.0, 3.0], [],
                                    [10.0, 100.0, 1000.0], paths=2000, seed=2,
                                    steps_per_run=128)
        # beta_0 = 2 for BM: lambda = 1 < 2 decays at infinity
        assert profile.trends[("large", 1.0)]["toward_zero"]
        assert not profile.trends[("large", 3.0)]["toward_zero"]
