"""Summary metrics and permutation two-sample tests."""

import itertools
import math

import numpy as np
import pytest
from scipy.spatial.distance import cdist

from copbart.copulas import CopulaModel
from copbart.data import Dataset
from copbart.diagnostics import (
    PosteriorSummary,
    ci_cov,
    ci_length,
    cramer_statistic,
    cramer_test,
    ff_statistic,
    ff_test,
    gof_harness,
    rmse,
    write_gof_csv,
)
from copbart.sampler import SamplerConfig, run_chain


def _pairs(rho, n, rng):
    u1, u2 = CopulaModel("gaussian").sample(np.full(n, rho), rng)
    return np.column_stack([u1, u2])


def _cramer_loops(A, B):
    n, m = len(A), len(B)
    ab = cdist(A, B).mean()
    aa = cdist(A, A).sum() / (2 * n * n)
    bb = cdist(B, B).sum() / (2 * m * m)
    return n * m / (n + m) * (ab - aa - bb)


def _ff_loops(A, B):
    def frac(S, o, q):
        sx = [(p[0] > o[0]) if q in (0, 3) else (p[0] < o[0]) for p in S]
        sy = [(p[1] > o[1]) if q in (0, 1) else (p[1] < o[1]) for p in S]
        return sum(a and b for a, b in zip(sx, sy)) / len(S)

    def side(origins):
        return max(abs(frac(A, o, q) - frac(B, o, q)) for o in origins for q in range(4))

    return 0.5 * (side(A) + side(B))


class TestRmse:
    def test_exact_fit(self):
        truth = np.random.default_rng(0).random((3, 5))
        mean = np.repeat(truth[:, None, :], 2, axis=1)
        s = PosteriorSummary(mean, mean - 0.1, mean + 0.1)
        assert rmse(s, truth) == 0.0

    def test_constant_offset(self):
        truth = np.linspace(0.1, 0.9, 7)
        s = PosteriorSummary((truth + 0.1)[None, None], truth[None, None] - 1, truth[None, None] + 1)
        assert rmse(s, truth) == pytest.approx(0.01, rel=1e-12)
        assert rmse(s, truth, rooted=True) == pytest.approx(0.1, rel=1e-12)

    def test_replicate_and_chain_relabelling(self):
        rng = np.random.default_rng(1)
        mean = rng.random((4, 3, 6))
        truth = rng.random((4, 6))
        s = PosteriorSummary(mean, mean - 0.5, mean + 0.5)
        rp, cp = rng.permutation(4), rng.permutation(3)
        s2 = PosteriorSummary(mean[rp][:, cp], mean[rp][:, cp] - 0.5, mean[rp][:, cp] + 0.5)
        assert rmse(s2, truth[rp]) == pytest.approx(rmse(s, truth), rel=1e-14)
        assert ci_cov(s2, truth[rp]) == ci_cov(s, truth)
        assert ci_length(s2) == pytest.approx(ci_length(s), rel=1e-14)

    def test_hand_computed_rooted(self):
        # replicate MSEs 0.04 and 0.01
        mean = np.array([[[0.2, 0.2]], [[0.1, 0.1]]])
        s = PosteriorSummary(mean, mean, mean)
        assert rmse(s, np.zeros(2)) == pytest.approx(0.025)
        assert rmse(s, np.zeros(2), rooted=True) == pytest.approx(0.15)

    def test_dimension_mismatch(self):
        s = PosteriorSummary(np.zeros((2, 1, 3)), np.zeros((2, 1, 3)), np.zeros((2, 1, 3)))
        with pytest.raises(ValueError):
            rmse(s, np.zeros(4))
        with pytest.raises(ValueError):
            ci_cov(s, np.zeros((3, 3)))
        with pytest.raises(ValueError):
            PosteriorSummary(np.zeros((2, 1, 3)), np.zeros((2, 1, 3)), np.zeros((2, 1, 4)))


class TestCredibleIntervals:
    def test_degenerate_bands(self):
        truth = np.array([0.1, 0.5, 0.7])
        s = PosteriorSummary(truth, truth, truth)
        assert ci_length(s) == 0.0
        assert ci_cov(s, truth) == 1.0

    def test_truth_outside(self):
        truth = np.array([0.1, 0.5, 0.7])
        s = PosteriorSummary(truth, truth + 0.1, truth + 0.2)
        assert ci_cov(s, truth) == 0.0

    def test_hand_built_2x1x3(self):
        lower = np.array([[[0.0, 0.1, 0.2]], [[0.3, 0.3, 0.0]]])
        upper = np.array([[[0.4, 0.2, 0.5]], [[0.5, 0.9, 0.1]]])
        mean = (lower + upper) / 2
        truth = np.array([[0.4, 0.25, 0.3], [0.2, 0.5, 0.1]])
        s = PosteriorSummary(mean, lower, upper)
        # gaps 0.4 0.1 0.3 / 0.2 0.6 0.1 ; inside: yes no yes / no yes yes
        assert ci_length(s) == pytest.approx(1.7 / 6, rel=1e-14)
        assert ci_cov(s, truth) == pytest.approx(4 / 6, rel=1e-14)

    def test_band_order_enforced_not_mean(self):
        PosteriorSummary(np.array([2.0]), np.array([0.0]), np.array([1.0]))  # mean may sit outside
        with pytest.raises(ValueError):
            PosteriorSummary(np.array([0.5]), np.array([1.0]), np.array([0.0]))

    def test_from_draws(self):
        rng = np.random.default_rng(2)
        draws = rng.normal(size=(2, 3, 4000, 5))
        s = PosteriorSummary.from_draws(draws)
        assert s.shape == (2, 3, 5)
        np.testing.assert_allclose(s.lower, np.quantile(draws, 0.025, axis=2))
        np.testing.assert_allclose(s.mean, draws.mean(axis=2))

    def test_from_traces_tau_scale(self):
        rng = np.random.default_rng(3)
        data = Dataset(rng.random(20), rng.random(20), rng.random(20))
        model = CopulaModel("clayton")
        tr = run_chain(SamplerConfig(iterations=40), data, model, seed=0)
        s = PosteriorSummary.from_traces(tr, model)
        tau = model.tau(tr.theta[20:])
        np.testing.assert_allclose(s.mean[0, 0], tau.mean(axis=0), rtol=1e-12)
        np.testing.assert_allclose(s.upper[0, 0], np.quantile(tau, 0.975, axis=0), rtol=1e-12)


class TestStatistics:
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_cramer_matches_loops(self, seed):
        rng = np.random.default_rng(seed)
        A, B = rng.random((15, 2)), rng.random((11, 2))
        assert cramer_statistic(A, B) == pytest.approx(_cramer_loops(A, B), rel=1e-12)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_ff_matches_loops(self, seed):
        rng = np.random.default_rng(seed)
        A, B = rng.random((15, 2)), rng.random((11, 2))
        assert ff_statistic(A, B) == pytest.approx(_ff_loops(A, B), rel=1e-14)

    def test_symmetric(self):
        rng = np.random.default_rng(4)
        A, B = rng.random((20, 2)), rng.random((30, 2))
        assert cramer_statistic(A, B) == pytest.approx(cramer_statistic(B, A), rel=1e-12)
        assert ff_statistic(A, B) == ff_statistic(B, A)

    def test_identical_samples(self):
        A = np.random.default_rng(5).random((25, 2))
        assert cramer_statistic(A, A) == pytest.approx(0.0, abs=1e-12)
        assert ff_statistic(A, A) == 0.0
        assert cramer_test(A, A.copy(), 200, 0) == 1.0
        assert ff_test(A, A.copy(), 200, 0) == 1.0

    @pytest.mark.parametrize("test", [cramer_test, ff_test])
    def test_bad_input(self, test):
        A = np.zeros((5, 2))
        with pytest.raises(ValueError):
            test(A[:1], A)
        with pytest.raises(ValueError):
            test(A, A, n_perm=0)
        with pytest.raises(ValueError):
            test(A, np.zeros((5, 3)))
        B = A.copy()
        B[0, 0] = np.nan
        with pytest.raises(ValueError):
            test(A, B)


class TestPermutationPvalue:
    @pytest.mark.parametrize("test,stat", [(cramer_test, cramer_statistic), (ff_test, ff_statistic)])
    def test_matches_exact_enumeration(self, test, stat):
        rng = np.random.default_rng(6)
        A, B = rng.random((4, 2)), rng.random((4, 2)) + [0.2, 0.0]
        Z = np.vstack([A, B])
        obs = stat(A, B)
        vals = []
        for idx in itertools.combinations(range(8), 4):
            mask = np.zeros(8, bool)
            mask[list(idx)] = True
            vals.append(stat(Z[mask], Z[~mask]))
        exact = np.mean(np.array(vals) >= obs - 1e-12)
        n_perm = 20_000
        p = test(A, B, n_perm, 7)
        se = math.sqrt(exact * (1 - exact) / n_perm)
        assert abs(p - exact) < 4 * se + 2 / n_perm

    @pytest.mark.parametrize("test", [cramer_test, ff_test])
    def test_range_and_determinism(self, test):
        rng = np.random.default_rng(8)
        A, B = _pairs(0.5, 40, rng), 0.5 * _pairs(0.5, 40, rng)
        p = test(A, B, 99, 3)
        assert p == 1 / 100
        assert test(A, B, 99, 3) == p
        for n_perm in (1, 5):
            assert 1 / (n_perm + 1) <= test(A, B[::-1], n_perm, 4) <= 1.0

    @pytest.mark.parametrize("test", [cramer_test, ff_test])
    def test_single_permutation_support(self, test):
        rng = np.random.default_rng(9)
        vals = {test(rng.random((10, 2)), rng.random((10, 2)), 1, s) for s in range(20)}
        assert vals <= {0.5, 1.0}

    @pytest.mark.parametrize("test", [cramer_test, ff_test])
    def test_batches_do_not_change_result(self, test):
        # more permutations than one batch; prefix property of the stream is not assumed,
        # only that the same seed gives the same answer
        rng = np.random.default_rng(10)
        A, B = _pairs(0.3, 30, rng), _pairs(0.3, 30, rng)
        assert test(A, B, 600, 11) == test(A, B, 600, np.random.default_rng(11))


class TestGofHarness:
    def test_well_specified(self):
        rng = np.random.default_rng(12)
        model = CopulaModel("gaussian")
        theta = np.full(120, 0.6)
        u1, u2 = model.sample(theta, rng)
        rows = gof_harness(theta, u1, u2, model, replicates=20, n_perm=200, rng=13)
        assert [r.test for r in rows] == ["cramer", "ff"]
        for r in rows:
            assert r.mean > 0.3
            assert r.pvalues.shape == (20,)
            assert r.median == pytest.approx(np.median(r.pvalues))
            assert r.sd == pytest.approx(np.std(r.pvalues, ddof=1))

    def test_misspecified_is_rejected(self):
        rng = np.random.default_rng(14)
        model = CopulaModel("gaussian")
        u1, u2 = model.sample(np.full(200, 0.9), rng)
        rows = gof_harness(np.zeros(200), u1, u2, model, replicates=5, n_perm=200, rng=15)
        assert all(np.all(r.pvalues < 0.05) for r in rows)

    def test_single_replicate_and_determinism(self, tmp_path):
        rng = np.random.default_rng(16)
        model = CopulaModel("frank")
        theta = np.full(50, 3.0)
        u1, u2 = model.sample(theta, rng)
        a = gof_harness(theta, u1, u2, model, replicates=1, n_perm=50, rng=17)
        b = gof_harness(theta, u1, u2, model, replicates=1, n_perm=50, rng=17)
        assert all(math.isnan(r.sd) for r in a)
        assert [r.mean for r in a] == [r.mean for r in b]
        write_gof_csv(a, tmp_path / "a.csv")
        write_gof_csv(b, tmp_path / "b.csv")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        assert (tmp_path / "a.csv").read_text().splitlines()[0] == "test,mean,median,sd"

    def test_errors(self):
        model = CopulaModel("gaussian")
        with pytest.raises(ValueError):
            gof_harness(np.zeros(3), np.full(3, 0.5), np.full(3, 0.5), model, replicates=0)
        with pytest.raises(ValueError):
            gof_harness(np.zeros(4), np.full(3, 0.5), np.full(3, 0.5), model)
