"""Dependent truncated-Gaussian variant with clamped rates."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate
from scipy.stats import truncnorm

from bf2p.dep_ib import (
    bf01_depib,
    clamped_rates,
    log_ml_h0_depib,
    log_ml_h1_depib,
    prior_correlation_depib,
    sample_prior_depib,
)
from bf2p.ib import bf01_ib
from bf2p.model import DepIBPrior, Hypothesis, Method, TwoByTwoData
from bf2p.oracle import mc_log_marginal_depib
from conftest import random_small_datasets


class TestClampedRates:
    def test_interior_passthrough(self):
        p = clamped_rates(0.0, 0.3)
        assert (p.theta1, p.theta2) == (0.3, 0.3)

    def test_lower_clamp(self):
        p = clamped_rates(0.9, 0.1)
        assert p.theta1 == 0.0
        assert p.theta2 == pytest.approx(0.55)

    def test_upper_clamp(self):
        p = clamped_rates(-0.5, 0.9)
        assert p.theta1 == 1.0  # 1.15 clamped
        assert p.theta2 == pytest.approx(0.65)


class TestMarginals:
    def test_h1_matches_monte_carlo(self):
        d = TwoByTwoData(3, 10, 5, 12)
        cfg = DepIBPrior()
        lml = log_ml_h1_depib(d, cfg)
        est = mc_log_marginal_depib(d, cfg, Hypothesis.H1, n_draws=400_000, seed=5)
        assert abs(lml - est.log_value) < 3 * est.std_error

    def test_h0_matches_monte_carlo(self):
        d = TwoByTwoData(3, 10, 5, 12)
        cfg = DepIBPrior()
        lml = log_ml_h0_depib(d, cfg)
        est = mc_log_marginal_depib(d, cfg, Hypothesis.H0, n_draws=400_000, seed=6)
        assert abs(lml - est.log_value) < 3 * est.std_error

    def test_clamped_region_contributes_nothing_when_events_observed(self):
        # with y1 > 0 the theta1 = 0 wedge has zero likelihood, so the
        # marginal must not change when that wedge is (not) integrated;
        # equivalently it equals the MC estimate built from draws where
        # clamped theta1 = 0 samples score zero likelihood
        d = TwoByTwoData(2, 15, 0, 15)
        cfg = DepIBPrior(sigma_eta=0.5)
        lml = log_ml_h1_depib(d, cfg)
        est = mc_log_marginal_depib(d, cfg, Hypothesis.H1, n_draws=400_000, seed=7)
        assert abs(lml - est.log_value) < 3 * est.std_error

    def test_symmetric_data_invariant_under_group_swap(self):
        d = TwoByTwoData(5, 20, 5, 20)
        cfg = DepIBPrior()
        assert log_ml_h1_depib(d, cfg) == pytest.approx(
            log_ml_h1_depib(d.swapped(), cfg), rel=1e-9
        )

    def test_quadrature_vs_mc_on_random_small_datasets(self):
        cfg = DepIBPrior()
        for i, d in enumerate(random_small_datasets(10, n_max=25, seed=41)):
            lml = log_ml_h1_depib(d, cfg)
            est = mc_log_marginal_depib(d, cfg, Hypothesis.H1, n_draws=150_000, seed=500 + i)
            assert abs(lml - est.log_value) < 3 * est.std_error, d


class TestBayesFactor:
    def test_equal_count_curve_is_decreasing(self):
        cfg = DepIBPrior()
        vals = [bf01_depib(TwoByTwoData(y, 100, y, 100), cfg).bf01 for y in (0, 25, 50)]
        assert vals[0] > vals[1] > vals[2]

    def test_decreases_as_difference_scale_shrinks(self):
        d = TwoByTwoData(10, 100, 10, 100)
        narrow = bf01_depib(d, DepIBPrior(sigma_eta=0.2)).bf01
        wide = bf01_depib(d, DepIBPrior(sigma_eta=1.0)).bf01
        assert narrow < wide

    def test_group_swap_symmetry(self):
        d = TwoByTwoData(4, 18, 9, 21)
        cfg = DepIBPrior()
        assert bf01_depib(d, cfg).log_bf01 == pytest.approx(
            bf01_depib(d.swapped(), cfg).log_bf01, rel=1e-8
        )

    def test_method_tag(self):
        r = bf01_depib(TwoByTwoData(3, 10, 5, 12), DepIBPrior())
        assert r.method_tag is Method.QUADRATURE

    def test_near_uniform_prior_limit(self):
        # at sigma 50 the truncated prior is flat on the (eta, zeta) box;
        # the interior pushforward density on the rate square is then 1/2
        # (Jacobian 1, eta support width 2), so the H1 marginal halves
        # and BF01 doubles relative to the flat independent-Beta test
        d = TwoByTwoData(5, 20, 8, 20)
        wide = bf01_depib(d, DepIBPrior(sigma_eta=50.0, sigma_zeta=50.0)).bf01
        assert wide / bf01_ib(d, 1.0).bf01 == pytest.approx(2.0, rel=0.15)


class TestPriorDraws:
    def test_correlation_at_default_scales(self):
        assert prior_correlation_depib(DepIBPrior(), seed=0) == pytest.approx(0.77, abs=0.01)

    def test_correlation_vanishes_at_wide_difference_scale(self):
        r = prior_correlation_depib(DepIBPrior(sigma_eta=1.0), seed=0)
        assert r == pytest.approx(0.0, abs=0.01)

    def test_correlation_monotone_in_difference_scale(self):
        vals = [
            prior_correlation_depib(DepIBPrior(sigma_eta=s), seed=1)
            for s in (0.2, 0.4, 0.6, 0.8, 1.0)
        ]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_requires_enough_draws(self):
        with pytest.raises(ValueError):
            prior_correlation_depib(DepIBPrior(), n_draws=10_000)

    def test_clamp_fraction_matches_analytic_tail_mass(self):
        cfg = DepIBPrior()
        n = 2_000_000
        t1, _ = sample_prior_depib(cfg, n, seed=9)
        frac = float(np.mean((t1 == 0.0) | (t1 == 1.0)))
        eta_rv = truncnorm(-1 / cfg.sigma_eta, 1 / cfg.sigma_eta, loc=0, scale=cfg.sigma_eta)
        zeta_rv = truncnorm(
            (0 - cfg.zeta_center) / cfg.sigma_zeta,
            (1 - cfg.zeta_center) / cfg.sigma_zeta,
            loc=cfg.zeta_center,
            scale=cfg.sigma_zeta,
        )
        expected, _ = integrate.quad(
            lambda e: eta_rv.pdf(e) * (zeta_rv.cdf(e / 2) + 1 - zeta_rv.cdf(1 + e / 2)),
            -1.0,
            1.0,
            limit=200,
        )
        se = math.sqrt(expected * (1 - expected) / n)
        assert abs(frac - expected) < 3 * se

    def test_reproducible_given_seed(self):
        a1 = sample_prior_depib(DepIBPrior(), 1000, seed=4)
        a2 = sample_prior_depib(DepIBPrior(), 1000, seed=4)
        np.testing.assert_array_equal(a1[0], a2[0])
        np.testing.assert_array_equal(a1[1], a2[1])

    def test_alternative_zeta_reading_available(self):
        # kernel centered at 0 concentrates the grand mean low and
        # weakens the induced correlation
        r = prior_correlation_depib(DepIBPrior(zeta_center=0.0), seed=0)
        assert r == pytest.approx(0.745, abs=0.01)


class TestClampedRatesProperties:
    @given(eta=st.floats(-1, 1), zeta=st.floats(0, 1))
    @settings(max_examples=200, deadline=None)
    def test_rates_always_land_in_unit_interval(self, eta, zeta):
        p = clamped_rates(eta, zeta)
        assert 0.0 <= p.theta1 <= 1.0
        assert 0.0 <= p.theta2 <= 1.0

    @given(eta=st.floats(-1, 1), zeta=st.floats(0, 1))
    @settings(max_examples=200, deadline=None)
    def test_unclamped_points_reconstruct_coordinates(self, eta, zeta):
        p = clamped_rates(eta, zeta)
        interior = 0.0 < p.theta1 < 1.0 and 0.0 < p.theta2 < 1.0
        untouched = (0.0 <= zeta - eta / 2 <= 1.0) and (0.0 <= zeta + eta / 2 <= 1.0)
        if interior and untouched:
            assert p.theta2 - p.theta1 == pytest.approx(eta, abs=1e-12)
            assert 0.5 * (p.theta1 + p.theta2) == pytest.approx(zeta, abs=1e-12)
