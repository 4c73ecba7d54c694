from __future__ import annotations

import numpy as np
import pytest

from algostakes import (
    BracketError,
    Classifier,
    InvalidInputError,
    LogisticDistribution,
    NormalDistribution,
    NullClassifierError,
    condorcet_reward,
    cutpoint_monotonicity_check,
    median_optimal_k,
    prevalence,
    responsiveness,
    social_welfare,
    solve_k_roots,
    sw_optimal_reward,
    voter_payoff,
)
from algostakes.distributions import CostDistribution
from algostakes.voters import cutpoint_value, payoff_at_threshold

from .conftest import make_scenario

# (mean, t) -> (k0, k1, cutpoint); 50-digit mpmath solutions of the two fixed-point equations
ROOTS = {
    (0.0, 0.5): (-0.422040427807381, 1.117327115816771, 0.271177730781263),
    (1.0, 0.5): (-0.117327115816771, 1.422040427807381, 0.728822269218737),
    (1.0, 1.25): (0.417852248572146, 1.930414734323587, 1.136610454342243),
    (0.0, 0.2): (-0.615329086722040, 0.894003375399760, 0.109387620871297),
    (0.0, 0.8): (-0.243016802638896, 1.351476532174017, 0.427304799653752),
}


class TestVoterPayoff:
    def test_null_classifier_non_complier(self, accuracy_shifted):
        v = voter_payoff(3.0, 0.3, Classifier(0, 1), accuracy_shifted)
        assert v == pytest.approx(0.5 * 0.158655253931457, abs=1e-14)
        assert v == pytest.approx(0.08, abs=0.005)

    def test_null_classifier_median_with_high_externality(self, inefficient):
        assert voter_payoff(0.0, 1.0, Classifier(0, 1), inefficient) == pytest.approx(0.2, abs=0.005)

    @pytest.mark.parametrize("gamma", [-1.5, -0.2, 0.0])
    def test_zero_reward_complier(self, accuracy_std, gamma):
        assert voter_payoff(0.0, gamma, Classifier(1, 0.7), accuracy_std) == pytest.approx(-gamma + 0.25)

    def test_indifferent_at_threshold(self, accuracy_std):
        c = Classifier(1, 1)
        k = 2.0 * responsiveness(c, 0.75)
        comply = voter_payoff(2.0, k, c, accuracy_std)
        F = accuracy_std.distribution.cdf(k)
        assert comply == pytest.approx(-k * F + 0.5 * F, abs=1e-14)

    def test_non_finite(self, accuracy_std):
        with pytest.raises(InvalidInputError):
            voter_payoff(float("nan"), 0.0, Classifier(1, 1), accuracy_std)


class TestRoots:
    @pytest.mark.parametrize("key", sorted(ROOTS))
    def test_frozen_values(self, key):
        mean, t = key
        s = make_scenario(mean, t)
        sol = solve_k_roots(s)
        k0, k1, cut = ROOTS[key]
        assert (sol.k0, sol.k1) == pytest.approx((k0, k1), abs=1e-12)
        assert cutpoint_value(s, sol) == pytest.approx(cut, abs=1e-12)
        assert max(abs(sol.residual_k0), abs(sol.residual_k1)) <= 1e-10
        assert sol.k0 < t < sol.k1

    @pytest.mark.parametrize("key", [(0.0, 0.5), (1.0, 1.25)])
    def test_mpmath_recomputation(self, key):
        mp = pytest.importorskip("mpmath")
        mp.mp.dps = 40
        mean, t = map(mp.mpf, key)

        def F(k):
            return mp.ncdf(k - mean)

        def f(k):
            return mp.npdf(k - mean)

        k0 = mp.findroot(lambda k: k - t + F(k) / f(k), t - 0.5)
        k1 = mp.findroot(lambda k: k - t - (1 - F(k)) / f(k), t + 0.5)
        sol = solve_k_roots(make_scenario(*key))
        assert (sol.k0, sol.k1) == pytest.approx((float(k0), float(k1)), abs=1e-12)

    @pytest.mark.parametrize("m", [0.0, 0.7, 2.0, 3.5])
    def test_symmetric_distribution_identity(self, m):
        sol = solve_k_roots(make_scenario(m, t=m))
        assert sol.k0 == pytest.approx(2 * m - sol.k1, abs=1e-8)

    def test_logistic_roots(self):
        s = make_scenario().replace(distribution=LogisticDistribution(0.3, 0.6), externality_t=0.9)
        sol = solve_k_roots(s)
        F, f = s.distribution.cdf, s.distribution.pdf
        assert sol.k0 == pytest.approx(0.9 - F(sol.k0) / f(sol.k0), abs=1e-10)
        assert sol.k1 == pytest.approx(0.9 + (1 - F(sol.k1)) / f(sol.k1), abs=1e-10)

    def test_bracket_failure_on_malformed_distribution(self):
        class Stuck(CostDistribution):
            # the hazard ratios never let k = t +/- ratio cross
            def cdf(self, x):
                return 0.5

            def pdf(self, x):
                return 1e-9

            def median(self):
                return 0.0

        with pytest.raises(BracketError):
            solve_k_roots(make_scenario().replace(distribution=Stuck()))


class TestMedianChoice:
    @pytest.mark.parametrize(
        "mean, t, branch, k",
        [(0.0, 0.5, "k1", 1.117327115816771), (1.0, 0.5, "k0", -0.117327115816771),
         (1.0, 1.25, "k1", 1.930414734323587)],
    )
    def test_branches(self, mean, t, branch, k):
        ch = median_optimal_k(make_scenario(mean, t))
        assert ch.branch == branch and ch.k_star == pytest.approx(k, abs=1e-12)

    @pytest.mark.parametrize("mean", np.linspace(-1, 2, 13))
    @pytest.mark.parametrize("t", [0.0, 0.3, 0.9, 1.6])
    def test_symmetric_shortcut(self, mean, t):
        ch = median_optimal_k(make_scenario(mean, t))
        assert (ch.branch == "k1") == (mean <= t)

    def test_branch_maximizes_median_payoff(self, inefficient):
        sol = solve_k_roots(inefficient)
        ch = median_optimal_k(inefficient)
        med = inefficient.median_cost
        other = sol.k0 if ch.branch == "k1" else sol.k1
        assert payoff_at_threshold(ch.k_star, med, inefficient) > payoff_at_threshold(other, med, inefficient)


class TestCondorcet:
    @pytest.mark.parametrize("c, r", [(Classifier(0, 0.96101), 6.02), (Classifier(0.17516, 1), -1.34)])
    def test_reward_values(self, accuracy_shifted, c, r):
        assert condorcet_reward(c, accuracy_shifted).reward == pytest.approx(r, abs=0.01)

    def test_null_classifier_flag(self, accuracy_shifted):
        cr = condorcet_reward(Classifier(0.4, 0.6), accuracy_shifted)
        assert cr.indifferent and cr.reward == 0.0

    def test_indifference_across_classifiers(self, accuracy_std):
        rng = np.random.default_rng(11)
        gammas = [-1.0, 0.0, 0.4, 2.0]
        vals = {g: [] for g in gammas}
        while len(vals[0.0]) < 20:
            c = Classifier(*rng.uniform(0, 1, 2))
            if abs(c.tilt) < 0.05:
                continue
            r = condorcet_reward(c, accuracy_std).reward
            for g in gammas:
                vals[g].append(voter_payoff(r, g, c, accuracy_std))
            assert prevalence(c, 0.75, r, accuracy_std.distribution) == pytest.approx(
                accuracy_std.distribution.cdf(1.117327115816771), abs=1e-9
            )
        assert all(np.ptp(v) <= 1e-8 for v in vals.values())

    @pytest.mark.parametrize("c", [Classifier(1, 1), Classifier(0.2, 0.1), Classifier(0.9, 0.6)])
    @pytest.mark.parametrize("branch", ["comply", "shirk"])
    def test_each_branch_single_peaked_in_reward(self, accuracy_shifted, c, branch):
        # thresholds stay within +-15, so these costs pin the behavior
        gamma = -50.0 if branch == "comply" else 50.0
        rs = np.linspace(-30, 30, 6001)
        v = np.array([voter_payoff(r, gamma, c, accuracy_shifted) for r in rs])
        steps = np.diff(v)
        signs = np.sign(steps[np.abs(steps) > 1e-13])
        assert np.count_nonzero(np.diff(signs) < 0) == 1
        assert np.count_nonzero(np.diff(signs) > 0) == 0


class TestWelfare:
    def test_democratic_outcome(self, accuracy_std):
        c = Classifier(1, 0.6691282953316421)
        r = 1.117327115816771 / responsiveness(c, 0.75)
        assert social_welfare(r, c, accuracy_std) == pytest.approx(0.65, abs=0.005)

    def test_null_outcome(self, inefficient):
        assert social_welfare(0.0, Classifier(0, 1), inefficient) == pytest.approx(0.28, abs=0.005)

    def test_exogenous_reward(self, inefficient):
        assert social_welfare(5.0, Classifier(1, 0.8377), inefficient) == pytest.approx(0.43, abs=0.01)

    def test_optimal_reward_values(self, accuracy_std, inefficient):
        assert sw_optimal_reward(Classifier(1, 1), accuracy_std) == pytest.approx(1.0)
        assert sw_optimal_reward(Classifier(0.3, 0.9), accuracy_std.replace(externality_t=0.0)) == 0.0
        r = sw_optimal_reward(Classifier(1, 0.9), inefficient)
        assert r == pytest.approx(1.25 / 0.45)
        h = 1e-5
        d = (social_welfare(r + h, Classifier(1, 0.9), inefficient)
             - social_welfare(r - h, Classifier(1, 0.9), inefficient)) / (2 * h)
        assert abs(d) <= 1e-8

    def test_null_classifier_has_no_optimum(self, accuracy_std):
        with pytest.raises(NullClassifierError):
            sw_optimal_reward(Classifier(0.5, 0.5), accuracy_std)

    @pytest.mark.parametrize("seed", range(5))
    def test_sandwiched_between_individual_optima(self, seed):
        rng = np.random.default_rng(seed)
        for _ in range(10):
            s = make_scenario(rng.normal(0, 1), rng.uniform(0, 2), std=rng.uniform(0.3, 2))
            c = Classifier(*rng.uniform(0, 1, 2))
            rho = responsiveness(c, s.phi)
            if abs(rho) < 1e-3:
                continue
            sol = solve_k_roots(s)
            r0, r1, rsw = sol.k0 / rho, sol.k1 / rho, sw_optimal_reward(c, s)
            lo, hi = sorted((r0, r1))
            assert lo < rsw < hi


class TestCutpoint:
    @pytest.mark.parametrize("mean, t_lo, t_hi", [(0.0, 0.2, 0.8), (1.0, 0.5, 1.25)])
    def test_increases_with_externality(self, mean, t_lo, t_hi):
        rep = cutpoint_monotonicity_check(make_scenario(mean, t_lo), make_scenario(mean, t_hi))
        assert rep.increased

    def test_equal_externality(self):
        rep = cutpoint_monotonicity_check(make_scenario(0, 0.5), make_scenario(0, 0.5))
        assert rep.equal and not rep.increased

    def test_requires_shared_distribution(self):
        with pytest.raises(InvalidInputError):
            cutpoint_monotonicity_check(make_scenario(0, 0.2), make_scenario(1, 0.8))

    def test_derivative_is_compliance_gap(self):
        s = make_scenario(0.3, 0.6)
        h = 1e-6
        d = (cutpoint_value(s.replace(externality_t=0.6 + h))
             - cutpoint_value(s.replace(externality_t=0.6 - h))) / (2 * h)
        sol = solve_k_roots(s)
        F = NormalDistribution(0.3, 1).cdf
        assert d == pytest.approx(F(sol.k1) - F(sol.k0), abs=1e-6)
