from __future__ import annotations

import csv
import json

import numpy as np
import pytest

from algostakes import (
    Classifier,
    DesignerPayoffs,
    InvalidInputError,
    condorcet_reward,
    confusion_fractions,
    designer_best_response,
    designer_expected_payoff,
    prevalence,
    solve_k_roots,
)
from algostakes.oracle import (
    agent_payoffs,
    designer_payoff_lattice,
    grid_designer_argmax,
    grid_median_reward_argmax,
    simulate_population,
    verify_condorcet,
)
from algostakes.voters import voter_payoff

from .conftest import make_scenario

N_LARGE = 1_000_000


def _within_sigma(sim: float, p: float, n: int, z: float) -> bool:
    sd = np.sqrt(p * (1 - p) / n)
    if sd == 0.0:
        return sim == p
    return abs(sim - p) <= z * sd


class TestDesignerLattice:
    def test_accuracy_reward_ten(self, accuracy_std):
        c, _ = grid_designer_argmax(10.0, accuracy_std, 401)
        assert abs(c.delta1 - 1.0) <= 5e-3
        assert abs(c.delta0 - 0.37) <= 5e-3

    def test_compliance_designer(self):
        c, _ = grid_designer_argmax(10.0, make_scenario(designer=DesignerPayoffs(1, 1, 0, 0)), 401)
        assert c == Classifier(1.0, 1.0)

    def test_zero_reward_follows_signal(self, accuracy_std):
        c, v = grid_designer_argmax(0.0, accuracy_std, 401)
        assert c == Classifier(1.0, 1.0)
        assert v == pytest.approx(0.75, abs=1e-14)

    def test_lattice_matches_pointwise_payoff(self, accuracy_shifted):
        g, vals = designer_payoff_lattice(2.5, accuracy_shifted, 11)
        for i in (0, 3, 10):
            for j in (0, 7, 10):
                c = Classifier(float(g[i]), float(g[j]))
                assert vals[i, j] == pytest.approx(designer_expected_payoff(c, 2.5, accuracy_shifted), abs=1e-14)

    def test_lexicographic_tie_break(self):
        # an all-zero designer ties every lattice point exactly
        c, _ = grid_designer_argmax(3.0, make_scenario(designer=DesignerPayoffs(0, 0, 0, 0)), 21)
        assert c == Classifier(0.0, 0.0)

    def test_resolution_floor(self, accuracy_std):
        with pytest.raises(InvalidInputError):
            grid_designer_argmax(1.0, accuracy_std, 10)

    @pytest.mark.parametrize("reward", [-6.0, -1.0, 0.5, 3.0, 10.0])
    @pytest.mark.parametrize("mean", [0.0, 1.0])
    def test_analytic_at_least_lattice(self, reward, mean):
        scen = make_scenario(mean)
        br = designer_best_response(reward, scen)
        _, v = grid_designer_argmax(reward, scen, 401)
        assert br.payoff >= v - 1e-12
        assert br.payoff - v <= 1e-4


class TestRewardGrid:
    def test_negative_responsive_row(self, accuracy_shifted):
        res = grid_median_reward_argmax(Classifier(0.0, 0.96101), accuracy_shifted, (-20, 20), 4001)
        assert res.reward == pytest.approx(6.0, abs=0.05)
        exact = condorcet_reward(Classifier(0.0, 0.96101), accuracy_shifted).reward
        assert abs(res.reward - exact) <= res.spacing

    def test_follow_signal(self, accuracy_std):
        res = grid_median_reward_argmax(Classifier(1.0, 1.0), accuracy_std, (-20, 20), 4001)
        k1 = solve_k_roots(accuracy_std).k1
        assert abs(res.reward - k1 / 0.5) <= res.spacing
        assert res.reward == pytest.approx(2.23, abs=0.01)

    def test_null_flat(self, accuracy_std):
        res = grid_median_reward_argmax(Classifier(0.3, 0.7), accuracy_std, (-20, 20), 4001)
        assert res.flat

    def test_bad_range(self, accuracy_std):
        with pytest.raises(InvalidInputError):
            grid_median_reward_argmax(Classifier(1, 1), accuracy_std, (3.0, 3.0))


class TestAgentPayoffs:
    @pytest.mark.parametrize("gamma", [-2.0, -0.3, 0.0, 0.4, 1.1, 3.0])
    @pytest.mark.parametrize("reward", [-4.0, 0.0, 1.5, 7.0])
    def test_matches_voter_formula(self, accuracy_shifted, gamma, reward):
        c = Classifier(0.8, 0.35)
        assert float(agent_payoffs(gamma, reward, c, accuracy_shifted)) == pytest.approx(
            voter_payoff(reward, gamma, c, accuracy_shifted), abs=1e-12
        )


class TestSimulation:
    def test_near_universal_compliance(self, accuracy_std):
        res = simulate_population(Classifier(1, 1), 10.0, accuracy_std, N_LARGE, seed=11)
        p = float(accuracy_std.distribution.cdf(5.0))
        assert p > 0.9999
        assert _within_sigma(res.empirical_prevalence, p, N_LARGE, 3)

    def test_null_classifier_sincere(self, accuracy_shifted):
        res = simulate_population(Classifier(0, 1), 4.0, accuracy_shifted, N_LARGE, seed=5)
        assert _within_sigma(res.empirical_prevalence, 0.158655253931457, N_LARGE, 3)

    @pytest.mark.parametrize("c, reward", [(Classifier(1.0, 0.37), 10.0), (Classifier(0.0, 0.96101), 6.02)])
    def test_confusion_within_bands(self, accuracy_shifted, c, reward):
        res = simulate_population(c, reward, accuracy_shifted, N_LARGE, seed=2024)
        pi = prevalence(c, accuracy_shifted.phi, reward, accuracy_shifted.distribution)
        cf = confusion_fractions(pi, c, accuracy_shifted.phi)
        assert _within_sigma(res.empirical_prevalence, pi, N_LARGE, 4)
        for cell in ("tp", "fn", "fp", "tn"):
            assert _within_sigma(getattr(res.empirical_confusion, cell), getattr(cf, cell), N_LARGE, 4)

    @pytest.mark.parametrize("reward", [0.0, 2.5, -8.0])
    def test_budget_balance(self, accuracy_std, reward):
        res = simulate_population(Classifier(0.9, 0.6), reward, accuracy_std, 50_000, seed=1)
        assert abs(res.mean_net_transfer) <= 1e-12

    def test_bitwise_reproducible(self, accuracy_std):
        a = simulate_population(Classifier(0.9, 0.6), 3.0, accuracy_std, 200_000, seed=9, keep_agents=True)
        b = simulate_population(Classifier(0.9, 0.6), 3.0, accuracy_std, 200_000, seed=9, keep_agents=True)
        for k in a.arrays:
            assert np.array_equal(a.arrays[k], b.arrays[k])
        assert a == b

    def test_independent_of_workers(self, accuracy_std):
        a = simulate_population(Classifier(0.9, 0.6), 3.0, accuracy_std, 300_000, seed=4, keep_agents=True)
        b = simulate_population(
            Classifier(0.9, 0.6), 3.0, accuracy_std, 300_000, seed=4, workers=4, keep_agents=True
        )
        for k in a.arrays:
            assert np.array_equal(a.arrays[k], b.arrays[k])

    def test_seed_changes_draws(self, accuracy_std):
        a = simulate_population(Classifier(0.9, 0.6), 3.0, accuracy_std, 10_000, seed=1)
        b = simulate_population(Classifier(0.9, 0.6), 3.0, accuracy_std, 10_000, seed=2)
        assert a.empirical_prevalence != b.empirical_prevalence

    def test_agent_records(self, accuracy_std):
        res = simulate_population(Classifier(1, 0.5), 2.0, accuracy_std, 1_000, seed=3, keep_agents=True)
        threshold = 2.0 * 0.5 * 0.5
        recs = list(res.agents())
        assert len(recs) == 1_000
        assert all(r.behavior == int(r.cost <= threshold) for r in recs)
        d_bar = np.mean([r.decision for r in recs])
        assert all(r.net_transfer == pytest.approx(2.0 * (r.decision - d_bar)) for r in recs)

    def test_agents_require_keep(self, accuracy_std):
        res = simulate_population(Classifier(1, 0.5), 2.0, accuracy_std, 10, seed=3)
        with pytest.raises(InvalidInputError):
            next(res.agents())

    def test_rejects_empty_population(self, accuracy_std):
        with pytest.raises(InvalidInputError):
            simulate_population(Classifier(1, 1), 1.0, accuracy_std, 0, seed=0)

    def test_outputs(self, accuracy_std, tmp_path):
        res = simulate_population(Classifier(1, 0.5), 2.0, accuracy_std, 100, seed=3, keep_agents=True)
        res.write_json(tmp_path / "s.json")
        res.write_csv(tmp_path / "s.csv")
        summary = json.loads((tmp_path / "s.json").read_text())
        assert summary["empirical_prevalence"] == res.empirical_prevalence
        assert summary["seed"] == 3
        with open(tmp_path / "s.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 100
        assert set(rows[0]) == {"cost", "behavior", "signal", "decision", "net_transfer"}


class TestCondorcet:
    def test_follow_signal_wins(self, accuracy_std):
        rep = verify_condorcet(Classifier(1, 1), accuracy_std, [-2.0, 0.0, 1.0, 5.0], n_agents=100_000)
        assert rep.wins_all
        assert rep.incumbent == pytest.approx(2.234654231633542, abs=1e-9)

    def test_self_challenge_ties(self, accuracy_std):
        r = condorcet_reward(Classifier(1, 1), accuracy_std).reward
        rep = verify_condorcet(Classifier(1, 1), accuracy_std, [r], n_agents=10_000)
        assert rep.votes[0].tie == 1.0
        assert rep.votes[0].incumbent_wins

    def test_other_branch_optimum_loses(self, accuracy_std):
        k0 = solve_k_roots(accuracy_std).k0
        rep = verify_condorcet(Classifier(1, 1), accuracy_std, [k0 / 0.5], n_agents=100_000)
        assert rep.votes[0].prefer_incumbent >= 0.5

    def test_non_majority_incumbent_loses(self, accuracy_std):
        rep = verify_condorcet(Classifier(1, 1), accuracy_std, [2.234654231633542], incumbent=6.0)
        assert not rep.wins_all

    def test_null_rejected(self, accuracy_std):
        with pytest.raises(InvalidInputError):
            verify_condorcet(Classifier(0.5, 0.5), accuracy_std, [1.0])

    def test_as_dict(self, accuracy_std):
        d = verify_condorcet(Classifier(1, 1), accuracy_std, [0.0], n_agents=1_000).as_dict()
        assert d["wins_all"] is True
        assert d["votes"][0]["challenger"] == 0.0
