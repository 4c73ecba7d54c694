from __future__ import annotations

import numpy as np
import pytest

from algostakes import (
    Classifier,
    DesignerPayoffs,
    InvalidInputError,
    NormalDistribution,
    Responsiveness,
    Scenario,
    archetype,
    best_response_behavior,
    classify_responsiveness,
    confusion_fractions,
    prevalence,
    responsiveness,
)

hypothesis = pytest.importorskip("hypothesis")
from hypothesis import given  # noqa: E402
from hypothesis import strategies as st  # noqa: E402

unit = st.floats(0.0, 1.0)
phis = st.floats(0.5, 1.0, exclude_min=True)


class TestClassifier:
    @pytest.mark.parametrize("d1, d0", [(-0.1, 0.5), (0.5, 1.01), (float("nan"), 0.5)])
    def test_rejects_out_of_range(self, d1, d0):
        with pytest.raises(InvalidInputError):
            Classifier(d1, d0)

    def test_lexicographic_order(self):
        assert sorted([Classifier(1, 0), Classifier(0, 1), Classifier(0, 0.5)]) == [
            Classifier(0, 0.5), Classifier(0, 1), Classifier(1, 0),
        ]

    def test_null_detection(self):
        assert Classifier(0.3, 0.7).is_null()
        assert not Classifier(0.3, 0.71).is_null()


class TestResponsiveness:
    @pytest.mark.parametrize(
        "c, phi, expected",
        [(Classifier(1, 1), 0.75, 0.5), (Classifier(0, 0), 1.0, -1.0), (Classifier(0.4, 0.6), 0.9, 0.0)],
    )
    def test_values(self, c, phi, expected):
        assert responsiveness(c, phi) == pytest.approx(expected, abs=1e-15)

    @pytest.mark.parametrize(
        "c, phi, kind",
        [
            (Classifier(1, 1), 0.75, Responsiveness.POSITIVE),
            (Classifier(0.3, 0.7), 0.9, Responsiveness.NULL),
            (Classifier(0, 0.96), 0.75, Responsiveness.NEGATIVE),
        ],
    )
    def test_classification(self, c, phi, kind):
        assert classify_responsiveness(c, phi) is kind

    @pytest.mark.parametrize("phi", [0.5, 0.2, 1.01])
    def test_phi_bounds(self, phi):
        with pytest.raises(InvalidInputError):
            responsiveness(Classifier(1, 1), phi)

    @given(unit, unit, phis)
    def test_mirror_flips_sign(self, d1, d0, phi):
        c = Classifier(d1, d0)
        assert responsiveness(c.mirrored(), phi) == pytest.approx(-responsiveness(c, phi), abs=1e-15)

    @given(unit, phis)
    def test_null_line_is_unresponsive(self, d1, phi):
        assert abs(responsiveness(Classifier(d1, 1 - d1), phi)) <= 1e-15


class TestBehavior:
    def test_complies_below_threshold(self):
        assert best_response_behavior(0.2, Classifier(1, 1), 0.75, 10.0) == 1

    def test_null_classifier_is_sincere(self):
        assert best_response_behavior(0.2, Classifier(0.5, 0.5), 0.75, 50.0) == 0
        assert best_response_behavior(-0.2, Classifier(0.5, 0.5), 0.75, 50.0) == 1

    def test_tie_goes_to_compliance(self):
        assert best_response_behavior(5.0, Classifier(1, 1), 0.75, 10.0) == 1

    @given(st.floats(-5, 5), unit, unit, phis)
    def test_zero_reward_reproduces_sincere_behavior(self, gamma, d1, d0, phi):
        assert best_response_behavior(gamma, Classifier(d1, d0), phi, 0.0) == int(gamma <= 0)


class TestPrevalence:
    def test_strong_incentive_gives_near_full_compliance(self):
        assert prevalence(Classifier(1, 1), 0.75, 10.0, NormalDistribution()) == pytest.approx(1, abs=3e-7)

    @pytest.mark.parametrize("r", [-100.0, 0.0, 3.0, 1e4])
    def test_null_classifier_gives_sincere_prevalence(self, r):
        assert prevalence(Classifier(0.2, 0.8), 0.75, r, NormalDistribution()) == 0.5

    def test_monotone_in_reward(self):
        rs = np.linspace(-5, 5, 41)
        dist = NormalDistribution(1, 1)
        up = [prevalence(Classifier(1, 0.8), 0.8, r, dist) for r in rs]
        down = [prevalence(Classifier(0, 0.3), 0.8, r, dist) for r in rs]
        assert np.all(np.diff(up) > 0) and np.all(np.diff(down) < 0)


class TestConfusion:
    def test_follow_signal_at_half_prevalence(self):
        cf = confusion_fractions(0.5, Classifier(1, 1), 0.75)
        assert (cf.tp, cf.fn, cf.fp, cf.tn) == pytest.approx((0.375, 0.125, 0.125, 0.375))

    def test_accuracy_at_democratic_outcome(self):
        # brute-force evaluation of the four cell formulas
        pi, phi, d0 = 0.8686, 0.75, 0.713
        tp = pi * (phi + (1 - phi) * (1 - d0))
        tn = (1 - pi) * phi * d0
        cf = confusion_fractions(pi, Classifier(1, d0), phi)
        assert cf.accuracy == pytest.approx(tp + tn, abs=1e-15)
        assert cf.accuracy == pytest.approx(0.784, abs=5e-4)

    def test_everyone_rejected_gives_true_negatives(self):
        cf = confusion_fractions(0.15865525393145707, Classifier(0, 1), 0.75)
        assert cf.tn == pytest.approx(0.8413, abs=1e-4) and cf.tp == 0.0

    @given(unit, unit, unit, phis)
    def test_cells_partition_population(self, pi, d1, d0, phi):
        cf = confusion_fractions(pi, Classifier(d1, d0), phi)
        assert abs(sum(cf.as_dict().values()) - 1) <= 1e-12
        assert abs(cf.prevalence - pi) <= 1e-12
        assert all(0 <= v <= 1 + 1e-15 for v in cf.as_dict().values())


class TestScenario:
    def test_negative_externality_rejected(self):
        with pytest.raises(InvalidInputError):
            Scenario(NormalDistribution(), -0.1, 0.75, archetype("accuracy"))

    def test_negative_payoff_rejected(self):
        with pytest.raises(InvalidInputError):
            DesignerPayoffs(1, -0.5, 1, 0)

    def test_replace_keeps_other_fields(self):
        s = Scenario(NormalDistribution(), 0.5, 0.75, archetype("accuracy"))
        s2 = s.replace(externality_t=1.0)
        assert s2.t == 1.0 and s2.phi == 0.75 and s2.median_cost == 0.0
