"""Voters' preferences over the reward under budget balance.

Every individual pays the average awarded reward, so an individual's
expected payoff depends on the reward only through the behavior threshold
``k = r * rho``.  Each voter's preferred threshold is one of two roots,
``k0`` (best if they will not comply) or ``k1`` (best if they will), and
the median voter's choice is a Condorcet winner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from ._numerics import expanding_root
from .exceptions import InvalidInputError, NullClassifierError
from .model import NULL_TOLERANCE, Classifier, Scenario, responsiveness

ROOT_TOLERANCE = 1e-10
BRACKET_CAP = 1e3


@dataclass(frozen=True)
class RewardSolution:
    """Optimal behavior thresholds for non-compliers (``k0``) and compliers (``k1``)."""

    k0: float
    k1: float
    residual_k0: float
    residual_k1: float


@dataclass(frozen=True)
class MedianChoice:
    """The median voter's preferred threshold and which root it came from."""

    k_star: float
    branch: Literal["k1", "k0"]
    cutpoint_value: float
    median_cost: float


@dataclass(frozen=True)
class CondorcetReward:
    """Majority-preferred reward for a classifier.

    For a null classifier every reward gives the same payoff to everyone;
    ``indifferent`` is then set and ``reward`` holds the conventional 0.
    """

    reward: float
    k_star: float
    indifferent: bool = False


def _finite(name: str, v: float) -> float:
    v = float(v)
    if not math.isfinite(v):
        raise InvalidInputError(f"{name} must be finite, got {v!r}")
    return v


def payoff_at_threshold(k: float, gamma: float, scen: Scenario) -> float:
    """Voter payoff as a function of the behavior threshold ``k = r * rho``."""
    F = scen.distribution.cdf(k)
    t = scen.t
    if gamma <= k:
        return -gamma + k * (1.0 - F) + t * F
    return -k * F + t * F


def voter_payoff(reward: float, gamma: float, c: Classifier, scen: Scenario) -> float:
    """Expected payoff of an individual with cost ``gamma`` who best-responds.

    Compliance costs ``gamma`` and raises the chance of receiving ``r`` by
    ``rho``; everyone pays the average award and enjoys ``t`` per unit of
    aggregate compliance.
    """
    reward = _finite("reward", reward)
    gamma = _finite("gamma", gamma)
    return payoff_at_threshold(reward * responsiveness(c, scen.phi), gamma, scen)


def solve_k_roots(scen: Scenario) -> RewardSolution:
    """Solve ``k0 = t - F(k0)/f(k0)`` and ``k1 = t + (1 - F(k1))/f(k1)``.

    Both right-hand sides are monotone under log-concavity, so each root is
    unique; it is bracketed by expanding away from ``t`` and then refined
    with Brent's method.
    """
    dist, t = scen.distribution, scen.t
    scale = dist.scale_hint

    def g0(k: float) -> float:
        return k - t + dist.cdf_over_pdf(k)

    def g1(k: float) -> float:
        return k - t - dist.sf_over_pdf(k)

    # g0(t) > 0 so k0 lies below t; g1(t) < 0 so k1 lies above
    k0 = expanding_root(g0, t, -1, width=scale, cap=BRACKET_CAP * scale)
    k1 = expanding_root(g1, t, +1, width=scale, cap=BRACKET_CAP * scale)
    sol = RewardSolution(k0=k0, k1=k1, residual_k0=g0(k0), residual_k1=g1(k1))
    if max(abs(sol.residual_k0), abs(sol.residual_k1)) > ROOT_TOLERANCE:
        raise ArithmeticError(f"k roots did not converge: {sol}")
    return sol


def cutpoint_value(scen: Scenario, roots: RewardSolution | None = None) -> float:
    """Cost below which a voter prefers ``k1`` to ``k0``.

    Equal to ``k0 F(k0) + k1 (1 - F(k1)) + t (F(k1) - F(k0))``.
    """
    roots = roots or solve_k_roots(scen)
    F = scen.distribution.cdf
    k0, k1, t = roots.k0, roots.k1, scen.t
    return k0 * F(k0) + k1 * (1.0 - F(k1)) + t * (F(k1) - F(k0))


def median_optimal_k(scen: Scenario) -> MedianChoice:
    """The median-cost voter's preferred behavior threshold."""
    roots = solve_k_roots(scen)
    cut = cutpoint_value(scen, roots)
    med = scen.median_cost
    if med <= cut:
        return MedianChoice(k_star=roots.k1, branch="k1", cutpoint_value=cut, median_cost=med)
    return MedianChoice(k_star=roots.k0, branch="k0", cutpoint_value=cut, median_cost=med)


def condorcet_reward(c: Classifier, scen: Scenario) -> CondorcetReward:
    """Reward ``k_mu / rho`` that beats every alternative in pairwise votes."""
    choice = median_optimal_k(scen)
    rho = responsiveness(c, scen.phi)
    if abs(rho) <= NULL_TOLERANCE:
        return CondorcetReward(reward=0.0, k_star=choice.k_star, indifferent=True)
    return CondorcetReward(reward=choice.k_star / rho, k_star=choice.k_star)


def social_welfare(reward: float, c: Classifier, scen: Scenario) -> float:
    """Aggregate welfare ``t F(r rho)`` minus total compliance cost."""
    k = _finite("reward", reward) * responsiveness(c, scen.phi)
    dist = scen.distribution
    return scen.t * dist.cdf(k) - dist.partial_expectation(k)


def sw_optimal_reward(c: Classifier, scen: Scenario) -> float:
    """Welfare-maximizing reward ``t / rho``; undefined for null classifiers."""
    rho = responsiveness(c, scen.phi)
    if abs(rho) <= NULL_TOLERANCE:
        raise NullClassifierError(
            "welfare does not depend on the reward under a null classifier"
        )
    return scen.t / rho


@dataclass(frozen=True)
class CutpointComparison:
    t_low: float
    t_high: float
    cutpoint_low: float
    cutpoint_high: float

    @property
    def increased(self) -> bool:
        return self.cutpoint_high > self.cutpoint_low

    @property
    def equal(self) -> bool:
        return self.cutpoint_high == self.cutpoint_low


def cutpoint_monotonicity_check(scen_low_t: Scenario, scen_high_t: Scenario) -> CutpointComparison:
    """Compare the preference cutpoint at two externality levels.

    The cutpoint grows with ``t`` (its derivative is ``F(k1) - F(k0) > 0``),
    so a larger externality moves more voters toward the high-reward root.
    """
    if scen_low_t.distribution != scen_high_t.distribution:
        raise InvalidInputError("both scenarios must share the cost distribution")
    if scen_high_t.t < scen_low_t.t:
        raise InvalidInputError("second scenario must have the larger externality")
    return CutpointComparison(
        t_low=scen_low_t.t,
        t_high=scen_high_t.t,
        cutpoint_low=cutpoint_value(scen_low_t),
        cutpoint_high=cutpoint_value(scen_high_t),
    )
