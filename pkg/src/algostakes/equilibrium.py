"""Equilibria of the classifier-reward game.

An equilibrium pairs a classifier with a reward such that the reward is
the median voter's choice given the classifier and the classifier is a
designer best response given the reward.  Under a null classifier voters
are indifferent over rewards, so null equilibria use ``r = 0``; every
non-null equilibrium holds the behavior threshold at the median's
preferred ``k_mu``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .designer import (
    DesignerBestResponse,
    accuracy_alignment,
    clamped_delta_star,
    designer_best_response,
    designer_expected_payoff,
)
from .exceptions import DegenerateDenominatorError
from .model import NULL_TOLERANCE, Classifier, Scenario, prevalence, responsiveness
from .voters import condorcet_reward, median_optimal_k, social_welfare, voter_payoff

VERIFY_TOLERANCE = 1e-6
MAX_FIXED_POINT_ITERATIONS = 50
# iterated best responses stop within about 1e-6 of a fixed point
MERGE_RADIUS = 1e-4
NO_EQUILIBRIUM_NOTE = "no pure-strategy equilibrium"


class EquilibriumKind(enum.Enum):
    NULL = "null"
    POSITIVE_RESPONSIVE = "positive"
    NEGATIVE_RESPONSIVE = "negative"


@dataclass(frozen=True)
class EquilibriumOutcome:
    """A classifier-reward pair with the quantities reported for it."""

    kind: EquilibriumKind
    classifier: Classifier
    reward: float
    prevalence: float
    median_payoff: float
    designer_payoff: float
    social_welfare: float
    verified: bool
    notes: str = ""

    @property
    def sort_key(self) -> tuple:
        return (self.kind is not EquilibriumKind.NULL, self.classifier.delta1, self.classifier.delta0)


def evaluate_outcome(
    c: Classifier, reward: float, scen: Scenario, verified: bool, notes: str = ""
) -> EquilibriumOutcome:
    """Compute prevalence, payoffs and welfare for a classifier-reward pair."""
    rho = responsiveness(c, scen.phi)
    if abs(rho) <= NULL_TOLERANCE:
        kind = EquilibriumKind.NULL
    else:
        kind = EquilibriumKind.POSITIVE_RESPONSIVE if rho > 0 else EquilibriumKind.NEGATIVE_RESPONSIVE
    return EquilibriumOutcome(
        kind=kind,
        classifier=c,
        reward=reward,
        prevalence=prevalence(c, scen.phi, reward, scen.distribution),
        median_payoff=voter_payoff(reward, scen.median_cost, c, scen),
        designer_payoff=designer_expected_payoff(c, reward, scen),
        social_welfare=social_welfare(reward, c, scen),
        verified=verified,
        notes=notes,
    )


# -- null equilibria -----------------------------------------------------------


@dataclass(frozen=True)
class NullExistenceReport:
    """Whether a null classifier with zero reward is an equilibrium.

    For accuracy-aligned designers the answer is ``sincere_prevalence``
    lying outside the open interval ``(interval_low, interval_high)``;
    inside it, following the signal beats every null classifier at zero
    reward.  Other designers are checked by solving the zero-reward best
    response directly (``method == "direct"``).
    """

    interval_low: float
    interval_high: float
    sincere_prevalence: float
    exists: bool
    degenerate: bool
    classifier: Classifier | None = None
    method: str = "interval"
    notes: str = ""


def null_interval(scen: Scenario) -> tuple[float, float]:
    """Interval of sincere prevalence on which no null classifier is optimal at ``r = 0``.

    Returns NaNs when an endpoint is 0/0.
    """
    A1, A0, B1, B0 = scen.designer.as_tuple()
    phi = scen.phi
    dA, dB = A1 - A0, B1 - B0
    den_lo = dB * (1 - phi) + dA * phi
    den_hi = dA * (1 - phi) + dB * phi
    lo = dB * (1 - phi) / den_lo if den_lo != 0 else math.nan
    hi = dB * phi / den_hi if den_hi != 0 else math.nan

    # the same endpoints written with the denominators expanded differently
    alt_den_lo = dB - phi * (A0 - A1 + B1 - B0)
    alt_den_hi = dA - phi * (A1 - A0 - B1 + B0)
    alt_lo = dB * (1 - phi) / alt_den_lo if alt_den_lo != 0 else math.nan
    alt_hi = dB * phi / alt_den_hi if alt_den_hi != 0 else math.nan
    for a, b in ((lo, alt_lo), (hi, alt_hi)):
        assert (math.isnan(a) and math.isnan(b)) or math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-15)
    return lo, hi


def best_null_classifier(reward_zero_response: DesignerBestResponse) -> Classifier | None:
    """Optimal null classifier at zero reward, preferring ``(0, 1)`` on ties."""
    if reward_zero_response.all_optimal:
        return Classifier(0.0, 1.0)
    nulls = [c for c in reward_zero_response.classifiers if c.is_null()]
    if not nulls:
        return None
    return Classifier(0.0, 1.0) if Classifier(0.0, 1.0) in nulls else nulls[0]


def null_equilibrium_exists(scen: Scenario) -> NullExistenceReport:
    """Decide whether some null classifier paired with ``r = 0`` is an equilibrium."""
    F0 = scen.distribution.cdf(0.0)
    k_mu = median_optimal_k(scen).k_star
    br0 = designer_best_response(0.0, scen)
    null_c = best_null_classifier(br0)
    kind = accuracy_alignment(scen.designer)

    if abs(k_mu) <= NULL_TOLERANCE:
        return NullExistenceReport(
            math.nan, math.nan, F0, exists=True, degenerate=True,
            classifier=null_c or Classifier(0.0, 1.0), method="sincere",
            notes="median prefers sincere compliance; zero reward is supportable",
        )

    if not kind.is_aligned:
        return NullExistenceReport(
            math.nan, math.nan, F0, exists=null_c is not None, degenerate=False,
            classifier=null_c, method="direct",
            notes="designer not accuracy aligned; zero-reward best response solved directly",
        )

    lo, hi = null_interval(scen)
    degenerate = math.isnan(lo) or math.isnan(hi) or not lo < hi
    exists = True if degenerate else not (lo < F0 < hi)
    return NullExistenceReport(lo, hi, F0, exists=exists, degenerate=degenerate, classifier=null_c)


# -- non-null equilibria -------------------------------------------------------


@dataclass(frozen=True)
class _Candidate:
    classifier: Classifier
    origin: str


_FORMS = {
    # (fixed coordinate, its value, the free value that would make the candidate null)
    "positive_k": (("delta1", 1.0, 0.0), ("delta0", 0.0, 1.0)),
    "negative_k": (("delta1", 0.0, 1.0), ("delta0", 1.0, 0.0)),
}


def _edge_candidates(k: float, scen: Scenario, forms) -> tuple[list[_Candidate], list[str]]:
    notes: list[str] = []
    out: list[_Candidate] = []
    for fixed, value, excluded in forms:
        try:
            x = clamped_delta_star(k, fixed, value, scen)
        except DegenerateDenominatorError:
            notes.append(f"linear in the free coordinate with {fixed}={value:g}; corners tried")
            for corner in (Classifier(1.0, 1.0), Classifier(0.0, 0.0)):
                if all(c.classifier != corner for c in out):
                    out.append(_Candidate(corner, "corner"))
            continue
        c = Classifier(value, x) if fixed == "delta1" else Classifier(x, value)
        if x == excluded:
            notes.append(f"critical point clamps to the null classifier {c.as_tuple()}; excluded")
            continue
        out.append(_Candidate(c, f"critical point with {fixed}={value:g}"))
    return out, notes


def _aligned_candidates(k: float, scen: Scenario) -> tuple[list[_Candidate], list[str]]:
    return _edge_candidates(k, scen, _FORMS["positive_k" if k > 0 else "negative_k"])


def _verify(c: Classifier, scen: Scenario, k_mu: float) -> tuple[bool, float]:
    rho = responsiveness(c, scen.phi)
    reward = k_mu / rho
    br = designer_best_response(reward, scen)
    return br.contains(c, scen, tol=VERIFY_TOLERANCE), reward


def _fixed_point_candidates(
    scen: Scenario, known: list[_Candidate] = ()
) -> tuple[list[_Candidate], list[str]]:
    """Iterate best responses from several starts, recording limits and cycles.

    A path that comes within ``MERGE_RADIUS`` of a ``known`` candidate stops
    there; convergence near a fixed point can be slow and linear.
    """
    starts = [Classifier(1.0, 1.0), Classifier(0.0, 0.0), Classifier(1.0, 0.5), Classifier(0.5, 1.0),
              Classifier(0.0, 0.5), Classifier(0.5, 0.0)]
    found: list[_Candidate] = []
    notes: list[str] = []
    for start in starts:
        history = [start]
        c = start
        for _ in range(MAX_FIXED_POINT_ITERATIONS):
            cr = condorcet_reward(c, scen)
            if cr.indifferent:
                break
            nxt = designer_best_response(cr.reward, scen).classifier
            if any(_close(nxt, k.classifier, MERGE_RADIUS) for k in known):
                break
            if _close(nxt, c):
                found.append(_Candidate(c, "best-response fixed point"))
                break
            if len(history) >= 2 and _close(nxt, history[-2]):
                pair = sorted(tuple(round(v, 6) for v in x.as_tuple()) for x in (c, nxt))
                notes.append(f"best responses cycle between {pair[0]} and {pair[1]}")
                break
            history.append(nxt)
            c = nxt
    return found, notes


def _close(a: Classifier, b: Classifier, tol: float = 1e-6) -> bool:
    return abs(a.delta1 - b.delta1) <= tol and abs(a.delta0 - b.delta0) <= tol


def enumerate_non_null_with_notes(scen: Scenario) -> tuple[list[EquilibriumOutcome], list[str]]:
    """Verified non-null equilibria plus notes on excluded or rejected candidates."""
    k_mu = median_optimal_k(scen).k_star
    if abs(k_mu) <= NULL_TOLERANCE:
        return [], ["median prefers sincere compliance; only the null outcome applies"]
    kind = accuracy_alignment(scen.designer)
    if kind.is_aligned:
        cands, notes = _aligned_candidates(k_mu, scen)
    else:
        # the critical-point formulas are first-order conditions for any payoffs, so every
        # edge form is a candidate; iteration adds limits the edges might miss and finds cycles
        cands, notes = _edge_candidates(k_mu, scen, _FORMS["positive_k"] + _FORMS["negative_k"])
        extra, cycle_notes = _fixed_point_candidates(scen, cands)
        cands += extra
        notes = ["designer not accuracy aligned; all edge forms plus best-response iteration"]
        notes += cycle_notes

    outcomes: list[EquilibriumOutcome] = []
    for cand in cands:
        if cand.classifier.is_null():
            continue
        ok, reward = _verify(cand.classifier, scen, k_mu)
        if not ok:
            notes.append(
                f"candidate {cand.classifier.as_tuple()} at r={reward:.6g} is not a designer "
                "best response; rejected"
            )
            continue
        if any(_close(o.classifier, cand.classifier, MERGE_RADIUS) for o in outcomes):
            continue
        outcomes.append(evaluate_outcome(cand.classifier, reward, scen, True, cand.origin))
    outcomes.sort(key=lambda o: o.sort_key)
    return outcomes, list(dict.fromkeys(notes))


def enumerate_non_null(scen: Scenario) -> list[EquilibriumOutcome]:
    """All verified non-null equilibria (possibly none)."""
    return enumerate_non_null_with_notes(scen)[0]


def null_outcome(scen: Scenario, report: NullExistenceReport | None = None) -> EquilibriumOutcome:
    report = report or null_equilibrium_exists(scen)
    c = report.classifier or Classifier(0.0, 1.0)
    return evaluate_outcome(c, 0.0, scen, verified=report.exists, notes=report.notes)


@dataclass(frozen=True)
class EquilibriumSet:
    outcomes: tuple[EquilibriumOutcome, ...]
    null_report: NullExistenceReport
    notes: tuple[str, ...] = field(default=())

    @property
    def empty(self) -> bool:
        return not self.outcomes


def solve_equilibria(scen: Scenario) -> EquilibriumSet:
    """Null and non-null equilibria together with the diagnostics behind them."""
    report = null_equilibrium_exists(scen)
    outcomes, notes = enumerate_non_null_with_notes(scen)
    if report.exists:
        outcomes = [null_outcome(scen, report)] + outcomes
    if not outcomes:
        notes.append(NO_EQUILIBRIUM_NOTE)
    return EquilibriumSet(tuple(outcomes), report, tuple(notes))


def find_equilibria(scen: Scenario) -> list[EquilibriumOutcome]:
    """Every equilibrium, null first then by ``(delta1, delta0)``."""
    return list(solve_equilibria(scen).outcomes)


@dataclass(frozen=True)
class ExogenousComparison:
    """Outcome under a fixed reward next to the democratic equilibria."""

    fixed_reward: float
    exogenous: EquilibriumOutcome
    equilibria: tuple[EquilibriumOutcome, ...]
    tied_classifiers: tuple[Classifier, ...] = ()


def exogenous_comparison(scen: Scenario, fixed_reward: float) -> ExogenousComparison:
    """Let the designer best-respond to a reward that voters do not choose."""
    br = designer_best_response(float(fixed_reward), scen)
    c = br.classifier
    if br.all_optimal or any(x.is_null() for x in br.classifiers):
        c = best_null_classifier(br) or c
    exo = evaluate_outcome(c, float(fixed_reward), scen, verified=False, notes="exogenous reward")
    return ExogenousComparison(
        fixed_reward=float(fixed_reward),
        exogenous=exo,
        equilibria=tuple(find_equilibria(scen)),
        tied_classifiers=br.classifiers if len(br.classifiers) > 1 else (),
    )
