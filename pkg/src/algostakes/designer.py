"""The algorithm designer's problem.

``designer_expected_payoff`` evaluates the designer's expected payoff for a
classifier at a fixed reward, with compliance responding to the classifier.
``designer_best_response`` maximizes it over the unit square.  The
closed-form critical points ``delta0_critical`` / ``delta1_critical`` hold
the behavioral threshold ``k = r * rho`` fixed instead of ``r``; they are
what the equilibrium construction uses.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy import optimize

from ._numerics import bracketed_max
from .exceptions import DegenerateDenominatorError, InvalidInputError
from .model import (
    Classifier,
    ConfusionFractions,
    DesignerPayoffs,
    Scenario,
    confusion_fractions,
    prevalence,
    responsiveness,
)

ARGMAX_TOLERANCE = 1e-9
EPSILON_LIMIT = 1e-3
DENOMINATOR_TOLERANCE = 1e-12
MIXED_GRID = 201
MIXED_POLISH_STARTS = 10
_DEDUP_RADIUS = 1e-5


class AccuracyAlignment(enum.Enum):
    STRONGLY_ALIGNED = "strongly_aligned"
    STRONGLY_MISALIGNED = "strongly_misaligned"
    BOTH = "both"
    NEITHER = "neither"

    @property
    def is_aligned(self) -> bool:
        """Weak alignment: ``A1 >= A0`` and ``B1 >= B0``."""
        return self in (AccuracyAlignment.STRONGLY_ALIGNED, AccuracyAlignment.BOTH)


def accuracy_alignment(dp: DesignerPayoffs) -> AccuracyAlignment:
    """Classify preferences by how they rank correct versus incorrect decisions.

    Weakly aligned preferences that are not strongly aligned necessarily
    have ``A1 == A0`` and ``B1 == B0`` and are therefore reported as
    ``BOTH``; the same holds for weak misalignment.
    """
    aligned = dp.a1 >= dp.a0 and dp.b1 >= dp.b0
    misaligned = dp.a1 <= dp.a0 and dp.b1 <= dp.b0
    if aligned and misaligned:
        return AccuracyAlignment.BOTH
    if aligned:
        return AccuracyAlignment.STRONGLY_ALIGNED
    if misaligned:
        return AccuracyAlignment.STRONGLY_MISALIGNED
    return AccuracyAlignment.NEITHER


def is_accuracy_aligned(dp: DesignerPayoffs) -> str:
    return accuracy_alignment(dp).value


def archetype(kind: str, w: float | None = None) -> DesignerPayoffs:
    """Payoffs for the named designer archetypes.

    ``accuracy`` rewards correct decisions, ``compliance`` rewards
    compliance regardless of the decision, ``moral_hazard`` pays ``w`` for
    every decision of 0 and ``predatory`` only values penalizing
    non-compliers.
    """
    kind = kind.lower().replace("-", "_")
    if kind == "accuracy":
        return DesignerPayoffs(a1=1.0, a0=0.0, b1=1.0, b0=0.0)
    if kind == "compliance":
        return DesignerPayoffs(a1=1.0, a0=1.0, b1=0.0, b0=0.0)
    if kind == "moral_hazard":
        if w is None or not (0.0 < float(w) < 1.0):
            raise InvalidInputError(f"moral hazard weight w must lie in (0, 1), got {w!r}")
        return DesignerPayoffs(a1=1.0, a0=float(w), b1=float(w), b0=0.0)
    if kind == "predatory":
        return DesignerPayoffs(a1=0.0, a0=0.0, b1=1.0, b0=0.0)
    raise InvalidInputError(f"unknown archetype {kind!r}")


# -- payoff and derivatives --------------------------------------------------


def _cell_values(d1, d0, phi: float, dp: DesignerPayoffs):
    """Expected payoff per complier (``a``) and per non-complier (``b``)."""
    a = phi * (dp.a1 * d1 + dp.a0 * (1 - d1)) + (1 - phi) * (dp.a0 * d0 + dp.a1 * (1 - d0))
    b = phi * (dp.b1 * d0 + dp.b0 * (1 - d0)) + (1 - phi) * (dp.b0 * d1 + dp.b1 * (1 - d1))
    return a, b


def _payoff_raw(d1: float, d0: float, reward: float, scen: Scenario) -> float:
    phi = scen.phi
    pi = scen.distribution.cdf(reward * (d1 + d0 - 1.0) * (2.0 * phi - 1.0))
    a, b = _cell_values(d1, d0, phi, scen.designer)
    return pi * a + (1.0 - pi) * b


def designer_expected_payoff(c: Classifier, reward: float, scen: Scenario) -> float:
    """Designer's expected payoff with compliance ``F(r * rho)``."""
    pi = prevalence(c, scen.phi, reward, scen.distribution)
    a, b = _cell_values(c.delta1, c.delta0, scen.phi, scen.designer)
    return pi * a + (1.0 - pi) * b


def _partials(phi: float, dp: DesignerPayoffs):
    # d a / d delta1, d a / d delta0, d b / d delta1, d b / d delta0
    return (
        phi * (dp.a1 - dp.a0),
        (1 - phi) * (dp.a0 - dp.a1),
        (1 - phi) * (dp.b0 - dp.b1),
        phi * (dp.b1 - dp.b0),
    )


def payoff_gradient(c: Classifier, reward: float, scen: Scenario) -> tuple[float, float]:
    """Analytic ``(dEU/d delta1, dEU/d delta0)`` at fixed reward."""
    phi, dist = scen.phi, scen.distribution
    slope = reward * (2 * phi - 1)
    x = reward * responsiveness(c, phi)
    pi, dens = dist.cdf(x), dist.pdf(x)
    a, b = _cell_values(c.delta1, c.delta0, phi, scen.designer)
    da1, da0, db1, db0 = _partials(phi, scen.designer)
    common = dens * slope * (a - b)
    return (common + pi * da1 + (1 - pi) * db1, common + pi * da0 + (1 - pi) * db0)


def payoff_second_derivative(c: Classifier, reward: float, scen: Scenario, coord: str) -> float:
    """Own second derivative of the payoff in ``delta1`` or ``delta0``."""
    phi, dist = scen.phi, scen.distribution
    slope = reward * (2 * phi - 1)
    x = reward * responsiveness(c, phi)
    a, b = _cell_values(c.delta1, c.delta0, phi, scen.designer)
    da1, da0, db1, db0 = _partials(phi, scen.designer)
    da, db = (da1, db1) if coord == "delta1" else (da0, db0)
    return dist.pdf_prime(x) * slope**2 * (a - b) + 2 * dist.pdf(x) * slope * (da - db)


# -- fixed-threshold critical points ------------------------------------------


def _check_denominator(den: float, which: str) -> None:
    if abs(den) <= DENOMINATOR_TOLERANCE:
        raise DegenerateDenominatorError(
            f"{which} critical point undefined: payoff is linear in that coordinate "
            f"(denominator {den:.3e}); compare corners instead"
        )


def delta0_critical(k: float, delta1: float, scen: Scenario) -> float:
    """Unclamped critical point in ``delta0`` at threshold ``k`` and given ``delta1``."""
    A1, A0, B1, B0 = scen.designer.as_tuple()
    phi, dist = scen.phi, scen.distribution
    F, S, f = dist.cdf(k), dist.sf(k), dist.pdf(k)
    kf = k * f
    den = (1 - phi) * (A0 - A1) * (kf + F) + phi * (B1 - B0) * (S - kf)
    _check_denominator(den, "delta0")
    num = kf * ((1 - delta1) * phi * (-A0 + A1 + B0 - B1) - A1 + delta1 * (B0 - B1) + B1)
    num += (1 - delta1) * ((1 - phi) * (A0 - A1) * F + phi * (B1 - B0) * S)
    return num / den


def delta1_critical(k: float, delta0: float, scen: Scenario) -> float:
    """Unclamped critical point in ``delta1`` at threshold ``k`` and given ``delta0``."""
    A1, A0, B1, B0 = scen.designer.as_tuple()
    phi, dist = scen.phi, scen.distribution
    F, S, f = dist.cdf(k), dist.sf(k), dist.pdf(k)
    kf = k * f
    den = phi * (A1 - A0) * (kf + F) + (1 - phi) * (B0 - B1) * (S - kf)
    _check_denominator(den, "delta1")
    num = kf * ((1 - delta0) * phi * (-A0 + A1 + B0 - B1) + delta0 * (A1 - A0) - A1 + B1)
    num += (1 - delta0) * (phi * (A1 - A0) * F + (1 - phi) * (B0 - B1) * S)
    return num / den


def clamp_unit(x: float) -> float:
    # adding 0.0 turns -0.0 into 0.0
    return 0.0 if x < 0.0 else 1.0 if x > 1.0 else float(x) + 0.0


def clamped_delta_star(
    k: float,
    fixed_coord: Literal["delta1", "delta0"],
    fixed_value: float,
    scen: Scenario,
) -> float:
    """Optimal free coordinate at threshold ``k``: the critical point clipped to [0, 1].

    ``fixed_coord`` names the coordinate held at ``fixed_value`` (0 or 1);
    the return value is the other one.
    """
    if fixed_value not in (0, 1):
        raise InvalidInputError(f"fixed_value must be 0 or 1, got {fixed_value!r}")
    if fixed_coord == "delta1":
        return clamp_unit(delta0_critical(k, float(fixed_value), scen))
    if fixed_coord == "delta0":
        return clamp_unit(delta1_critical(k, float(fixed_value), scen))
    raise InvalidInputError(f"fixed_coord must be 'delta1' or 'delta0', got {fixed_coord!r}")


# -- best response at a fixed reward ------------------------------------------


@dataclass(frozen=True)
class Candidate:
    label: str
    classifier: Classifier
    payoff: float


@dataclass(frozen=True)
class DesignerBestResponse:
    """Global maximizers of the designer's payoff at one reward level.

    ``all_optimal`` is set when every classifier earns the same payoff; the
    listed classifiers are then only representatives.
    """

    reward: float
    classifiers: tuple[Classifier, ...]
    payoff: float
    diagnostics: tuple[Candidate, ...] = field(default=(), repr=False)
    all_optimal: bool = False
    method: str = ""

    @property
    def classifier(self) -> Classifier:
        """Canonical optimum (lexicographically smallest)."""
        return self.classifiers[0]

    def contains(self, c: Classifier, scen: Scenario, tol: float = 1e-6) -> bool:
        """Whether ``c`` is optimal at this reward up to ``tol`` payoff units."""
        if self.all_optimal:
            return True
        return designer_expected_payoff(c, self.reward, scen) >= self.payoff - tol


_CORNERS = (
    ("corner (0, 0)", Classifier(0.0, 0.0)),
    ("corner (0, 1) null", Classifier(0.0, 1.0)),
    ("corner (1, 0) null", Classifier(1.0, 0.0)),
    ("corner (1, 1)", Classifier(1.0, 1.0)),
)


def _edge_max(reward: float, scen: Scenario, free: str, fixed: float) -> Classifier:
    """1-D maximization along an edge of the unit square."""

    def make(x: float) -> Classifier:
        return Classifier(fixed, x) if free == "delta0" else Classifier(x, fixed)

    def f(x: float) -> float:
        return designer_expected_payoff(make(x), reward, scen)

    idx = 1 if free == "delta0" else 0

    def g(x: float) -> float:
        return payoff_gradient(make(x), reward, scen)[idx]

    def h(x: float) -> float:
        return payoff_second_derivative(make(x), reward, scen, free)

    def f_vec(xs: np.ndarray) -> np.ndarray:
        other = np.full_like(xs, fixed)
        return _payoff_raw(other, xs, reward, scen) if free == "delta0" else _payoff_raw(xs, other, reward, scen)

    x = bracketed_max(f, 0.0, 1.0, fprime=g, fsecond=h, f_vec=f_vec)
    return make(x)


def _mixed_search(reward: float, scen: Scenario) -> list[Candidate]:
    """Dense grid plus bounded local polish, for preferences with no alignment structure."""
    g = np.linspace(0.0, 1.0, MIXED_GRID)
    d1, d0 = np.meshgrid(g, g, indexing="ij")
    phi = scen.phi
    pi = np.asarray(scen.distribution.cdf((reward * (d1 + d0 - 1) * (2 * phi - 1)).ravel()))
    a, b = _cell_values(d1.ravel(), d0.ravel(), phi, scen.designer)
    vals = pi * a + (1 - pi) * b
    top = np.argsort(-vals, kind="stable")[:MIXED_POLISH_STARTS]
    out = []

    def neg(x):
        return -_payoff_raw(float(x[0]), float(x[1]), reward, scen)

    def neg_grad(x):
        gr = payoff_gradient(Classifier(*np.clip(x, 0, 1)), reward, scen)
        return -np.asarray(gr)

    for j in top:
        x0 = np.array([d1.ravel()[j], d0.ravel()[j]])
        res = optimize.minimize(
            neg, x0, jac=neg_grad, method="L-BFGS-B", bounds=[(0, 1), (0, 1)],
            options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 200},
        )
        c = Classifier(*np.clip(res.x, 0.0, 1.0))
        out.append(Candidate("grid polish", c, designer_expected_payoff(c, reward, scen)))
    # optimal classifiers lie on an edge whenever the Hessian is indefinite
    for free, fixed in (("delta0", 0.0), ("delta0", 1.0), ("delta1", 0.0), ("delta1", 1.0)):
        c = _edge_max(reward, scen, free, fixed)
        out.append(Candidate(f"edge {free} free", c, designer_expected_payoff(c, reward, scen)))
    return out


def _collect(
    reward: float, cands: list[Candidate], method: str, tol: float = ARGMAX_TOLERANCE
) -> DesignerBestResponse:
    best = max(c.payoff for c in cands)
    winners: list[Classifier] = []
    for cand in cands:
        if cand.payoff < best - tol:
            continue
        if any(
            abs(cand.classifier.delta1 - w.delta1) <= _DEDUP_RADIUS
            and abs(cand.classifier.delta0 - w.delta0) <= _DEDUP_RADIUS
            for w in winners
        ):
            continue
        winners.append(cand.classifier)
    return DesignerBestResponse(
        reward=reward,
        classifiers=tuple(sorted(winners)),
        payoff=best,
        diagnostics=tuple(cands),
        method=method,
    )


def designer_best_response(reward: float, scen: Scenario) -> DesignerBestResponse:
    """All global maximizers of the designer's payoff at ``reward``.

    Compliance-type preferences (``A1 == A0``, ``B1 == B0``) are solved in
    closed form.  Strongly (mis)aligned preferences make the payoff
    quasiconvex in one coordinate and quasiconcave in the other, so the
    search fixes the quasiconvex coordinate at 0 and 1, maximizes the other
    on each edge, and compares against the four corners (two of which are
    the best null classifiers).  Anything else falls back to a dense grid
    with local polish.
    """
    reward = float(reward)
    if not math.isfinite(reward):
        raise InvalidInputError(f"reward must be finite, got {reward!r}")
    dp = scen.designer
    kind = accuracy_alignment(dp)
    corners = [
        Candidate(lbl, c, designer_expected_payoff(c, reward, scen)) for lbl, c in _CORNERS
    ]

    if kind is AccuracyAlignment.BOTH:
        gap = dp.a1 - dp.b1
        if reward == 0.0 or gap == 0.0:
            return DesignerBestResponse(
                reward=reward,
                classifiers=(Classifier(0.0, 1.0), Classifier(1.0, 1.0)),
                payoff=corners[0].payoff,
                diagnostics=tuple(corners),
                all_optimal=True,
                method="all classifiers equivalent",
            )
        c = Classifier(1.0, 1.0) if reward * gap > 0 else Classifier(0.0, 0.0)
        return DesignerBestResponse(
            reward=reward,
            classifiers=(c,),
            payoff=designer_expected_payoff(c, reward, scen),
            diagnostics=tuple(corners),
            method="compliance sign rule",
        )

    if reward == 0.0:
        # compliance is fixed at F(0): the payoff is linear, so corners suffice
        return _collect(reward, corners, "linear at zero reward")

    if kind in (AccuracyAlignment.STRONGLY_ALIGNED, AccuracyAlignment.STRONGLY_MISALIGNED):
        sign = 1.0 if kind is AccuracyAlignment.STRONGLY_ALIGNED else -1.0
        free = "delta0" if reward * sign > 0 else "delta1"
        cands = list(corners)
        for fixed in (0.0, 1.0):
            c = _edge_max(reward, scen, free, fixed)
            cands.append(
                Candidate(f"{free} free, other fixed at {fixed:g}", c,
                          designer_expected_payoff(c, reward, scen))
            )
        return _collect(reward, cands, "quasiconcave edge search")

    return _collect(reward, corners + _mixed_search(reward, scen), "grid with local polish")


# -- large-reward limit -------------------------------------------------------


def limit_classifiers(epsilon: float = EPSILON_LIMIT) -> dict[str, Classifier]:
    """Classifiers that push almost all mass into one confusion cell as ``r`` grows."""
    return {
        "tp": Classifier(1.0, epsilon),
        "fn": Classifier(epsilon, 1.0),
        "tn": Classifier(0.0, 1.0 - epsilon),
        "fp": Classifier(1.0 - epsilon, 0.0),
    }


_CELL_PAYOFF = {"tp": "a1", "fn": "a0", "tn": "b1", "fp": "b0"}


@dataclass(frozen=True)
class LimitRow:
    cell: str
    reward: float
    classifier: Classifier
    fraction: float
    payoff: float
    cell_payoff: float


@dataclass(frozen=True)
class LimitReport:
    rows: tuple[LimitRow, ...]
    epsilon: float

    def final(self, cell: str) -> LimitRow:
        return [r for r in self.rows if r.cell == cell][-1]

    def converged(self, cell: str, fraction_floor: float = 0.99) -> bool:
        return self.final(cell).fraction >= fraction_floor


def limit_payoff_check(
    scen: Scenario, reward_sequence, epsilon: float = EPSILON_LIMIT
) -> LimitReport:
    """Track each cell's mass and the designer payoff along growing rewards."""
    rows = []
    for cell, c in limit_classifiers(epsilon).items():
        for r in reward_sequence:
            pi = prevalence(c, scen.phi, r, scen.distribution)
            frac: ConfusionFractions = confusion_fractions(pi, c, scen.phi)
            rows.append(
                LimitRow(
                    cell=cell,
                    reward=float(r),
                    classifier=c,
                    fraction=getattr(frac, cell),
                    payoff=designer_expected_payoff(c, r, scen),
                    cell_payoff=getattr(scen.designer, _CELL_PAYOFF[cell]),
                )
            )
    return LimitReport(tuple(rows), epsilon)
