"""Core primitives of the classification game.

A classifier ``(delta1, delta0)`` follows the observed signal with
probability ``delta1`` when the signal is 1 and ``delta0`` when it is 0.
Signals match the chosen behavior with probability ``phi``.  An individual
with cost ``gamma`` complies iff ``gamma <= r * rho`` where
``rho = (delta1 + delta0 - 1) * (2 * phi - 1)`` is the classifier's
responsiveness, so population compliance is ``F(r * rho)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any

from .distributions import CostDistribution
from .exceptions import InvalidInputError

NULL_TOLERANCE = 1e-9


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise InvalidInputError(f"{name} must be finite, got {value!r}")
    return value


def check_phi(phi: float) -> float:
    """Validate a signal accuracy, which must lie in (1/2, 1]."""
    phi = float(phi)
    if not (0.5 < phi <= 1.0):
        raise InvalidInputError(f"signal accuracy phi must satisfy 0.5 < phi <= 1, got {phi}")
    return phi


def check_probability(name: str, p: float) -> float:
    p = float(p)
    if not (0.0 <= p <= 1.0):
        raise InvalidInputError(f"{name} must lie in [0, 1], got {p}")
    return p


@dataclass(frozen=True, order=True)
class Classifier:
    """Follow-the-signal probabilities ``Pr[d = s | s]``.

    Ordering is lexicographic in ``(delta1, delta0)``, which is the
    deterministic tie-break used throughout.
    """

    delta1: float
    delta0: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "delta1", check_probability("delta1", self.delta1))
        object.__setattr__(self, "delta0", check_probability("delta0", self.delta0))

    @property
    def tilt(self) -> float:
        """``delta1 + delta0 - 1``; zero exactly for null classifiers."""
        return self.delta1 + self.delta0 - 1.0

    def is_null(self, tol: float = NULL_TOLERANCE) -> bool:
        return abs(self.tilt) <= tol

    def mirrored(self) -> "Classifier":
        return Classifier(1.0 - self.delta1, 1.0 - self.delta0)

    def as_tuple(self) -> tuple[float, float]:
        return (self.delta1, self.delta0)


NULL_CANONICAL = Classifier(0.0, 1.0)
"""Null classifier that assigns ``d = 0`` to everyone."""

FOLLOW_SIGNAL = Classifier(1.0, 1.0)


@dataclass(frozen=True)
class DesignerPayoffs:
    """Designer's ex post payoff per confusion-matrix cell.

    ``a1`` true positive, ``a0`` false negative, ``b1`` true negative,
    ``b0`` false positive.
    """

    a1: float
    a0: float
    b1: float
    b0: float

    def __post_init__(self) -> None:
        for name in ("a1", "a0", "b1", "b0"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise InvalidInputError(f"designer payoff {name} must be finite and >= 0, got {v}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a1, self.a0, self.b1, self.b0)


@dataclass(frozen=True)
class Scenario:
    """Everything the solver needs: cost distribution, externality, accuracy, designer."""

    distribution: CostDistribution
    externality_t: float
    phi: float
    designer: DesignerPayoffs

    def __post_init__(self) -> None:
        t = _check_finite("externality_t", self.externality_t)
        if t < 0:
            raise InvalidInputError(f"externality t must be >= 0, got {t}")
        check_phi(self.phi)

    @property
    def t(self) -> float:
        return self.externality_t

    @property
    def median_cost(self) -> float:
        return self.distribution.median()

    def replace(self, **changes: Any) -> "Scenario":
        fields = dict(
            distribution=self.distribution,
            externality_t=self.externality_t,
            phi=self.phi,
            designer=self.designer,
        )
        fields.update(changes)
        return Scenario(**fields)


@dataclass(frozen=True)
class ConfusionFractions:
    """Population mass in each behavior/decision cell."""

    tp: float
    fn: float
    fp: float
    tn: float

    @property
    def accuracy(self) -> float:
        return self.tp + self.tn

    @property
    def prevalence(self) -> float:
        return self.tp + self.fn

    def as_dict(self) -> dict[str, float]:
        return {"tp": self.tp, "fn": self.fn, "fp": self.fp, "tn": self.tn}


class Responsiveness(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NULL = "null"


def responsiveness(c: Classifier, phi: float) -> float:
    """Expected responsiveness ``(delta1 + delta0 - 1)(2 phi - 1)``."""
    return c.tilt * (2.0 * check_phi(phi) - 1.0)


def classify_responsiveness(
    c: Classifier, phi: float, tol: float = NULL_TOLERANCE
) -> Responsiveness:
    rho = responsiveness(c, phi)
    if abs(rho) <= tol:
        return Responsiveness.NULL
    return Responsiveness.POSITIVE if rho > 0 else Responsiveness.NEGATIVE


def best_response_behavior(gamma: float, c: Classifier, phi: float, reward: float) -> int:
    """Individual's compliance choice; ties go to complying."""
    gamma = _check_finite("gamma", gamma)
    reward = _check_finite("reward", reward)
    return 1 if gamma <= reward * responsiveness(c, phi) else 0


def prevalence(c: Classifier, phi: float, reward: float, dist: CostDistribution) -> float:
    """Equilibrium compliance ``F(r * rho)``."""
    reward = _check_finite("reward", reward)
    return dist.cdf(reward * responsiveness(c, phi))


def confusion_fractions(pi: float, c: Classifier, phi: float) -> ConfusionFractions:
    """Split the population into the four cells given compliance ``pi``."""
    pi = check_probability("pi", pi)
    phi = check_phi(phi)
    d1, d0 = c.delta1, c.delta0
    return ConfusionFractions(
        tp=pi * (phi * d1 + (1 - phi) * (1 - d0)),
        fn=pi * (phi * (1 - d1) + (1 - phi) * d0),
        fp=(1 - pi) * (phi * (1 - d0) + (1 - phi) * d1),
        tn=(1 - pi) * (phi * d0 + (1 - phi) * (1 - d1)),
    )
