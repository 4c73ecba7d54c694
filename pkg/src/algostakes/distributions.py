"""Cost distributions for the population of individuals.

Every distribution exposes the CDF ``F``, density ``f``, its derivative
``f'``, the median cost and the partial expectation
``E[gamma; gamma <= x] = int_{-inf}^x gamma dF(gamma)``.  Methods accept
scalars or numpy arrays and return the same shape.

The solver assumes a log-concave density with full support on the real
line.  ``verify_log_concavity`` checks the two pointwise consequences of
that assumption which the second-order conditions rely on.
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import integrate, special

from .exceptions import ConfigError, InvalidInputError

__all__ = [
    "CostDistribution",
    "NormalDistribution",
    "LogisticDistribution",
    "LogConcavityReport",
    "verify_log_concavity",
    "distribution_from_config",
]

_FD_STEP = 1e-5


def _finite(x: Any) -> Any:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"expected finite cost value(s), got {x!r}")
    return x


def _out(value: np.ndarray | float, like: Any) -> Any:
    if np.ndim(like) == 0:
        return float(value)
    return value


class CostDistribution(abc.ABC):
    """Abstract distribution of individual compliance costs.

    Subclasses must provide ``cdf``, ``pdf`` and ``median``.  The remaining
    methods have generic fallbacks (finite differences for ``pdf_prime``,
    adaptive quadrature for ``partial_expectation``) that concrete families
    override with closed forms.
    """

    family: str = "custom"

    @abc.abstractmethod
    def cdf(self, x): ...

    @abc.abstractmethod
    def pdf(self, x): ...

    @abc.abstractmethod
    def median(self) -> float: ...

    def expected_cost(self) -> float:
        return float(integrate.quad(lambda g: g * self.pdf(g), -np.inf, np.inf)[0])

    @property
    def scale_hint(self) -> float:
        """Characteristic width used to size search brackets."""
        return 1.0

    def sf(self, x):
        return _out(1.0 - np.asarray(self.cdf(x), dtype=float), x)

    def pdf_prime(self, x):
        _finite(x)
        xa = np.asarray(x, dtype=float)
        h = _FD_STEP * np.maximum(1.0, np.abs(xa))
        d = (np.asarray(self.pdf(xa + h)) - np.asarray(self.pdf(xa - h))) / (2 * h)
        return _out(d, x)

    def logpdf(self, x):
        with np.errstate(divide="ignore"):
            return _out(np.log(np.asarray(self.pdf(x), dtype=float)), x)

    def logcdf(self, x):
        with np.errstate(divide="ignore"):
            return _out(np.log(np.asarray(self.cdf(x), dtype=float)), x)

    def logsf(self, x):
        with np.errstate(divide="ignore"):
            return _out(np.log(np.asarray(self.sf(x), dtype=float)), x)

    def cdf_over_pdf(self, x):
        """``F(x) / f(x)``, evaluated in log space; overflows to ``inf`` far in the right tail."""
        with np.errstate(over="ignore"):
            return _out(np.exp(np.asarray(self.logcdf(x)) - np.asarray(self.logpdf(x))), x)

    def sf_over_pdf(self, x):
        """``(1 - F(x)) / f(x)``, the inverse hazard rate."""
        with np.errstate(over="ignore"):
            return _out(np.exp(np.asarray(self.logsf(x)) - np.asarray(self.logpdf(x))), x)

    def partial_expectation(self, x):
        _finite(x)

        def one(v: float) -> float:
            return integrate.quad(lambda g: g * self.pdf(g), -np.inf, v, epsabs=1e-12)[0]

        if np.ndim(x) == 0:
            return one(float(x))
        return np.vectorize(one)(np.asarray(x, dtype=float))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Inverse-CDF sampling; concrete families use native samplers."""
        from scipy.optimize import brentq

        u = rng.random(size)
        lo, hi = self.median() - 50 * self.scale_hint, self.median() + 50 * self.scale_hint
        return np.array([brentq(lambda g: self.cdf(g) - ui, lo, hi) for ui in u])

    def to_config(self) -> dict[str, Any]:
        raise NotImplementedError(f"{type(self).__name__} has no config representation")


@dataclass(frozen=True)
class NormalDistribution(CostDistribution):
    """Gaussian costs ``N(mean, std_dev**2)``."""

    mean: float = 0.0
    std_dev: float = 1.0
    family: str = field(default="normal", init=False, repr=False)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mean) and math.isfinite(self.std_dev)) or self.std_dev <= 0:
            raise InvalidInputError(
                f"normal distribution needs finite mean and std_dev > 0, got "
                f"({self.mean}, {self.std_dev})"
            )

    def _z(self, x):
        return (np.asarray(_finite(x), dtype=float) - self.mean) / self.std_dev

    def expected_cost(self) -> float:
        return self.mean

    def median(self) -> float:
        return self.mean

    @property
    def scale_hint(self) -> float:
        return self.std_dev

    def cdf(self, x):
        return _out(special.ndtr(self._z(x)), x)

    def sf(self, x):
        return _out(special.ndtr(-self._z(x)), x)

    def pdf(self, x):
        z = self._z(x)
        return _out(np.exp(-0.5 * z * z) / (self.std_dev * math.sqrt(2 * math.pi)), x)

    def pdf_prime(self, x):
        z = self._z(x)
        dens = np.exp(-0.5 * z * z) / (self.std_dev * math.sqrt(2 * math.pi))
        return _out(-z / self.std_dev * dens, x)

    def logpdf(self, x):
        z = self._z(x)
        return _out(-0.5 * z * z - math.log(self.std_dev * math.sqrt(2 * math.pi)), x)

    def logcdf(self, x):
        return _out(special.log_ndtr(self._z(x)), x)

    def logsf(self, x):
        return _out(special.log_ndtr(-self._z(x)), x)

    def partial_expectation(self, x):
        z = self._z(x)
        phi_z = np.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)
        return _out(self.mean * special.ndtr(z) - self.std_dev * phi_z, x)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.normal(self.mean, self.std_dev, size)

    def to_config(self) -> dict[str, Any]:
        return {"family": "normal", "location": self.mean, "scale": self.std_dev}


@dataclass(frozen=True)
class LogisticDistribution(CostDistribution):
    """Logistic costs with CDF ``1 / (1 + exp(-(x - location) / scale))``."""

    location: float = 0.0
    scale: float = 1.0
    family: str = field(default="logistic", init=False, repr=False)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.location) and math.isfinite(self.scale)) or self.scale <= 0:
            raise InvalidInputError(
                f"logistic distribution needs finite location and scale > 0, got "
                f"({self.location}, {self.scale})"
            )

    def _z(self, x):
        return (np.asarray(_finite(x), dtype=float) - self.location) / self.scale

    def expected_cost(self) -> float:
        return self.location

    def median(self) -> float:
        return self.location

    @property
    def scale_hint(self) -> float:
        return self.scale * math.pi / math.sqrt(3)

    def cdf(self, x):
        return _out(special.expit(self._z(x)), x)

    def sf(self, x):
        return _out(special.expit(-self._z(x)), x)

    def pdf(self, x):
        z = self._z(x)
        return _out(special.expit(z) * special.expit(-z) / self.scale, x)

    def pdf_prime(self, x):
        z = self._z(x)
        p, q = special.expit(z), special.expit(-z)
        return _out(p * q * (q - p) / self.scale**2, x)

    def logpdf(self, x):
        z = self._z(x)
        return _out(special.log_expit(z) + special.log_expit(-z) - math.log(self.scale), x)

    def logcdf(self, x):
        return _out(special.log_expit(self._z(x)), x)

    def logsf(self, x):
        return _out(special.log_expit(-self._z(x)), x)

    def cdf_over_pdf(self, x):
        # F/f = scale * (1 + e^z)
        return _out(self.scale * (1.0 + np.exp(self._z(x))), x)

    def sf_over_pdf(self, x):
        return _out(self.scale * (1.0 + np.exp(-self._z(x))), x)

    def partial_expectation(self, x):
        # int u sigma'(u) du = u sigma(u) - log(1 + e^u)
        z = self._z(x)
        tail = z * special.expit(z) - np.logaddexp(0.0, z)
        return _out(self.location * special.expit(z) + self.scale * tail, x)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.logistic(self.location, self.scale, size)

    def to_config(self) -> dict[str, Any]:
        return {"family": "logistic", "location": self.location, "scale": self.scale}


def distribution_from_config(record: dict[str, Any]) -> CostDistribution:
    """Build a distribution from ``{family, location, scale}``."""
    try:
        family = str(record["family"]).lower()
        location = float(record.get("location", 0.0))
        scale = float(record.get("scale", 1.0))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad distribution record {record!r}: {exc}") from exc
    try:
        if family == "normal":
            return NormalDistribution(location, scale)
        if family == "logistic":
            return LogisticDistribution(location, scale)
    except InvalidInputError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown distribution family {family!r} (expected 'normal' or 'logistic')")


@dataclass(frozen=True)
class LogConcavityReport:
    """Pointwise outcome of the two log-concavity inequalities on a grid.

    ``cdf_side[i]`` is ``f(x)^2 >= F(x) f'(x)`` and ``sf_side[i]`` is
    ``f(x)^2 >= -f'(x) (1 - F(x))`` at ``grid[i]``.
    """

    grid: tuple[float, ...]
    cdf_side: tuple[bool, ...]
    sf_side: tuple[bool, ...]

    @property
    def passed(self) -> bool:
        return all(self.cdf_side) and all(self.sf_side)

    @property
    def violations(self) -> list[float]:
        return [x for x, a, b in zip(self.grid, self.cdf_side, self.sf_side) if not (a and b)]


def verify_log_concavity(
    dist: CostDistribution, grid, rel_tol: float = 1e-12
) -> LogConcavityReport:
    """Check both log-concavity inequalities at every grid point.

    Points are evaluated independently, so a violation never stops the scan.
    """
    pts = [float(x) for x in grid]
    if not pts:
        raise InvalidInputError("grid must be nonempty")
    _finite(pts)
    cdf_ok, sf_ok = [], []
    for x in pts:
        f, fp = float(dist.pdf(x)), float(dist.pdf_prime(x))
        F, S = float(dist.cdf(x)), float(dist.sf(x))
        slack = rel_tol * max(f * f, 1e-300)
        cdf_ok.append(f * f + slack >= F * fp)
        sf_ok.append(f * f + slack >= -fp * S)
    return LogConcavityReport(tuple(pts), tuple(cdf_ok), tuple(sf_ok))
