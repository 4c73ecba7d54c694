"""Brute-force and Monte Carlo cross-checks for the analytic solvers.

Payoffs here never come from the solvers.  They are rebuilt from the
primitives: confusion-matrix masses for the designer, and reward
probabilities net of the budget-balancing charge for voters.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import InvalidInputError
from .model import Classifier, ConfusionFractions, Scenario
from .voters import condorcet_reward

DESIGNER_GRID = 401
REWARD_GRID = 4001
SIMULATION_BLOCK = 1 << 16


# -- designer ------------------------------------------------------------------


def designer_payoff_lattice(reward: float, scen: Scenario, resolution: int = DESIGNER_GRID):
    """Designer payoff on the ``resolution x resolution`` lattice, indexed ``[delta1, delta0]``."""
    if resolution < 11:
        raise InvalidInputError(f"grid resolution must be >= 11, got {resolution}")
    g = np.linspace(0.0, 1.0, resolution)
    d1, d0 = np.meshgrid(g, g, indexing="ij")
    phi = scen.phi
    pi = np.asarray(scen.distribution.cdf(reward * (d1 + d0 - 1.0) * (2 * phi - 1)))
    tp = pi * (phi * d1 + (1 - phi) * (1 - d0))
    fn = pi * (phi * (1 - d1) + (1 - phi) * d0)
    fp = (1 - pi) * (phi * (1 - d0) + (1 - phi) * d1)
    tn = (1 - pi) * (phi * d0 + (1 - phi) * (1 - d1))
    dp = scen.designer
    return g, tp * dp.a1 + fn * dp.a0 + fp * dp.b0 + tn * dp.b1


def grid_designer_argmax(
    reward: float, scen: Scenario, resolution: int = DESIGNER_GRID
) -> tuple[Classifier, float]:
    """Exhaustive lattice maximizer; ties go to the lexicographically smallest point."""
    g, vals = designer_payoff_lattice(reward, scen, resolution)
    i1, i0 = np.unravel_index(int(np.argmax(vals)), vals.shape)
    return Classifier(float(g[i1]), float(g[i0])), float(vals[i1, i0])


# -- voters --------------------------------------------------------------------


def agent_payoffs(gamma, reward: float, c: Classifier, scen: Scenario) -> np.ndarray:
    """Expected payoff of best-responding agents, built from reward probabilities.

    An agent receives ``r`` with probability ``Pr[d = 1 | behavior]``, pays
    the population average award and gains ``t`` per unit of compliance.
    """
    gamma = np.asarray(gamma, dtype=float)
    phi, d1, d0 = scen.phi, c.delta1, c.delta0
    p_award_comply = phi * d1 + (1 - phi) * (1 - d0)
    p_award_shirk = (1 - phi) * d1 + phi * (1 - d0)
    threshold = reward * (p_award_comply - p_award_shirk)
    pi = scen.distribution.cdf(threshold)
    mean_award = reward * (pi * p_award_comply + (1 - pi) * p_award_shirk)
    comply = gamma <= threshold
    own = np.where(comply, reward * p_award_comply - gamma, reward * p_award_shirk)
    return own - mean_award + scen.t * pi


@dataclass(frozen=True)
class RewardGridResult:
    reward: float
    payoff: float
    spread: float
    spacing: float

    @property
    def flat(self) -> bool:
        return self.spread <= 1e-12


def grid_median_reward_argmax(
    c: Classifier,
    scen: Scenario,
    r_range: tuple[float, float] = (-20.0, 20.0),
    resolution: int = REWARD_GRID,
) -> RewardGridResult:
    """Grid maximizer of the median-cost agent's payoff over rewards."""
    lo, hi = r_range
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi) or resolution < 3:
        raise InvalidInputError(f"bad reward range {r_range!r} or resolution {resolution}")
    rs = np.linspace(lo, hi, resolution)
    med = scen.median_cost
    vals = np.array([float(agent_payoffs(med, float(r), c, scen)) for r in rs])
    i = int(np.argmax(vals))
    return RewardGridResult(
        reward=float(rs[i]),
        payoff=float(vals[i]),
        spread=float(vals.max() - vals.min()),
        spacing=float(rs[1] - rs[0]),
    )


# -- population simulation -----------------------------------------------------


@dataclass(frozen=True)
class AgentRecord:
    cost: float
    behavior: int
    signal: int
    decision: int
    net_transfer: float


@dataclass(frozen=True)
class SimulationResult:
    """Summary of a finite-population draw; per-agent arrays kept on request."""

    n_agents: int
    empirical_prevalence: float
    empirical_confusion: ConfusionFractions
    mean_net_transfer: float
    seed: int
    reward: float
    classifier: Classifier
    arrays: dict[str, np.ndarray] | None = field(default=None, repr=False, compare=False)

    def agents(self):
        """Iterate per-agent records (requires ``keep_agents=True``)."""
        if self.arrays is None:
            raise InvalidInputError("simulation was run without keep_agents=True")
        a = self.arrays
        for i in range(self.n_agents):
            yield AgentRecord(
                float(a["cost"][i]), int(a["behavior"][i]), int(a["signal"][i]),
                int(a["decision"][i]), float(a["net_transfer"][i]),
            )

    def summary(self) -> dict:
        return {
            "n_agents": self.n_agents,
            "seed": self.seed,
            "reward": self.reward,
            "classifier": {"delta1": self.classifier.delta1, "delta0": self.classifier.delta0},
            "empirical_prevalence": self.empirical_prevalence,
            "empirical_confusion": self.empirical_confusion.as_dict(),
            "mean_net_transfer": self.mean_net_transfer,
        }

    def write_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.summary(), indent=2) + "\n")

    def write_csv(self, path: str | Path) -> None:
        cols = ("cost", "behavior", "signal", "decision", "net_transfer")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(cols)
            for rec in self.agents():
                w.writerow([getattr(rec, k) for k in cols])


def _block_rng(seed: int, block: int) -> np.random.Generator:
    # keyed by block index so the stream does not depend on worker count
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def _simulate_block(block: int, size: int, c: Classifier, reward: float, scen: Scenario, seed: int):
    rng = _block_rng(seed, block)
    cost = scen.distribution.sample(rng, size)
    phi = scen.phi
    threshold = reward * c.tilt * (2 * phi - 1)
    behavior = (cost <= threshold).astype(np.int8)
    signal = np.where(rng.random(size) < phi, behavior, 1 - behavior).astype(np.int8)
    follow_p = np.where(signal == 1, c.delta1, c.delta0)
    decision = np.where(rng.random(size) < follow_p, signal, 1 - signal).astype(np.int8)
    return cost, behavior, signal, decision


def simulate_population(
    c: Classifier,
    reward: float,
    scen: Scenario,
    n_agents: int,
    seed: int,
    workers: int = 1,
    keep_agents: bool = False,
    block_size: int = SIMULATION_BLOCK,
) -> SimulationResult:
    """Draw costs, behaviors, signals, decisions and budget-balanced transfers.

    Agents are split into fixed-size blocks, each with its own seed derived
    from ``(seed, block index)``, so results are identical for any
    ``workers``.
    """
    n_agents = int(n_agents)
    if n_agents < 1:
        raise InvalidInputError(f"n_agents must be >= 1, got {n_agents}")
    sizes = [min(block_size, n_agents - s) for s in range(0, n_agents, block_size)]

    def run(j: int):
        return _simulate_block(j, sizes[j], c, float(reward), scen, int(seed))

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(j) for j in range(len(sizes))]
    cost, behavior, signal, decision = (np.concatenate(x) for x in zip(*parts))

    d_bar = decision.mean()
    transfer = float(reward) * (decision - d_bar)
    b, d = behavior.astype(bool), decision.astype(bool)
    n = float(n_agents)
    confusion = ConfusionFractions(
        tp=np.count_nonzero(b & d) / n,
        fn=np.count_nonzero(b & ~d) / n,
        fp=np.count_nonzero(~b & d) / n,
        tn=np.count_nonzero(~b & ~d) / n,
    )
    arrays = None
    if keep_agents:
        arrays = dict(cost=cost, behavior=behavior, signal=signal, decision=decision, net_transfer=transfer)
    return SimulationResult(
        n_agents=n_agents,
        empirical_prevalence=float(behavior.mean()),
        empirical_confusion=confusion,
        mean_net_transfer=float(transfer.mean()),
        seed=int(seed),
        reward=float(reward),
        classifier=c,
        arrays=arrays,
    )


# -- pairwise votes ------------------------------------------------------------


@dataclass(frozen=True)
class PairwiseVote:
    challenger: float
    prefer_incumbent: float
    tie: float
    prefer_challenger: float

    @property
    def incumbent_wins(self) -> bool:
        """Incumbent is weakly preferred by at least half of the voters."""
        return self.prefer_incumbent + self.tie >= 0.5


@dataclass(frozen=True)
class CondorcetReport:
    incumbent: float
    votes: tuple[PairwiseVote, ...]
    n_agents: int
    seed: int

    @property
    def wins_all(self) -> bool:
        return all(v.incumbent_wins for v in self.votes)

    def as_dict(self) -> dict:
        return asdict(self) | {"wins_all": self.wins_all}


def verify_condorcet(
    c: Classifier,
    scen: Scenario,
    challenger_rewards,
    n_agents: int = 100_000,
    seed: int = 0,
    incumbent: float | None = None,
    tie_tol: float = 1e-12,
) -> CondorcetReport:
    """Pairwise majority votes between ``incumbent`` and each challenger reward.

    ``incumbent`` defaults to the analytic majority-preferred reward.
    """
    if c.is_null():
        raise InvalidInputError("pairwise votes are uninformative for a null classifier")
    if incumbent is None:
        incumbent = condorcet_reward(c, scen).reward
    gamma = scen.distribution.sample(_block_rng(int(seed), 0), int(n_agents))
    base = agent_payoffs(gamma, float(incumbent), c, scen)
    votes = []
    for r in challenger_rewards:
        diff = base - agent_payoffs(gamma, float(r), c, scen)
        scale = tie_tol * max(1.0, float(np.max(np.abs(base))))
        votes.append(
            PairwiseVote(
                challenger=float(r),
                prefer_incumbent=float(np.mean(diff > scale)),
                tie=float(np.mean(np.abs(diff) <= scale)),
                prefer_challenger=float(np.mean(diff < -scale)),
            )
        )
    return CondorcetReport(float(incumbent), tuple(votes), int(n_agents), int(seed))
