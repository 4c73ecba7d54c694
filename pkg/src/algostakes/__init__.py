"""Classifier design when the reward attached to a decision is chosen by majority vote."""

from .designer import (
    AccuracyAlignment,
    DesignerBestResponse,
    accuracy_alignment,
    archetype,
    clamped_delta_star,
    delta0_critical,
    delta1_critical,
    designer_best_response,
    designer_expected_payoff,
    limit_payoff_check,
)
from .distributions import (
    CostDistribution,
    LogisticDistribution,
    NormalDistribution,
    distribution_from_config,
    verify_log_concavity,
)
from .equilibrium import (
    EquilibriumKind,
    EquilibriumOutcome,
    NullExistenceReport,
    enumerate_non_null,
    exogenous_comparison,
    find_equilibria,
    null_equilibrium_exists,
    solve_equilibria,
)
from .exceptions import (
    BracketError,
    ConfigError,
    DegenerateDenominatorError,
    InvalidInputError,
    NullClassifierError,
)
from .model import (
    Classifier,
    ConfusionFractions,
    DesignerPayoffs,
    Responsiveness,
    Scenario,
    best_response_behavior,
    classify_responsiveness,
    confusion_fractions,
    prevalence,
    responsiveness,
)
from .oracle import (
    SimulationResult,
    grid_designer_argmax,
    grid_median_reward_argmax,
    simulate_population,
    verify_condorcet,
)
from .voters import (
    MedianChoice,
    RewardSolution,
    condorcet_reward,
    cutpoint_monotonicity_check,
    median_optimal_k,
    social_welfare,
    solve_k_roots,
    sw_optimal_reward,
    voter_payoff,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
