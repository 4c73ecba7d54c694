"""Report builders behind each CLI subcommand."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .designer import designer_best_response
from .distributions import CostDistribution, verify_log_concavity
from .equilibrium import EquilibriumOutcome, exogenous_comparison, solve_equilibria
from .exceptions import NullClassifierError
from .model import Classifier, Scenario, confusion_fractions, prevalence, responsiveness
from .oracle import grid_designer_argmax, simulate_population
from .report import Cell, RunReport, Table
from .voters import condorcet_reward, median_optimal_k, solve_k_roots, sw_optimal_reward

# formula identifiers attached to report cells
F_PAYOFF = "EU = pi*a + (1-pi)*b"
F_PREV = "pi = F(r*rho)"
F_CELL = "confusion cell mass"
F_ACC = "tp + tn"
F_REWARD = "r = k_mu / rho"
F_MEDIAN = "V(r; gamma_mu)"
F_SW = "SW = t*F(r*rho) - E[gamma; gamma <= r*rho]"
F_K0 = "k0 = t - F(k0)/f(k0)"
F_K1 = "k1 = t + (1-F(k1))/f(k1)"
F_CUT = "k0*F(k0) + k1*(1-F(k1)) + t*(F(k1)-F(k0))"
F_SWR = "r_SW = t / rho"
F_GRID = "lattice argmax of cell-mass payoff"


def scenario_inputs(scen: Scenario) -> dict:
    return {
        "distribution": scen.distribution.to_config(),
        "phi": scen.phi,
        "t": scen.t,
        "designer": dict(zip(("a1", "a0", "b1", "b0"), scen.designer.as_tuple())),
    }


def designer_report(scen: Scenario, reward: float, oracle: bool = False, grid: int = 401) -> RunReport:
    rep = RunReport("designer", scenario_inputs(scen) | {"reward": reward})
    br = designer_best_response(reward, scen)
    if br.all_optimal:
        rep.messages.append(
            "all classifiers equivalent: the designer only values compliance and cannot move it"
        )
    tab = Table(
        f"designer best response at r = {reward:.4g}",
        ["delta1", "delta0", "payoff", "prevalence", "tp", "fn", "fp", "tn", "accuracy"],
    )
    for c in br.classifiers:
        pi = prevalence(c, scen.phi, reward, scen.distribution)
        cf = confusion_fractions(pi, c, scen.phi)
        tab.add(
            Cell(c.delta1, "argmax EU"), Cell(c.delta0, "argmax EU"), Cell(br.payoff, F_PAYOFF),
            Cell(pi, F_PREV), Cell(cf.tp, F_CELL), Cell(cf.fn, F_CELL), Cell(cf.fp, F_CELL),
            Cell(cf.tn, F_CELL), Cell(cf.accuracy, F_ACC),
        )
    rep.tables.append(tab)
    if oracle:
        rep.oracle.append(designer_oracle_table(scen, reward, br.payoff, grid))
    return rep


def designer_oracle_table(scen: Scenario, reward: float, analytic_payoff: float, grid: int) -> Table:
    c, v = grid_designer_argmax(reward, scen, grid)
    tab = Table(f"{grid}x{grid} lattice", ["delta1", "delta0", "payoff", "analytic - lattice"])
    tab.add(Cell(c.delta1, F_GRID), Cell(c.delta0, F_GRID), Cell(v, F_GRID),
            Cell(analytic_payoff - v, "difference"))
    return tab


def rewards_report(scen: Scenario, classifier: Classifier | None = None) -> RunReport:
    rep = RunReport("rewards", scenario_inputs(scen))
    roots = solve_k_roots(scen)
    choice = median_optimal_k(scen)
    tab = Table("preferred behavior thresholds", ["quantity", "value"])
    tab.add(Cell("k0"), Cell(roots.k0, F_K0))
    tab.add(Cell("k1"), Cell(roots.k1, F_K1))
    tab.add(Cell("cutpoint"), Cell(choice.cutpoint_value, F_CUT))
    tab.add(Cell("median cost"), Cell(choice.median_cost, "median of F"))
    tab.add(Cell("median branch"), Cell(choice.branch, "median cost <= cutpoint"))
    tab.add(Cell("k_mu"), Cell(choice.k_star, "median's root"))
    tab.add(Cell("democratic compliance"), Cell(scen.distribution.cdf(choice.k_star), "F(k_mu)"))
    rep.tables.append(tab)
    if classifier is not None:
        cr = condorcet_reward(classifier, scen)
        ctab = Table(f"rewards for classifier {classifier.as_tuple()}", ["quantity", "value"])
        ctab.add(Cell("rho"), Cell(responsiveness(classifier, scen.phi), "(d1+d0-1)(2phi-1)"))
        ctab.add(Cell("majority reward"), Cell(cr.reward, F_REWARD))
        if cr.indifferent:
            rep.messages.append("null classifier: every voter is indifferent over rewards (0 shown)")
        try:
            ctab.add(Cell("welfare-optimal reward"), Cell(sw_optimal_reward(classifier, scen), F_SWR))
        except NullClassifierError:
            ctab.add(Cell("welfare-optimal reward"), Cell("any", "welfare flat in r"))
        rep.tables.append(ctab)
    return rep


EQ_COLUMNS = ["delta1", "delta0", "reward", "prevalence", "welfare", "median payoff", "designer payoff", "kind"]


def outcome_row(o: EquilibriumOutcome) -> list[Cell]:
    return [
        Cell(o.classifier.delta1, "equilibrium classifier"),
        Cell(o.classifier.delta0, "equilibrium classifier"),
        Cell(o.reward, F_REWARD if o.reward else "r = 0"),
        Cell(o.prevalence, F_PREV),
        Cell(o.social_welfare, F_SW),
        Cell(o.median_payoff, F_MEDIAN),
        Cell(o.designer_payoff, F_PAYOFF),
        Cell(o.kind.value),
    ]


def equilibria_report(scen: Scenario, oracle: bool = False, grid: int = 401) -> RunReport:
    rep = RunReport("equilibria", scenario_inputs(scen))
    eq = solve_equilibria(scen)
    choice = median_optimal_k(scen)
    rep.messages.append(f"median's preferred threshold k_mu = {choice.k_star:.4g} ({choice.branch})")
    nr = eq.null_report
    rep.messages.append(
        f"sincere prevalence F(0) = {nr.sincere_prevalence:.4g}; null-blocking interval "
        f"({nr.interval_low:.4g}, {nr.interval_high:.4g}); null equilibrium exists: {nr.exists}"
    )
    tab = Table("equilibria", EQ_COLUMNS)
    for o in eq.outcomes:
        tab.add(*outcome_row(o))
    rep.tables.append(tab)
    if eq.empty:
        rep.messages.append(
            "no pure-strategy equilibrium: the designer's best responses and the majority's "
            "reward choice never settle on a common pair"
        )
    if all(o.kind.value == "null" for o in eq.outcomes) and eq.outcomes:
        rep.messages.append("only the null outcome survives; try `compare` with a fixed reward")
    rep.warnings += list(eq.notes)
    if oracle:
        for o in eq.outcomes:
            rep.oracle.append(designer_oracle_table(scen, o.reward, o.designer_payoff, grid))
    return rep


def compare_report(scen: Scenario, fixed_reward: float) -> RunReport:
    rep = RunReport("compare", scenario_inputs(scen) | {"fixed_reward": fixed_reward})
    cmp = exogenous_comparison(scen, fixed_reward)
    eq_tab = Table("democratic equilibria", EQ_COLUMNS)
    for o in cmp.equilibria:
        eq_tab.add(*outcome_row(o))
    exo_tab = Table(f"exogenous reward r = {fixed_reward:.4g}", EQ_COLUMNS)
    exo_tab.add(*outcome_row(cmp.exogenous))
    rep.tables += [eq_tab, exo_tab]
    if cmp.tied_classifiers:
        rep.warnings.append(
            "designer indifferent between "
            + ", ".join(str(c.as_tuple()) for c in cmp.tied_classifiers)
        )
    return rep


def simulate_report(
    scen: Scenario, c: Classifier, reward: float, n_agents: int, seed: int, workers: int = 1,
    csv_path: str | None = None,
) -> RunReport:
    rep = RunReport(
        "simulate",
        scenario_inputs(scen) | {"classifier": c.as_tuple(), "reward": reward,
                                 "n_agents": n_agents, "seed": seed},
    )
    res = simulate_population(c, reward, scen, n_agents, seed, workers=workers,
                              keep_agents=csv_path is not None)
    pi = prevalence(c, scen.phi, reward, scen.distribution)
    cf = confusion_fractions(pi, c, scen.phi)
    tab = Table("simulation vs analytic", ["quantity", "simulated", "analytic", "z-score"])
    n = float(n_agents)
    pairs = [("prevalence", res.empirical_prevalence, pi)] + [
        (k, getattr(res.empirical_confusion, k), getattr(cf, k)) for k in ("tp", "fn", "fp", "tn")
    ]
    for name, sim, ana in pairs:
        sd = np.sqrt(max(ana * (1 - ana), 1e-300) / n)
        tab.add(Cell(name), Cell(sim, "sample mean"), Cell(ana, F_PREV if name == "prevalence" else F_CELL),
                Cell((sim - ana) / sd, "(sim - analytic) / binomial sd"))
    tab.add(Cell("mean net transfer"), Cell(res.mean_net_transfer, "mean r*(d - mean d)"),
            Cell(0.0, "budget balance"), Cell(float("nan")))
    rep.tables.append(tab)
    if csv_path is not None:
        res.write_csv(csv_path)
        rep.messages.append(f"per-agent trace written to {csv_path}")
    return rep


def check_dist_report(dist: CostDistribution, lo: float, hi: float, n: int) -> RunReport:
    grid = np.linspace(lo, hi, n)
    res = verify_log_concavity(dist, grid)
    rep = RunReport("check-dist", {"distribution": dist.to_config(), "grid": [lo, hi, n]})
    tab = Table("log-concavity", ["quantity", "value"])
    tab.add(Cell("grid points"), Cell(n))
    tab.add(Cell("f^2 >= F f' everywhere"), Cell(all(res.cdf_side), "pointwise"))
    tab.add(Cell("f^2 >= -f' (1-F) everywhere"), Cell(all(res.sf_side), "pointwise"))
    tab.add(Cell("violations"), Cell(len(res.violations)))
    rep.tables.append(tab)
    if not res.passed:
        rep.warnings.append(f"violations at x = {', '.join(f'{x:.4g}' for x in res.violations[:10])}")
    return rep


def write_density_csv(path: str | Path, dist: CostDistribution, thresholds: dict[str, float],
                      n: int = 801) -> None:
    """Density on a grid plus one comply-region flag column per named threshold."""
    m, s = dist.median(), dist.scale_hint
    xs = np.linspace(m - 4 * s, m + 4 * s, n)
    pdf = np.asarray(dist.pdf(xs))
    names = list(thresholds)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "pdf"] + [f"comply_{k}" for k in names])
        for x, p in zip(xs, pdf):
            w.writerow([f"{x:.6g}", f"{p:.10g}"] + [int(x <= thresholds[k]) for k in names])
