from __future__ import annotations

import sys

import pytest

from algostakes import DesignerPayoffs, NormalDistribution, Scenario, archetype

PHI = 0.75


def make_scenario(mean=0.0, t=0.5, designer=None, phi=PHI, std=1.0) -> Scenario:
    return Scenario(
        NormalDistribution(mean, std), t, phi, designer or archetype("accuracy")
    )


@pytest.fixture
def accuracy_std() -> Scenario:
    """Accuracy designer, standard normal costs, t = 0.5."""
    return make_scenario(0.0)


@pytest.fixture
def accuracy_shifted() -> Scenario:
    """Accuracy designer, costs centered at 1, t = 0.5."""
    return make_scenario(1.0)


@pytest.fixture
def inefficient() -> Scenario:
    """Designer valuing true negatives at 0.9, costs centered at 1, t = 1.25."""
    return make_scenario(1.0, 1.25, DesignerPayoffs(1.0, 0.0, 0.9, 0.0))


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("tests.test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance.summary_lines():
        terminalreporter.write_line(line)
