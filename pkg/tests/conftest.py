import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cojump import SampledPath, SamplingGrid  # noqa: E402


def path_from_increments(dx, n_per_day=None):
    dx = np.asarray(dx, dtype=float)
    n_per_day = n_per_day or dx.size
    grid = SamplingGrid(horizon_T=dx.size / n_per_day, n_obs=dx.size, mesh_delta=1.0 / n_per_day)
    return SampledPath(grid, np.concatenate(([0.0], np.cumsum(dx))),
                       day_starts=tuple(range(0, dx.size, n_per_day)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def desk_experiment():
    """500 weeks per scenario at 1000 and 5000 observations per day."""
    from cojump.harness import ExperimentPlan, run_experiment
    plan = ExperimentPlan(scenarios=("I-c", "I-d", "I-j"), n_per_day=(1000, 5000), n_reps=500,
                          alphas=(0.05, 0.10), n_sim=2000, master_seed=2024)
    return run_experiment(plan)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
