import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from irsdfrc.precoder import PrecoderProblem, objective_matrix, solve_precoder_eigen
from irsdfrc.scenario import PhaseVector, ScenarioConfig, generate_random_scenario

SESSION_START = time.perf_counter()


def small_scenario(
    seed: int,
    n_irs_y: int = 3,
    n_irs_z: int = 1,
    n_tx: int = 4,
    n_rx: int = 3,
    power_budget: float = 4.0,
    cascaded_gain: complex = 1.0,
    irs_pathloss: float = 1.0,
    **overrides,
):
    cfg = ScenarioConfig(
        n_tx=n_tx,
        n_rx=n_rx,
        n_irs_y=n_irs_y,
        n_irs_z=n_irs_z,
        power_budget=power_budget,
        cascaded_gain=cascaded_gain,
        irs_pathloss=irs_pathloss,
        rng_seed=seed,
        **overrides,
    )
    return generate_random_scenario(cfg)


def random_phase(n: int, seed: int) -> PhaseVector:
    return PhaseVector.random(n, np.random.default_rng(seed))


def eigen_precoder(s, phi: PhaseVector, alpha: float):
    problem = PrecoderProblem(objective_matrix(s, phi, alpha), s.config.power_budget)
    return solve_precoder_eigen(problem).precoder


@pytest.fixture
def rng():
    return np.random.default_rng(0)
