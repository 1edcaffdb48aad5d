"""Joint radar precoder and IRS phase design for dual-function
radar-communication links.

Three interchangeable phase engines (twice minorization, Riemannian circle
ascent, minorization branch-and-bound), an exact eigen precoder solver
with an optional beampattern penalty, a desk-scale exhaustive oracle, and
an alternating-optimization experiment harness.
"""

from ._kernels import backend_name
from .bnb import BnbReport, PhaseBox, arc_linear_max, branch, lower_bound, solve_bnb, solve_mbnb, upper_bound
from .config import RunConfig, parse_config, parse_config_dict
from .errors import ConfigError, ContractError, OracleGuardError, ShapeError
from .harness import ExperimentReport, alternate_optimize, bench_runtime, oracle_validate, sweep_alpha
from .mm import (
    QuadraticSurrogate,
    QuarticFactors,
    minorize_quadratic,
    minorize_quartic,
    objective_from_factors,
    quartic_factors,
    solve_mm,
    surrogate_value,
    update_phases,
)
from .oracle import grid_search_objective, grid_search_surrogate
from .precoder import (
    PrecoderProblem,
    beampattern_deviation,
    objective_matrix,
    solve_precoder_eigen,
    solve_precoder_penalty,
)
from .rmo import RmoParams, armijo_step, euclidean_gradient, retract, riemannian_gradient, solve_rmo
from .scenario import (
    Channels,
    PhaseVector,
    Precoder,
    Scenario,
    ScenarioConfig,
    build_cascaded_target_channel,
    build_user_channel,
    comm_snr,
    design_objective,
    desired_covariance,
    generate_random_scenario,
    load_scenario,
    radar_snr,
    save_scenario,
    steering_vector_ula,
    steering_vector_upa,
)
from .trace import SolverTrace

__version__ = "0.1.0"

__all__ = [
    "BnbReport",
    "Channels",
    "ConfigError",
    "ContractError",
    "ExperimentReport",
    "OracleGuardError",
    "PhaseBox",
    "PhaseVector",
    "Precoder",
    "PrecoderProblem",
    "QuadraticSurrogate",
    "QuarticFactors",
    "RmoParams",
    "RunConfig",
    "Scenario",
    "ScenarioConfig",
    "ShapeError",
    "SolverTrace",
    "alternate_optimize",
    "arc_linear_max",
    "armijo_step",
    "backend_name",
    "beampattern_deviation",
    "bench_runtime",
    "branch",
    "build_cascaded_target_channel",
    "build_user_channel",
    "comm_snr",
    "design_objective",
    "desired_covariance",
    "euclidean_gradient",
    "generate_random_scenario",
    "grid_search_objective",
    "grid_search_surrogate",
    "load_scenario",
    "lower_bound",
    "minorize_quadratic",
    "minorize_quartic",
    "objective_from_factors",
    "objective_matrix",
    "oracle_validate",
    "parse_config",
    "parse_config_dict",
    "quartic_factors",
    "radar_snr",
    "retract",
    "riemannian_gradient",
    "save_scenario",
    "solve_bnb",
    "solve_mbnb",
    "solve_mm",
    "solve_precoder_eigen",
    "solve_precoder_penalty",
    "solve_rmo",
    "steering_vector_ula",
    "steering_vector_upa",
    "surrogate_value",
    "sweep_alpha",
    "update_phases",
    "upper_bound",
]
