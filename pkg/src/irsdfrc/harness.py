"""Alternating-optimization driver and experiment harness.

One run alternates the phase engine (precoder fixed) with the exact eigen
precoder step (phases fixed) until the weighted objective stalls. Reports
track SNR gains in dB relative to the run's own initial state: random
phases plus the eigen precoder for those phases, so iteration 0 is 0 dB by
construction.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .bnb import solve_mbnb
from .config import RunConfig
from .errors import OracleGuardError
from .mm import solve_mm
from .oracle import grid_search_objective
from .precoder import PrecoderProblem, objective_matrix, solve_precoder_eigen, solve_precoder_penalty
from .rmo import solve_rmo
from .scenario import (
    PhaseVector,
    Precoder,
    Scenario,
    comm_snr,
    design_objective,
    desired_covariance,
    generate_random_scenario,
    radar_snr,
)

PHASE_INIT_STREAM = 0xA11CE


def derive_seed(*parts: int) -> int:
    """Deterministic child seed from integer parts (stable across platforms)."""
    return int(np.random.SeedSequence(list(parts)).generate_state(1)[0])


@dataclass
class ExperimentReport:
    method: str
    alpha: float
    objective: list = field(default_factory=list)
    gamma_r: list = field(default_factory=list)
    gamma_u: list = field(default_factory=list)
    radar_gain_db: list = field(default_factory=list)
    comm_gain_db: list = field(default_factory=list)
    wall_ns: list = field(default_factory=list)  # cumulative since run start
    converged: bool = False
    outer_iterations: int = 0
    max_unit_dev: float = 0.0
    bp_violation: float | None = None
    final_w: np.ndarray | None = None
    final_phi: PhaseVector | None = None

    def record(self, objective: float, gamma_r: float, gamma_u: float, wall_ns: int) -> None:
        if not self.objective:
            radar_gain = comm_gain = 0.0
        else:
            radar_gain = 10.0 * math.log10(gamma_r / self.gamma_r[0]) if self.gamma_r[0] > 0.0 else math.nan
            comm_gain = 10.0 * math.log10(gamma_u / self.gamma_u[0]) if self.gamma_u[0] > 0.0 else math.nan
        self.objective.append(float(objective))
        self.gamma_r.append(float(gamma_r))
        self.gamma_u.append(float(gamma_u))
        self.radar_gain_db.append(radar_gain)
        self.comm_gain_db.append(comm_gain)
        self.wall_ns.append(int(wall_ns))

    def rows(self) -> list:
        return [
            {
                "iteration": i,
                "objective": self.objective[i],
                "gamma_r_db_gain": self.radar_gain_db[i],
                "gamma_u_db_gain": self.comm_gain_db[i],
                "wall_ns": self.wall_ns[i],
            }
            for i in range(len(self.objective))
        ]

    def to_json_dict(self) -> dict:
        def pairs(a):
            a = np.asarray(a, dtype=complex)
            return np.stack([a.real, a.imag], axis=-1).tolist()

        return {
            "method": self.method,
            "alpha": self.alpha,
            "converged": self.converged,
            "outer_iterations": self.outer_iterations,
            "max_unit_modulus_deviation": self.max_unit_dev,
            "beampattern_violation": self.bp_violation,
            "iterations": self.rows(),
            "gamma_r": self.gamma_r,
            "gamma_u": self.gamma_u,
            "final_w": pairs(self.final_w) if self.final_w is not None else None,
            "final_phi": pairs(self.final_phi.values) if self.final_phi is not None else None,
        }


def _run_engine(cfg: RunConfig, s: Scenario, w: Precoder, phi: PhaseVector):
    if cfg.method == "mm":
        return solve_mm(
            s, w, phi, cfg.alpha, tol=cfg.mm.tol, max_iter=cfg.mm.max_iter, shift_method=cfg.mm.shift_method
        )
    if cfg.method == "rmo":
        return solve_rmo(s, w, phi, cfg.alpha, params=cfg.rmo)
    return solve_mbnb(
        s,
        w,
        phi,
        cfg.alpha,
        eps=cfg.mbnb.eps,
        outer_iters=cfg.mbnb.outer_iters,
        max_nodes=cfg.mbnb.max_nodes,
        tol=cfg.mbnb.tol,
        polish_iters=cfg.mbnb.polish_iters,
        descent_iters=cfg.mbnb.descent_iters,
        restart_candidates=cfg.mbnb.restart_candidates,
        exploration_starts=cfg.mbnb.exploration_starts,
    )


def _solve_precoder(cfg: RunConfig, s: Scenario, phi: PhaseVector, w_prev: Precoder | None):
    g = objective_matrix(s, phi, cfg.alpha)
    if not cfg.beampattern_mode:
        result = solve_precoder_eigen(PrecoderProblem(g, s.config.power_budget))
        return result.precoder, None
    r_d = desired_covariance(s, cfg.beampattern.desired_angles)
    problem = PrecoderProblem(g, s.config.power_budget, r_d=r_d, bp_threshold=s.config.beampattern_threshold)
    result = solve_precoder_penalty(
        problem, rho_schedule=cfg.beampattern.rho_schedule, w0=w_prev, max_inner=cfg.beampattern.max_inner
    )
    return result.precoder, result.violation


def initial_state(cfg: RunConfig):
    """Scenario, seeded random phases, and the eigen precoder for them."""
    s = generate_random_scenario(cfg.scenario)
    phi0 = PhaseVector.random(s.n_irs, np.random.default_rng(derive_seed(cfg.scenario.rng_seed, PHASE_INIT_STREAM)))
    g0 = objective_matrix(s, phi0, cfg.alpha)
    w0 = solve_precoder_eigen(PrecoderProblem(g0, s.config.power_budget)).precoder
    return s, phi0, w0


def alternate_optimize(cfg: RunConfig) -> ExperimentReport:
    """Alternate the phase engine and the precoder solve to convergence.

    With beampattern_mode off and the mm or mbnb engine the recorded
    objective is non-decreasing across outer iterations.
    """
    t0 = time.perf_counter_ns()
    s, phi, w = initial_state(cfg)
    report = ExperimentReport(method=cfg.method, alpha=cfg.alpha)
    obj = design_objective(s, w, phi, cfg.alpha)
    report.record(obj, radar_snr(s, w, phi), comm_snr(s, w, phi), time.perf_counter_ns() - t0)
    for outer in range(1, cfg.outer_max_iter + 1):
        phi, trace = _run_engine(cfg, s, w, phi)
        report.max_unit_dev = max(report.max_unit_dev, trace.max_unit_dev())
        w, violation = _solve_precoder(cfg, s, phi, w)
        if violation is not None:
            report.bp_violation = violation
        obj_new = design_objective(s, w, phi, cfg.alpha)
        report.record(obj_new, radar_snr(s, w, phi), comm_snr(s, w, phi), time.perf_counter_ns() - t0)
        report.outer_iterations = outer
        if abs(obj_new - obj) <= cfg.outer_tol * max(1.0, abs(obj)):
            report.converged = True
            obj = obj_new
            break
        obj = obj_new
    report.final_w = np.array(w.w)
    report.final_phi = phi
    return report


def sweep_alpha(cfg: RunConfig, alphas=None, trials: int | None = None) -> list:
    """Final dB gains per weighting factor, averaged over seeded trials.

    The same per-trial scenario seeds are reused for every alpha (common
    random numbers), which keeps the alpha trend comparison paired.
    """
    alphas = list(alphas) if alphas is not None else list(cfg.sweep.alphas)
    trials = trials if trials is not None else cfg.sweep.trials
    rows = []
    for alpha in alphas:
        radar_gains = []
        comm_gains = []
        for trial in range(trials):
            seed = derive_seed(cfg.scenario.rng_seed, trial)
            trial_cfg = replace(cfg, alpha=float(alpha), scenario=replace(cfg.scenario, rng_seed=seed))
            report = alternate_optimize(trial_cfg)
            radar_gains.append(report.radar_gain_db[-1])
            comm_gains.append(report.comm_gain_db[-1])
        rows.append(
            {
                "alpha": float(alpha),
                "trials": trials,
                "radar_gain_db_mean": float(np.mean(radar_gains)),
                "radar_gain_db_var": float(np.var(radar_gains)),
                "comm_gain_db_mean": float(np.mean(comm_gains)),
                "comm_gain_db_var": float(np.var(comm_gains)),
            }
        )
    rows.sort(key=lambda r: r["alpha"])
    return rows


def _square_factors(n: int) -> tuple[int, int]:
    root = int(math.isqrt(n))
    return (root, root) if root * root == n else (n, 1)


def bench_runtime(cfg: RunConfig, n_list=None, trials: int | None = None, methods=None) -> list:
    """Wall-clock time to convergence per IRS size and engine."""
    n_list = list(n_list) if n_list is not None else list(cfg.bench.n_list)
    trials = trials if trials is not None else cfg.bench.trials
    methods = list(methods) if methods is not None else list(cfg.bench.methods)
    rows = []
    for n in n_list:
        n_y, n_z = _square_factors(int(n))
        for method in methods:
            times = []
            outers = []
            converged = 0
            for trial in range(trials):
                seed = derive_seed(cfg.scenario.rng_seed, n, trial)
                trial_cfg = replace(
                    cfg,
                    method=method,
                    scenario=replace(cfg.scenario, n_irs_y=n_y, n_irs_z=n_z, rng_seed=seed),
                )
                start = time.perf_counter()
                report = alternate_optimize(trial_cfg)
                times.append(time.perf_counter() - start)
                outers.append(report.outer_iterations)
                converged += int(report.converged)
            rows.append(
                {
                    "n": int(n),
                    "method": method,
                    "trials": trials,
                    "wall_s_mean": float(np.mean(times)),
                    "wall_s_std": float(np.std(times)),
                    "outer_iters_mean": float(np.mean(outers)),
                    "converged": converged,
                }
            )
    return rows


def oracle_validate(cfg: RunConfig, methods=None, trials: int | None = None) -> list:
    """Compare engines against the exhaustive grid oracle at desk scale."""
    if cfg.scenario.n_irs > 4:
        raise OracleGuardError(
            f"oracle validation refused for N={cfg.scenario.n_irs} (guard at N=4)"
        )
    methods = list(methods) if methods is not None else ["mm", "rmo", "mbnb"]
    trials = trials if trials is not None else cfg.oracle.trials
    rows = []
    for trial in range(trials):
        seed = derive_seed(cfg.scenario.rng_seed, trial)
        trial_cfg = replace(cfg, scenario=replace(cfg.scenario, rng_seed=seed))
        s, phi0, w = initial_state(trial_cfg)
        _, oracle_value = grid_search_objective(s, w, cfg.alpha, cfg.oracle.k_levels)
        for method in methods:
            phi, _ = _run_engine(replace(trial_cfg, method=method), s, w, phi0)
            value = design_objective(s, w, phi, cfg.alpha)
            rows.append(
                {
                    "seed": seed,
                    "method": method,
                    "objective": value,
                    "oracle_objective": oracle_value,
                    "ratio": value / oracle_value if oracle_value > 0.0 else math.nan,
                }
            )
    return rows
