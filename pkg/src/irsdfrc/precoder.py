"""Precoder subproblem: maximize the quadratic SNR objective on the power
sphere, optionally under a beampattern-deviation constraint.

Without the beampattern constraint the optimum is exact: P_R times the
principal eigenvector of the objective matrix. With the constraint active
an increasing-penalty projected gradient ascent is used instead.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import ContractError, ShapeError
from .scenario import PhaseVector, Precoder, Scenario, build_cascaded_target_channel, build_user_channel


@dataclass(frozen=True)
class PrecoderProblem:
    g_matrix: np.ndarray
    power_budget: float
    r_d: np.ndarray | None = None
    bp_threshold: float | None = None

    def __post_init__(self):
        g = numerics.require_hermitian(self.g_matrix, what="objective matrix")
        object.__setattr__(self, "g_matrix", g)
        if self.power_budget <= 0.0:
            raise ContractError("power_budget must be > 0")
        if self.r_d is not None:
            r = numerics.require_hermitian(self.r_d, what="desired covariance")
            if r.shape != g.shape:
                raise ShapeError("desired covariance shape does not match the objective matrix")
            object.__setattr__(self, "r_d", r)
            if self.bp_threshold is None:
                raise ContractError("bp_threshold is required when a desired covariance is given")
            if self.bp_threshold < 0.0:
                raise ContractError("bp_threshold must be >= 0")


@dataclass(frozen=True)
class PrecoderResult:
    precoder: Precoder
    objective: float
    converged: bool


@dataclass(frozen=True)
class PenaltyResult:
    precoder: Precoder
    objective: float
    converged: bool
    deviation: float
    violation: float
    feasible: bool
    history: tuple  # (rho, objective) per accepted iterate, monotone within each rho


def objective_matrix(s: Scenario, phi: PhaseVector, alpha: float) -> np.ndarray:
    """Hermitian PSD matrix G with w^H G w equal to the weighted SNR sum."""
    if not 0.0 <= alpha <= 1.0:
        raise ContractError("alpha must lie in [0, 1]")
    ct = build_cascaded_target_channel(s, phi)
    cu = build_user_channel(s, phi)
    g = (alpha / s.config.radar_noise_power) * (ct.conj().T @ ct)
    g = g + ((1.0 - alpha) / s.config.user_noise_power) * np.outer(np.conj(cu), cu)
    return numerics.hermitize(g)


def _quadratic_form(g: np.ndarray, w: np.ndarray) -> float:
    return float(np.real(np.vdot(w, g @ w)))


def solve_precoder_eigen(p: PrecoderProblem, tol: float = 1e-12, max_iter: int = 2000, seed: int = 0) -> PrecoderResult:
    """Exact maximizer of w^H G w on the power sphere (principal eigenvector).

    Ties in the top eigenvalue resolve to the power-iteration limit for the
    given seed; different seeds may pick different optimal directions.
    """
    eig = numerics.dominant_eigpair(p.g_matrix, tol=tol, max_iter=max_iter, seed=seed)
    w = Precoder.scaled_to_power(eig.vector, p.power_budget)
    return PrecoderResult(w, _quadratic_form(p.g_matrix, w.w), eig.converged)


def beampattern_deviation(w: Precoder, r_d: np.ndarray) -> float:
    """Squared Frobenius distance between w w^H and the desired covariance."""
    r_d = np.asarray(r_d, dtype=complex)
    if r_d.shape != (w.n, w.n):
        raise ShapeError(f"desired covariance has shape {r_d.shape}, expected {(w.n, w.n)}")
    d = np.outer(w.w, np.conj(w.w)) - r_d
    return float(np.sum(np.abs(d) ** 2))


def solve_precoder_penalty(
    p: PrecoderProblem,
    rho_schedule=(1.0, 10.0, 100.0, 1000.0),
    w0: Precoder | None = None,
    tol: float = 1e-10,
    max_inner: int = 500,
    seed: int = 0,
) -> PenaltyResult:
    """Beampattern-constrained precoder via increasing quadratic penalties.

    Maximizes w^H G w - rho * max(0, dev(w) - threshold)^2 on the power
    sphere by projected gradient ascent with backtracking step halving,
    warm-starting each penalty level from the previous one. If the
    unconstrained eigen solution is already feasible it is returned as is.
    """
    if p.r_d is None or p.bp_threshold is None:
        raise ContractError("penalty solver needs a desired covariance and threshold")
    rho_schedule = tuple(float(r) for r in rho_schedule)
    if not rho_schedule or any(b <= a for a, b in zip(rho_schedule, rho_schedule[1:])):
        raise ContractError("rho_schedule must be nonempty and increasing")

    eig = solve_precoder_eigen(p, seed=seed)
    dev = beampattern_deviation(eig.precoder, p.r_d)
    if dev <= p.bp_threshold:
        return PenaltyResult(
            precoder=eig.precoder,
            objective=eig.objective,
            converged=eig.converged,
            deviation=dev,
            violation=0.0,
            feasible=True,
            history=((rho_schedule[0], eig.objective),),
        )

    g, r_d, budget, thr = p.g_matrix, p.r_d, p.power_budget, p.bp_threshold
    w = np.array((w0 or eig.precoder).w, dtype=complex)
    w = Precoder.scaled_to_power(w, budget).w
    rd_norm2 = float(np.sum(np.abs(r_d) ** 2))

    def deviation_of(v: np.ndarray) -> float:
        n2 = float(np.real(np.vdot(v, v)))
        return n2 * n2 - 2.0 * float(np.real(np.vdot(v, r_d @ v))) + rd_norm2

    def penalized(v: np.ndarray, rho: float) -> float:
        viol = max(0.0, deviation_of(v) - thr)
        return _quadratic_form(g, v) - rho * viol * viol

    history = []
    for rho in rho_schedule:
        obj = penalized(w, rho)
        history.append((rho, obj))
        step0 = budget / (1.0 + float(np.linalg.norm(g @ w)))
        for _ in range(max_inner):
            viol = max(0.0, deviation_of(w) - thr)
            grad = g @ w
            if viol > 0.0:
                n2 = float(np.real(np.vdot(w, w)))
                grad = grad - 4.0 * rho * viol * (n2 * w - r_d @ w)
            gnorm = float(np.linalg.norm(grad))
            if gnorm == 0.0:
                break
            accepted = False
            step = step0
            for _ in range(60):
                cand = w + step * grad
                cand = cand * math.sqrt(budget / float(np.real(np.vdot(cand, cand))))
                cand_obj = penalized(cand, rho)
                if cand_obj > obj:
                    accepted = True
                    break
                step *= 0.5
            if not accepted:
                break
            improvement = cand_obj - obj
            w, obj = cand, cand_obj
            history.append((rho, obj))
            step0 = 2.0 * step
            if improvement <= tol * max(1.0, abs(obj)):
                break

    final = Precoder.scaled_to_power(w, budget)
    dev = beampattern_deviation(final, r_d)
    violation = max(0.0, dev - thr)
    feasible = violation <= 1e-3 * thr if thr > 0.0 else violation == 0.0
    return PenaltyResult(
        precoder=final,
        objective=_quadratic_form(g, final.w),
        converged=True,
        deviation=dev,
        violation=violation,
        feasible=feasible,
        history=tuple(history),
    )
