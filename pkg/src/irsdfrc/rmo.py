"""Riemannian ascent of the quartic objective on the product of unit circles.

The Euclidean gradient is projected elementwise onto the tangent space of
the circle manifold, a backtracking Armijo rule picks the step, and the
update is retracted back by elementwise normalization, so every iterate is
exactly unit modulus and the objective never decreases.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ContractError
from .mm import QuarticFactors, objective_from_factors, quartic_factors, radar_snr_from_factors, comm_snr_from_factors
from .scenario import PhaseVector, Precoder, Scenario
from .trace import SolverTrace


@dataclass(frozen=True)
class RmoParams:
    armijo_initial_step: float = 1.0
    armijo_shrink: float = 0.5
    armijo_slope: float = 1e-4
    grad_tol: float | None = None  # defaults to 1e-6 * N at solve time
    max_iter: int = 1000
    max_shrinks: int = 50
    objective_tol: float | None = None  # optional relative objective-change stop

    def __post_init__(self):
        if self.armijo_initial_step <= 0.0:
            raise ConfigError("armijo_initial_step must be > 0")
        if not 0.0 < self.armijo_shrink < 1.0:
            raise ConfigError("armijo_shrink must lie in (0, 1)")
        if not 0.0 <= self.armijo_slope < 1.0:
            raise ConfigError("armijo_slope must lie in [0, 1)")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be >= 1")


def euclidean_gradient(qf: QuarticFactors, phi: PhaseVector, alpha: float) -> np.ndarray:
    """Gradient of the weighted objective with respect to the real inner
    product Re(x^H y): the derivative along a perturbation dphi equals
    Re(dphi^H grad).
    """
    if not 0.0 <= alpha <= 1.0:
        raise ContractError("alpha must lie in [0, 1]")
    v = phi.values
    a_phi = qf.a_mat @ v
    b_phi = qf.b_mat @ v
    qa = float(np.real(np.vdot(v, a_phi)))
    qb = float(np.real(np.vdot(v, b_phi)))
    grad_radar = 2.0 * qf.scale * (qb * a_phi + qa * b_phi)
    grad_user = (2.0 / qf.sigma_u2) * (np.dot(qf.u_vec, v) + qf.v_scalar) * np.conj(qf.u_vec)
    return alpha * grad_radar + (1.0 - alpha) * grad_user


def angular_gradient(qf: QuarticFactors, phi: PhaseVector, alpha: float) -> np.ndarray:
    """Derivative of the objective with respect to each phase angle."""
    return np.imag(np.conj(phi.values) * euclidean_gradient(qf, phi, alpha))


def riemannian_gradient(egrad: np.ndarray, phi: PhaseVector) -> np.ndarray:
    """Elementwise projection onto the tangent space of the circle product."""
    egrad = np.asarray(egrad, dtype=complex).ravel()
    return egrad - np.real(egrad * np.conj(phi.values)) * phi.values


def retract(phi: PhaseVector, delta: float, rgrad: np.ndarray) -> PhaseVector:
    """Move along the tangent direction and normalize back onto the circles.

    An exactly cancelled entry is resolved by halving the step; if the
    cancellation persists the previous phase is kept for that entry.
    """
    rgrad = np.asarray(rgrad, dtype=complex).ravel()
    if delta == 0.0:
        return phi
    step = delta
    for _ in range(30):
        moved = phi.values + step * rgrad
        if not np.any(moved == 0.0):
            return PhaseVector(np.angle(moved))
        step *= 0.5
    moved = phi.values + step * rgrad
    dead = moved == 0.0
    moved[dead] = phi.values[dead]
    return PhaseVector(np.angle(moved))


def armijo_step(f, phi: PhaseVector, rgrad: np.ndarray, p: RmoParams) -> float:
    """Largest step initial*shrink^k meeting the sufficient-increase rule,
    or 0 when none of the first max_shrinks candidates qualifies."""
    g2 = float(np.real(np.vdot(rgrad, rgrad)))
    if g2 == 0.0:
        raise ContractError("armijo_step needs a nonzero search direction")
    f0 = f(phi)
    delta = p.armijo_initial_step
    for _ in range(p.max_shrinks + 1):
        # Difference form: f0 + slope*delta*g2 can absorb the increase term
        # in floating point and falsely accept null steps at a maximum.
        if f(retract(phi, delta, rgrad)) - f0 >= p.armijo_slope * delta * g2:
            return delta
        delta *= p.armijo_shrink
    return 0.0


def solve_rmo(
    s: Scenario,
    w: Precoder,
    phi0: PhaseVector,
    alpha: float,
    params: RmoParams | None = None,
) -> tuple[PhaseVector, SolverTrace]:
    """Gradient -> tangent projection -> Armijo search -> retraction, until
    the Riemannian gradient norm falls below grad_tol, no admissible step
    remains, or max_iter is hit."""
    p = params or RmoParams()
    grad_tol = p.grad_tol if p.grad_tol is not None else 1e-6 * s.n_irs
    t0 = time.perf_counter_ns()
    qf = quartic_factors(s, w)

    def f(candidate: PhaseVector) -> float:
        return objective_from_factors(qf, candidate, alpha)

    trace = SolverTrace()
    phi = phi0
    obj = f(phi)
    trace.record(
        objective=obj,
        gamma_r=radar_snr_from_factors(qf, phi),
        gamma_u=comm_snr_from_factors(qf, phi),
        wall_ns=time.perf_counter_ns() - t0,
        unit_dev=phi.unit_modulus_deviation(),
    )
    # Warm-start the line search near the last accepted step to avoid
    # re-paying the full shrink cascade every iteration.
    start_step = p.armijo_initial_step
    for _ in range(p.max_iter):
        rgrad = riemannian_gradient(euclidean_gradient(qf, phi, alpha), phi)
        gnorm = math.sqrt(float(np.real(np.vdot(rgrad, rgrad))))
        if gnorm <= grad_tol:
            trace.converged = True
            trace.stop_reason = "gradient norm below tolerance"
            break
        delta = armijo_step(f, phi, rgrad, RmoParams(
            armijo_initial_step=start_step,
            armijo_shrink=p.armijo_shrink,
            armijo_slope=p.armijo_slope,
            grad_tol=p.grad_tol,
            max_iter=p.max_iter,
            max_shrinks=p.max_shrinks,
            objective_tol=p.objective_tol,
        ))
        if delta == 0.0:
            trace.converged = True
            trace.stop_reason = "no ascent step accepted (stationary)"
            break
        phi_new = retract(phi, delta, rgrad)
        obj_new = f(phi_new)
        trace.record(
            objective=obj_new,
            gamma_r=radar_snr_from_factors(qf, phi_new),
            gamma_u=comm_snr_from_factors(qf, phi_new),
            step_size=delta,
            wall_ns=time.perf_counter_ns() - t0,
            iterate_change=float(np.linalg.norm(phi_new.values - phi.values)),
            unit_dev=phi_new.unit_modulus_deviation(),
        )
        start_step = min(p.armijo_initial_step, 2.0 * delta / p.armijo_shrink)
        stop_on_obj = p.objective_tol is not None and abs(obj_new - obj) <= p.objective_tol * max(1.0, abs(obj))
        phi, obj = phi_new, obj_new
        if stop_on_obj:
            trace.converged = True
            trace.stop_reason = "objective change below tolerance"
            break
    else:
        trace.stop_reason = "iteration limit reached"
    return phi, trace
