"""Minorization branch-and-bound phase engine.

The quartic objective is minorized once into a quadratic surrogate (see
mm.minorize_quartic), which branch-and-bound then maximizes near-globally
over per-element phase arcs: a concave linear majorizer built at the box
center (valid because Q - shift*I is negative semidefinite for a
Gershgorin upper shift) bounds every box from above in closed form, boxes
split at their widest arc, and dominated boxes are pruned against the
incumbent. The outer loop re-expands the surrogate at each new incumbent,
so the true objective is non-decreasing across outer iterations.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import ContractError, ShapeError
from .mm import (
    QuadraticSurrogate,
    linear_value,
    minorize_quadratic,
    minorize_quartic,
    objective_from_factors,
    quartic_factors,
    radar_snr_from_factors,
    comm_snr_from_factors,
    solve_mm,
    surrogate_value,
    update_phases,
)
from .scenario import TWO_PI, PhaseVector, Precoder, Scenario
from .trace import SolverTrace

_WIDTH_FLOOR = 1e-12


@dataclass
class PhaseBox:
    """Per-element phase arcs [lower_n, upper_n], each at most one full turn."""

    lower: np.ndarray
    upper: np.ndarray
    cached_upper_bound: float | None = None
    cached_best: tuple | None = None  # (PhaseVector, float)

    def __post_init__(self):
        self.lower = np.asarray(self.lower, dtype=float).ravel()
        self.upper = np.asarray(self.upper, dtype=float).ravel()
        if self.lower.shape != self.upper.shape:
            raise ShapeError("arc bounds must have the same length")
        widths = self.upper - self.lower
        if np.any(widths < 0.0) or np.any(widths > TWO_PI + 1e-12):
            raise ContractError("arc widths must lie in [0, 2*pi]")

    @property
    def n(self) -> int:
        return self.lower.size

    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    def center(self) -> PhaseVector:
        return PhaseVector(0.5 * (self.lower + self.upper))

    @classmethod
    def full(cls, n: int) -> "PhaseBox":
        return cls(np.zeros(n), np.full(n, TWO_PI))


@dataclass(frozen=True)
class BnbReport:
    incumbent: PhaseVector
    incumbent_value: float
    global_upper_bound: float
    gap: float
    nodes_expanded: int
    nodes_pruned: int
    wall_ns: int
    converged: bool
    incumbent_history: tuple = ()
    candidates: tuple = ()  # diverse feasible points harvested from the tree

    def to_json_dict(self) -> dict:
        values = self.incumbent.values
        return {
            "incumbent_angles": self.incumbent.angles.tolist(),
            "incumbent_values": np.stack([values.real, values.imag], axis=-1).tolist(),
            "incumbent_value": self.incumbent_value,
            "global_upper_bound": self.global_upper_bound,
            "gap": self.gap,
            "nodes_expanded": self.nodes_expanded,
            "nodes_pruned": self.nodes_pruned,
            "wall_ns": self.wall_ns,
            "converged": self.converged,
            "incumbent_history": list(self.incumbent_history),
        }


def _select_diverse(points: list, keep: int, min_separation: float) -> list:
    """Greedy top-value selection with a minimum angular separation."""
    points.sort(key=lambda item: -item[1])
    chosen = []
    for angles, value in points:
        if len(chosen) >= keep:
            break
        far_enough = True
        for kept, _ in chosen:
            delta = np.abs(angles - kept)
            if float(np.max(np.minimum(delta, TWO_PI - delta))) < min_separation:
                far_enough = False
                break
        if far_enough:
            chosen.append((angles, value))
    return chosen


def arc_linear_max(nu_n: complex, eta_n: complex, lower: float, upper: float) -> tuple[float, float]:
    """Closed-form maximum of Re(e^{-j theta} nu + e^{j theta} eta) on an arc.

    The form equals |z| cos(theta - arg z) with z = nu + conj(eta): the peak
    is taken when arg z falls inside the arc, otherwise the better endpoint.
    """
    width = upper - lower
    if width < 0.0 or width > TWO_PI + 1e-12:
        raise ContractError("arc width must lie in [0, 2*pi]")
    z = complex(nu_n) + complex(eta_n).conjugate()
    r = abs(z)
    if r == 0.0:
        return lower, 0.0
    psi = math.atan2(z.imag, z.real)
    offset = (psi - lower) % TWO_PI
    if offset <= width:
        return lower + offset, r
    lo_val = r * math.cos(lower - psi)
    hi_val = r * math.cos(upper - psi)
    return (lower, lo_val) if lo_val >= hi_val else (upper, hi_val)


def _arc_linear_max_vec(nu: np.ndarray, eta: np.ndarray, lower: np.ndarray, upper: np.ndarray):
    """Vectorized arc_linear_max over all elements."""
    z = nu + np.conj(eta)
    r = np.abs(z)
    psi = np.angle(z)
    width = upper - lower
    offset = np.mod(psi - lower, TWO_PI)
    inside = offset <= width
    angles = np.where(inside, lower + offset, lower)
    values = np.where(inside, r, r * np.cos(lower - psi))
    hi_vals = r * np.cos(upper - psi)
    take_hi = ~inside & (hi_vals > values)
    angles = np.where(take_hi, upper, angles)
    values = np.where(take_hi, hi_vals, values)
    flat = r == 0.0
    angles = np.where(flat, lower, angles)
    values = np.where(flat, 0.0, values)
    return angles, values


class _SearchContext:
    """Per-surrogate precomputation shared by every node of one search."""

    __slots__ = ("qs", "n", "shift_hi", "q_bar", "q_lift", "lin_h", "lin_t", "const")

    def __init__(self, qs: QuadraticSurrogate, shift_hi: float | None = None):
        self.qs = qs
        self.n = qs.n
        self.shift_hi = numerics.largest_eig_upper_bound(qs.q_mat) if shift_hi is None else shift_hi
        self.q_bar = qs.q_mat - self.shift_hi * np.eye(self.n)  # NSD for the bound
        shift_lo = numerics.smallest_eig_lower_bound(qs.q_mat)
        self.q_lift = qs.q_mat - shift_lo * np.eye(self.n)  # PSD for the polish
        self.lin_h = qs.lin_h
        self.lin_t = qs.lin_t
        self.const = qs.const_term

    def value_at(self, values: np.ndarray) -> float:
        quad = float(np.real(np.vdot(values, self.qs.q_mat @ values)))
        lin = float(np.real(np.vdot(values, self.lin_h))) + float(np.real(np.dot(values, self.lin_t)))
        return quad + lin + self.const

    def box_upper_bound(self, lower: np.ndarray, upper: np.ndarray) -> float:
        center = np.exp(0.5j * (lower + upper))
        nu = 2.0 * (self.q_bar @ center) + self.lin_h
        const = self.const + self.shift_hi * self.n - float(np.real(np.vdot(center, self.q_bar @ center)))
        _, values = _arc_linear_max_vec(nu, self.lin_t, lower, upper)
        return float(np.sum(values) + const)

    def box_polish(self, lower: np.ndarray, upper: np.ndarray, iters: int):
        angles = 0.5 * (lower + upper)
        values = np.exp(1j * angles)
        best_angles = angles
        best_val = self.value_at(values)
        for _ in range(iters):
            nu = 2.0 * (self.q_lift @ values) + self.lin_h
            angles, _ = _arc_linear_max_vec(nu, self.lin_t, lower, upper)
            values = np.exp(1j * angles)
            value = self.value_at(values)
            if value <= best_val + 1e-14 * max(1.0, abs(best_val)):
                break
            best_angles, best_val = angles, value
        return best_angles, best_val


def upper_bound(qs: QuadraticSurrogate, box: PhaseBox, shift: float) -> float:
    """Certified upper bound on the surrogate over the box.

    Uses the tangent plane of the concave shifted quadratic at the box
    center (shift*N restored on the unit-modulus set) plus separable arc
    maximization of the resulting linear form. Requires shift to be at
    least a Gershgorin-certified upper bound on the top eigenvalue.
    """
    if box.n != qs.n:
        raise ShapeError("box size does not match the surrogate")
    q_bar = qs.q_mat - shift * np.eye(qs.n)
    scale = max(1.0, float(np.max(np.abs(qs.q_mat))))
    if numerics.largest_eig_upper_bound(q_bar) > 1e-10 * scale:
        raise ContractError(f"shift {shift} does not make the surrogate matrix NSD")
    bound = _SearchContext(qs, shift_hi=shift).box_upper_bound(box.lower, box.upper)
    box.cached_upper_bound = bound
    return bound


def lower_bound(qs: QuadraticSurrogate, box: PhaseBox, polish_iters: int = 20) -> tuple[PhaseVector, float]:
    """Feasible point in the box and its surrogate value.

    Starts at the box center and runs a few minorize-and-maximize passes
    whose per-element updates are clipped to the arcs, so the value never
    decreases and never exceeds any sound upper bound of the box.
    """
    if box.n != qs.n:
        raise ShapeError("box size does not match the surrogate")
    angles, value = _SearchContext(qs).box_polish(box.lower, box.upper, polish_iters)
    return PhaseVector(angles), value


def branch(box: PhaseBox) -> tuple[PhaseBox, PhaseBox]:
    """Split the widest arc at its midpoint."""
    widths = box.widths()
    j = int(np.argmax(widths))
    if widths[j] <= 0.0:
        raise ContractError("cannot branch a zero-width box")
    mid = 0.5 * (box.lower[j] + box.upper[j])
    lo_upper = box.upper.copy()
    lo_upper[j] = mid
    hi_lower = box.lower.copy()
    hi_lower[j] = mid
    return PhaseBox(box.lower.copy(), lo_upper), PhaseBox(hi_lower, box.upper.copy())


def solve_bnb(
    qs: QuadraticSurrogate,
    eps: float,
    max_nodes: int = 100_000,
    warm_starts=(),
    polish_iters: int = 20,
    collect_candidates: int = 0,
) -> BnbReport:
    """Best-first branch-and-bound maximization of the surrogate over the
    full phase hypertorus, to an absolute gap of eps or a node budget.

    With collect_candidates > 0 the report also carries that many
    well-separated feasible points gathered from the box polishes, useful
    as restart seeds for the outer minorization loop.
    """
    if eps <= 0.0:
        raise ContractError("eps must be > 0")
    t0 = time.perf_counter_ns()
    n = qs.n
    ctx = _SearchContext(qs)
    lower0 = np.zeros(n)
    upper0 = np.full(n, TWO_PI)
    inc_angles, inc_val = ctx.box_polish(lower0, upper0, polish_iters)
    history = [inc_val]
    pool = [(inc_angles, inc_val)] if collect_candidates > 0 else None
    for cand in warm_starts:
        val = ctx.value_at(cand.values)
        if val > inc_val:
            inc_angles, inc_val = cand.angles, val
            history.append(inc_val)
    root_ub = ctx.box_upper_bound(lower0, upper0)
    heap = [(-root_ub, 0, 0, lower0, upper0)]
    seq = 1
    expanded = 0
    pruned = 0
    pruned_cap = -math.inf
    converged = False
    while heap:
        top_ub = -heap[0][0]
        gap_now = max(inc_val, top_ub, pruned_cap) - inc_val
        if gap_now <= eps:
            converged = True
            break
        if expanded >= max_nodes:
            break
        neg_ub, neg_depth, _, lower, upper = heapq.heappop(heap)
        ub = -neg_ub
        if ub <= inc_val + eps:
            pruned += 1
            pruned_cap = max(pruned_cap, ub)
            continue
        widths = upper - lower
        j = int(np.argmax(widths))
        if widths[j] <= _WIDTH_FLOOR:
            # Degenerate box: its bound is tangent, harvest and drop.
            angles, val = ctx.box_polish(lower, upper, 0)
            if val > inc_val:
                inc_angles, inc_val = angles, val
                history.append(inc_val)
            pruned += 1
            pruned_cap = max(pruned_cap, min(ub, inc_val + eps))
            continue
        expanded += 1
        depth = -neg_depth
        mid = 0.5 * (lower[j] + upper[j])
        lo_upper = upper.copy()
        lo_upper[j] = mid
        hi_lower = lower.copy()
        hi_lower[j] = mid
        for c_lower, c_upper in ((lower, lo_upper), (hi_lower, upper)):
            child_ub = ctx.box_upper_bound(c_lower, c_upper)
            angles, val = ctx.box_polish(c_lower, c_upper, polish_iters)
            if pool is not None:
                pool.append((angles, val))
            if val > inc_val:
                inc_angles, inc_val = angles, val
                history.append(inc_val)
            if child_ub <= inc_val + eps:
                pruned += 1
                pruned_cap = max(pruned_cap, child_ub)
            else:
                heapq.heappush(heap, (-child_ub, -(depth + 1), seq, c_lower, c_upper))
                seq += 1
    else:
        converged = True
    bound_candidates = [inc_val, pruned_cap] + ([-heap[0][0]] if heap else [])
    global_ub = max(bound_candidates)
    harvested = ()
    if pool is not None:
        harvested = tuple(
            PhaseVector(angles) for angles, _ in _select_diverse(pool, collect_candidates, 0.35)
        )
    return BnbReport(
        incumbent=PhaseVector(inc_angles),
        incumbent_value=inc_val,
        global_upper_bound=global_ub,
        gap=global_ub - inc_val,
        nodes_expanded=expanded,
        nodes_pruned=pruned,
        wall_ns=time.perf_counter_ns() - t0,
        converged=converged,
        incumbent_history=tuple(history),
        candidates=harvested,
    )


def solve_mbnb(
    s: Scenario,
    w: Precoder,
    phi0: PhaseVector,
    alpha: float,
    eps: float | None = None,
    outer_iters: int = 50,
    max_nodes: int = 20_000,
    tol: float = 1e-8,
    polish_iters: int = 6,
    descent_iters: int = 300,
    restart_candidates: int = 48,
    exploration_starts: int = 24,
) -> tuple[PhaseVector, SolverTrace]:
    """Best-of-local-optima search: multistart minorization descents
    followed by an outer loop of near-global branch-and-bound solves of the
    quadratic surrogate.

    The tangent surrogate is loose away from its expansion point, so a
    single minorization chain can stall below other basins. The engine
    therefore first acquires local optima from phi0 plus seeded exploration
    starts (cheap closed-form descents, deterministic in phi0) and keeps
    the best. Each subsequent round re-descends, expands the surrogate at
    the stationary point and solves it with a certified branch-and-bound
    search whose incumbent is warm-started with the expansion point and its
    closed-form update; the round then jumps to whichever search incumbent
    or harvested candidate scores best on the true quartic objective. Every
    recorded step at least matches a plain minorization step, so the trace
    is non-decreasing. The loop stops once a round brings no material
    improvement. eps is the absolute inner gap target; None picks 1e-3 of
    the local surrogate magnitude per round.
    """
    t0 = time.perf_counter_ns()
    qf = quartic_factors(s, w)
    trace = SolverTrace()
    phi = phi0
    obj = objective_from_factors(qf, phi, alpha)
    trace.record(
        objective=obj,
        gamma_r=radar_snr_from_factors(qf, phi),
        gamma_u=comm_snr_from_factors(qf, phi),
        wall_ns=time.perf_counter_ns() - t0,
        unit_dev=phi.unit_modulus_deviation(),
    )

    def record(phi_new: PhaseVector, prev: PhaseVector, surrogate: float) -> float:
        value = objective_from_factors(qf, phi_new, alpha)
        trace.record(
            objective=value,
            surrogate=surrogate,
            gamma_r=radar_snr_from_factors(qf, phi_new),
            gamma_u=comm_snr_from_factors(qf, phi_new),
            wall_ns=time.perf_counter_ns() - t0,
            iterate_change=float(np.linalg.norm(phi_new.values - prev.values)),
            unit_dev=phi_new.unit_modulus_deviation(),
        )
        return value

    if exploration_starts > 0 and descent_iters > 0:
        # Deterministic in the inputs: exploration seeds derive from phi0.
        seed = int(np.random.SeedSequence(np.frombuffer(phi0.angles.tobytes(), dtype=np.uint32)).generate_state(1)[0])
        rng = np.random.default_rng(seed)
        best_start, best_val = phi, obj
        explored_dev = 0.0
        for _ in range(exploration_starts):
            candidate, mm_trace = solve_mm(
                s, w, PhaseVector.random(qf.n, rng), alpha, tol=1e-9, max_iter=descent_iters
            )
            explored_dev = max(explored_dev, mm_trace.max_unit_dev())
            value = objective_from_factors(qf, candidate, alpha)
            if value > best_val:
                best_start, best_val = candidate, value
        if best_val > obj:
            obj = record(best_start, phi, math.nan)
            phi = best_start
            trace.unit_dev[-1] = max(trace.unit_dev[-1], explored_dev)
        else:
            trace.unit_dev[0] = max(trace.unit_dev[0], explored_dev)

    for _ in range(outer_iters):
        if descent_iters > 0:
            phi_mm, mm_trace = solve_mm(s, w, phi, alpha, tol=1e-10, max_iter=descent_iters)
            obj_mm = objective_from_factors(qf, phi_mm, alpha)
            if obj_mm > obj:
                obj = record(phi_mm, phi, math.nan)
                trace.unit_dev[-1] = max(trace.unit_dev[-1], mm_trace.max_unit_dev())
                phi = phi_mm
        qs = minorize_quartic(qf, phi, alpha)
        step_shift = numerics.smallest_eig_lower_bound(qs.q_mat)
        nu, eta, _ = minorize_quadratic(qs, phi, step_shift)
        warm = (phi, update_phases(nu, eta, prev=phi))
        eps_t = eps if eps is not None else 1e-3 * (1.0 + abs(surrogate_value(qs, phi)))
        report = solve_bnb(
            qs,
            eps_t,
            max_nodes=max_nodes,
            warm_starts=warm,
            polish_iters=polish_iters,
            collect_candidates=restart_candidates,
        )
        if not report.converged:
            trace.notes.append(f"inner search hit the node budget (gap {report.gap:.3e})")
        best_point = report.incumbent
        best_true = objective_from_factors(qf, best_point, alpha)
        for candidate in report.candidates:
            value = objective_from_factors(qf, candidate, alpha)
            if value > best_true:
                best_point, best_true = candidate, value
        obj_new = record(best_point, phi, report.incumbent_value)
        done = abs(obj_new - obj) <= tol * max(1.0, abs(obj))
        phi, obj = best_point, obj_new
        if done:
            trace.converged = True
            trace.stop_reason = "surrogate search found no material improvement"
            break
    else:
        trace.stop_reason = "outer iteration limit reached"
    return phi, trace
