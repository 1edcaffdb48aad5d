"""Brute-force phase-grid search, the desk-scale ground truth for every
solver engine. Refuses instances beyond N = 4 elements.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .errors import ContractError, OracleGuardError
from .mm import QuadraticSurrogate
from .scenario import TWO_PI, PhaseVector, Precoder, Scenario

GUARD_MAX_N = 4
GUARD_MAX_POINTS = 50_000_000


def uniform_angle_tables(n: int, k_levels: int) -> np.ndarray:
    """Per-element grid angles 2*pi*k/K, k = 0..K-1 (endpoint excluded)."""
    row = TWO_PI * np.arange(k_levels) / k_levels
    return np.tile(row, (n, 1))


def box_angle_tables(lower: np.ndarray, upper: np.ndarray, k_levels: int) -> np.ndarray:
    """Per-element grids over arcs [lower_n, upper_n], endpoints included."""
    lower = np.asarray(lower, dtype=float).ravel()
    upper = np.asarray(upper, dtype=float).ravel()
    frac = np.arange(k_levels) / max(k_levels - 1, 1)
    return lower[:, None] + (upper - lower)[:, None] * frac[None, :]


def _guard(n: int, k_levels: int) -> None:
    if n > GUARD_MAX_N:
        raise OracleGuardError(f"exhaustive search refused for N={n} (guard at N={GUARD_MAX_N})")
    if k_levels < 8:
        raise ContractError("k_levels must be >= 8")
    if k_levels**n > GUARD_MAX_POINTS:
        raise OracleGuardError(f"grid of {k_levels}^{n} points exceeds the evaluation guard")


def _digits(flat: int, n: int, k: int) -> np.ndarray:
    out = np.empty(n, dtype=int)
    for j in range(n - 1, -1, -1):
        out[j] = flat % k
        flat //= k
    return out


def grid_search_objective(s: Scenario, w: Precoder, alpha: float, k_levels: int) -> tuple[PhaseVector, float]:
    """Exhaustive maximum of the weighted SNR objective on the uniform grid.

    Deterministic; ties resolve to the lowest lexicographic grid index.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ContractError("alpha must lie in [0, 1]")
    n = s.n_irs
    _guard(n, k_levels)
    cfg, ch = s.config, s.channels
    tables = np.exp(1j * uniform_angle_tables(n, k_levels))
    m1 = ch.h_ul * ch.a_irs[None, :]
    hdl_w = ch.h_dl @ w.w
    idx, val = _kernels.grid_max_objective(
        tables,
        m1,
        ch.a_irs * hdl_w,
        np.sqrt(cfg.irs_pathloss) * ch.f_user * hdl_w,
        complex(np.dot(ch.g_user, w.w)),
        alpha * abs(cfg.cascaded_gain) ** 2 / cfg.radar_noise_power,
        (1.0 - alpha) / cfg.user_noise_power,
    )
    angles = TWO_PI * _digits(idx, n, k_levels) / k_levels
    return PhaseVector(angles), float(val)


def grid_search_surrogate(
    qs: QuadraticSurrogate, k_levels: int, box=None
) -> tuple[PhaseVector, float]:
    """Exhaustive maximum of a quadratic surrogate, optionally restricted to
    per-element arcs (a PhaseBox or a (lower, upper) pair)."""
    n = qs.n
    _guard(n, k_levels)
    if box is None:
        angle_tables = uniform_angle_tables(n, k_levels)
    else:
        lower = getattr(box, "lower", None)
        if lower is None:
            lower, upper = box
        else:
            upper = box.upper
        angle_tables = box_angle_tables(lower, upper, k_levels)
    idx, val = _kernels.grid_max_surrogate(
        np.exp(1j * angle_tables), qs.q_mat, qs.lin_h, qs.lin_t, qs.const_term
    )
    digits = _digits(idx, n, k_levels)
    angles = angle_tables[np.arange(n), digits]
    return PhaseVector(angles), float(val)


def grid_slack_estimate(evaluate, angle_tables: np.ndarray, samples: int = 64, rng=None) -> float:
    """Empirical discretization slack: the largest objective change observed
    between a sampled grid point and its one-step neighbors.

    `evaluate` maps a PhaseVector to a float; `angle_tables` is the (n, K)
    per-element angle grid the comparison runs on.
    """
    rng = rng or np.random.default_rng(0)
    n, k = angle_tables.shape
    worst = 0.0
    for _ in range(samples):
        digits = rng.integers(0, k, size=n)
        base = evaluate(PhaseVector(angle_tables[np.arange(n), digits]))
        for j in range(n):
            for step in (-1, 1):
                moved = digits.copy()
                moved[j] = (moved[j] + step) % k
                other = evaluate(PhaseVector(angle_tables[np.arange(n), moved]))
                worst = max(worst, abs(other - base))
    return worst
