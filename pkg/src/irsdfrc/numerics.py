"""Dense complex linear-algebra helpers shared by all solver engines.

Everything operates on plain complex128 numpy arrays: matrices are 2-D,
vectors 1-D. Inputs are treated as immutable; all functions are pure.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .errors import ContractError, ShapeError

HERMITIAN_RTOL = 1e-10


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Dense matrix product with explicit shape checking."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError(f"matmul expects 2-D operands, got {a.ndim}-D and {b.ndim}-D")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def is_hermitian(m: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    scale = np.max(np.abs(m))
    if scale == 0.0:
        return True
    return float(np.max(np.abs(m - m.conj().T))) <= rtol * float(scale)


def require_hermitian(m: np.ndarray, rtol: float = HERMITIAN_RTOL, what: str = "matrix") -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"{what} must be square, got shape {m.shape}")
    if not is_hermitian(m, rtol):
        raise ContractError(f"{what} is not Hermitian within rtol={rtol}")
    return m


def hermitize(m: np.ndarray) -> np.ndarray:
    """Exact Hermitian part (M + M^H) / 2."""
    m = np.asarray(m, dtype=complex)
    return 0.5 * (m + m.conj().T)


class EigResult(NamedTuple):
    value: float
    vector: np.ndarray
    converged: bool
    iterations: int
    residual: float


def dominant_eigpair(m: np.ndarray, tol: float = 1e-10, max_iter: int = 1000, seed: int = 0) -> EigResult:
    """Largest-magnitude eigenpair of a Hermitian matrix by power iteration.

    Starts from a seeded random unit vector, so the result is deterministic
    for a given seed. Converged means ||M v - lambda v|| <= tol * ||M||_F.
    On non-convergence the best iterate is returned with converged=False.
    """
    m = require_hermitian(m, what="dominant_eigpair input")
    if max_iter < 1:
        raise ContractError("max_iter must be >= 1")
    n = m.shape[0]
    scale = float(np.linalg.norm(m))
    if scale == 0.0:
        v0 = np.zeros(n, dtype=complex)
        v0[0] = 1.0
        return EigResult(0.0, v0, True, 0, 0.0)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    lam = 0.0
    res = np.inf
    for it in range(1, max_iter + 1):
        w = m @ v
        lam = float(np.real(np.vdot(v, w)))
        res = float(np.linalg.norm(w - lam * v))
        if res <= tol * scale:
            return EigResult(lam, v, True, it, res)
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            # v sits in the null space: exact eigenvector for eigenvalue 0.
            return EigResult(0.0, v, True, it, 0.0)
        v = w / nrm
    return EigResult(lam, v, False, max_iter, res)


def smallest_eig_lower_bound(m: np.ndarray) -> float:
    """Gershgorin lower bound on the smallest eigenvalue of a Hermitian matrix."""
    m = require_hermitian(m, what="smallest_eig_lower_bound input")
    d = np.real(np.diag(m))
    off = np.sum(np.abs(m), axis=1) - np.abs(np.diag(m))
    return float(np.min(d - off))


def largest_eig_upper_bound(m: np.ndarray) -> float:
    """Gershgorin upper bound on the largest eigenvalue of a Hermitian matrix."""
    m = require_hermitian(m, what="largest_eig_upper_bound input")
    d = np.real(np.diag(m))
    off = np.sum(np.abs(m), axis=1) - np.abs(np.diag(m))
    return float(np.max(d + off))


def smallest_eig_estimate(
    m: np.ndarray,
    method: str = "gershgorin",
    tol: float = 1e-12,
    max_iter: int = 500,
    seed: int = 0,
) -> float:
    """Lower estimate of the smallest eigenvalue, never above the true value
    by more than the power-iteration safety margin.

    "gershgorin" is O(N^2) and always a valid bound. "power" refines it by a
    power iteration on the shifted matrix c*I - M; the refined value keeps a
    residual-based margin and never falls below the Gershgorin bound.
    """
    g = smallest_eig_lower_bound(m)
    if method == "gershgorin":
        return g
    if method != "power":
        raise ContractError(f"unknown shift method {method!r}")
    c = largest_eig_upper_bound(m)
    shifted = c * np.eye(m.shape[0]) - np.asarray(m, dtype=complex)
    eig = dominant_eigpair(shifted, tol=tol, max_iter=max_iter, seed=seed)
    margin = max(10.0 * eig.residual, 1e-12 * (abs(c) + abs(eig.value)))
    return max(g, c - eig.value - margin)


def finite_diff_gradient(f: Callable[[np.ndarray], float], phases, h: float) -> np.ndarray:
    """Central finite differences of f with respect to the phase angles.

    `phases` may be a plain angle array or any object exposing `.angles`
    (e.g. a PhaseVector); `f` receives perturbed angle arrays.
    """
    if h <= 0.0:
        raise ContractError("step h must be positive")
    angles = np.array(getattr(phases, "angles", phases), dtype=float)
    grad = np.empty(angles.size, dtype=float)
    for i in range(angles.size):
        up = angles.copy()
        dn = angles.copy()
        up[i] += h
        dn[i] -= h
        grad[i] = (f(up) - f(dn)) / (2.0 * h)
    return grad
