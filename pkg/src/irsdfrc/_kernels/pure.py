"""Pure-numpy grid enumeration kernels (fallback backend).

Both functions enumerate all k^n phase combinations from per-element value
tables in ascending flat-index order (last element varies fastest) and
return the first index attaining the maximum, matching the compiled
backend's ordering and tie-breaking.
"""

from __future__ import annotations

import numpy as np

_CHUNK = 1 << 16


def _phases_for(tables: np.ndarray, idx: np.ndarray, strides: np.ndarray, k: int) -> np.ndarray:
    digits = (idx[:, None] // strides[None, :]) % k
    return tables[np.arange(tables.shape[0])[None, :], digits]


def grid_max_objective(tables, m1, b, u, v, w_r, w_u):
    """Maximize w_r*||m1 phi||^2*|b.phi|^2 + w_u*|u.phi + v|^2 over the grid."""
    tables = np.ascontiguousarray(tables, dtype=complex)
    m1 = np.ascontiguousarray(m1, dtype=complex)
    b = np.ascontiguousarray(b, dtype=complex)
    u = np.ascontiguousarray(u, dtype=complex)
    n, k = tables.shape
    total = k**n
    strides = k ** (n - 1 - np.arange(n))
    best_val = -np.inf
    best_idx = 0
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total))
        phases = _phases_for(tables, idx, strides, k)
        through = phases @ m1.T
        r1 = np.sum(through.real**2 + through.imag**2, axis=1)
        tb = phases @ b
        tu = phases @ u + v
        vals = w_r * r1 * (tb.real**2 + tb.imag**2) + w_u * (tu.real**2 + tu.imag**2)
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val = float(vals[i])
            best_idx = int(idx[i])
    return best_idx, best_val


def grid_max_surrogate(tables, q, lin_h, lin_t, const_term):
    """Maximize Re(phi^H Q phi + phi^H lin_h + phi^T lin_t) + const over the grid."""
    tables = np.ascontiguousarray(tables, dtype=complex)
    q = np.ascontiguousarray(q, dtype=complex)
    lin_h = np.ascontiguousarray(lin_h, dtype=complex)
    lin_t = np.ascontiguousarray(lin_t, dtype=complex)
    n, k = tables.shape
    total = k**n
    strides = k ** (n - 1 - np.arange(n))
    best_val = -np.inf
    best_idx = 0
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total))
        phases = _phases_for(tables, idx, strides, k)
        quad = np.real(np.einsum("mi,ij,mj->m", phases.conj(), q, phases))
        vals = quad + np.real(phases.conj() @ lin_h) + np.real(phases @ lin_t) + const_term
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val = float(vals[i])
            best_idx = int(idx[i])
    return best_idx, best_val
