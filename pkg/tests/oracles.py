"""Independent reference implementations used to validate package code.

Everything here deliberately avoids the code paths under test: literal
matrix products instead of factored cascades, bisection instead of power
iteration, dense scans instead of closed forms.
"""

from __future__ import annotations

import numpy as np

from irsdfrc.scenario import PhaseVector


def matmul_triple_loop(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    out = np.zeros((a.shape[0], b.shape[1]), dtype=complex)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            acc = 0.0 + 0.0j
            for k in range(a.shape[1]):
                acc += a[i, k] * b[k, j]
            out[i, j] = acc
    return out


def lambda_max_bisect(m: np.ndarray, tol: float = 1e-12, max_iter: int = 200) -> float:
    """Largest eigenvalue of a Hermitian matrix by bisection on the
    positive-definiteness boundary of lambda*I - M (Cholesky test)."""
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    d = np.real(np.diag(m))
    off = np.sum(np.abs(m), axis=1) - np.abs(np.diag(m))
    lo = float(np.min(d - off))
    hi = float(np.max(d + off))

    def is_above(lam: float) -> bool:
        try:
            np.linalg.cholesky(lam * np.eye(n) - m)
            return True
        except np.linalg.LinAlgError:
            return False

    hi = hi + max(1.0, abs(hi)) * 1e-9  # strictly above the top eigenvalue
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if is_above(mid):
            hi = mid
        else:
            lo = mid
        if hi - lo <= tol * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


def phase_matrix(phi: PhaseVector) -> np.ndarray:
    return np.diag(phi.values)


def literal_cascaded_channel(s, phi: PhaseVector) -> np.ndarray:
    """Explicit diagonal-matrix evaluation of the cascaded target channel."""
    ch = s.channels
    big_phi = phase_matrix(phi)
    a = ch.a_irs
    return s.config.cascaded_gain * ch.h_ul @ big_phi @ np.outer(a, a) @ big_phi @ ch.h_dl


def literal_user_channel(s, phi: PhaseVector) -> np.ndarray:
    ch = s.channels
    big_phi = phase_matrix(phi)
    row = np.sqrt(s.config.irs_pathloss) * (ch.f_user @ big_phi @ ch.h_dl) + ch.g_user
    return row


def literal_radar_snr(s, w, phi: PhaseVector) -> float:
    c_t = literal_cascaded_channel(s, phi)
    w_cov = np.outer(w.w, np.conj(w.w))
    return float(np.real(np.trace(c_t @ w_cov @ c_t.conj().T))) / s.config.radar_noise_power


def literal_comm_snr(s, w, phi: PhaseVector) -> float:
    c_u = literal_user_channel(s, phi)
    return abs(np.dot(c_u, w.w)) ** 2 / s.config.user_noise_power


def sphere_samples_best(g: np.ndarray, power: float, count: int, rng: np.random.Generator) -> float:
    """Best quadratic-form value over random points on the power sphere."""
    n = g.shape[0]
    best = -np.inf
    chunk = 20_000
    remaining = count
    while remaining > 0:
        m = min(chunk, remaining)
        x = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
        x *= np.sqrt(power) / np.linalg.norm(x, axis=1, keepdims=True)
        vals = np.real(np.einsum("mi,ij,mj->m", x.conj(), g, x))
        best = max(best, float(np.max(vals)))
        remaining -= m
    return best


def feasible_sphere_grid_best(
    g: np.ndarray, r_d: np.ndarray, threshold: float, power: float, steps: int
) -> float:
    """Best feasible quadratic-form value over a dense grid of the complex
    power sphere in C^3, parameterized (modulo the irrelevant global phase)
    by two magnitude angles and two relative phases."""
    assert g.shape == (3, 3)
    t1 = np.linspace(0.0, np.pi / 2, steps)
    t2 = np.linspace(0.0, np.pi / 2, steps)
    p2 = np.linspace(0.0, 2 * np.pi, steps, endpoint=False)
    p3 = np.linspace(0.0, 2 * np.pi, steps, endpoint=False)
    rd_norm2 = float(np.sum(np.abs(r_d) ** 2))
    best = -np.inf
    root_p = np.sqrt(power)
    for a1 in t1:
        r1 = np.cos(a1)
        s1 = np.sin(a1)
        for a2 in t2:
            mags = root_p * np.array([r1, s1 * np.cos(a2), s1 * np.sin(a2)])
            ph2, ph3 = np.meshgrid(p2, p3, indexing="ij")
            w = np.empty((steps * steps, 3), dtype=complex)
            w[:, 0] = mags[0]
            w[:, 1] = mags[1] * np.exp(1j * ph2).ravel()
            w[:, 2] = mags[2] * np.exp(1j * ph3).ravel()
            obj = np.real(np.einsum("mi,ij,mj->m", w.conj(), g, w))
            quad = np.real(np.einsum("mi,ij,mj->m", w.conj(), r_d, w))
            dev = power * power - 2.0 * quad + rd_norm2
            obj[dev > threshold] = -np.inf
            best = max(best, float(np.max(obj)))
    return best


def dense_arc_scan(nu: complex, eta: complex, lower: float, upper: float, points: int):
    """Dense 1-D scan of Re(e^{-j theta} nu + e^{j theta} eta) on an arc."""
    theta = np.linspace(lower, upper, points)
    vals = np.real(np.exp(-1j * theta) * nu + np.exp(1j * theta) * eta)
    i = int(np.argmax(vals))
    return float(theta[i]), float(vals[i])


def assert_monotone_nondecreasing(seq, slack: float = 1e-9) -> None:
    seq = list(seq)
    for i, (a, b) in enumerate(zip(seq, seq[1:])):
        assert b >= a - slack, f"sequence decreases at step {i}: {a} -> {b}"
