"""Random matrix sampling oracles: GUE and LUE ensembles.

Eigenvalues come from a cyclic Jacobi iteration on the real-symmetric
doubling of the Hermitian matrix (threshold 1e-12 relative off-diagonal
norm, at most 30 sweeps); a batched variant diagonalizes many small
matrices at once.  Matrix entries are Gaussian quantile transforms of the
same counter-based uniform field used everywhere else, so samples are a
pure function of the seed.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.special as sps

from .environment import UniformField, uniform_many
from .errors import DomainError, JacobiConvergenceError

_RE_LANE = 0x61
_IM_LANE = 0x62


def _off_norm(a: np.ndarray) -> float:
    # computed from a zeroed-diagonal copy; the difference-of-sums form
    # cancels catastrophically once the iteration is nearly converged
    m = a.copy()
    np.fill_diagonal(m, 0.0)
    return float(np.sqrt((m * m).sum()))


def _off_norm_batch(a: np.ndarray) -> np.ndarray:
    m = a.copy()
    n = a.shape[-1]
    m[..., np.arange(n), np.arange(n)] = 0.0
    return np.sqrt((m * m).sum(axis=(-2, -1)))


def jacobi_eigvalsh(a: np.ndarray, tol: float = 1e-12, max_sweeps: int = 30) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations,
    sorted decreasing.  Converged when the off-diagonal Frobenius norm
    falls below tol times the matrix norm."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise DomainError("jacobi_eigvalsh needs a square matrix")
    if n == 1:
        return a[0].copy()
    scale = float(np.sqrt((a * a).sum()))
    if scale == 0.0:
        return np.zeros(n)
    thresh = tol * scale
    for _ in range(max_sweeps):
        if _off_norm(a) <= thresh:
            return np.sort(np.diagonal(a))[::-1].copy()
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                app, aqq = a[p, p], a[q, q]
                theta = 0.5 * (aqq - app) / apq
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rp = a[p].copy()
                rq = a[q].copy()
                a[p] = c * rp - s * rq
                a[q] = s * rp + c * rq
                a[:, p] = a[p]
                a[:, q] = a[q]
                a[p, p] = c * c * app - 2.0 * s * c * apq + s * s * aqq
                a[q, q] = s * s * app + 2.0 * s * c * apq + c * c * aqq
                a[p, q] = 0.0
                a[q, p] = 0.0
    if _off_norm(a) <= thresh:
        return np.sort(np.diagonal(a))[::-1].copy()
    raise JacobiConvergenceError(
        "Jacobi did not converge in %d sweeps (off-norm %.3e, threshold %.3e)"
        % (max_sweeps, _off_norm(a), thresh)
    )


def jacobi_eigvalsh_batch(a: np.ndarray, tol: float = 1e-12, max_sweeps: int = 30) -> np.ndarray:
    """Cyclic Jacobi over a (B, n, n) stack of real symmetric matrices."""
    a = np.array(a, dtype=float)
    b, n = a.shape[0], a.shape[1]
    if a.shape != (b, n, n):
        raise DomainError("expected a stack of square matrices")
    if n == 1:
        return a[:, :, 0].copy()
    scale = np.sqrt((a * a).sum(axis=(1, 2)))
    thresh = tol * np.maximum(scale, 1e-300)
    rows = np.arange(b)
    for _ in range(max_sweeps):
        off = _off_norm_batch(a)
        if np.all(off <= thresh):
            d = np.diagonal(a, axis1=1, axis2=2)
            return np.sort(d, axis=1)[:, ::-1].copy()
        for p in range(n - 1):
            for q in range(p + 1, n):
                # copies, not views: the row/column updates below would
                # otherwise clobber these before the diagonal fix-ups
                apq = a[:, p, q].copy()
                app = a[:, p, p].copy()
                aqq = a[:, q, q].copy()
                nonzero = np.abs(apq) > 1e-300
                theta = np.where(nonzero, 0.5 * (aqq - app) / np.where(nonzero, apq, 1.0), 0.0)
                t = np.where(
                    nonzero,
                    np.copysign(1.0, theta) / (np.abs(theta) + np.hypot(theta, 1.0)),
                    0.0,
                )
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rp = a[:, p, :].copy()
                rq = a[:, q, :].copy()
                a[:, p, :] = c[:, None] * rp - s[:, None] * rq
                a[:, q, :] = s[:, None] * rp + c[:, None] * rq
                a[:, :, p] = a[:, p, :]
                a[:, :, q] = a[:, q, :]
                a[rows, p, p] = c * c * app - 2.0 * s * c * apq + s * s * aqq
                a[rows, q, q] = s * s * app + 2.0 * s * c * apq + c * c * aqq
                a[rows, p, q] = 0.0
                a[rows, q, p] = 0.0
    off = _off_norm_batch(a)
    if np.all(off <= thresh):
        d = np.diagonal(a, axis1=1, axis2=2)
        return np.sort(d, axis=1)[:, ::-1].copy()
    raise JacobiConvergenceError("batched Jacobi did not converge in %d sweeps" % max_sweeps)


def _embed_hermitian(h: np.ndarray) -> np.ndarray:
    """Real-symmetric doubling [[A, -B], [B, A]] of H = A + iB; every
    eigenvalue of H appears twice."""
    a, b = h.real, h.imag
    top = np.concatenate([a, -b], axis=-1)
    bot = np.concatenate([b, a], axis=-1)
    return np.concatenate([top, bot], axis=-2)


def hermitian_eigvalsh(h: np.ndarray, tol: float = 1e-12, max_sweeps: int = 30) -> np.ndarray:
    """Eigenvalues (decreasing) of a complex Hermitian matrix via the
    doubled real-symmetric Jacobi iteration."""
    doubled = jacobi_eigvalsh(_embed_hermitian(h), tol=tol, max_sweeps=max_sweeps)
    return doubled[::2].copy()


def hermitian_eigvalsh_batch(h: np.ndarray, tol: float = 1e-12, max_sweeps: int = 30) -> np.ndarray:
    doubled = jacobi_eigvalsh_batch(_embed_hermitian(h), tol=tol, max_sweeps=max_sweeps)
    return doubled[:, ::2].copy()


# ---------------------------------------------------------------------------
# Ensemble sampling
# ---------------------------------------------------------------------------


def _normals(seed: int, lane: int, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    f = UniformField(seed).derive(lane)
    return sps.ndtri(f.uniform(rows, cols))


def gue_matrix(n: int, seed: int) -> np.ndarray:
    """Hermitian matrix with density exp(-Tr H^2 / 2): N(0,1) diagonal and
    complex off-diagonal entries of unit mean square modulus."""
    rows = np.arange(n)[:, None]
    cols = np.arange(n)[None, :]
    g_re = _normals(seed, _RE_LANE, rows, cols)
    g_im = _normals(seed, _IM_LANE, rows, cols)
    h = np.zeros((n, n), dtype=complex)
    iu = np.triu_indices(n, k=1)
    h[iu] = (g_re[iu] + 1j * g_im[iu]) / math.sqrt(2.0)
    h = h + h.conj().T
    h[np.diag_indices(n)] = np.diagonal(g_re)
    return h


def gue_sample(n: int, seed: int) -> np.ndarray:
    """Eigenvalues of one GUE matrix, sorted decreasing."""
    return hermitian_eigvalsh(gue_matrix(n, seed))


def lue_matrix(n: int, m: int, seed: int) -> np.ndarray:
    """m x m Laguerre (complex Wishart) matrix X X* with underlying
    parameter n: X is m x n with standard complex Gaussian entries."""
    if m > n:
        raise DomainError("LUE sampling requires m <= n")
    rows = np.arange(m)[:, None]
    cols = np.arange(n)[None, :]
    x = (
        _normals(seed, _RE_LANE, rows, cols) + 1j * _normals(seed, _IM_LANE, rows, cols)
    ) / math.sqrt(2.0)
    return x @ x.conj().T


def lue_sample(n: int, m: int, seed: int) -> np.ndarray:
    """Eigenvalues of one LUE(m, parameter n) matrix, sorted decreasing."""
    return hermitian_eigvalsh(lue_matrix(n, m, seed))


def lue_matrix_batch(n: int, m: int, seeds: np.ndarray) -> np.ndarray:
    rows = np.arange(m)[None, :, None]
    cols = np.arange(n)[None, None, :]
    u_re = uniform_many(_seed_lane(seeds, _RE_LANE)[:, None, None], rows, cols)
    u_im = uniform_many(_seed_lane(seeds, _IM_LANE)[:, None, None], rows, cols)
    x = (sps.ndtri(u_re) + 1j * sps.ndtri(u_im)) / math.sqrt(2.0)
    return x @ np.conj(np.swapaxes(x, 1, 2))


def _seed_lane(seeds: np.ndarray, lane: int) -> np.ndarray:
    from .environment import derive_seed

    return np.array([derive_seed(int(s), lane) for s in np.asarray(seeds)], dtype=np.uint64)


def lue_sample_batch(n: int, m: int, seeds: np.ndarray) -> np.ndarray:
    """Eigenvalues (decreasing) for a batch of LUE samples, one per seed."""
    return hermitian_eigvalsh_batch(lue_matrix_batch(n, m, seeds))


def minors_process(h: np.ndarray) -> dict[tuple[int, int], float]:
    """Triangular eigenvalue process of the principal minors: entry (i, j)
    with i <= j is the i-th largest eigenvalue of the minor of size
    N - j + i.  Satisfies the Gelfand-Tsetlin interlacing along north and
    east steps by Cauchy's theorem."""
    n = h.shape[0]
    eigs = {k: hermitian_eigvalsh(h[:k, :k]) for k in range(1, n + 1)}
    out = {}
    for j in range(1, n + 1):
        for i in range(1, j + 1):
            out[(i, j)] = float(eigs[n - j + i][i - 1])
    return out
