import math

import numpy as np
import pytest

from nipoly.errors import JacobiConvergenceError
from nipoly.rmt import (
    gue_matrix,
    gue_sample,
    hermitian_eigvalsh,
    hermitian_eigvalsh_batch,
    jacobi_eigvalsh,
    jacobi_eigvalsh_batch,
    lue_matrix,
    lue_sample,
    lue_sample_batch,
    minors_process,
)


def test_jacobi_against_numpy():
    rng = np.random.default_rng(0)
    for n in (1, 2, 5, 20):
        m = rng.standard_normal((n, n))
        a = (m + m.T) / 2
        got = jacobi_eigvalsh(a)
        want = np.sort(np.linalg.eigvalsh(a))[::-1]
        assert np.allclose(got, want, atol=1e-10)


def test_jacobi_batch_against_numpy():
    rng = np.random.default_rng(1)
    m = rng.standard_normal((7, 6, 6))
    a = (m + np.swapaxes(m, 1, 2)) / 2
    got = jacobi_eigvalsh_batch(a)
    for b in range(7):
        want = np.sort(np.linalg.eigvalsh(a[b]))[::-1]
        assert np.allclose(got[b], want, atol=1e-10)


def test_jacobi_nonconvergence_raises():
    rng = np.random.default_rng(2)
    m = rng.standard_normal((30, 30))
    a = (m + m.T) / 2
    with pytest.raises(JacobiConvergenceError):
        jacobi_eigvalsh(a, max_sweeps=1)


def test_hermitian_eigvalsh():
    rng = np.random.default_rng(3)
    for n in (2, 4, 9):
        x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        h = (x + x.conj().T) / 2
        got = hermitian_eigvalsh(h)
        want = np.sort(np.linalg.eigvalsh(h))[::-1]
        assert np.allclose(got, want, atol=1e-9)
    hb = np.stack(
        [
            (lambda y: (y + y.conj().T) / 2)(
                rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            )
            for _ in range(5)
        ]
    )
    got = hermitian_eigvalsh_batch(hb)
    for b in range(5):
        want = np.sort(np.linalg.eigvalsh(hb[b]))[::-1]
        assert np.allclose(got[b], want, atol=1e-9)


def test_gue_trace_preservation():
    h = gue_matrix(40, seed=5)
    eigs = gue_sample(40, seed=5)
    assert np.sum(eigs) == pytest.approx(float(np.trace(h).real), abs=1e-9)
    assert list(eigs) == sorted(eigs, reverse=True)


def test_gue_determinism_and_moments():
    assert np.allclose(gue_sample(10, seed=1), gue_sample(10, seed=1))
    # E Tr H^2 = n^2 under this normalization
    vals = []
    for s in range(30):
        h = gue_matrix(12, seed=100 + s)
        vals.append(float(np.trace(h @ h).real))
    assert np.mean(vals) == pytest.approx(144.0, rel=0.15)


def test_lue_positive_and_trace():
    h = lue_matrix(8, 5, seed=7)
    eigs = lue_sample(8, 5, seed=7)
    assert eigs[-1] > 0  # positive definite a.s.
    assert np.sum(eigs) == pytest.approx(float(np.trace(h).real), abs=1e-9)
    # E Tr XX* = m n
    traces = [float(np.trace(lue_matrix(8, 5, seed=200 + s)).real) for s in range(40)]
    assert np.mean(traces) == pytest.approx(40.0, rel=0.15)


def test_lue_batch_matches_scalar():
    seeds = np.arange(50, 54)
    batch = lue_sample_batch(6, 3, seeds)
    for i, s in enumerate(seeds):
        single = lue_sample(6, 3, int(s))
        assert np.allclose(batch[i], single, atol=1e-9)


def test_minors_interlacing():
    h = gue_matrix(8, seed=11)
    grid = minors_process(h)
    # decreasing along east (i, j) -> (i+1, j) and north (i, j) -> (i, j+1)
    for (i, j), v in grid.items():
        if (i + 1, j) in grid and i + 1 <= j:
            assert grid[(i + 1, j)] <= v + 1e-10
        if (i, j + 1) in grid:
            assert grid[(i, j + 1)] <= v + 1e-10
