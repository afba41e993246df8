import math

import numpy as np
import pytest

from nipoly.environment import UniformField, WeightSpec, derive_seed
from nipoly.errors import NoPathError
from nipoly.lattice import rectangle_endpoints, stack_diag, stack_up
from nipoly.logspace import LogSigned
from nipoly.polymer import (
    brute_force_kpath_logZ,
    free_energy_mc,
    infinite_temperature_free_energy,
    ineq_theorem_check,
    jensen_sandwich_check,
    k_linearity_probe,
    kpath_logZ_lgv,
    last_passage,
    last_passage_batch,
    log_tau,
    log_tau_tilde,
    logZ_grid,
    parallel_series_bound_mc,
    rost_ell,
    scaled_k_check,
    scan_rectangle,
    sepp_free_energy,
    single_path_logZ,
    TauTable,
    w_limit,
)
from nipoly.special import digamma, log_binomial

GAMMA = 0.5772156649015329
LG2 = WeightSpec("loggamma", mu=2.0)


def test_single_path_trivial_cases():
    f = UniformField(1)
    # x == y: single trivial path, empty product
    assert single_path_logZ(f, LG2, 1.0, (3, 3), (3, 3)) == 0.0
    # beta = 0 counts paths
    got = single_path_logZ(f, LG2, 0.0, (1, 1), (4, 3))
    assert got == pytest.approx(log_binomial(5, 3).logmag, abs=1e-12)
    with pytest.raises(NoPathError):
        single_path_logZ(f, LG2, 1.0, (2, 2), (1, 5))


def test_single_path_constant_weights():
    f = UniformField(1)
    spec = WeightSpec("const", c=0.7)
    beta = 0.9
    x, y = (1, 1), (5, 4)
    d1, d2 = y[0] - x[0], y[1] - x[1]
    expect = log_binomial(d1 + d2, d1).logmag + beta * 0.7 * (d1 + d2)
    assert single_path_logZ(f, spec, beta, x, y) == pytest.approx(expect, rel=1e-12)


def test_scan_matches_grid():
    rng = np.random.default_rng(0)
    logw = rng.standard_normal((7, 5))
    assert scan_rectangle(logw) == pytest.approx(logZ_grid(logw)[-1, -1], rel=1e-12)
    assert scan_rectangle(logw, include_start=True) == pytest.approx(
        logZ_grid(logw, include_start=True)[-1, -1], rel=1e-12
    )
    # batched agrees with per-sample
    batch = rng.standard_normal((3, 6, 4))
    got = scan_rectangle(batch)
    for b in range(3):
        assert got[b] == pytest.approx(scan_rectangle(batch[b]), rel=1e-12)


def test_scan_maximum_mode():
    logw = np.ones((4, 6))
    assert scan_rectangle(logw, np.maximum, include_start=True) == pytest.approx(9.0)


def test_lgv_k1_matches_single_path():
    f = UniformField(5)
    got = kpath_logZ_lgv(f, LG2, 1.0, ((1, 1),), ((4, 4),))
    want = single_path_logZ(f, LG2, 1.0, (1, 1), (4, 4))
    assert got.logmag == pytest.approx(want, rel=1e-12)
    assert got.sign == 1


@pytest.mark.parametrize("beta", [0.0, 0.5, 1.0])
def test_lgv_vs_brute_force(beta):
    xs, ys = rectangle_endpoints(3, 3, 2)
    for s in range(5):
        f = UniformField(derive_seed(100, s))
        det = kpath_logZ_lgv(f, LG2, beta, xs, ys)
        bf = brute_force_kpath_logZ(f, LG2, beta, xs, ys)
        assert det.logmag == pytest.approx(bf, abs=1e-8)


def test_lgv_beta0_is_macmahon():
    from nipoly.lattice import macmahon_log_count

    for n, m, k in [(3, 3, 2), (4, 3, 2), (5, 5, 3)]:
        xs, ys = rectangle_endpoints(n, m, k)
        det = kpath_logZ_lgv(UniformField(0), None, 0.0, xs, ys)
        assert det.logmag == pytest.approx(macmahon_log_count(n, m, k), abs=1e-10)


def test_lgv_diagonal_endpoints():
    xs = stack_diag((1, 1), 2)
    ys = tuple((p[0] + 3, p[1] + 3) for p in xs)
    for s in (0, 1):
        f = UniformField(derive_seed(7, s))
        det = kpath_logZ_lgv(f, LG2, 1.0, xs, ys)
        bf = brute_force_kpath_logZ(f, LG2, 1.0, xs, ys)
        assert det.logmag == pytest.approx(bf, abs=1e-8)


def test_tau_trivial_cases():
    f = UniformField(9)
    mu = 1.5
    t = TauTable(f, mu, 3)
    # tau(m, 0) = 1
    assert t.log_tau(2, 0) == 0.0
    # N = m = k = 1: tau = zeta(1,1)
    t1 = TauTable(f, mu, 1)
    from nipoly.environment import omega_grid

    assert t1.log_tau(1, 1) == pytest.approx(
        float(omega_grid(f, WeightSpec("loggamma", mu=mu), 1, 1)), rel=1e-10
    )
    # tau(m, m) is the plain product over the N x m rectangle
    for m in (1, 2, 3):
        full = float(
            omega_grid(
                f,
                WeightSpec("loggamma", mu=mu),
                np.arange(1, 4)[:, None],
                np.arange(1, m + 1)[None, :],
            ).sum()
        )
        assert t.log_tau(m, m) == pytest.approx(full, rel=1e-9, abs=1e-9)


def test_tau_vs_brute_force():
    f = UniformField(31)
    mu = 2.0
    n, m, k = 3, 2, 1
    got = log_tau(f, mu, n, m, k)
    xs, ys = stack_up((1, 1), k), tuple((n, m - (k - 1) + i) for i in range(k))
    bf = brute_force_kpath_logZ(f, WeightSpec("loggamma", mu=mu), 1.0, xs, ys, include_start=True)
    assert got == pytest.approx(bf, abs=1e-9)
    # and a k=2 case
    n, m, k = 4, 3, 2
    got = log_tau(f, mu, n, m, k)
    xs = stack_up((1, 1), 2)
    ys = tuple((n, m - 1 + i) for i in range(2))
    bf = brute_force_kpath_logZ(f, WeightSpec("loggamma", mu=mu), 1.0, xs, ys, include_start=True)
    assert got == pytest.approx(bf, abs=1e-8)


def test_tau_equals_tau_tilde_on_diagonal():
    f = UniformField(12)
    for n in (1, 2, 3, 4):
        t = TauTable(f, 1.5, n)
        for k in range(1, n + 1):
            assert t.log_tau(n, k) == pytest.approx(t.log_tau_tilde(n, k), abs=1e-9)


def test_tau_tilde_transposed_rectangle():
    # tau~(m,k) sums over the m-wide, N-tall rectangle
    f = UniformField(13)
    mu, n = 2.0, 3
    got = log_tau_tilde(f, mu, n, 2, 1)
    xs, ys = ((1, 1),), ((2, 3),)
    bf = brute_force_kpath_logZ(f, WeightSpec("loggamma", mu=mu), 1.0, xs, ys, include_start=True)
    assert got == pytest.approx(bf, abs=1e-9)


def test_last_passage_constant_field_length():
    # with e == 1 the value is the path site count N + m - 1
    f = UniformField(2)
    n, m = 5, 3
    val = last_passage(f, n, m, 1)
    x1 = np.arange(1, n + 1)
    x2 = np.arange(1, m + 1)
    from nipoly.environment import omega_grid

    e = omega_grid(f, WeightSpec("exp1"), x1[:, None], x2[None, :])
    # brute force over all paths
    best = max(
        sum(float(e[p[0] - 1, p[1] - 1]) for p in path)
        for path in __import__("nipoly.lattice", fromlist=["paths_between"]).paths_between((1, 1), (n, m))
    )
    assert val == pytest.approx(best, rel=1e-12)


def test_last_passage_full_rectangle():
    f = UniformField(3)
    n, m = 3, 2
    from nipoly.environment import omega_grid

    e = omega_grid(
        f, WeightSpec("exp1"), np.arange(1, n + 1)[:, None], np.arange(1, m + 1)[None, :]
    )
    assert last_passage(f, n, m, k=m) == pytest.approx(float(e.sum()), rel=1e-12)


def test_last_passage_batch_matches_scalar():
    seeds = np.array([derive_seed(5, 0x17, s) for s in range(4)])
    batch = last_passage_batch(seeds, 6, 4)
    for i, s in enumerate(seeds):
        assert batch[i] == pytest.approx(last_passage(UniformField(int(s)), 6, 4, 1), rel=1e-12)


def test_sepp_free_energy_closed_forms():
    assert sepp_free_energy(2.0, 1.0) == pytest.approx(2 * GAMMA, abs=1e-10)
    # psi0(1/2) = -gamma - 2 ln 2
    assert sepp_free_energy(1.0, 1.0) == pytest.approx(2 * GAMMA + 4 * math.log(2.0), abs=1e-10)
    # decreasing in mu at fixed c
    vals = [sepp_free_energy(mu, 1.0) for mu in (0.5, 1.0, 2.0, 4.0)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_infinite_temperature_value():
    assert infinite_temperature_free_energy(1.0) == pytest.approx(2 * math.log(2.0))


def test_rost_ell():
    assert rost_ell(1.0) == 4.0
    assert rost_ell(0.25) == pytest.approx(2.25)


def test_ineq_theorem():
    assert ineq_theorem_check(2.0, 1.0, 2.0)["ok"]
    for c in (0.5, 1.0):
        for cp in (1.5, 2.0):
            assert ineq_theorem_check(1.0, c, cp)["ok"]
    # c' -> c collapses both bounds to f_c
    r = ineq_theorem_check(2.0, 1.0, 1.0 + 1e-9)
    assert r["lower"] == pytest.approx(r["f_c"], abs=1e-6)
    assert r["upper"] == pytest.approx(r["f_c"], abs=1e-6)


def test_free_energy_mc_beta0():
    est = free_energy_mc(None, 0.0, 1.0, 64, 2, seed=1)
    assert est.estimate == pytest.approx(
        log_binomial(2 * 63, 63).logmag / 64, rel=1e-10
    )


def test_free_energy_superadditivity_trend():
    # mean estimates non-decreasing in N within 2 stderr
    ests = [free_energy_mc(LG2, 1.0, 1.0, n, 12, seed=5) for n in (16, 32, 64)]
    for a, b in zip(ests, ests[1:]):
        assert b.estimate >= a.estimate - 2 * (a.stderr + b.stderr)


def test_jensen_sandwich_gaussian_and_bernoulli():
    xs, ys = rectangle_endpoints(4, 4, 2)
    r = jensen_sandwich_check(WeightSpec("gauss"), 1.0, xs, ys, 60, seed=2)
    assert r["lower"] == 0.0
    assert r["upper"] == pytest.approx(0.5)
    assert r["ok"]
    r = jensen_sandwich_check(WeightSpec("bernoulli", p=0.5), 1.0, xs, ys, 60, seed=3)
    assert r["lower"] == pytest.approx(0.5)
    assert r["upper"] == pytest.approx(math.log((1 + math.e) / 2))
    assert r["ok"]


def test_jensen_sandwich_beta0_trivial():
    xs, ys = rectangle_endpoints(3, 3, 1)
    r = jensen_sandwich_check(WeightSpec("gauss"), 0.0, xs, ys, 5, seed=4)
    assert r["mean"] == 0.0
    assert r["lower"] == 0.0 and r["upper"] == 0.0


def test_w_limit_values():
    assert w_limit(1.0, 1.0) == pytest.approx(0.0, abs=1e-12)
    assert w_limit(1.0, 0.5) == pytest.approx(0.1962180, abs=1e-6)
    assert w_limit(1.0, 1e-9) == pytest.approx(0.0, abs=1e-7)


def test_scaled_k_check():
    r = scaled_k_check(400, 1.0, 0.5)
    assert r["gap"] < 0.02


def test_parallel_series_bounds_loggamma():
    r = parallel_series_bound_mc(LG2, 1.0, replicas=60, seed=6)
    assert r["violations"] == {"series": 0, "parallel": 0, "hadamard": 0}


def test_parallel_series_bounds_deterministic():
    r = parallel_series_bound_mc(WeightSpec("const", c=1.0), 0.7, replicas=1, seed=0)
    assert r["violations"] == {"series": 0, "parallel": 0, "hadamard": 0}
    assert r["min_slack"] >= 0.0


@pytest.mark.slow
def test_k_linearity_probe():
    r = k_linearity_probe(LG2, 1.0, 1.0, 192, 12, seed=11)
    assert r["ok"], r
