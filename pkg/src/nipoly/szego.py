"""Toeplitz symbols from path geometry and strong Szego asymptotics.

The infinite-temperature partition function of k stacked paths is a k x k
Toeplitz determinant whose symbol has binomial coefficients; its large-k
rate is the zeroth log-coefficient c_0 of the symbol and the subleading
constant is exp(sum m c_m c_{-m}).  Direct LogSigned determinants serve as
the oracle for both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ZeroOnCircleError
from .lattice import Point
from .logspace import LogSigned, logdet


@dataclass(frozen=True)
class Symbol:
    """Finitely supported Laurent series sum_m d_m s^m on the unit circle."""

    coeffs: dict[int, float]

    def __post_init__(self):
        object.__setattr__(
            self, "coeffs", {m: float(d) for m, d in self.coeffs.items() if d != 0.0}
        )

    def d(self, m: int) -> float:
        return self.coeffs.get(m, 0.0)

    def support(self) -> tuple[int, int]:
        if not self.coeffs:
            return (0, 0)
        ms = sorted(self.coeffs)
        return ms[0], ms[-1]

    def wiener_norm(self) -> float:
        return sum(abs(d) for d in self.coeffs.values())

    def eval_circle(self, t: np.ndarray) -> np.ndarray:
        """a(e^{it}) for an array of angles t."""
        vals = np.zeros_like(t, dtype=complex)
        for m, d in self.coeffs.items():
            vals += d * np.exp(1j * m * np.asarray(t))
        return vals

    def scaled(self, factor: float) -> "Symbol":
        return Symbol({m: factor * d for m, d in self.coeffs.items()})


def symbol_from_geometry(z: Point, h: Point) -> Symbol:
    """Symbol of the stacked-path family with displacement z and stacking
    direction h: the m-th coefficient counts the paths from the origin to
    z - m h.

    For z = (3,2), h = (-2,2) this is 5/s + 10 + s, matching the worked
    values; the support is finite whenever h1 < 0 < h2.
    """
    if not (h[0] < 0 < h[1]):
        raise DomainError("stacking direction must have h1 < 0 < h2")
    coeffs: dict[int, float] = {}
    # paths(0 -> z - m h) needs both coordinates nonnegative
    # z1 + m|h1| >= 0 and z2 - m h2 >= 0 bound the support
    m_lo = -(z[0] // (-h[0])) - 1
    m_hi = z[1] // h[1] + 1
    for m in range(m_lo - 1, m_hi + 2):
        a, b = z[0] - m * h[0], z[1] - m * h[1]
        if a >= 0 and b >= 0:
            coeffs[m] = float(math.comb(a + b, a))
    return Symbol(coeffs)


def winding_number(sym: Symbol, grid: int = 4096, zero_tol: float = 1e-12) -> int:
    """Net phase turns of a(e^{it}) around the circle, by phase accumulation
    with a step guard of pi/2 (the grid doubles until every step is small)."""
    if not sym.coeffs:
        raise ZeroOnCircleError("zero symbol")
    scale = max(abs(d) for d in sym.coeffs.values())
    m = grid
    while True:
        t = 2.0 * np.pi * np.arange(m + 1) / m
        vals = sym.eval_circle(t)
        if np.min(np.abs(vals)) < zero_tol * scale:
            raise ZeroOnCircleError("symbol vanishes on the unit circle")
        steps = np.angle(vals[1:] / vals[:-1])
        if np.max(np.abs(steps)) < 0.5 * np.pi:
            total = float(steps.sum())
            return int(round(total / (2.0 * np.pi)))
        m *= 2
        if m > 2**22:
            raise ZeroOnCircleError("phase steps never settled; symbol near zero")


def log_coefficients(sym: Symbol, M: int = 64) -> dict[int, float]:
    """Fourier coefficients c_m of log a(e^{it}) for |m| <= M.

    Requires winding zero and no zeros on the circle; the FFT grid doubles
    until the coefficients stabilize to 1e-12.  Because the symbol is a
    Laurent polynomial, log a is analytic on the circle and the
    coefficients decay geometrically.
    """
    if winding_number(sym) != 0:
        raise DomainError("log_coefficients requires winding number zero")
    grid = 4096
    prev: dict[int, float] | None = None
    while True:
        t = 2.0 * np.pi * np.arange(grid) / grid
        vals = sym.eval_circle(t)
        logs = np.log(np.abs(vals)) + 1j * _unwrapped_phase(vals)
        fft = np.fft.fft(logs) / grid
        cur: dict[int, float] = {}
        for m in range(-M, M + 1):
            cm = fft[m % grid]
            cur[m] = float(cm.real)
        if max(abs(float(fft[m % grid].imag)) for m in range(-M, M + 1)) > 1e-8:
            raise DomainError("log-coefficients came out non-real; bad symbol")
        if prev is not None and all(
            abs(cur[m] - prev[m]) < 1e-12 for m in cur
        ):
            _check_geometric_decay(cur, M)
            return cur
        prev = cur
        grid *= 2
        if grid > 2**20:
            raise DomainError("log-coefficient FFT failed to stabilize")


def _unwrapped_phase(vals: np.ndarray) -> np.ndarray:
    steps = np.angle(vals[1:] / vals[:-1])
    phases = np.concatenate(([np.angle(vals[0])], np.angle(vals[0]) + np.cumsum(steps)))
    return phases


def _check_geometric_decay(c: dict[int, float], M: int) -> None:
    # the outer half of the window must be negligible against the inner
    inner = max(abs(c[m]) for m in range(1, M // 2 + 1))
    outer = max(abs(c[m]) for m in list(range(M // 2 + 1, M + 1)))
    if inner > 1e-13 and outer > 0.5 * inner:
        raise DomainError("log-coefficients are not decaying; truncation too small")


def strong_szego_constant(sym: Symbol, M: int = 64) -> float:
    """exp(sum_{m>=1} m c_m c_{-m}), truncated when the geometric tail bound
    falls below 1e-10."""
    c = log_coefficients(sym, M=M)
    total = 0.0
    for m in range(1, M + 1):
        total += m * c[m] * c[-m]
    # geometric tail estimate from the last resolved ratio
    tail_terms = [abs(M * c[M] * c[-M]), abs((M - 1) * c[M - 1] * c[-(M - 1)])]
    if max(tail_terms) > 1e-10:
        return strong_szego_constant(sym, M=2 * M)
    return math.exp(total)


def toeplitz_det(sym: Symbol, k: int) -> LogSigned:
    """Direct LogSigned determinant of (d_{j-i})_{i,j=1..k}."""
    if k < 1:
        raise DomainError("k >= 1 required")
    mat = [
        [LogSigned.from_float(sym.d(j - i)) for j in range(k)] for i in range(k)
    ]
    return logdet(mat)


def many_paths_rate(z: Point, h: Point, k_max: int) -> dict:
    """Per-k diagnostics of the Szego limit: (1/k) log D_k against c_0 and
    D_k e^{-k c_0} against the strong Szego constant, plus the parallel
    bound ceiling log d_0."""
    sym = symbol_from_geometry(z, h)
    c = log_coefficients(sym)
    c0 = c[0]
    e_const = strong_szego_constant(sym)
    ks = list(range(1, k_max + 1))
    log_dk = []
    rate = []
    scaled = []
    for k in ks:
        det = toeplitz_det(sym, k)
        if det.sign != 1:
            raise DomainError("Toeplitz determinant lost positivity at k=%d" % k)
        log_dk.append(det.logmag)
        rate.append(det.logmag / k)
        scaled.append(math.exp(det.logmag - k * c0))
    return {
        "k": ks,
        "log_Dk": log_dk,
        "rate": rate,
        "scaled": scaled,
        "c0": c0,
        "strong_szego": e_const,
        "ceiling": math.log(sym.d(0)),
    }


def reconstruct_symbol_residual(sym: Symbol, grid: int = 512) -> float:
    """Pointwise residual of exp(sum c_m s^m) against a(e^{it}); Fourier
    inversion sanity for the log-coefficient pipeline."""
    c = log_coefficients(sym)
    t = 2.0 * np.pi * np.arange(grid) / grid
    log_rec = np.zeros_like(t, dtype=complex)
    for m, cm in c.items():
        log_rec += cm * np.exp(1j * m * t)
    rec = np.exp(log_rec)
    return float(np.max(np.abs(rec - sym.eval_circle(t))))
