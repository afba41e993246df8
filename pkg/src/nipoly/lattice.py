"""Lattice geometry, k-point predicates, and exact path counting.

Points are (x1, x2) integer pairs with x1 pointing east and x2 north; a
path moves by unit east/north steps.  Brute-force enumeration of
non-intersecting k-tuples is the universal small-instance oracle against
which the determinantal routes are checked.
"""

from __future__ import annotations

from typing import Iterator, Sequence

from .errors import DomainError, EnumerationCapError
from .logspace import LogSigned, logdet
from .special import log_binomial, log_superfactorial

Point = tuple[int, int]
KPoint = tuple[Point, ...]
KPath = tuple[tuple[Point, ...], ...]


def leq(x: Point, y: Point) -> bool:
    """Partial order: x <= y iff both coordinates are <=; equivalent to the
    existence of a single path from x to y."""
    return x[0] <= y[0] and x[1] <= y[1]


def is_nice(v: KPoint) -> bool:
    """True iff each successive point is strictly north and strictly west of
    the previous one, or exactly one unit north of it."""
    for a, b in zip(v, v[1:]):
        strictly_nw = b[1] > a[1] and b[0] < a[0]
        one_up = b == (a[0], a[1] + 1)
        if not (strictly_nw or one_up):
            return False
    return True


def stack_up(x: Point, k: int) -> KPoint:
    """((x), (x + e2), ..., (x + (k-1) e2))."""
    if k < 1:
        raise DomainError("stack size must be >= 1")
    return tuple((x[0], x[1] + i) for i in range(k))


def stack_down(x: Point, k: int) -> KPoint:
    """Stack ending at x: ((x - (k-1) e2), ..., x); the i-th point pairs with
    the i-th point of a stack_up start in a rectangle configuration."""
    if k < 1:
        raise DomainError("stack size must be >= 1")
    return tuple((x[0], x[1] - (k - 1) + i) for i in range(k))


def stack_diag(x: Point, k: int) -> KPoint:
    """((x), (x - e1 + e2), ..., x + (k-1)(-e1 + e2)): the diagonal k-point."""
    if k < 1:
        raise DomainError("stack size must be >= 1")
    return tuple((x[0] - i, x[1] + i) for i in range(k))


def translate(v: KPoint, a: Point) -> KPoint:
    return tuple((p[0] + a[0], p[1] + a[1]) for p in v)


def paths_between(x: Point, y: Point) -> Iterator[tuple[Point, ...]]:
    """All single paths from x to y, east steps before north steps, in
    lexicographic order of the step sequence."""
    if not leq(x, y):
        return
    path = [x]

    def rec(cur: Point):
        if cur == y:
            yield tuple(path)
            return
        if cur[0] < y[0]:  # east first
            nxt = (cur[0] + 1, cur[1])
            path.append(nxt)
            yield from rec(nxt)
            path.pop()
        if cur[1] < y[1]:
            nxt = (cur[0], cur[1] + 1)
            path.append(nxt)
            yield from rec(nxt)
            path.pop()

    yield from rec(x)


def count_paths(x: Point, y: Point) -> LogSigned:
    """log C(dx + dy, dx); zero when y is not reachable from x."""
    dx, dy = y[0] - x[0], y[1] - x[1]
    if dx < 0 or dy < 0:
        return LogSigned.zero()
    return log_binomial(dx + dy, dx)


def enumerate_kpaths(xs: KPoint, ys: KPoint, cap: int = 100000) -> list[KPath]:
    """Complete list of non-intersecting k-tuples of paths, component i from
    xs[i] to ys[i], in deterministic lexicographic order.

    Raises EnumerationCapError as soon as the output would exceed cap;
    never silently truncates.
    """
    k = len(xs)
    if k != len(ys):
        raise DomainError("start and end k-points must have equal length")
    results: list[KPath] = []
    chosen: list[tuple[Point, ...]] = []
    occupied: set[Point] = set()

    def rec(i: int):
        if i == k:
            if len(results) >= cap:
                raise EnumerationCapError(
                    "enumeration exceeds cap=%d k-paths" % cap
                )
            results.append(tuple(chosen))
            return
        for path in paths_between(xs[i], ys[i]):
            pset = set(path)
            if pset & occupied:
                continue
            chosen.append(path)
            occupied.update(pset)
            rec(i + 1)
            occupied.difference_update(pset)
            chosen.pop()

    rec(0)
    return results


def kpath_is_disjoint(path: KPath) -> bool:
    seen: set[Point] = set()
    for comp in path:
        pset = set(comp)
        if pset & seen:
            return False
        seen.update(pset)
    return True


def rectangle_endpoints(n: int, m: int, k: int) -> tuple[KPoint, KPoint]:
    """Stacked endpoints of the k-path family on an n-wide, m-tall rectangle:
    starts stack_up((1,1), k), ends stack_down((n,m), k)."""
    if not 1 <= k <= min(n, m):
        raise DomainError("need 1 <= k <= min(n, m)")
    return stack_up((1, 1), k), stack_down((n, m), k)


def macmahon_log_count(n: int, m: int, k: int) -> float:
    """log of the number of k-paths across an n x m rectangle:
    H(m+n-k) H(k) H(m-k) H(n-k) / (H(m) H(n) H(m+n-2k))."""
    if not 1 <= k <= min(n, m):
        raise DomainError("need 1 <= k <= min(n, m)")
    H = log_superfactorial
    return (
        H(m + n - k) + H(k) + H(m - k) + H(n - k) - H(m) - H(n) - H(m + n - 2 * k)
    )


def krattenthaler_log_rhs(k: int, a: int, b: int) -> float:
    """log of the triple product prod_{r<=k, s<=a, t<=b} (r+s+t-1)/(r+s+t-2)."""
    import math

    total = 0.0
    for r in range(1, k + 1):
        for s in range(1, a + 1):
            for t in range(1, b + 1):
                total += math.log(r + s + t - 1.0) - math.log(r + s + t - 2.0)
    return total


def krattenthaler_check(k: int, a: int, b: int) -> bool:
    """det C(a+b, a+j-i) against the triple-product identity, in log space."""
    if max(k, a, b) > 8:
        raise DomainError("desk-scale check: k, a, b <= 8")
    mat = [[log_binomial(a + b, a + j - i) for j in range(k)] for i in range(k)]
    det = logdet(mat)
    if det.sign != 1:
        return False
    return abs(det.logmag - krattenthaler_log_rhs(k, a, b)) < 1e-9


def kpoint_sorted_by_height(v: KPoint) -> bool:
    return all(a[1] < b[1] for a, b in zip(v, v[1:]))


def path_weight_sites(path: Sequence[Point], include_start: bool) -> list[Point]:
    sites = list(path)
    return sites if include_start else sites[1:]
