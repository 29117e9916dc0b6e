"""Fixed-point combinatorics for Hilbert schemes of points on toric surfaces.

A torus-fixed point of S^[n] is an assignment of one partition per chart with
total size n; a fixed point of a product S^[n_1] x ... x S^[n_rho] is a tuple
of such assignments.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product


@lru_cache(maxsize=None)
def partitions(n: int):
    """All partitions of n as weakly decreasing tuples."""
    if n == 0:
        return ((),)
    out = []

    def rec(rest, maxpart, acc):
        if rest == 0:
            out.append(tuple(acc))
            return
        for p in range(min(rest, maxpart), 0, -1):
            acc.append(p)
            rec(rest - p, p, acc)
            acc.pop()

    rec(n, n, [])
    return tuple(out)


def boxes(lam) -> list:
    """Boxes (i, j) of a partition: i indexes the part, 0 <= j < lam[i]."""
    return [(i, j) for i, part in enumerate(lam) for j in range(part)]


@lru_cache(maxsize=None)
def chart_assignments(n: int, ncharts: int):
    """All ways to put partitions of total size n on ncharts charts."""
    if ncharts == 1:
        return tuple((lam,) for lam in partitions(n))
    out = []
    for k in range(n + 1):
        for lam in partitions(k):
            for rest in chart_assignments(n - k, ncharts - 1):
                out.append((lam,) + rest)
    return tuple(out)


def hilb_fixed_points(surface, n: int):
    """Fixed points of S^[n]: tuples of per-chart partitions."""
    return chart_assignments(n, surface.euler)


def product_fixed_points(surface, nvec):
    """Fixed points of S^[n_1] x ... x S^[n_rho] as tuples of assignments."""
    pools = [hilb_fixed_points(surface, n) for n in nvec]
    return product(*pools)


def compositions(total: int, parts: int):
    """All ordered tuples of `parts` non-negative integers summing to total."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest
