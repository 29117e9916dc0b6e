"""Toric test surfaces for localization: P^2 and P^1 x P^1.

Conventions (fixed once, validated by the intersection/character tests):
the defining torus (C*)^2 acts with weight lattice Z^2; at a fixed chart the
two tangent weights are w1, w2 and affine coordinate functions carry -w1, -w2.
A line bundle is linearized so that its global sections are monomials with
representation weight -wt(monomial); the fiber weight at chart c is lin(D, c).
"""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq


@dataclass(frozen=True)
class Chart:
    index: int
    w1: tuple  # tangent weights, integer 2-vectors
    w2: tuple


def _v(a, b):
    return (a, b)


def vadd(a, b):
    return (a[0] + b[0], a[1] + b[1])


def vsub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def vneg(a):
    return (-a[0], -a[1])


def vscale(c, a):
    return (c * a[0], c * a[1])


class ToricSurface:
    """Chart data plus the intersection lattice of divisor classes.

    Divisor classes are integer (or mpq) tuples over the named basis.
    """

    def __init__(self, name, charts, basis_names, pairing, K, chi=1):
        self.name = name
        self.charts = charts
        self.basis_names = basis_names
        self.rank = len(basis_names)
        self.pairing = pairing
        self.K = K
        self.chi = chi  # chi(O_S)

    @property
    def euler(self) -> int:
        return len(self.charts)

    def zero_class(self):
        return (0,) * self.rank

    def pair(self, a, b):
        return sum(mpq(a[i]) * self.pairing[i][j] * mpq(b[j])
                   for i in range(self.rank) for j in range(self.rank))

    def chi_class(self, a):
        """chi(e^a) = chi(O) + a(a - K)/2."""
        val = self.chi + self.pair(a, vsub_n(a, self.K)) / 2
        if val.denominator != 1:
            raise ValueError("non-integral chi for class %s" % (a,))
        return int(val)

    def lin(self, D, chart: Chart):
        """Fiber weight of O(D) at the chart fixed point, linear in D."""
        raise NotImplementedError

    def chi_character(self, D):
        """Equivariant chi(S, O(D)) as {weight 2-vector: multiplicity}."""
        raise NotImplementedError


def vsub_n(a, b):
    return tuple(mpq(x) - mpq(y) for x, y in zip(a, b))


def vadd_n(a, b):
    return tuple(mpq(x) + mpq(y) for x, y in zip(a, b))


def vscale_n(c, a):
    return tuple(mpq(c) * mpq(x) for x in a)


class P2(ToricSurface):
    # z0, z1, z2 with wt(z0)=(0,0), wt(z1)=(1,0), wt(z2)=(0,1)
    WTS = ((0, 0), (1, 0), (0, 1))

    def __init__(self):
        charts = []
        for k in range(3):
            others = [i for i in range(3) if i != k]
            charts.append(Chart(k,
                                vsub(self.WTS[others[0]], self.WTS[k]),
                                vsub(self.WTS[others[1]], self.WTS[k])))
        super().__init__("P2", charts, ("H",), ((1,),), (-3,))

    def lin(self, D, chart: Chart):
        d = mpq(D[0])
        return vscale(-d, self.WTS[chart.index])

    def chi_character(self, D):
        d = mpq(D[0])
        if d.denominator != 1:
            raise ValueError("chi character needs an integral class")
        d = int(d)
        out = {}
        if d >= 0:
            for i in range(d + 1):
                for j in range(d + 1 - i):
                    out[(-i, -j)] = out.get((-i, -j), 0) + 1
        elif d <= -3:
            for i in range(1, -d - 1):
                for j in range(1, -d - i):
                    out[(i, j)] = out.get((i, j), 0) + 1
        return out


def _p1_chi(d, axis):
    """chi(P^1, O(d)) weights along the given axis (0 -> e1, 1 -> e2)."""
    out = {}

    def put(k, m):
        v = (-k, 0) if axis == 0 else (0, -k)
        out[v] = out.get(v, 0) + m

    if d >= 0:
        for k in range(d + 1):
            put(k, 1)
    elif d <= -2:
        for k in range(d + 1, 0):
            put(k, -1)
    return out


class P1xP1(ToricSurface):
    # ([z0:z1],[w0:w1]) with wt(z1)=(1,0), wt(w1)=(0,1)
    def __init__(self):
        charts = []
        idx = 0
        for a in (0, 1):
            for b in (0, 1):
                w1 = (1 - 2 * a, 0)
                w2 = (0, 1 - 2 * b)
                charts.append(Chart(idx, w1, w2))
                idx += 1
        super().__init__("P1xP1", charts, ("F1", "F2"), ((0, 1), (1, 0)), (-2, -2))

    def lin(self, D, chart: Chart):
        d1, d2 = mpq(D[0]), mpq(D[1])
        a = 0 if chart.w1[0] == 1 else 1
        b = 0 if chart.w2[1] == 1 else 1
        return (-d1 * a, -d2 * b)

    def chi_character(self, D):
        d1, d2 = mpq(D[0]), mpq(D[1])
        if d1.denominator != 1 or d2.denominator != 1:
            raise ValueError("chi character needs an integral class")
        c1 = _p1_chi(int(d1), 0)
        c2 = _p1_chi(int(d2), 1)
        out = {}
        for v1, m1 in c1.items():
            for v2, m2 in c2.items():
                v = vadd(v1, v2)
                out[v] = out.get(v, 0) + m1 * m2
        return {v: m for v, m in out.items() if m}


SURFACES = {"P2": P2(), "P1xP1": P1xP1()}
