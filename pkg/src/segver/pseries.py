"""Truncated formal power series on a half-integer exponent grid, and iterated
truncated Laurent series in the localization variables t_1..t_m.

A PSeries in variable v is stored in the half-step variable x = v^(1/2): exponent k
stands for v^(k/2).  `trunc` is exclusive (coefficients known for k < trunc).
Coefficient ring is duck-typed: gmpy2.mpq, NFElem, or ParamPoly.
"""

from __future__ import annotations

import math

from gmpy2 import mpq

from .rings import NFElem, ParamPoly


def c_zero_p(c) -> bool:
    if isinstance(c, (NFElem, ParamPoly)):
        return c.is_zero()
    return not c


def c_inv(c):
    if isinstance(c, NFElem):
        return c.inv()
    if isinstance(c, ParamPoly):
        if c.degree == 0:
            return ParamPoly.of(1 / c.coeffs[0])
        raise ZeroDivisionError("non-constant ParamPoly leading coefficient")
    return 1 / mpq(c)


def binom_general(e, k: int):
    """Binomial coefficient with arbitrary (rational or ParamPoly) top argument."""
    num = 1
    for i in range(k):
        num = num * (e - i)
    return num * mpq(1, math.factorial(k))


class PSeries:
    __slots__ = ("var", "trunc", "coeffs")

    def __init__(self, var: str, coeffs: dict, trunc: int):
        self.var = var
        self.trunc = trunc
        self.coeffs = {k: c for k, c in coeffs.items() if k < trunc and not c_zero_p(c)}

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(var: str, trunc: int) -> "PSeries":
        return PSeries(var, {}, trunc)

    @staticmethod
    def const(var: str, c, trunc: int) -> "PSeries":
        return PSeries(var, {0: mpq(c) if isinstance(c, int) else c}, trunc)

    @staticmethod
    def one(var: str, trunc: int) -> "PSeries":
        return PSeries.const(var, 1, trunc)

    @staticmethod
    def x_power(var: str, k: int, trunc: int, c=1) -> "PSeries":
        return PSeries(var, {k: mpq(c) if isinstance(c, int) else c}, trunc)

    # -- inspection ----------------------------------------------------------

    def coeff(self, k: int):
        if k >= self.trunc:
            raise ValueError("coefficient x^%d beyond truncation %d" % (k, self.trunc))
        return self.coeffs.get(k, mpq(0))

    def valuation(self) -> int:
        if not self.coeffs:
            return self.trunc
        return min(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def support_even(self) -> bool:
        return all(k % 2 == 0 for k in self.coeffs)

    def __repr__(self):
        items = sorted(self.coeffs.items())[:8]
        body = " + ".join("(%s)*%s^(%s/2)" % (c, self.var, k) for k, c in items)
        return "PSeries[%s; O(%d/2)]{%s%s}" % (
            self.var, self.trunc, body, " + ..." if len(self.coeffs) > 8 else "")

    def __eq__(self, other):
        if not isinstance(other, PSeries):
            return NotImplemented
        t = min(self.trunc, other.trunc)
        ks = {k for k in self.coeffs if k < t} | {k for k in other.coeffs if k < t}
        for k in ks:
            if not c_zero_p(self.coeffs.get(k, mpq(0)) - other.coeffs.get(k, mpq(0))):
                return False
        return True

    # -- ring ops ------------------------------------------------------------

    def _chk(self, other: "PSeries"):
        if self.var != other.var:
            raise ValueError("variable mismatch: %s vs %s" % (self.var, other.var))

    def __add__(self, other):
        if not isinstance(other, PSeries):
            other = PSeries.const(self.var, other, self.trunc)
        self._chk(other)
        t = min(self.trunc, other.trunc)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, mpq(0)) + c
        return PSeries(self.var, out, t)

    __radd__ = __add__

    def __neg__(self):
        return PSeries(self.var, {k: -c for k, c in self.coeffs.items()}, self.trunc)

    def __sub__(self, other):
        if not isinstance(other, PSeries):
            other = PSeries.const(self.var, other, self.trunc)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PSeries):
            return PSeries(self.var, {k: c * other for k, c in self.coeffs.items()},
                           self.trunc)
        self._chk(other)
        t = min(self.trunc + other.valuation(), other.trunc + self.valuation())
        out = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                k = k1 + k2
                if k < t:
                    out[k] = out.get(k, mpq(0)) + c1 * c2
        return PSeries(self.var, out, t)

    __rmul__ = __mul__

    def inverse(self) -> "PSeries":
        v = self.valuation()
        if v >= self.trunc:
            raise ZeroDivisionError("inverting zero series")
        n = self.trunc - v
        lead = c_inv(self.coeffs[v])
        u = {k - v: c for k, c in self.coeffs.items()}  # unit part
        inv = {0: lead}
        for k in range(1, n):
            acc = mpq(0)
            for j, c in u.items():
                if 0 < j <= k and (k - j) in inv:
                    acc = acc + c * inv[k - j]
            if not c_zero_p(acc):
                inv[k] = -lead * acc
        return PSeries(self.var, {k - v: c for k, c in inv.items()}, n - v)

    def __truediv__(self, other):
        if not isinstance(other, PSeries):
            return self * c_inv(mpq(other) if isinstance(other, int) else other)
        self._chk(other)
        if self.valuation() < other.valuation():
            raise ValueError("division would produce negative exponents")
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e):
        if isinstance(e, int):
            if e < 0:
                return self.inverse() ** (-e)
            out = PSeries.one(self.var, self.trunc + self.valuation() * max(e - 1, 0))
            b = self
            while e:
                if e & 1:
                    out = out * b
                b = b * b
                e >>= 1
            return out.truncate(out.trunc)
        return self.pow_general(e)

    def pow_general(self, e) -> "PSeries":
        """(1 + h)^e for rational or ParamPoly exponent; requires constant term 1."""
        if isinstance(e, int):
            return self ** e
        if not isinstance(e, ParamPoly):
            e = mpq(e)
            if e.denominator == 1:
                return self ** int(e)
        if not c_zero_p(self.coeffs.get(0, mpq(0)) - 1):
            raise ValueError("fractional power needs constant term 1")
        h = self - 1
        v = h.valuation()
        out = PSeries.one(self.var, self.trunc)
        hp = PSeries.one(self.var, self.trunc)
        kmax = (self.trunc - 1) // max(v, 1) if v < self.trunc else 0
        for k in range(1, kmax + 1):
            hp = hp * h
            out = out + hp * binom_general(e, k)
        return out

    def sqrt_half(self) -> "PSeries":
        """Square root, branch fixed by a positive rational leading coefficient.

        The leading term must be a rational square c^2 * x^(2m); the root starts c*x^m.
        """
        v = self.valuation()
        if v % 2:
            raise ValueError("odd valuation has no root on the half-step grid")
        lead = mpq(self.coeffs[v]) if not isinstance(self.coeffs[v], (NFElem, ParamPoly)) \
            else None
        if lead is None:
            raise ValueError("square root implemented over rationals only")
        rn, rd = math.isqrt(lead.numerator), math.isqrt(lead.denominator)
        if rn * rn != lead.numerator or rd * rd != lead.denominator:
            raise ValueError("leading coefficient %s is not a rational square" % lead)
        a = mpq(rn, rd)
        u = PSeries(self.var, {k - v: c / lead for k, c in self.coeffs.items()},
                    self.trunc - v)
        return PSeries.x_power(self.var, v // 2, self.trunc - v // 2, a) * \
            u.pow_general(mpq(1, 2))

    # -- structural ops ------------------------------------------------------

    def truncate(self, trunc: int) -> "PSeries":
        return PSeries(self.var, self.coeffs, min(self.trunc, trunc))

    def pad(self, trunc: int) -> "PSeries":
        """Declare coefficients up to `trunc` (absent ones zero).  Newton seeds only."""
        return PSeries(self.var, self.coeffs, max(self.trunc, trunc))

    def shift(self, k: int) -> "PSeries":
        return PSeries(self.var, {j + k: c for j, c in self.coeffs.items()},
                       self.trunc + k)

    def map_coeffs(self, f, var=None) -> "PSeries":
        return PSeries(var or self.var, {k: f(c) for k, c in self.coeffs.items()},
                       self.trunc)

    def rename(self, var: str) -> "PSeries":
        return PSeries(var, self.coeffs, self.trunc)

    def subst_neg(self) -> "PSeries":
        """Half-step sign flip x -> -x (i.e. v^(1/2) -> -v^(1/2))."""
        return PSeries(self.var,
                       {k: (c if k % 2 == 0 else -c) for k, c in self.coeffs.items()},
                       self.trunc)

    def compose(self, g: "PSeries") -> "PSeries":
        """Substitute the half-step variable: (f.compose(g))(x) = f(g(x))."""
        if g.is_zero():
            return PSeries.const(g.var, self.coeffs.get(0, mpq(0)), g.trunc)
        vg = g.valuation()
        if vg <= 0:
            raise ValueError("composition target must have zero constant term")
        t = min(self.trunc * vg, g.trunc)
        out = PSeries.zero(g.var, t)
        gp = PSeries.one(g.var, t)
        last = 0
        for k in sorted(self.coeffs):
            if k * vg >= t:
                break
            for _ in range(k - last):
                gp = gp * g
            last = k
            out = out + gp * self.coeffs[k]
        return PSeries(g.var, out.coeffs, t)

    def compose_z(self, g: "PSeries") -> "PSeries":
        """Substitute the whole-step (nominal) variable by g.

        Half-step terms of self require g to admit the canonical square root
        (positive rational leading coefficient).
        """
        if not self.support_even():
            return self.compose(g.sqrt_half())
        f1 = PSeries(self.var, {k // 2: c for k, c in self.coeffs.items()},
                     (self.trunc + 1) // 2)
        out = f1.compose(g)
        return out

    def reverse(self) -> "PSeries":
        """Compositional inverse on the whole-step grid: f(g(v)) = v.

        Requires even support, zero constant term, invertible linear coefficient.
        """
        if not self.support_even():
            raise ValueError("reversion implemented on the whole-step grid only")
        if self.coeffs.get(0):
            raise ValueError("reversion needs zero constant term")
        c1 = self.coeffs.get(2)
        if c1 is None or c_zero_p(c1):
            raise ValueError("reversion needs invertible linear coefficient")
        n = (self.trunc + 1) // 2  # whole steps known (exclusive)
        a = {k // 2: c for k, c in self.coeffs.items()}
        inv1 = c_inv(c1)
        b = {1: inv1}
        for m in range(2, n):
            # coefficient of v^m in sum_k a_k g^k must vanish (g = current b)
            acc = mpq(0)
            cur = dict(b)  # g^1
            for k in range(2, m + 1):
                nxt = {}
                for i, ci in cur.items():
                    if i >= m:
                        continue
                    for j, cj in b.items():
                        if i + j <= m:
                            nxt[i + j] = nxt.get(i + j, mpq(0)) + ci * cj
                cur = nxt
                ak = a.get(k)
                if ak is not None and m in cur:
                    acc = acc + ak * cur[m]
            b[m] = -inv1 * acc
        return PSeries(self.var, {2 * k: c for k, c in b.items()}, 2 * n - 1)

    def exp(self) -> "PSeries":
        if self.coeffs.get(0):
            raise ValueError("exp needs zero constant term")
        v = self.valuation()
        out = PSeries.one(self.var, self.trunc)
        term = PSeries.one(self.var, self.trunc)
        kmax = (self.trunc - 1) // max(v, 1) if v < self.trunc else 0
        for k in range(1, kmax + 1):
            term = term * self * mpq(1, k)
            out = out + term
        return out

    def log(self) -> "PSeries":
        if not c_zero_p(self.coeffs.get(0, mpq(0)) - 1):
            raise ValueError("log needs constant term 1")
        h = self - 1
        v = h.valuation()
        out = PSeries.zero(self.var, self.trunc)
        term = PSeries.one(self.var, self.trunc)
        kmax = (self.trunc - 1) // max(v, 1) if v < self.trunc else 0
        for k in range(1, kmax + 1):
            term = term * h
            out = out + term * mpq((-1) ** (k - 1), k)
        return out

    def eval_param(self, value) -> "PSeries":
        """Evaluate ParamPoly coefficients at a parameter value."""
        return self.map_coeffs(
            lambda c: c(value) if isinstance(c, ParamPoly) else mpq(c))


def newton_solve(poly, seed: PSeries, order: int) -> PSeries:
    """Series root of P(y) = sum_k poly[k] * y^k with P(seed) = 0 to seed accuracy.

    Lifts the seed by Newton iteration to `order` half-steps.  The root must be
    simple at seed accuracy (P'(seed) of strictly smaller valuation than P(seed)).
    """
    var = seed.var
    poly = [p.truncate(order) if isinstance(p, PSeries) else
            PSeries.const(var, mpq(p) if isinstance(p, int) else p, order)
            for p in poly]

    def peval(cs, y):
        out = PSeries.zero(var, order)
        for c in reversed(cs):
            out = out * y + c
        return out

    dpoly = [poly[k] * k for k in range(1, len(poly))]
    x = seed.truncate(order).pad(order)
    res = peval(poly, x)
    dres = peval(dpoly, x)
    if dres.is_zero():
        raise ValueError("non-simple root: derivative vanishes to working order")
    if res.valuation() <= dres.valuation():
        raise ValueError("seed residual x^%d does not beat derivative valuation x^%d"
                         % (res.valuation(), dres.valuation()))
    guard = 0
    while res.valuation() < order:
        if dres.valuation() >= res.valuation():
            raise ValueError("non-simple root: derivative valuation %d >= residual %d"
                             % (dres.valuation(), res.valuation()))
        x = (x - res / dres).truncate(order)
        res = peval(poly, x)
        dres = peval(dpoly, x)
        guard += 1
        if guard > order + 4:
            raise ValueError("Newton iteration failed to converge")
    return x


# ---------------------------------------------------------------------------
# Iterated truncated Laurent series in t_1..t_m
# ---------------------------------------------------------------------------

class TLaurent:
    """Truncated Laurent data in t_1..t_m with per-variable completeness bounds.

    Monomials are integer tuples.  lo[v]: no true term lies below lo[v] in variable v.
    hi[v] (inclusive): stored coefficients are exact for exponents <= hi[v].
    Expansion convention: 1/(linear form) expands with the highest-index variable
    treated as smallest (set to 0 first), so a form's leading term is its
    lowest-index variable.
    """

    __slots__ = ("m", "coeffs", "lo", "hi")

    def __init__(self, m: int, coeffs: dict, lo, hi):
        self.m = m
        self.lo = tuple(lo)
        self.hi = tuple(hi)
        self.coeffs = {mon: c for mon, c in coeffs.items()
                       if not c_zero_p(c) and all(
                           self.lo[v] <= mon[v] <= self.hi[v] for v in range(m))}

    @staticmethod
    def const(m: int, c, hi) -> "TLaurent":
        z = (0,) * m
        return TLaurent(m, {z: mpq(c) if isinstance(c, int) else c}, z, hi)

    def __add__(self, other: "TLaurent"):
        lo = tuple(min(a, b) for a, b in zip(self.lo, other.lo))
        hi = tuple(min(a, b) for a, b in zip(self.hi, other.hi))
        out = dict(self.coeffs)
        for mon, c in other.coeffs.items():
            out[mon] = out.get(mon, mpq(0)) + c
        return TLaurent(self.m, out, lo, hi)

    def __neg__(self):
        return TLaurent(self.m, {k: -c for k, c in self.coeffs.items()},
                        self.lo, self.hi)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "TLaurent":
        return TLaurent(self.m, {k: v * c for k, v in self.coeffs.items()},
                        self.lo, self.hi)

    def __mul__(self, other: "TLaurent"):
        lo = tuple(a + b for a, b in zip(self.lo, other.lo))
        # coefficient at m is complete iff m <= hi_A + lo_B and m <= hi_B + lo_A
        hi = tuple(min(sh + ol, oh + sl) for sh, sl, oh, ol in
                   zip(self.hi, self.lo, other.hi, other.lo))
        out = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                mon = tuple(a + b for a, b in zip(m1, m2))
                ok = True
                for v in range(self.m):
                    if mon[v] > hi[v]:
                        ok = False
                        break
                if ok:
                    out[mon] = out.get(mon, mpq(0)) + c1 * c2
        return TLaurent(self.m, out, lo, hi)

    def shift(self, mon) -> "TLaurent":
        return TLaurent(self.m,
                        {tuple(a + b for a, b in zip(k, mon)): c
                         for k, c in self.coeffs.items()},
                        tuple(a + b for a, b in zip(self.lo, mon)),
                        tuple(a + b for a, b in zip(self.hi, mon)))

    def coeff(self, mon):
        mon = tuple(mon)
        if any(mon[v] > self.hi[v] for v in range(self.m)):
            raise ValueError("coefficient %s beyond completeness bound %s"
                             % (mon, self.hi))
        return self.coeffs.get(mon, mpq(0))

    def coeff_t0(self):
        """Coeff_{t_1^0} ... Coeff_{t_m^0} under the fixed expansion convention."""
        return self.coeff((0,) * self.m)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __repr__(self):
        items = sorted(self.coeffs.items())[:6]
        return "TLaurent{%s%s; lo=%s hi=%s}" % (
            ", ".join("t^%s: %s" % (k, c) for k, c in items),
            ", ..." if len(self.coeffs) > 6 else "", self.lo, self.hi)


INF_HI = 1 << 30  # completeness sentinel for exact (polynomial) objects


def tl_from_linear(m: int, form, hi=None) -> TLaurent:
    """Linear form sum_v form[v] * t_v as a TLaurent (form: coefficient list)."""
    hi = hi or (INF_HI,) * m
    coeffs = {}
    for v in range(m):
        if form[v]:
            mon = tuple(1 if i == v else 0 for i in range(m))
            coeffs[mon] = mpq(form[v])
    return TLaurent(m, coeffs, (0,) * m, hi)


def tl_inv_linear(m: int, form, hi) -> TLaurent:
    """1 / (sum form[v] t_v) expanded per the convention (lowest index leads).

    hi must be finite in every variable above the leading one; the true lower
    bound of the leading variable on this window is -1 - sum of the others' caps.
    """
    lead = next((v for v in range(m) if form[v]), None)
    if lead is None:
        raise ZeroDivisionError("inverting the zero linear form")
    cl = mpq(form[lead])
    rest = [(v, mpq(form[v]) / cl) for v in range(lead + 1, m) if form[v]]
    lo = [0] * m
    lo[lead] = -1 - sum(hi[v] for v, _ in rest)
    base = tuple(-1 if i == lead else 0 for i in range(m))
    out = {base: 1 / cl}
    frontier = dict(out)
    while frontier:
        nxt = {}
        for mon, c in frontier.items():
            for v, cv in rest:
                mm = list(mon)
                mm[lead] -= 1
                mm[v] += 1
                mm = tuple(mm)
                if mm[v] > hi[v]:
                    continue
                nxt[mm] = nxt.get(mm, mpq(0)) - c * cv
        for mon, c in nxt.items():
            out[mon] = out.get(mon, mpq(0)) + c
        frontier = nxt
    return TLaurent(m, out, tuple(lo), tuple(hi))


def tl_pow_linear(m: int, form, e: int, hi) -> TLaurent:
    """(sum form[v] t_v)^e for integer e of either sign."""
    if e == 0:
        return TLaurent.const(m, 1, (INF_HI,) * m)
    if e > 0:
        base = tl_from_linear(m, form)
        res = base
        for _ in range(e - 1):
            res = res * base
        return res
    inv = tl_inv_linear(m, form, hi)
    res = inv
    for _ in range(-e - 1):
        res = res * inv
    return res


def tl_exp(x: TLaurent, hi) -> TLaurent:
    """exp of a TLaurent all of whose terms have positive total degree."""
    if any(v < 0 for v in x.lo) or (0,) * x.m in x.coeffs:
        raise ValueError("tl_exp needs strictly positive-degree input")
    hi = tuple(min(a, b) for a, b in zip(x.hi, hi))
    x = TLaurent(x.m, x.coeffs, x.lo, hi)
    out = TLaurent.const(x.m, 1, hi)
    term = TLaurent.const(x.m, 1, hi)
    for k in range(1, sum(hi) + 2):
        term = term * x
        if term.is_zero():
            break
        out = out + term.scale(mpq(1, k))
    return out


def tl_pow_one_plus(x: TLaurent, e, hi) -> TLaurent:
    """(1 + x)^e for integer, rational or ParamPoly e; x of positive total degree."""
    if any(v < 0 for v in x.lo) or (0,) * x.m in x.coeffs:
        raise ValueError("tl_pow_one_plus needs strictly positive-degree input")
    hi = tuple(min(a, b) for a, b in zip(x.hi, hi))
    x = TLaurent(x.m, x.coeffs, x.lo, hi)
    out = TLaurent.const(x.m, 1, hi)
    term = TLaurent.const(x.m, 1, hi)
    ee = e if isinstance(e, ParamPoly) else mpq(e)
    for k in range(1, sum(hi) + 2):
        term = term * x
        if term.is_zero():
            break
        out = out + term.scale(binom_general(ee, k))
    return out
