"""Exact coefficient arithmetic: rationals, the two quartic number fields, parameter polynomials.

Rationals are gmpy2.mpq throughout (auto-reduced, positive denominator).  The only
number fields ever needed downstream are Q(i, sqrt2) and Q(i, sqrt3), stored on the
fixed basis {1, i, sqrt(d), i*sqrt(d)}.
"""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

Q = "Q"
QI_SQRT2 = "Q(i,sqrt2)"
QI_SQRT3 = "Q(i,sqrt3)"

_FIELD_D = {QI_SQRT2: 2, QI_SQRT3: 3}

QONE = mpq(1)
QZERO = mpq(0)


def rat(p, q=1) -> mpq:
    return mpq(p, q)


def rat_str(x: mpq) -> str:
    """Serialize as "p/q", or "p" when q = 1."""
    x = mpq(x)
    if x.denominator == 1:
        return str(x.numerator)
    return "%d/%d" % (x.numerator, x.denominator)


def rat_from_str(s: str) -> mpq:
    if "/" in s:
        p, q = s.split("/")
        return mpq(int(p), int(q))
    return mpq(int(s))


class NFElem:
    """Element a + b*i + c*sqrt(d) + e*i*sqrt(d) of Q, Q(i,sqrt2) or Q(i,sqrt3).

    Rational elements may carry field_tag Q and embed into either extension on demand.
    The two proper extensions never mix.
    """

    __slots__ = ("field", "a", "b", "c", "e")

    def __init__(self, field, a, b=0, c=0, e=0):
        self.field = field
        self.a = mpq(a)
        self.b = mpq(b)
        self.c = mpq(c)
        self.e = mpq(e)
        if field == Q and (self.b or self.c or self.e):
            raise ValueError("rational field tag with irrational coordinates")
        if field not in (Q, QI_SQRT2, QI_SQRT3):
            raise ValueError("unknown field tag %r" % (field,))

    # -- coercion ---------------------------------------------------------

    @staticmethod
    def of(x, field=Q) -> "NFElem":
        if isinstance(x, NFElem):
            return x
        return NFElem(field, mpq(x))

    def _join(self, other) -> str:
        if not isinstance(other, NFElem):
            other = NFElem.of(other)
        f1, f2 = self.field, other.field
        if f1 == f2:
            return f1
        if f1 == Q:
            return f2
        if f2 == Q:
            return f1
        raise ValueError("cannot mix %s and %s" % (f1, f2))

    # -- ring structure ---------------------------------------------------

    def __add__(self, other):
        o = NFElem.of(other)
        f = self._join(o)
        return NFElem(f, self.a + o.a, self.b + o.b, self.c + o.c, self.e + o.e)

    __radd__ = __add__

    def __neg__(self):
        return NFElem(self.field, -self.a, -self.b, -self.c, -self.e)

    def __sub__(self, other):
        return self + (-NFElem.of(other))

    def __rsub__(self, other):
        return NFElem.of(other) + (-self)

    def __mul__(self, other):
        o = NFElem.of(other)
        f = self._join(o)
        d = _FIELD_D.get(f, 0)
        a1, b1, c1, e1 = self.a, self.b, self.c, self.e
        a2, b2, c2, e2 = o.a, o.b, o.c, o.e
        # (a1 + b1 i + c1 s + e1 is)(a2 + b2 i + c2 s + e2 is), s^2 = d, i^2 = -1
        a = a1 * a2 - b1 * b2 + d * (c1 * c2 - e1 * e2)
        b = a1 * b2 + b1 * a2 + d * (c1 * e2 + e1 * c2)
        c = a1 * c2 + c1 * a2 - (b1 * e2 + e1 * b2)
        e = a1 * e2 + e1 * a2 + b1 * c2 + c1 * b2
        return NFElem(f, a, b, c, e)

    __rmul__ = __mul__

    def conj_i(self):
        """Galois generator tau: i -> -i."""
        return NFElem(self.field, self.a, -self.b, self.c, -self.e)

    def conj_sqrt(self):
        """Galois generator sigma: sqrt(d) -> -sqrt(d)."""
        return NFElem(self.field, self.a, self.b, -self.c, -self.e)

    def inv(self):
        if self.is_zero():
            raise ZeroDivisionError("inversion of zero number-field element")
        u = self.conj_i()
        v = self.conj_sqrt()
        w = u.conj_sqrt()
        prod = u * v * w
        norm = self * prod
        assert norm.is_rational()
        n = norm.a
        return NFElem(self.field, prod.a / n, prod.b / n, prod.c / n, prod.e / n)

    def __truediv__(self, other):
        o = NFElem.of(other, self.field)
        return self * o.inv()

    def __rtruediv__(self, other):
        return NFElem.of(other, self.field) * self.inv()

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        out = NFElem(self.field, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        o = NFElem.of(other)
        return (self.a, self.b, self.c, self.e) == (o.a, o.b, o.c, o.e)

    def __hash__(self):
        return hash((self.a, self.b, self.c, self.e))

    def __bool__(self):
        return not self.is_zero()

    def is_zero(self) -> bool:
        return not (self.a or self.b or self.c or self.e)

    def is_rational(self) -> bool:
        return not (self.b or self.c or self.e)

    def rational_part(self) -> mpq:
        if not self.is_rational():
            raise ValueError("not rational: %s" % self)
        return self.a

    def __repr__(self):
        return "NFElem(%s; %s, %s, %s, %s)" % (
            self.field, rat_str(self.a), rat_str(self.b), rat_str(self.c), rat_str(self.e))

    # -- serialization ----------------------------------------------------

    def to_json(self):
        return {"field": self.field,
                "coords": [rat_str(self.a), rat_str(self.b), rat_str(self.c), rat_str(self.e)]}

    @staticmethod
    def from_json(obj) -> "NFElem":
        a, b, c, e = (rat_from_str(s) for s in obj["coords"])
        return NFElem(obj["field"], a, b, c, e)


def nf_i(field=QI_SQRT3) -> NFElem:
    return NFElem(field, 0, 1)


def nf_sqrt(field) -> NFElem:
    return NFElem(field, 0, 0, 1)


def root_of_unity(rho: int) -> NFElem:
    """eps_rho = exp(2 pi i / rho) in the smallest supported field."""
    if rho == 1:
        return NFElem(Q, 1)
    if rho == 2:
        return NFElem(Q, -1)
    if rho == 3:
        return NFElem(QI_SQRT3, mpq(-1, 2), 0, 0, mpq(1, 2))
    if rho == 4:
        return NFElem(QI_SQRT2, 0, 1)
    raise ValueError("unsupported rank %d (need rho in 1..4)" % rho)


@dataclass(frozen=True)
class ParamPoly:
    """Polynomial in the formal rank parameter (s or r) with rational coefficients.

    Evaluation at an integer (or rational) parameter value is a ring morphism to mpq.
    """

    coeffs: tuple  # ascending, no trailing zeros

    @staticmethod
    def of(x) -> "ParamPoly":
        if isinstance(x, ParamPoly):
            return x
        x = mpq(x)
        return ParamPoly((x,) if x else ())

    @staticmethod
    def var() -> "ParamPoly":
        return ParamPoly((mpq(0), mpq(1)))

    @staticmethod
    def _trim(cs) -> "ParamPoly":
        n = len(cs)
        while n and not cs[n - 1]:
            n -= 1
        return ParamPoly(tuple(cs[:n]))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __add__(self, other):
        o = ParamPoly.of(other)
        n = max(len(self.coeffs), len(o.coeffs))
        cs = [mpq(0)] * n
        for i, c in enumerate(self.coeffs):
            cs[i] += c
        for i, c in enumerate(o.coeffs):
            cs[i] += c
        return ParamPoly._trim(cs)

    __radd__ = __add__

    def __neg__(self):
        return ParamPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-ParamPoly.of(other))

    def __rsub__(self, other):
        return ParamPoly.of(other) + (-self)

    def __mul__(self, other):
        o = ParamPoly.of(other)
        if not self.coeffs or not o.coeffs:
            return ParamPoly(())
        cs = [mpq(0)] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(o.coeffs):
                cs[i + j] += a * b
        return ParamPoly._trim(cs)

    __rmul__ = __mul__

    def __truediv__(self, other):
        # scalar division only
        o = mpq(other)
        return ParamPoly(tuple(c / o for c in self.coeffs))

    def __eq__(self, other):
        return self.coeffs == ParamPoly.of(other).coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __call__(self, value) -> mpq:
        v = mpq(value)
        out = mpq(0)
        for c in reversed(self.coeffs):
            out = out * v + c
        return out

    def is_zero(self) -> bool:
        return not self.coeffs

    def __repr__(self):
        if not self.coeffs:
            return "ParamPoly(0)"
        return "ParamPoly(%s)" % " + ".join(
            "%s*s^%d" % (rat_str(c), i) for i, c in enumerate(self.coeffs) if c)
