from __future__ import annotations

import random

import pytest
from gmpy2 import mpq

from segver.rings import (NFElem, ParamPoly, Q, QI_SQRT2, QI_SQRT3, nf_i, nf_sqrt,
                          rat_from_str, rat_str, root_of_unity)


def rand_nf(rng, field):
    return NFElem(field, mpq(rng.randint(-9, 9), rng.randint(1, 7)),
                  mpq(rng.randint(-9, 9), rng.randint(1, 7)),
                  mpq(rng.randint(-9, 9), rng.randint(1, 7)),
                  mpq(rng.randint(-9, 9), rng.randint(1, 7)))


def test_rat_serialization():
    assert rat_str(mpq(3, 6)) == "1/2"
    assert rat_str(mpq(-4, 2)) == "-2"
    assert rat_from_str("-7/3") == mpq(-7, 3)
    assert rat_from_str("5") == 5


def test_defining_relations():
    i = nf_i(QI_SQRT2)
    assert i * i == NFElem(QI_SQRT2, -1)
    s2 = nf_sqrt(QI_SQRT2)
    assert (1 + s2) * (1 - s2) == NFElem(QI_SQRT2, -1)
    e3 = root_of_unity(3)
    assert e3 + e3 * e3 == NFElem(QI_SQRT3, -1)


def test_roots_of_unity():
    assert root_of_unity(1) == NFElem(Q, 1)
    assert root_of_unity(2) == NFElem(Q, -1)
    assert root_of_unity(4) == nf_i(QI_SQRT2)
    for rho in (1, 2, 3, 4):
        e = root_of_unity(rho)
        assert e ** rho == NFElem(Q, 1)
        for k in range(1, rho):
            assert e ** k != NFElem(Q, 1)
    with pytest.raises(ValueError):
        root_of_unity(5)


def test_field_axioms_random():
    rng = random.Random(7)
    for field in (QI_SQRT2, QI_SQRT3):
        for _ in range(25):
            a, b, c = (rand_nf(rng, field) for _ in range(3))
            assert a * (b + c) == a * b + a * c
            assert (a * b) * c == a * (b * c)
            assert a * b == b * a
            if not a.is_zero():
                assert a * a.inv() == NFElem(field, 1)


def test_galois_involutions():
    rng = random.Random(11)
    for field in (QI_SQRT2, QI_SQRT3):
        for _ in range(20):
            x = rand_nf(rng, field)
            assert x.conj_i().conj_i() == x
            assert x.conj_sqrt().conj_sqrt() == x
            assert x.conj_i().conj_sqrt() == x.conj_sqrt().conj_i()
            fixed = x.conj_i() == x and x.conj_sqrt() == x
            assert fixed == x.is_rational()


def test_field_mixing_rules():
    a = NFElem(QI_SQRT2, 1, 1)
    b = NFElem(QI_SQRT3, 1, 0, 1)
    with pytest.raises(ValueError):
        a * b
    assert NFElem(Q, 2) * a == a + a


def test_inv_of_zero():
    with pytest.raises(ZeroDivisionError):
        NFElem(QI_SQRT2, 0).inv()


def test_nf_json_roundtrip():
    x = NFElem(QI_SQRT3, mpq(1, 2), mpq(-3), 0, mpq(7, 5))
    assert NFElem.from_json(x.to_json()) == x


def test_parampoly():
    s = ParamPoly.var()
    p = (s - 1) * (s - 2)
    assert p(1) == 0 and p(2) == 0 and p(3) == 2
    assert (p * p)(5) == p(5) ** 2
    assert (p - p).is_zero()
    q = 2 - s
    assert (p + q)(7) == p(7) + q(7)
    assert p.degree == 2
