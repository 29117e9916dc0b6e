from __future__ import annotations

import random

import pytest
from gmpy2 import mpq

from segver.hilbert import hilb_fixed_points, partitions
from segver.pseries import PSeries
from segver.toric import SURFACES, P2, P1xP1

P2S = SURFACES["P2"]
QUAD = SURFACES["P1xP1"]


def spec(v, c):
    """Specialize a weight 2-vector to a rational via (1, c)."""
    return mpq(v[0]) + mpq(c) * mpq(v[1])


def test_lattice_data():
    assert P2S.pair((1,), (1,)) == 1
    assert P2S.pair((1,), P2S.K) == -3
    assert P2S.chi_class((1,)) == 3  # chi(O(1)) on P2
    assert QUAD.pair((1, 0), (0, 1)) == 1
    assert QUAD.pair((1, 0), (1, 0)) == 0
    assert QUAD.chi_class((1, 1)) == 4


def test_chi_character_dimensions():
    for d in range(-6, 7):
        ch = P2S.chi_character((d,))
        total = sum(ch.values())
        assert total == (d + 1) * (d + 2) // 2  # RR on P2, valid all d
    for d1 in range(-4, 5):
        for d2 in range(-4, 5):
            ch = QUAD.chi_character((d1, d2))
            assert sum(ch.values()) == (d1 + 1) * (d2 + 1)


def localization_integral(S, classes, c):
    """Integral of a product of first Chern classes via the chart sum."""
    total = mpq(0)
    for ch in S.charts:
        num = mpq(1)
        for D in classes:
            num *= spec(S.lin(D, ch), c)
        total += num / (spec(ch.w1, c) * spec(ch.w2, c))
    return total


@pytest.mark.parametrize("c", [mpq(5, 7), mpq(-3, 11)])
def test_intersection_numbers_by_localization(c):
    rng = random.Random(1)
    for S in (P2S, QUAD):
        for _ in range(12):
            a = tuple(rng.randint(-3, 3) for _ in range(S.rank))
            b = tuple(rng.randint(-3, 3) for _ in range(S.rank))
            assert localization_integral(S, [a, b], c) == S.pair(a, b)
        assert localization_integral(S, [S.K, S.K], c) == S.pair(S.K, S.K)


def char_to_series(ch, p, q, order=40):
    """Sum of mult * x^(v.(p,q)) as a Laurent polynomial, shifted to be regular."""
    shift = 3 * order
    out = {}
    for v, m in ch.items():
        k = v[0] * p + v[1] * q + shift
        assert 0 <= k < 2 * shift
        out[2 * k] = out.get(2 * k, mpq(0)) + m
    return PSeries("x", out, 4 * shift)


def test_chi_character_against_chart_sum():
    # Sum over charts of e^{lin(D)} / ((1-e^{u1})(1-e^{u2})) must equal the finite
    # chi character; compare as series in a generic 1-parameter specialization
    # e^{v} -> x^{v.(p,q)}.
    p, q = 7, 11
    order = 60
    shift = 3 * order

    def expo(n, trunc):
        # x^n as series with shift, n may be negative
        return PSeries.x_power("x", 2 * (n + shift), trunc + 2 * shift, 1)

    for S, Ds in ((P2S, [(-5,), (-3,), (-1,), (0,), (2,), (4,)]),
                  (QUAD, [(-3, 2), (0, 0), (1, 1), (-2, -2), (3, -4)])):
        for D in Ds:
            trunc = 4 * shift
            total = PSeries.zero("x", trunc)
            for chart in S.charts:
                u1 = -(chart.w1[0] * p + chart.w1[1] * q)
                u2 = -(chart.w2[0] * p + chart.w2[1] * q)
                s = S.lin(D, chart)
                n0 = int(s[0] * p + s[1] * q)
                num = expo(n0, trunc)
                den = PSeries.one("x", trunc)
                for u in (u1, u2):
                    # 1 - x^u; for u < 0 rewrite 1/(1-x^u) = -x^(-u)/(1-x^(-u))
                    if u > 0:
                        den = den * (PSeries.one("x", trunc) -
                                     PSeries.x_power("x", 2 * u, trunc))
                    else:
                        num = num * (-PSeries.x_power("x", 2 * (-u), trunc))
                        den = den * (PSeries.one("x", trunc) - PSeries.x_power("x", 2 * (-u), trunc))
                total = total + num / den
            expect = char_to_series(S.chi_character(D), p, q, order)
            diff = total - expect
            # all coefficients of the difference must vanish well past the shift
            for k, cval in diff.coeffs.items():
                assert k >= 2 * shift + 2 * order, (S.name, D, k, cval)


def test_fixed_point_counts():
    # number of fixed points of S^[n] = q^n coefficient of prod (1-q^m)^(-e(S))
    def gen_count(e, n):
        trunc = 2 * n + 2
        out = PSeries.one("q", trunc)
        for m in range(1, n + 1):
            f = PSeries.one("q", trunc) - PSeries.x_power("q", 2 * m, trunc)
            out = out * f.inverse() ** e
        return out.coeff(2 * n)

    assert len(hilb_fixed_points(P2S, 1)) == 3
    assert len(hilb_fixed_points(P2S, 2)) == 9
    assert len(hilb_fixed_points(QUAD, 1)) == 4
    for n in range(6):
        assert len(hilb_fixed_points(P2S, n)) == gen_count(3, n)
        assert len(hilb_fixed_points(QUAD, n)) == gen_count(4, n)


def test_partitions():
    assert partitions(4) == ((4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1))
