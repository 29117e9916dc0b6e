"""Shared scaffolding for Mochizuki-style sums: the rational T_i forms, the
reduced perturbative normalization, and virtual-dimension bookkeeping.

Conventions: t-variables are t_1..t_{rho-1}; T_i = -t_i + sum_{j<i} t_j/(rho-j)
for i < rho and T_rho = sum_{j<rho} t_j/(rho-j); sum_i T_i = 0.

The "reduced" Pert drops the factors that cancel between Psi-tilde(a, n, t) and
Psi-tilde(a, 0, t) inside Z_S: the pure t-monomial prefactor and the
1/(T_j - T_i)^{chi(a_j)} product.  What remains is
  prod_{i<j} (T_j-T_i)^{chi(a_j-a_i)} (T_i-T_j)^{chi(a_i-a_j)} * (P-part at n=0),
with the P-part flavor-specific (Segre / Verlinde).
"""

from __future__ import annotations

from gmpy2 import mpq

from .pseries import (TLaurent, tl_exp, tl_from_linear, tl_pow_linear,
                      tl_pow_one_plus)


def t_forms(rho: int):
    """T_1..T_rho as coefficient vectors over (t_1..t_{rho-1})."""
    m = rho - 1
    forms = []
    for i in range(1, rho + 1):
        v = [mpq(0)] * m
        if i < rho:
            v[i - 1] = mpq(-1)
        for j in range(1, i if i < rho else rho):
            v[j - 1] += mpq(1, rho - j)
        forms.append(tuple(v))
    return forms


def vd(rho: int, c1sq, c2, chi) -> mpq:
    """Virtual dimension 2 rho c2 - (rho-1) c1^2 - (rho^2-1) chi."""
    return 2 * rho * mpq(c2) - (rho - 1) * mpq(c1sq) - (rho * rho - 1) * mpq(chi)


def pert_q_part(rho, m, tf, chi_fn, avec_pairs, hi):
    """prod_{i<j} (T_j-T_i)^{chi(a_j-a_i)} (T_i-T_j)^{chi(a_i-a_j)} as TLaurent.

    chi_fn(i, j) must return chi(a_j - a_i) (an integer); avec_pairs is the list
    of (i, j) with i < j, 0-based.
    """
    out = TLaurent.const(m, 1, hi)
    for (i, j) in avec_pairs:
        dji = [tf[j][v] - tf[i][v] for v in range(m)]
        dij = [-x for x in dji]
        out = out * tl_pow_linear(m, dji, int(chi_fn(i, j)), hi)
        out = out * tl_pow_linear(m, dij, int(chi_fn(j, i)), hi)
    return out


def pert_segre(rho, tf, hi, chi_alpha_twist, aL_pairs, umax, inverse=False):
    """Segre P-part of reduced Pert: prod_i (1+T_i)^{-chi(alpha(a_i - c1/rho))}
    e^{-(a_i L) T_i - T_i^2 u / 2}.  Returns a list of TLaurent per u-power.

    chi_alpha_twist[i], aL_pairs[i]: rational numbers per factor index i.
    With inverse=True (and negated chi/aL arguments) this builds 1/Pert: the
    only extra flip needed is the sign of the u-quadratic.
    """
    m = rho - 1
    usign = 1 if inverse else -1
    lin_acc = TLaurent(m, {}, (0,) * m, hi)
    quad_acc = TLaurent(m, {}, (0,) * m, hi)
    unit = TLaurent.const(m, 1, hi)
    for i in range(rho):
        ti = tl_from_linear(m, tf[i], hi)
        unit = unit * tl_pow_one_plus(ti, mpq(-chi_alpha_twist[i]), hi)
        lin_acc = lin_acc + ti.scale(-mpq(aL_pairs[i]))
        quad_acc = quad_acc + (ti * ti).scale(mpq(usign, 2))
    e_lin = tl_exp(lin_acc, hi) if not lin_acc.is_zero() else TLaurent.const(m, 1, hi)
    base = unit * e_lin
    # expand exp(u * quad_acc) through u^umax
    res = []
    upow = TLaurent.const(m, 1, hi)
    fact = 1
    for k in range(umax + 1):
        if k:
            upow = upow * quad_acc
            fact *= k
        res.append(base * upow.scale(mpq(1, fact)))
    return res


def pert_verlinde(rho, tf, hi, chi_v_twist, chi_fn, pairs):
    """Verlinde P-part of reduced Pert:
    e^{-sum_i chi(v(a_i)) T_i} * prod_{i<j} td-limit factors.

    chi_v_twist[i] = chi(v(a_i)) (rational); chi_fn(i, j) = chi(a_j - a_i).
    """
    m = rho - 1
    lin_acc = TLaurent(m, {}, (0,) * m, hi)
    for i in range(rho):
        lin_acc = lin_acc + tl_from_linear(m, tf[i], hi).scale(-mpq(chi_v_twist[i]))
    out = tl_exp(lin_acc, hi) if not lin_acc.is_zero() else TLaurent.const(m, 1, hi)
    for (i, j) in pairs:
        for (a, b) in ((i, j), (j, i)):
            d = [tf[b][v] - tf[a][v] for v in range(m)]
            # (x / (1 - e^{-x}))^{-chi} = ((1 - e^{-x})/x)^{chi}
            g = _one_minus_exp_neg_over(m, d, hi)
            out = out * tl_pow_one_plus(g - TLaurent.const(m, 1, hi),
                                        int(chi_fn(a, b)), hi)
    return out


def _one_minus_exp_neg_over(m, form, hi):
    """(1 - e^{-x})/x for a linear form x: entire series 1 - x/2 + x^2/6 - ..."""
    x = tl_from_linear(m, form, hi)
    out = TLaurent.const(m, 1, hi)
    term = TLaurent.const(m, 1, hi)
    fact = 1
    for k in range(1, sum(hi) + 2):
        term = term * x
        if term.is_zero():
            break
        fact *= (k + 1)
        out = out + term.scale(mpq((-1) ** k, fact))
    return out
