"""Closed-form universal series: the rank-1 Segre forms, their arbitrary-rank
analogs, and the Verlinde g/f forms, all expanded exactly in z (or w) via the
formal variable changes.

The rank parameter may be any rational (needed for the K3 reduction at
fractional rank); expansion order is in half-steps of the target variable.
"""

from __future__ import annotations

from gmpy2 import mpq

from .pseries import PSeries


def _t_of_z(s, rho, order):
    """Reversion of z = t (1 + (1 - s/rho) t)^(1 - s/rho) as a z-series."""
    s = mpq(s)
    c = 1 - s / mpq(rho)
    n = order + 2
    t = PSeries.x_power("t", 2, n)
    z_of_t = t * (1 + c * t).pow_general(c)
    return z_of_t.reverse().truncate(order).rename("z")


def _w_vt(e, order):
    """Reversion of w = v (1 + v)^e as a w-series (e rational)."""
    n = order + 2
    v = PSeries.x_power("v", 2, n)
    w_of_v = v * (1 + v).pow_general(mpq(e))
    return w_of_v.reverse().truncate(order).rename("w")


def z_change(s, rho, order):
    """The pair (z(t) as t-series, t(z) as z-series)."""
    s = mpq(s)
    c = 1 - s / mpq(rho)
    n = order + 2
    t = PSeries.x_power("t", 2, n)
    return (t * (1 + c * t).pow_general(c)).truncate(order), _t_of_z(s, rho, order)


def segre_closed(name: str, s, order: int, rho: int = 1) -> PSeries:
    """V_s, W_s, X_s, Q_s, R_s, T_s as z-series at rank rho.

    For rho = 1 these are the rank-1 closed forms; the general-rho versions
    carry the extra (1 + (1 - s/rho) t)-powers.
    """
    s = mpq(s)
    rr = mpq(rho)
    c1 = 1 - s / rr
    c2 = 2 - s / rr
    n = 2 * order + 6
    t = PSeries.x_power("t", 2, n)
    a = 1 + c1 * t
    b = 1 + c2 * t
    if name == "V":
        f = a.pow_general(1 - s) * b.pow_general(s) * a.pow_general(rho - 1)
    elif name == "W":
        f = a.pow_general(s / 2 - 1) * b.pow_general((1 - s) / 2) * \
            a.pow_general(mpq(1, 2) - rr / 2)
    elif name == "X":
        f = a.pow_general(s * s / 2 - s) * b.pow_general(-s * s / 2 + mpq(1, 2)) * \
            (1 + c1 * c2 * t).pow_general(mpq(-1, 2)) * \
            a.pow_general(-(rr - 1) ** 2 / (2 * rr) * s)
    elif name == "Q":
        f = t * (1 + c1 * t) * mpq(1, 2)
    elif name == "R":
        f = t
    elif name == "T":
        f = rr * t * (1 + c1 * c2 * t * mpq(1, 2))
    else:
        raise ValueError("unknown closed form %r" % name)
    tz = _t_of_z(s, rho, order)
    return f.compose_z(tz)


def verlinde_gf(rq, order: int):
    """(g_r, f_r) as w-series for rational r = rq; w = v(1+v)^(r^2-1)."""
    rq = mpq(rq)
    vw = _w_vt(rq * rq - 1, order)
    n = order + 2
    v = PSeries.x_power("v", 2, n)
    g = (1 + v).compose_z(vw)
    f = ((1 + v).pow_general(rq * rq) *
         (1 + rq * rq * v).inverse()).compose_z(vw)
    return g, f


def verlinde_caps(rho: int, r: int, order: int):
    """(G_r, F_r) at rank rho: g_{r/rho}, f_{r/rho} with w = v(1+v)^{r^2/rho^2-1}."""
    return verlinde_gf(mpq(r, rho), order)
