"""Evaluation of the characteristic function and its auxiliary constants."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .core import CharTriple, FracOrders
from .exceptions import DegenerateOrders, NonpositiveC

__all__ = [
    "TrigConsts",
    "principal_power",
    "eval_Q",
    "eval_dQ",
    "q_scale",
    "boundary_trace",
    "trig_consts",
    "outer_radius",
    "inner_radius",
]


class TrigConsts(NamedTuple):
    rho1: float
    rho2: float
    q1: float
    q2: float


def _log_principal(s):
    s = np.asarray(s, dtype=complex)
    theta = np.angle(s)
    # the cut is approached from above: arg in (-pi, pi]
    theta = np.where(theta == -np.pi, np.pi, theta)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(s)) + 1j * theta


def principal_power(s, beta: float):
    """``s**beta`` on the principal branch, with ``0**beta = 0`` for beta > 0."""
    s = np.asarray(s, dtype=complex)
    logs = _log_principal(s)
    with np.errstate(invalid="ignore"):
        out = np.exp(beta * logs)
    if beta > 0:
        out = np.where(s == 0, 0.0, out)
    elif beta == 0:
        out = np.ones_like(out)
    return out


def _q_from_log(logs, triple: CharTriple, orders: FracOrders):
    a, b, c = triple
    e1 = np.exp(orders.alpha1 * logs)
    e2 = np.exp(orders.alpha2 * logs)
    return e1 * e2 - a * e2 - b * e1 + c


def eval_Q(triple: CharTriple, orders: FracOrders, s):
    """Evaluate ``Q(s) = s^l - a s^alpha2 - b s^alpha1 + c`` on the principal branch.

    Works elementwise on arrays; ``Q(0) = c``.
    """
    s = np.asarray(s, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = _q_from_log(_log_principal(s), triple, orders)
    val = np.where(s == 0, complex(triple.c), val)
    return val if val.ndim else complex(val)


def eval_dQ(triple: CharTriple, orders: FracOrders, s):
    """Derivative ``Q'(s)`` on the principal branch, for ``s != 0``."""
    a, b, _ = triple
    a1, a2, l = orders.alpha1, orders.alpha2, orders.l
    logs = _log_principal(np.asarray(s, dtype=complex))
    val = (l * np.exp((l - 1) * logs) - a * a2 * np.exp((a2 - 1) * logs)
           - b * a1 * np.exp((a1 - 1) * logs))
    return val if val.ndim else complex(val)


def q_scale(triple: CharTriple, orders: FracOrders, r):
    """Natural magnitude of Q at modulus ``r``: sum of the moduli of its terms."""
    a, b, c = triple
    r = np.asarray(r, dtype=float)
    return r ** orders.l + abs(a) * r ** orders.alpha2 + abs(b) * r ** orders.alpha1 + abs(c)


def boundary_trace(triple: CharTriple, orders: FracOrders, omega):
    """Real and imaginary part of ``Q(i omega)`` from their closed forms."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise ValueError("omega must be positive")
    a, b, c = triple
    a1, a2, l = orders.alpha1, orders.alpha2, orders.l
    hp = np.pi / 2
    h1 = (omega ** l * np.cos(l * hp) - a * omega ** a2 * np.cos(a2 * hp)
          - b * omega ** a1 * np.cos(a1 * hp) + c)
    h2 = (omega ** l * np.sin(l * hp) - a * omega ** a2 * np.sin(a2 * hp)
          - b * omega ** a1 * np.sin(a1 * hp))
    if h1.ndim == 0:
        return float(h1), float(h2)
    return h1, h2


def trig_consts(orders: FracOrders) -> TrigConsts:
    a1, a2 = orders.alpha1, orders.alpha2
    if a1 == a2:
        raise DegenerateOrders("rho constants are undefined for alpha1 == alpha2")
    hp = np.pi / 2
    sd = np.sin((a2 - a1) * hp)
    sl = np.sin((a1 + a2) * hp)
    s1, s2 = np.sin(a1 * hp), np.sin(a2 * hp)
    return TrigConsts(float(s1 / sd), float(s2 / sd), float(s1 / sl), float(s2 / sl))


def _bisect_monotone(pred, lo, hi, rel_width=1e-9):
    """Shrink ``[lo, hi]`` where ``pred(lo)`` is False and ``pred(hi)`` is True."""
    while hi - lo > rel_width * hi:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


def outer_radius(triple: CharTriple, orders: FracOrders) -> float:
    """Smallest ``R >= 1`` with ``R^l >= 2(|a|R^alpha2 + |b|R^alpha1 + |c|)``.

    The ratio of the two sides is increasing in R, so the condition holds
    for every larger radius too and ``|Q(s)| >= |s|^l / 2`` on ``|s| >= R``.
    """
    a, b, c = (abs(v) for v in triple)
    a1, a2, l = orders.alpha1, orders.alpha2, orders.l

    def ok(R):
        return R ** l >= 2.0 * (a * R ** a2 + b * R ** a1 + c)

    if ok(1.0):
        return 1.0
    hi = 2.0
    while not ok(hi):
        hi *= 2.0
    return _bisect_monotone(ok, hi / 2.0, hi)[1]


def inner_radius(triple: CharTriple, orders: FracOrders) -> float:
    """Radius ``eps`` with ``eps^l + |a|eps^alpha2 + |b|eps^alpha1 <= c/2``.

    On ``|s| <= eps`` this gives ``|Q(s)| >= c/2``.
    """
    a, b, c = triple
    if not c > 0:
        raise NonpositiveC(f"inner radius needs c > 0, got c = {c}")
    a, b = abs(a), abs(b)
    a1, a2, l = orders.alpha1, orders.alpha2, orders.l

    def too_big(e):
        return e ** l + a * e ** a2 + b * e ** a1 > c / 2.0

    lo = 1.0
    while too_big(lo):
        lo /= 2.0
    hi = 2.0 * lo
    while not too_big(hi):
        lo, hi = hi, 2.0 * hi
    return _bisect_monotone(too_big, lo, hi)[0]
