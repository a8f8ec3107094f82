"""Asymptotic stability of the characteristic function.

Three independent routes are available:

* closed-form sufficient criteria on ``(a, b, c)`` and the orders,
* a test for zeros on the imaginary axis (quadratic discriminant plus a
  root scan of ``Im Q(i omega)``),
* an argument-principle count of zeros inside a sector-annulus contour.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .charfun import (
    _log_principal,
    _q_from_log,
    boundary_trace,
    eval_dQ,
    eval_Q,
    inner_radius,
    outer_radius,
    q_scale,
    trig_consts,
)
from .core import CharTriple, FracOrders, PlanarSystem, StabilityVerdict, Status, char_coeffs
from .exceptions import BudgetExhausted, DegenerateOrders, NonpositiveC, ZeroOnContour

__all__ = [
    "ImaginaryZeroReport",
    "WindingResult",
    "canonical_form",
    "imaginary_zero_test",
    "sufficient_criteria",
    "criteria_report",
    "winding_count",
    "winding_details",
    "locate_zeros",
    "stability_verdict",
    "LEMMA_TAGS",
]

LEMMA_TAGS = ("L3.2", "L3.3", "L3.4", "L3.5i", "L3.5ii", "L3.6i", "L3.6ii")

PreconditionC = NonpositiveC

# relative gap below which an inequality counts as a "criterion boundary"
_BOUNDARY_TOL = 1e-12


def canonical_form(triple: CharTriple, orders: FracOrders) -> tuple[CharTriple, FracOrders]:
    """Relabel so that ``alpha1 < alpha2``.

    Q is symmetric under swapping ``(alpha1, a22) <-> (alpha2, a11)``.
    """
    if orders.alpha1 == orders.alpha2:
        raise DegenerateOrders("stability criteria need alpha1 != alpha2")
    if orders.alpha1 < orders.alpha2:
        return CharTriple(*map(float, triple)), orders
    a, b, c = triple
    return CharTriple(float(b), float(a), float(c)), FracOrders(orders.alpha2, orders.alpha1)


# ---------------------------------------------------------------------------
# zeros on the imaginary axis

@dataclass
class ImaginaryZeroReport:
    zero_free: bool
    discriminant: float
    roots_X: list[float]
    scan_roots_omega: list[float]
    h2_roots: list[float] = field(default_factory=list)
    corollary_zero_free: Optional[bool] = None
    corollary_case: Optional[str] = None


def _scan_grid(triple: CharTriple, orders: FracOrders, n: int = 2048) -> np.ndarray:
    a, b, _ = triple
    q2 = trig_consts(orders).q2
    omega_max = max(2.0, ((abs(a) + abs(b)) * q2 + 1.0) ** (1.0 / orders.alpha1))
    return np.geomspace(1e-6, omega_max, n)


def _h2_roots(triple: CharTriple, orders: FracOrders) -> list[float]:
    grid = _scan_grid(triple, orders)
    _, h2 = boundary_trace(triple, orders, grid)

    def f(w):
        return boundary_trace(triple, orders, w)[1]

    roots = [float(w) for w, v in zip(grid, h2) if v == 0.0]
    sign = np.sign(h2)
    for k in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        roots.append(brentq(f, grid[k], grid[k + 1], xtol=1e-300, rtol=4 * np.finfo(float).eps,
                            maxiter=500))
    return sorted(roots)


def _on_imaginary_locus(triple, orders, rho, omega, tol) -> bool:
    """Whether ``(a, b)`` satisfy the imaginary-zero equalities at ``omega``."""
    a, b, c = triple
    a1, a2 = orders.alpha1, orders.alpha2
    t1, t2 = rho.rho2 * omega ** a1, c * rho.rho1 * omega ** (-a2)
    u1, u2 = c * rho.rho2 * omega ** (-a1), rho.rho1 * omega ** a2
    ok_a = abs(a - (t1 - t2)) <= tol * max(1.0, abs(a), t1, t2)
    ok_b = abs(b - (u1 - u2)) <= tol * max(1.0, abs(b), u1, u2)
    return ok_a and ok_b


def imaginary_zero_test(triple: CharTriple, orders: FracOrders, tol: float = 1e-9
                        ) -> ImaginaryZeroReport:
    """Decide whether Q has a zero ``i omega`` with ``omega > 0``.

    The quadratic ``a rho1 X^2 + (ab - c(rho2^2 - rho1^2)) X + bc rho1 = 0``
    in ``X = omega^alpha2`` gives a sufficient zero-free condition when
    ``a, b > 0``.  Independently, every root of ``Im Q(i omega)`` on a
    logarithmic grid is located and checked against ``Re Q(i omega) = 0``.

    ``corollary_zero_free`` records what the two discriminant conditions
    claim; ``zero_free`` comes from the scan only.  The second condition,
    ``ab <= c (rho2 - rho1)^2``, makes both roots of the quadratic positive
    rather than negative, so it does not rule out an imaginary zero (see
    ``tests/test_stability.py`` for explicit counterexamples).
    """
    triple, orders = canonical_form(triple, orders)
    a, b, c = triple
    if not c > 0:
        raise NonpositiveC(f"imaginary-zero test needs c > 0, got c = {c}")
    rho = trig_consts(orders)
    r1, r2 = rho.rho1, rho.rho2
    disc = (a * b - c * (r1 + r2) ** 2) * (a * b - c * (r2 - r1) ** 2)

    qa, qb, qc = a * r1, a * b - c * (r2 ** 2 - r1 ** 2), b * c * r1
    if qa != 0.0:
        roots_X = sorted(float(x.real) for x in np.roots([qa, qb, qc]) if abs(x.imag) <= 1e-12 * max(1.0, abs(x)))
    elif qb != 0.0:
        roots_X = [-qc / qb]
    else:
        roots_X = []

    corollary_ok, case = None, None
    if a > 0 and b > 0:
        if c * (r2 ** 2 - r1 ** 2) < a * b < c * (r2 ** 2 + r1 ** 2):
            corollary_ok, case = True, "i"
        elif a * b <= c * (r2 - r1) ** 2:
            corollary_ok, case = True, "ii"
        else:
            corollary_ok = False

    h2_roots = _h2_roots(triple, orders)
    hits = [w for w in h2_roots if _on_imaginary_locus(triple, orders, rho, w, tol)]
    return ImaginaryZeroReport(
        zero_free=not hits,
        discriminant=float(disc),
        roots_X=roots_X,
        scan_roots_omega=hits,
        h2_roots=h2_roots,
        corollary_zero_free=corollary_ok,
        corollary_case=case,
    )


# ---------------------------------------------------------------------------
# explicit sufficient criteria

def _check(lhs, op, rhs, name, notes):
    gap = abs(lhs - rhs)
    if gap <= _BOUNDARY_TOL * max(1.0, abs(lhs), abs(rhs)):
        notes.append(f"criterion boundary in {name}: {lhs!r} vs {rhs!r}")
    if op == ">":
        return lhs > rhs
    if op == ">=":
        return lhs >= rhs
    if op == "<":
        return lhs < rhs
    return lhs <= rhs


def criteria_report(triple: CharTriple, orders: FracOrders) -> tuple[list[str], list[str]]:
    """Tags of all criteria that hold, plus notes on near-equality cases."""
    triple, orders = canonical_form(triple, orders)
    a, b, c = triple
    a1, a2 = orders.alpha1, orders.alpha2
    tc = trig_consts(orders)
    q1, q2 = tc.q1, tc.q2
    tags: list[str] = []
    notes: list[str] = []

    if a <= 0 and b <= 0 and c > 0:
        tags.append("L3.2")
    if a == 0 and b > 0 and _check(c, ">", (b * q1) ** (a1 / a2) * b * q2, "L3.3", notes):
        tags.append("L3.3")
    if b == 0 and a > 0 and _check(c, ">", (a * q2) ** (a2 / a1) * a * q1, "L3.4", notes):
        tags.append("L3.4")
    if a > 0 and b > 0 and c > 0:
        split = a * q2 + b * q1
        if _check(split, ">", 1.0, "L3.5", notes):
            bound = a * q2 * ((a + b) * q2) ** (a2 / a1) + b * (a + b) * q2 ** 2
            if _check(bound, "<=", c, "L3.5i", notes):
                tags.append("L3.5i")
        elif _check(a * q1 + b * q2, "<", c, "L3.5ii", notes):
            tags.append("L3.5ii")
    if a < 0 and b > 0 and c > 0:
        split = a * q2 + b * q1
        if _check(split, ">", 1.0, "L3.6", notes):
            if _check((b * q1) ** (a1 / a2) * b * q2, "<=", c, "L3.6i", notes):
                tags.append("L3.6i")
        elif _check(b * q2, "<=", c, "L3.6ii", notes):
            tags.append("L3.6ii")
    return tags, notes


def sufficient_criteria(triple: CharTriple, orders: FracOrders) -> list[str]:
    """Every lemma tag whose hypothesis holds exactly as stated."""
    return criteria_report(triple, orders)[0]


# ---------------------------------------------------------------------------
# argument principle

@dataclass
class WindingResult:
    count: int
    turns: float
    n_samples: int
    min_rel_q: float
    eps: float
    R: float


def _segments(eps, R, theta, symmetric):
    """Pieces of the positively oriented boundary of the sector annulus.

    Each piece maps a parameter u in [0, 1] to points on the contour.
    """
    lo = 0.0 if symmetric else -theta

    def big_arc(u):
        return R * np.exp(1j * (lo + u * (theta - lo)))

    def upper_ray(u):
        return np.exp(np.log(R) + u * (np.log(eps) - np.log(R))) * np.exp(1j * theta)

    def small_arc(u):
        return eps * np.exp(1j * (theta + u * (lo - theta)))

    def lower_ray(u):
        return np.exp(np.log(eps) + u * (np.log(R) - np.log(eps))) * np.exp(-1j * theta)

    return [big_arc, upper_ray, small_arc] if symmetric else [big_arc, upper_ray, small_arc, lower_ray]


def _accumulate(seg, triple, orders, n_initial, budget, used):
    u = np.linspace(0.0, 1.0, n_initial + 1)
    while True:
        s = seg(u)
        q = _q_from_log(_log_principal(s), triple, orders)
        ratio = q[1:] / q[:-1]
        d = np.angle(ratio)
        mag = np.abs(np.log(np.abs(ratio)))
        bad = (np.abs(d) > np.pi / 4) | (mag > np.log(4.0))
        if not bad.any():
            rel = np.abs(q) / q_scale(triple, orders, np.abs(s))
            return float(d.sum()), len(u), float(rel.min())
        if used + len(u) + bad.sum() > budget:
            raise BudgetExhausted(f"winding refinement exceeded {budget} samples")
        mids = 0.5 * (u[:-1][bad] + u[1:][bad])
        u = np.sort(np.concatenate([u, mids]))
        if np.min(np.diff(u)) < 1e-15:
            rel = np.abs(q) / q_scale(triple, orders, np.abs(s))
            raise ZeroOnContour(
                f"argument of Q varies too fast to resolve (min relative |Q| = {rel.min():.3g})"
            )


def winding_details(triple: CharTriple, orders: FracOrders, half_angle: float = np.pi / 2, *,
                    n_initial: int = 256, symmetric: bool = False, budget: int = 10 ** 7,
                    zero_tol: float = 1e-10) -> WindingResult:
    """Argument-principle zero count of Q in ``{eps <= |s| <= R, |arg s| <= half_angle}``."""
    triple, orders = canonical_form(triple, orders)
    if triple.c == 0:
        raise NonpositiveC("winding count needs c != 0 (Q(0) = 0)")
    if not 0 < half_angle < np.pi:
        raise ValueError("half_angle must lie in (0, pi)")
    # with c < 0 the radii from |c| still bound |Q| away from zero
    eps = inner_radius(CharTriple(triple.a, triple.b, abs(triple.c)), orders)
    R = outer_radius(triple, orders)
    total, used, min_rel = 0.0, 0, np.inf
    for seg in _segments(eps, R, half_angle, symmetric):
        d, n, rel = _accumulate(seg, triple, orders, n_initial, budget, used)
        total += d
        used += n
        min_rel = min(min_rel, rel)
    if min_rel < zero_tol:
        raise ZeroOnContour(f"|Q| dropped to {min_rel:.3g} of its local scale on the contour")
    turns = total / (2 * np.pi) * (2 if symmetric else 1)
    return WindingResult(int(round(turns)), turns, used, min_rel, eps, R)


def winding_count(triple: CharTriple, orders: FracOrders, half_angle: float = np.pi / 2,
                  **kwargs) -> int:
    """Number of zeros of Q inside the contour (right half plane by default)."""
    return winding_details(triple, orders, half_angle, **kwargs).count


# ---------------------------------------------------------------------------

def stability_verdict(system, orders: Optional[FracOrders] = None) -> StabilityVerdict:
    """Combine criteria, imaginary-axis test and winding count into a verdict.

    Accepts a :class:`PlanarSystem` or a :class:`CharTriple` together with
    ``orders``.
    """
    if isinstance(system, PlanarSystem):
        triple, orders = char_coeffs(system), system.orders
    else:
        triple = CharTriple(*system)
    triple, orders = canonical_form(triple, orders)
    a, b, c = triple

    if c <= 0:
        diag = ("c = 0: Q(s) = s^alpha1 P(s) vanishes at s = 0" if c == 0
                else "c < 0: Q has a positive real zero")
        return StabilityVerdict(Status.NOT_ASYMPTOTICALLY_STABLE, [], diagnostics=diag)

    tags, notes = criteria_report(triple, orders)
    izt = imaginary_zero_test(triple, orders)
    notes = list(notes)
    winding = None
    try:
        winding = winding_count(triple, orders)
    except (ZeroOnContour, BudgetExhausted) as exc:
        notes.append(f"winding count failed: {exc}")

    if tags:
        status = Status.ASYMPTOTICALLY_STABLE
        if winding not in (None, 0) or not izt.zero_free:
            notes.append("criteria and numerical count disagree")
    elif izt.zero_free and winding == 0:
        status = Status.ASYMPTOTICALLY_STABLE
    elif winding is not None and winding >= 1:
        status = Status.NOT_ASYMPTOTICALLY_STABLE
    elif not izt.zero_free:
        status = Status.NOT_ASYMPTOTICALLY_STABLE
        notes.append(f"zero on the imaginary axis at omega = {izt.scan_roots_omega}")
    else:
        status = Status.INCONCLUSIVE
    return StabilityVerdict(status, tags, winding, izt.zero_free, "; ".join(notes))


def _local_minima(v):
    inner = v[1:-1, 1:-1]
    mask = np.ones_like(inner, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                mask &= inner <= v[1 + di:v.shape[0] - 1 + di, 1 + dj:v.shape[1] - 1 + dj]
    i, j = np.nonzero(mask)
    return i + 1, j + 1


def _newton_zero(triple, orders, s, max_iter=60):
    for _ in range(max_iter):
        step = eval_Q(triple, orders, s) / eval_dQ(triple, orders, s)
        s = s - step
        if not np.isfinite(s) or s == 0:
            return None
        if abs(step) <= 1e-14 * abs(s):
            return s
    return None


def locate_zeros(triple: CharTriple, orders: FracOrders, half_angle: float = np.pi - 0.02,
                 *, n_grid: int = 240, attempts: int = 4) -> np.ndarray:
    """Zeros of Q on the principal sheet with ``|arg s| <= half_angle``.

    Seeds from local minima of ``|Q|`` on a polar grid over the annulus that
    must contain every zero are polished by Newton's method.  The result is
    accepted only when the number of zeros matches the argument-principle
    count for the same sector; otherwise the grid is refined.
    """
    if triple.c == 0:
        raise NonpositiveC("zero search needs c != 0")
    expected = winding_count(triple, orders, half_angle)
    if expected == 0:
        return np.empty(0, dtype=complex)
    eps = inner_radius(CharTriple(triple.a, triple.b, abs(triple.c)), orders)
    R = outer_radius(triple, orders)
    n = n_grid
    for _ in range(attempts):
        lr = np.linspace(np.log(eps), np.log(R), n)
        th = np.linspace(-half_angle / n, half_angle, n)
        LR, TH = np.meshgrid(lr, th, indexing="ij")
        s = np.exp(LR + 1j * TH)
        rel = np.abs(eval_Q(triple, orders, s)) / q_scale(triple, orders, np.exp(LR))
        found: list[complex] = []
        for i, j in zip(*_local_minima(rel)):
            z = _newton_zero(triple, orders, complex(s[i, j]))
            if z is None or z.imag < -1e-12 * abs(z) or abs(np.angle(z)) > half_angle:
                continue
            if all(abs(z - w) > 1e-8 * abs(z) for w in found):
                found.append(z)
        zeros = []
        for z in found:
            if abs(z.imag) <= 1e-12 * abs(z):
                zeros.append(complex(z.real, 0.0))
            else:
                zeros.extend([z, np.conj(z)])
        if len(zeros) == expected:
            return np.array(sorted(zeros, key=lambda z: (abs(z), z.imag)))
        n *= 2
    raise BudgetExhausted(
        f"located {len(zeros)} zeros but the argument principle counts {expected}"
    )
