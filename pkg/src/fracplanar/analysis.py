"""Checks of the asymptotic behaviour of computed trajectories.

Decay-rate fitting, the weighted sup-norm ``max(sup_{t<=1}|x|, sup_{t>=1} t^nu |x|)``,
Mittag-Leffler stability tests and an explicit radius of the basin of
attraction from the contraction argument for the fixed-point operator.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .core import CharTriple, FracOrders, PlanarSystem, Trajectory, char_coeffs, validate
from .exceptions import NoContractiveRadius, WindowTooShort
from .solver import BLOWUP_THRESHOLD
from .specfun import SpecFunKind, compute_M_beta, get_evaluator, weighted_sup

__all__ = [
    "DecayVerdict",
    "DecayReport",
    "BasinReport",
    "decay_exponent",
    "weighted_norm",
    "ml_stability_check",
    "kernel_constants",
    "basin_details",
    "basin_estimate",
]

_RATE_TOL = 0.15
_FLAT_TOL = 0.05


class DecayVerdict(str, enum.Enum):
    DecayConfirmed = "DecayConfirmed"
    BoundedNoDecay = "BoundedNoDecay"
    Unbounded = "Unbounded"
    # decays, but at a rate away from the expected one
    RateMismatch = "RateMismatch"


@dataclass
class DecayReport:
    fitted_mu: float
    tail_sup: float
    window: tuple[float, float]
    verdict: DecayVerdict
    nu_expected: float
    n_samples: int

    def to_dict(self) -> dict:
        return {"fitted_mu": self.fitted_mu, "tail_sup": self.tail_sup,
                "window": list(self.window), "verdict": self.verdict.value,
                "nu_expected": self.nu_expected, "n_samples": self.n_samples}


def decay_exponent(traj: Trajectory, nu_expected: float,
                   window: tuple[float, float] = (50.0, 100.0)) -> DecayReport:
    """Fit ``|x(t)| ~ t^-mu`` by least squares in log-log scale over ``window``."""
    t_lo, t_hi = map(float, window)
    if t_lo < 1 or t_hi <= t_lo:
        raise ValueError("window must satisfy 1 <= t_lo < t_hi")
    t = traj.t
    norms = traj.norms()
    exploded = (not np.all(np.isfinite(norms)) or np.max(norms) > BLOWUP_THRESHOLD
                or "blowup_time" in traj.meta)
    if exploded:
        return DecayReport(float("nan"), float("inf"), (t_lo, t_hi), DecayVerdict.Unbounded,
                           nu_expected, 0)
    if traj.t_end < t_hi - 0.5 * traj.h:
        raise ValueError(f"trajectory ends at {traj.t_end:.6g}, before the window end {t_hi:.6g}")
    sel = (t >= t_lo - 1e-9) & (t <= t_hi + 1e-9)
    if sel.sum() < 20:
        raise WindowTooShort(f"only {sel.sum()} samples in [{t_lo}, {t_hi}]")
    tw, nw = t[sel], norms[sel]
    tail_sup = float(np.max(tw ** nu_expected * nw))
    pos = nw > 0
    if pos.sum() < 2:
        mu = float("inf")
    else:
        slope = np.polyfit(np.log(tw[pos]), np.log(nw[pos]), 1)[0]
        mu = float(-slope)
    if abs(mu - nu_expected) <= _RATE_TOL and np.isfinite(tail_sup):
        verdict = DecayVerdict.DecayConfirmed
    elif abs(mu) < _FLAT_TOL:
        verdict = DecayVerdict.BoundedNoDecay
    else:
        verdict = DecayVerdict.RateMismatch
    return DecayReport(mu, tail_sup, (t_lo, t_hi), verdict, nu_expected, int(sel.sum()))


def weighted_norm(traj: Trajectory, nu: float) -> float:
    """``max(sup_{t<=1} |x(t)|, sup_{t>=1} t^nu |x(t)|)`` over the samples (max-norm)."""
    return weighted_sup(traj.t, traj.samples, nu)


def ml_stability_check(traj: Trajectory, nu: float, m_bound: float) -> bool:
    """True when the weighted norm of ``traj`` does not exceed ``m_bound``."""
    return bool(weighted_norm(traj, nu) <= m_bound)


# ---------------------------------------------------------------------------
# basin of attraction

@dataclass
class BasinReport:
    delta: float
    epsilon: float
    r0: float
    C: float
    M: dict
    R_norms: dict
    lipschitz: float
    halvings: int
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"delta": self.delta, "epsilon": self.epsilon, "r0": self.r0, "C": self.C,
                "M": dict(self.M), "R_norms": dict(self.R_norms), "lipschitz": self.lipschitz,
                "halvings": self.halvings, "notes": list(self.notes)}


def _r_weighted_norm(ev, lam: float, nu: float) -> float:
    t01 = np.linspace(0.0, 1.0, 401)[1:]
    tail = np.geomspace(1.0, 2.0 ** 10, 400)
    v0 = 1.0 if lam == 0 else 0.0
    head = max(abs(v0), float(np.max(np.abs(ev.R(lam, t01)))))
    return max(head, float(np.max(tail ** nu * np.abs(ev.R(lam, tail)))))


@lru_cache(maxsize=32)
def kernel_constants(triple: CharTriple, orders: FracOrders, t_max: float = 128.0) -> dict:
    """Kernel bounds entering the contraction estimate.

    ``C`` is 1.5 times the largest sampled value of ``t^(nu+1)|S^beta(t)|``
    on dyadic ``t >= 1`` and of ``t^(1-beta)|S^beta(t)|`` on dyadic
    ``t < 1``; ``M`` holds the weighted convolution bounds and ``R_norms``
    the weighted norms of the R kernels.
    """
    ev = get_evaluator(triple, orders)
    nu = orders.nu
    big = 2.0 ** np.arange(0, int(np.log2(t_max)) + 1)
    small = 2.0 ** -np.arange(1, 21)
    C = 0.0
    M = {}
    for name, beta in (("alpha1", orders.alpha1), ("alpha2", orders.alpha2), ("l", orders.l)):
        C = max(C, float(np.max(big ** (nu + 1) * np.abs(ev.S(beta, big)))),
                float(np.max(small ** (1 - beta) * np.abs(ev.S(beta, small)))))
        M[name] = compute_M_beta(SpecFunKind("S", name), triple, orders, t_max)
    R_norms = {name: _r_weighted_norm(ev, lam, nu) for name, lam in
               (("0", 0.0), ("alpha1", orders.alpha1), ("alpha2", orders.alpha2))}
    return {"C": 1.5 * C, "M": M, "R_norms": R_norms}


def basin_details(system: PlanarSystem, epsilon: float) -> BasinReport:
    """Radius ``delta`` such that ``|x0| < delta`` keeps the solution in the weighted ``epsilon`` ball.

    The contraction factor is

        r0 = [2C/nu + M_alpha1 + M_alpha2 + sum|a_ij| (M_l + C/nu)] * L(eps)

    with ``L(eps)`` the Lipschitz bound of the nonlinearity on the
    ``eps`` ball; ``eps`` is halved until ``r0 < 1``.  Then

        delta = eps (1 - r0) / (2|R^0| + (|a11|+|a12|)|R^alpha1| + (|a21|+|a22|)|R^alpha2|)

    with weighted norms of the R kernels.
    """
    system = validate(system)
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    orders = system.orders
    nu = orders.nu
    k = kernel_constants(char_coeffs(system), orders)
    C, M, Rn = k["C"], k["M"], k["R_norms"]
    A = np.abs(system.A)
    base = 2 * C / nu + M["alpha1"] + M["alpha2"] + A.sum() * (M["l"] + C / nu)
    nl = system.nonlinearity
    eps, halvings = float(epsilon), 0
    while True:
        lip = 0.0 if nl is None else nl.lipschitz_bound(eps)
        r0 = base * lip
        if r0 < 1:
            break
        eps /= 2
        halvings += 1
        if eps < 1e-8:
            raise NoContractiveRadius(f"contraction factor still {r0:.3g} at eps = {eps:.3g}")
    denom = (2 * Rn["0"] + (A[0, 0] + A[0, 1]) * Rn["alpha1"]
             + (A[1, 0] + A[1, 1]) * Rn["alpha2"])
    notes = []
    if halvings:
        notes.append(f"epsilon reduced from {epsilon:g} to {eps:g} to reach r0 < 1")
    return BasinReport(eps * (1 - r0) / denom, eps, r0, C, M, Rn, lip, halvings, notes)


def basin_estimate(system: PlanarSystem, epsilon: float) -> float:
    """The radius ``delta`` of :func:`basin_details`."""
    return basin_details(system, epsilon).delta
