"""Inverse Laplace kernels of the variation-of-constants formula.

For the characteristic function Q the kernels are

    R^lam(t)  = L^{-1}{ s^(l - lam - 1) / Q(s) },   lam  in {0, alpha1, alpha2}
    S^beta(t) = L^{-1}{ s^(l - beta) / Q(s) },      beta in {alpha1, alpha2, l}

and both are instances of ``K_q(t) = L^{-1}{s^q / Q(s)}``.  ``K_q`` is
evaluated on a Hankel contour made of two rays at angles ``+-theta`` with
``theta = pi/2 + delta`` joined by a circular arc.  After the substitution
``sigma = s t`` the contour has inner radius one in the sigma plane for
every t, which keeps the arc contribution O(1) and avoids cancellation.

Note that ``R^beta`` is the running integral of ``S^beta``; together with
the second integral ``K_{l-beta-2}`` this gives exact product-integration
weights near the weak singularity of ``S^beta`` at the origin.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Union

import numpy as np
from scipy.special import roots_jacobi

from .charfun import (
    _log_principal,
    _q_from_log,
    eval_dQ,
    eval_Q,
    inner_radius,
    outer_radius,
    q_scale,
)
from .core import CharTriple, FracOrders, PlanarSystem, Trajectory, char_coeffs
from .exceptions import ContourInvalid, FracPlanarError, QuadratureNotConverged
from .stability import locate_zeros, winding_count

__all__ = [
    "ContourSpec",
    "SpecFunKind",
    "KernelEvaluator",
    "GridKernels",
    "get_evaluator",
    "eval_R",
    "eval_S",
    "uniform_grid",
    "convolve_S",
    "linear_voc_solution",
    "compute_M_beta",
    "weighted_sup",
    "homogeneous_part",
    "forced_part",
]

_GL_RAY = (8, 16, 32, 64)
_GL_ARC = (32, 64, 128, 256)
_PANEL_WIDTH = 2.0
_CHUNK = 2_000_000


@dataclass(frozen=True)
class ContourSpec:
    """Hankel contour ``gamma(mu, theta)`` in the s plane for a given time."""

    mu: float
    theta: float
    ray_truncation: float
    nodes_per_unit: int

    @property
    def delta(self) -> float:
        return self.theta - np.pi / 2


_R_SYMBOLS = ("0", "alpha1", "a1", "alpha2", "a2")
_S_SYMBOLS = ("alpha1", "a1", "alpha2", "a2", "l")


@dataclass(frozen=True)
class SpecFunKind:
    """Which kernel: family ``"R"`` or ``"S"`` and its index.

    ``index`` is either a number or one of the symbols ``"0"``, ``"alpha1"``,
    ``"alpha2"``, ``"l"`` resolved against the orders.
    """

    family: str
    index: Union[str, float]

    def __post_init__(self):
        if self.family not in ("R", "S"):
            raise ValueError(f"family must be 'R' or 'S', got {self.family!r}")
        if isinstance(self.index, str):
            ok = _R_SYMBOLS if self.family == "R" else _S_SYMBOLS
            if self.index not in ok:
                raise ValueError(f"index {self.index!r} is not admissible for family {self.family}")

    def value(self, orders: FracOrders) -> float:
        symbols = {"0": 0.0, "alpha1": orders.alpha1, "a1": orders.alpha1,
                   "alpha2": orders.alpha2, "a2": orders.alpha2, "l": orders.l}
        if isinstance(self.index, str):
            if self.index not in symbols:
                raise ValueError(f"unknown index symbol {self.index!r}")
            val = symbols[self.index]
        else:
            val = float(self.index)
        allowed = (0.0, orders.alpha1, orders.alpha2) if self.family == "R" else (
            orders.alpha1, orders.alpha2, orders.l)
        if not any(np.isclose(val, x, rtol=0, atol=1e-14) for x in allowed):
            raise ValueError(f"index {val} is not admissible for family {self.family}")
        return min(allowed, key=lambda x: abs(x - val))

    def exponent(self, orders: FracOrders) -> float:
        """The power q in ``L^{-1}{s^q / Q}``."""
        v = self.value(orders)
        return orders.l - v - 1.0 if self.family == "R" else orders.l - v


# ---------------------------------------------------------------------------

class KernelEvaluator:
    """Contour quadrature for ``K_q(t) = L^{-1}{s^q / Q(s)}(t)``, t > 0.

    The rays sit at ``arg s = +-(pi/2 + delta)``.  The largest admissible
    ``delta`` is chosen so that the rays keep an angular gap from every zero
    of Q; zeros swept over when the Bromwich line is folded onto the
    contour enter as explicit residues ``z^q e^{zt} / Q'(z)``.  The arc
    radius is picked per time from a small set so that it stays away from
    the moduli of those zeros.
    """

    _DELTAS = (1.3, 1.1, 0.9, 0.7, 0.55, 0.4, 0.3, 0.2, 0.15, 0.1, 0.06, 0.03, 0.01)
    _GAPS = (0.15, 0.08, 0.03)
    _ARC_RADII = 2.0 ** (np.arange(-3, 4) / 2.0)

    def __init__(self, triple: CharTriple, orders: FracOrders, *, delta: Optional[float] = None,
                 rtol: float = 1e-7, symmetric: bool = True):
        self.triple = CharTriple(*map(float, triple))
        self.orders = orders
        self.rtol = rtol
        # upper half only, doubled via conjugate symmetry; the full contour
        # keeps the imaginary part as a consistency check
        self.symmetric = symmetric
        if not self.triple.c > 0:
            raise ContourInvalid("c <= 0: Q has a zero on the non-negative real axis")
        if orders.alpha1 == orders.alpha2:
            raise ContourInvalid("equal orders are not supported by the kernel quadrature")
        try:
            unstable = winding_count(self.triple, self.orders) != 0
            zeros = locate_zeros(self.triple, self.orders)
        except FracPlanarError as exc:
            raise ContourInvalid(f"zeros of Q could not be isolated: {exc}") from exc
        if unstable:
            raise ContourInvalid("Q has zeros in the closed right half plane")
        self.r_inner = inner_radius(self.triple, orders)
        self.r_outer = outer_radius(self.triple, orders)
        self.zeros = zeros
        self.delta = self._select_delta() if delta is None else float(delta)
        self.theta = np.pi / 2 + self.delta
        self.poles = zeros[np.abs(np.angle(zeros)) < self.theta]
        dq = eval_dQ(self.triple, orders, self.poles)
        if np.any(np.abs(dq * self.poles) < 1e-8 * q_scale(self.triple, orders, np.abs(self.poles))):
            raise ContourInvalid("Q has a multiple zero; residues are not simple")
        self._inv_dq = 1.0 / dq
        self._rules: dict = {}
        self._grid_cache: dict = {}
        self._lock = threading.Lock()

    # -- contour selection -------------------------------------------------
    def _probe(self, theta, n=512):
        r = np.geomspace(self.r_inner / 4, 4 * self.r_outer, n)
        s = r * np.exp(1j * theta)
        rel = np.abs(eval_Q(self.triple, self.orders, s)) / q_scale(self.triple, self.orders, r)
        return float(rel.min())

    def _select_delta(self):
        args = np.abs(np.angle(self.zeros))
        for gap in self._GAPS:
            for delta in self._DELTAS:
                theta = np.pi / 2 + delta
                if len(args) and np.min(np.abs(args - theta)) < gap:
                    continue
                if self._probe(theta) > 1e-3:
                    return delta
        raise ContourInvalid("no ray direction keeps a safe distance from the zeros of Q")

    def _arc_radius(self, t):
        """Per-time arc radius in the scaled variable ``sigma = s t``."""
        t = np.asarray(t, dtype=float)
        if len(self.poles) == 0:
            return np.ones_like(t)
        U = self._ARC_RADII
        mod = np.abs(self.poles)
        dist = np.abs(np.log(t[:, None, None] * mod[None, None, :] / U[None, :, None])).min(axis=2)
        score = dist - 0.01 * np.abs(np.log(U))[None, :]
        return U[np.argmax(score, axis=1)]

    def contour(self, t: float, q: float = 0.0) -> ContourSpec:
        u0 = float(self._arc_radius(np.array([t]))[0])
        return ContourSpec(u0 / t, self.theta, self._u_max(q) / t, _GL_RAY[0])

    # -- quadrature rules ----------------------------------------------------
    def _u_max(self, q):
        decay = np.sin(self.delta)
        u = 40.0 / decay
        for _ in range(50):
            u = (18.0 * np.log(10.0) + (max(q, 0.0) + 1.0) * np.log(u)) / decay
        return max(u, 8.0)

    def _rule(self, level, q, u0):
        key = (level, round(q, 15), u0)
        if key in self._rules:
            return self._rules[key]
        n_ray, n_arc = _GL_RAY[level], _GL_ARC[level]
        theta = self.theta
        u_max = self._u_max(q)
        edges = [u0]
        while edges[-1] < u_max:
            edges.append(edges[-1] + min(_PANEL_WIDTH, 0.3 * edges[-1]))
        edges = np.array(edges)
        x, w = np.polynomial.legendre.leggauss(n_ray)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        u = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        wu = (half[:, None] * w[None, :]).ravel()
        xa, wa = np.polynomial.legendre.leggauss(n_arc)
        eup, edn = np.exp(1j * theta), np.exp(-1j * theta)
        if self.symmetric:
            phi, wphi = 0.5 * theta * (xa + 1), 0.5 * theta * wa
            arc = u0 * np.exp(1j * phi)
            sig = np.concatenate([u * eup, arc])
            dsig = np.concatenate([wu * eup, wphi * 1j * arc])
            logsig = np.concatenate([np.log(u) + 1j * theta, np.log(u0) + 1j * phi])
        else:
            phi, wphi = theta * xa, theta * wa
            arc = u0 * np.exp(1j * phi)
            sig = np.concatenate([u * eup, u * edn, arc])
            dsig = np.concatenate([wu * eup, -wu * edn, wphi * 1j * arc])
            logsig = np.concatenate([np.log(u) + 1j * theta, np.log(u) - 1j * theta,
                                     np.log(u0) + 1j * phi])
        pre = np.exp(q * logsig + sig) * dsig
        rule = (logsig, pre)
        self._rules[key] = rule
        return rule

    def _integrate(self, q, t, u0, level, subtract):
        logsig, pre = self._rule(level, q, u0)
        out = np.empty(len(t), dtype=complex)
        mag = np.empty(len(t))
        step = max(1, _CHUNK // len(pre))
        c = self.triple.c
        for i in range(0, len(t), step):
            tt = t[i:i + step]
            L = logsig[None, :] - np.log(tt)[:, None]
            Q = _q_from_log(L, self.triple, self.orders)
            F = (c - Q) / (c * Q) if subtract else 1.0 / Q
            out[i:i + step] = F @ pre
            mag[i:i + step] = np.abs(F) @ np.abs(pre)
        scale = t ** (-q - 1.0) / (2.0 * np.pi)
        if self.symmetric:
            # I = 2i Im(upper half), so I / (2 pi i) = Im(upper) / pi
            return 2.0 * out.imag * scale + 0j, 2.0 * mag * scale
        return out / 1j * scale, mag * scale

    def _residues(self, q, t, u0):
        if len(self.poles) == 0:
            return np.zeros(len(t))
        z = self.poles
        swept = np.abs(z)[None, :] * t[:, None] > u0
        zq = np.exp(q * _log_principal(z)) * self._inv_dq
        terms = np.where(swept, zq[None, :] * np.exp(z[None, :] * t[:, None]), 0.0)
        return terms.sum(axis=1).real

    def _kernel_group(self, q, t, u0, subtract):
        result = np.empty(len(t))
        todo = np.arange(len(t))
        prev, _ = self._integrate(q, t, u0, 0, subtract)
        for level in range(1, len(_GL_RAY)):
            cur, mag = self._integrate(q, t[todo], u0, level, subtract)
            floor = 1e-6 * mag
            ok = np.abs(cur.real - prev.real) <= self.rtol * np.maximum(np.abs(cur.real), floor)
            imag_ok = np.abs(cur.imag) <= 1e-8 * np.maximum(np.abs(cur.real), floor)
            if not np.all(imag_ok[ok]):
                raise QuadratureNotConverged("conjugate symmetry violated by the quadrature")
            result[todo[ok]] = cur.real[ok]
            todo, prev = todo[~ok], cur[~ok]
            if len(todo) == 0:
                return result + self._residues(q, t, u0)
        raise QuadratureNotConverged(
            f"kernel quadrature did not converge for {len(todo)} time(s), e.g. t = {t[todo[0]]:.6g}"
        )

    def kernel(self, q: float, t, *, subtract_constant: bool = False) -> np.ndarray:
        """``K_q(t)`` for an array of positive times.

        ``subtract_constant`` replaces ``1/Q`` by ``1/Q - 1/c``; the
        difference integrates to zero on the contour and removes the
        non-decaying part of the integrand when ``q == 0``.
        """
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t <= 0):
            raise ValueError("kernels are evaluated for t > 0 only")
        u0 = self._arc_radius(t)
        result = np.empty(len(t))
        for r in np.unique(u0):
            sel = u0 == r
            result[sel] = self._kernel_group(q, t[sel], float(r), subtract_constant)
        return result

    # -- named kernels -------------------------------------------------------
    def R(self, lam, t) -> np.ndarray:
        return self.kernel(self.orders.l - lam - 1.0, t)

    def S(self, beta, t) -> np.ndarray:
        q = self.orders.l - beta
        return self.kernel(q, t, subtract_constant=abs(q) < 1e-15)

    def S_antiderivative(self, beta, t, order: int = 1) -> np.ndarray:
        """``order``-fold integral of ``S^beta`` from 0 (``order=1`` is ``R^beta``)."""
        return self.kernel(self.orders.l - beta - order, t)

    def evaluate(self, kind: SpecFunKind, t) -> np.ndarray:
        v = kind.value(self.orders)
        return self.R(v, t) if kind.family == "R" else self.S(v, t)

    # -- grid cache ----------------------------------------------------------
    def grid(self, h: float, n: int) -> "GridKernels":
        """Kernel samples and convolution weights on ``t_k = k h``, k = 0..n."""
        key = (float(h), int(n))
        with self._lock:
            if key not in self._grid_cache:
                self._grid_cache[key] = GridKernels(self, h, n)
            return self._grid_cache[key]


@lru_cache(maxsize=64)
def get_evaluator(triple: CharTriple, orders: FracOrders) -> KernelEvaluator:
    """Shared evaluator per ``(triple, orders)``."""
    return KernelEvaluator(CharTriple(*map(float, triple)), orders)


# ---------------------------------------------------------------------------

_NEAR = 16          # intervals next to the singularity handled by exact moments
_GL_CONV = np.polynomial.legendre.leggauss(3)


class GridKernels:
    """R kernels on a uniform grid and product-integration weights for S kernels.

    For each ``beta`` the pair ``(wl, wr)`` holds

        wl[m] = int_{mh}^{(m+1)h} S(tau) (1 - x) dtau,
        wr[m] = int_{mh}^{(m+1)h} S(tau) x dtau,      x = (tau - mh)/h,

    so that for a piecewise linear f the convolution at ``t_n`` is
    ``sum_m wl[m] f[n-m] + wr[m] f[n-m-1]``.
    """

    def __init__(self, evaluator: KernelEvaluator, h: float, n: int):
        self.ev = evaluator
        self.h = float(h)
        self.n = int(n)
        self._R: dict = {}
        self._W: dict = {}
        self._lock = threading.Lock()

    @property
    def t(self) -> np.ndarray:
        return self.h * np.arange(self.n + 1)

    def R(self, lam: float) -> np.ndarray:
        key = round(lam, 15)
        with self._lock:
            if key not in self._R:
                vals = np.empty(self.n + 1)
                vals[0] = 1.0 if lam == 0 else 0.0
                if self.n:
                    vals[1:] = self.ev.R(lam, self.t[1:])
                self._R[key] = vals
            return self._R[key]

    def weights(self, beta: float) -> tuple[np.ndarray, np.ndarray]:
        key = round(beta, 15)
        with self._lock:
            if key not in self._W:
                self._W[key] = self._weights(beta)
            return self._W[key]

    def _weights(self, beta):
        h, n = self.h, self.n
        wl, wr = np.empty(n), np.empty(n)
        m_near = min(_NEAR, n)
        tau = h * np.arange(1, m_near + 1)
        G1 = np.concatenate([[0.0], self.ev.S_antiderivative(beta, tau, 1)])
        G2 = np.concatenate([[0.0], self.ev.S_antiderivative(beta, tau, 2)])
        wr[:m_near] = G1[1:] - np.diff(G2) / h
        wl[:m_near] = np.diff(G1) - wr[:m_near]
        if n > m_near:
            x, w = _GL_CONV
            xloc = 0.5 * (x + 1.0)
            m = np.arange(m_near, n)
            nodes = (h * (m[:, None] + xloc[None, :])).ravel()
            S = self.ev.S(beta, nodes).reshape(len(m), len(x)) * (0.5 * h * w)[None, :]
            wl[m_near:] = S @ (1.0 - xloc)
            wr[m_near:] = S @ xloc
        return wl, wr

    def convolve(self, beta: float, f) -> np.ndarray:
        """``(S^beta * f)(t_k)`` for samples ``f`` of shape (n+1,) or (n+1, k)."""
        wl, wr = self.weights(beta)
        f = np.asarray(f, dtype=float)
        if f.shape[0] != self.n + 1:
            raise ValueError(f"expected {self.n + 1} samples, got {f.shape[0]}")
        if f.ndim == 1:
            out = np.zeros(self.n + 1)
            if self.n:
                out[1:] = (np.convolve(wl, f[1:])[: self.n] + np.convolve(wr, f[:-1])[: self.n])
            return out
        return np.stack([self.convolve(beta, f[:, j]) for j in range(f.shape[1])], axis=1)


# ---------------------------------------------------------------------------
# module-level operations

def _resolve(triple, orders) -> KernelEvaluator:
    return get_evaluator(CharTriple(*map(float, triple)), orders)


def eval_R(kind: SpecFunKind, t, triple: CharTriple, orders: FracOrders):
    """``R^lam(t)`` by contour quadrature."""
    if kind.family != "R":
        raise ValueError("eval_R needs a kind of family 'R'")
    out = _resolve(triple, orders).evaluate(kind, t)
    return float(out[0]) if np.ndim(t) == 0 else out


def eval_S(kind: SpecFunKind, t, triple: CharTriple, orders: FracOrders):
    """``S^beta(t)`` by contour quadrature."""
    if kind.family != "S":
        raise ValueError("eval_S needs a kind of family 'S'")
    out = _resolve(triple, orders).evaluate(kind, t)
    return float(out[0]) if np.ndim(t) == 0 else out


def uniform_grid(h: float, t_end: float) -> np.ndarray:
    if not h > 0 or not t_end >= h:
        raise ValueError("need h > 0 and t_end >= h")
    n = int(round(t_end / h))
    return h * np.arange(n + 1)


def _grid_params(grid) -> tuple[float, int]:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2 or grid[0] != 0.0:
        raise ValueError("grid must be a 1-d array starting at 0 with at least two points")
    h = grid[1] - grid[0]
    if not np.allclose(np.diff(grid), h, rtol=1e-9, atol=0):
        raise ValueError("grid must be uniform")
    return float(h), len(grid) - 1


def convolve_S(kind: SpecFunKind, f, grid, triple: CharTriple, orders: FracOrders,
               *, verify: bool = False, rtol: float = 1e-5) -> np.ndarray:
    """Samples of ``(S^beta * f)`` on a uniform grid starting at 0.

    ``f`` is a callable of t or an array of samples on the grid; between
    grid points it is treated as piecewise linear.  With ``verify=True`` the
    result is recomputed on the grid with half the step (callable f only)
    and compared at the shared points.
    """
    if kind.family != "S":
        raise ValueError("convolve_S needs a kind of family 'S'")
    h, n = _grid_params(grid)
    ev = _resolve(triple, orders)
    beta = kind.value(orders)
    samples = np.asarray(f(np.asarray(grid)) if callable(f) else f, dtype=float)
    out = ev.grid(h, n).convolve(beta, samples)
    if verify:
        if not callable(f):
            raise ValueError("verification needs a callable f")
        fine_grid = (h / 2) * np.arange(2 * n + 1)
        fine = ev.grid(h / 2, 2 * n).convolve(beta, np.asarray(f(fine_grid), dtype=float))[::2]
        scale = max(np.max(np.abs(fine)), 1e-300)
        err = np.max(np.abs(fine - out)) / scale
        if err > rtol:
            raise QuadratureNotConverged(f"convolution changed by {err:.3g} under refinement")
    return out


def homogeneous_part(gk: GridKernels, A: np.ndarray, x0) -> np.ndarray:
    """Initial-data part of the variation-of-constants formula on the grid."""
    o = gk.ev.orders
    (a11, a12), (a21, a22) = A
    R0, R1, R2 = gk.R(0.0), gk.R(o.alpha1), gk.R(o.alpha2)
    x1, x2 = x0
    phi1 = (R0 - a22 * R2) * x1 + a12 * R1 * x2
    phi2 = a21 * R2 * x1 + (R0 - a11 * R1) * x2
    return np.stack([phi1, phi2], axis=1)


def forced_part(gk: GridKernels, A: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Convolution part of the formula for grid samples ``g`` of shape (n+1, 2)."""
    o = gk.ev.orders
    (a11, a12), (a21, a22) = A
    cl = gk.convolve(o.l, g)
    c1 = gk.convolve(o.alpha1, g[:, 0])
    c2 = gk.convolve(o.alpha2, g[:, 1])
    phi1 = c1 - a22 * cl[:, 0] + a12 * cl[:, 1]
    phi2 = a21 * cl[:, 0] + c2 - a11 * cl[:, 1]
    return np.stack([phi1, phi2], axis=1)


def linear_voc_solution(system: PlanarSystem, x0, grid) -> Trajectory:
    """Solve the linear system by the variation-of-constants formula.

    Needs an asymptotically stable characteristic function, since the
    kernels are computed on a contour left of the imaginary axis.
    """
    if not system.is_linear:
        raise ValueError("linear_voc_solution needs a linear system")
    h, n = _grid_params(grid)
    ev = _resolve(char_coeffs(system), system.orders)
    gk = ev.grid(h, n)
    x = homogeneous_part(gk, system.A, x0)
    if system.forcing is not None:
        g = np.asarray(system.forcing(np.asarray(grid)), dtype=float).reshape(n + 1, 2)
        x = x + forced_part(gk, system.A, g)
    x[0] = x0
    return Trajectory(0.0, h, x, "voc", {"delta": ev.delta})


# ---------------------------------------------------------------------------
# bounds used by the basin estimate

def _panel_rule(t: float, left_exp: float, right_exp: float, n_gl: int = 8,
                width: float = 0.25, levels: int = 20):
    """Nodes and weights for ``int_0^t g(tau) dtau`` on a graded mesh.

    The first panel carries the Jacobi weight ``tau^left_exp`` and the last
    ``(t - tau)^right_exp``; the returned weights are to be applied to
    ``g(tau) / (tau^left_exp (t - tau)^right_exp)`` on those two panels only,
    so the caller gets a flag array telling which factor to divide out.
    """
    half = t / 2
    first = min(width, half)
    grade = first * 2.0 ** -np.arange(levels, -1, -1)
    inner = np.concatenate([[0.0], grade])
    if half > first:
        k = int(np.ceil((half - first) / width))
        inner = np.concatenate([inner, np.linspace(first, half, k + 1)[1:]])
    edges = np.concatenate([inner, (t - inner[::-1])[1:]])

    x, w = np.polynomial.legendre.leggauss(n_gl)
    nodes, weights, kind = [], [], []
    for k, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        L = hi - lo
        if k == 0:
            xj, wj = roots_jacobi(n_gl, 0.0, left_exp)
            nodes.append(lo + L * (xj + 1) / 2)
            weights.append(wj * (L / 2) ** (1 + left_exp))
            kind.append(np.full(n_gl, 1))
        elif k == len(edges) - 2:
            xj, wj = roots_jacobi(n_gl, right_exp, 0.0)
            nodes.append(lo + L * (xj + 1) / 2)
            weights.append(wj * (L / 2) ** (1 + right_exp))
            kind.append(np.full(n_gl, 2))
        else:
            nodes.append(lo + L * (x + 1) / 2)
            weights.append(w * L / 2)
            kind.append(np.zeros(n_gl, dtype=int))
    return np.concatenate(nodes), np.concatenate(weights), np.concatenate(kind)


def compute_M_beta(kind: SpecFunKind, triple: CharTriple, orders: FracOrders,
                   t_max: float = 128.0, *, kernel: Optional[Callable] = None) -> float:
    """``sup_t t^nu int_0^t |S^beta(t-s)| s^-nu ds`` over dyadic ``t in [1, t_max]``.

    ``kernel`` overrides ``S^beta`` (any callable of tau > 0).
    """
    if kind.family != "S":
        raise ValueError("compute_M_beta needs a kind of family 'S'")
    nu = orders.nu
    if not nu < 1:
        raise ValueError("needs nu < 1")
    beta = kind.value(orders)
    if kernel is None:
        ev = _resolve(triple, orders)
        kernel = lambda tau: ev.S(beta, tau)  # noqa: E731
    left = min(beta - 1.0, 0.0)
    ts = 2.0 ** np.arange(0, int(np.floor(np.log2(t_max))) + 1)
    best = 0.0
    for t in ts:
        # tau = t - s; the s^-nu factor becomes (t - tau)^-nu
        tau, w, flag = _panel_rule(t, left, -nu)
        g = np.abs(np.asarray(kernel(tau), dtype=float))
        # panel 2 already carries (t - tau)^-nu in its Jacobi weight
        g = np.where(flag == 1, g * tau ** (-left) * (t - tau) ** (-nu), g)
        g = np.where(flag == 0, g * (t - tau) ** (-nu), g)
        best = max(best, t ** nu * float(np.dot(w, g)))
    return best


def weighted_sup(t, values, nu: float) -> float:
    """``max(sup_{t<=1} |v|, sup_{t>=1} t^nu |v|)`` over samples, max-norm across components."""
    t = np.asarray(t, dtype=float)
    v = np.abs(np.asarray(values, dtype=float))
    if v.ndim == 2:
        v = v.max(axis=1)
    if len(v) == 0:
        return 0.0
    w = np.where(t >= 1.0, np.maximum(t, 1.0) ** nu, 1.0)
    return float(np.max(w * v))
