"""Time stepping and fixed-point solvers for multi-order planar systems."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gamma

from .core import PlanarSystem, Trajectory, char_coeffs, validate
from .exceptions import BlowUp, NewtonDiverged, NotContractive
from .specfun import _grid_params, forced_part, get_evaluator, homogeneous_part, weighted_sup

__all__ = [
    "StepperConfig",
    "pi_trapezoidal_weights",
    "solve_pi_trapezoidal",
    "solve_nonlinear_picard",
    "picard_map",
    "BLOWUP_THRESHOLD",
]

BLOWUP_THRESHOLD = 1e12


@dataclass(frozen=True)
class StepperConfig:
    """Step size, Newton controls and horizon of a stepping run."""

    t_end: float
    h: float = 1.0 / 200
    newton_tol: float = 1e-12
    newton_max: int = 50

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("h must be positive")
        if not self.t_end >= self.h:
            raise ValueError("t_end must be at least h")
        if self.newton_max < 1:
            raise ValueError("newton_max must be positive")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.h))


def pi_trapezoidal_weights(alpha: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Product-trapezoidal weights for order ``alpha`` up to step ``n``.

    Returns ``(b, c)`` with ``b[k]`` the weight of ``g(t_{n-k})`` (``b[0]``
    the implicit one) and ``c[m]`` the weight of ``g(t_0)`` at step ``m``.
    """
    k = np.arange(n + 1, dtype=float)
    ap = alpha + 1.0
    g = gamma(alpha + 2.0)
    b = np.empty(n + 1)
    b[0] = 1.0 / g
    kk = k[1:]
    b[1:] = ((kk + 1) ** ap - 2 * kk ** ap + (kk - 1) ** ap) / g
    c = np.zeros(n + 1)
    c[1:] = ((kk - 1) ** ap - kk ** alpha * (kk - alpha - 1)) / g
    return b, c


def _predictor(x0, G, n, h_alpha, alphas, rect):
    """Explicit product-rectangle step from the history ``G[0:n]``."""
    out = np.array(x0, dtype=float)
    for i in range(2):
        # rect[i][k] weights g(t_{n-1-k})
        out[i] += h_alpha[i] * np.dot(rect[i][:n][::-1], G[:n, i])
    return out


def solve_pi_trapezoidal(system: PlanarSystem, x0, config: StepperConfig) -> Trajectory:
    """Implicit product-integration trapezoidal rule, one order per component.

    The history sum is evaluated directly (quadratic cost in the number of
    steps).  Each step solves a 2x2 implicit equation by Newton's method
    starting from the previous state; if that fails, Newton is restarted
    from an explicit product-rectangle predictor.
    """
    system = validate(system)
    A = system.A
    nl = system.nonlinearity
    orders = system.orders.as_array
    h, N = config.h, config.n_steps
    t = h * np.arange(N + 1)
    F = np.zeros((N + 1, 2)) if system.forcing is None else np.asarray(
        system.forcing(t), dtype=float).reshape(N + 1, 2)

    weights = [pi_trapezoidal_weights(a, N) for a in orders]
    b_rev = [w[0][::-1].copy() for w in weights]        # b_rev[N - k] = b[k]
    h_alpha = h ** orders
    hb0 = h_alpha * np.array([w[0][0] for w in weights])
    rect = [((np.arange(1, N + 1)) ** a - np.arange(N) ** a) / gamma(a + 1.0) for a in orders]

    X = np.zeros((N + 1, 2))
    G = np.zeros((N + 1, 2))
    x0 = np.asarray(x0, dtype=float)
    X[0] = x0

    def g(n, x):
        out = A @ x + F[n]
        if nl is not None:
            out = out + nl(x)
        return out

    def newton(n, known, guess):
        x = guess.copy()
        for it in range(config.newton_max):
            res = x - known - hb0 * g(n, x)
            scale = max(1.0, np.max(np.abs(x)))
            if np.max(np.abs(res)) <= config.newton_tol * scale:
                return x, it
            J = A if nl is None else A + nl.jacobian(x)
            x = x - np.linalg.solve(np.eye(2) - hb0[:, None] * J, res)
            if not np.all(np.isfinite(x)):
                return None, it
        res = x - known - hb0 * g(n, x)
        if np.max(np.abs(res)) <= config.newton_tol * max(1.0, np.max(np.abs(x))):
            return x, config.newton_max
        return None, config.newton_max

    G[0] = g(0, x0)
    iterations = 0
    for n in range(1, N + 1):
        known = x0.copy()
        for i in range(2):
            b, c = weights[i]
            hist = c[n] * G[0, i] + np.dot(b_rev[i][N - n + 1:N], G[1:n, i])
            known[i] += h_alpha[i] * hist
        x, it = newton(n, known, X[n - 1])
        if x is None:
            x, it2 = newton(n, known, _predictor(x0, G, n, h_alpha, orders, rect))
            it += it2
            if x is None:
                raise NewtonDiverged(f"Newton failed at step {n} (t = {t[n]:.6g})")
        iterations += it
        if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > BLOWUP_THRESHOLD:
            partial = Trajectory(0.0, h, X[:n], "pi-trapezoidal", {"blowup_time": float(t[n])})
            raise BlowUp(f"|x| exceeded {BLOWUP_THRESHOLD:g} at t = {t[n]:.6g}", partial)
        X[n] = x
        G[n] = g(n, x)
    return Trajectory(0.0, h, X, "pi-trapezoidal",
                      {"newton_iterations": iterations, "h": h, "t_end": float(t[-1])})


def picard_map(system: PlanarSystem, x0, xi: np.ndarray, grid) -> np.ndarray:
    """One application of the fixed-point operator to grid samples ``xi``."""
    h, n = _grid_params(grid)
    ev = get_evaluator(char_coeffs(system), system.orders)
    gk = ev.grid(h, n)
    return _apply(system, gk, homogeneous_part(gk, system.A, x0), np.asarray(grid), x0, xi)


def _source(system, xi, grid):
    g = np.zeros_like(xi)
    if system.nonlinearity is not None:
        g = g + system.nonlinearity(xi)
    if system.forcing is not None:
        g = g + np.asarray(system.forcing(grid), dtype=float).reshape(xi.shape)
    return g


def _apply(system, gk, phi0, grid, x0, xi):
    out = phi0 + forced_part(gk, system.A, _source(system, xi, grid))
    out[0] = x0
    return out


class _BlockOperator:
    """The fixed-point operator restricted to rows ``lo..hi`` of the grid.

    Inputs at rows below ``lo`` are frozen, so their contribution is a
    fixed history term; the rows inside the block enter through small
    lower-triangular Toeplitz matrices.
    """

    def __init__(self, system, gk):
        o = system.orders
        self.A = system.A
        self.W = {key: gk.weights(beta) for key, beta in
                  (("a1", o.alpha1), ("a2", o.alpha2), ("l", o.l))}
        self._local: dict = {}

    def _conv_hist(self, key, f, lo, hi):
        wl, wr = self.W[key]
        n = np.arange(lo, hi + 1)[:, None]
        j = np.arange(lo)[None, :]
        # wl pairs with f_j for j >= 1, wr with f_j for j >= 0
        L = np.where(j >= 1, wl[np.clip(n - j, 0, len(wl) - 1)], 0.0)
        R = wr[np.clip(n - 1 - j, 0, len(wr) - 1)]
        return (L + R) @ f[:lo]

    def _local_matrix(self, key, B):
        if (key, B) not in self._local:
            wl, wr = self.W[key]
            r = np.arange(B)[:, None]
            k = np.arange(B)[None, :]
            M = np.where(k <= r, wl[np.clip(r - k, 0, len(wl) - 1)], 0.0)
            M += np.where(k <= r - 1, wr[np.clip(r - 1 - k, 0, len(wr) - 1)], 0.0)
            self._local[key, B] = M
        return self._local[key, B]

    def history(self, g, lo, hi):
        return {key: self._conv_hist(key, g, lo, hi) for key in self.W}

    def combine(self, hist, g_block):
        B = len(g_block)
        c = {key: hist[key] + self._local_matrix(key, B) @ g_block for key in self.W}
        (a11, a12), (a21, a22) = self.A
        x1 = c["a1"][:, 0] - a22 * c["l"][:, 0] + a12 * c["l"][:, 1]
        x2 = a21 * c["l"][:, 0] + c["a2"][:, 1] - a11 * c["l"][:, 1]
        return np.stack([x1, x2], axis=1)

    def lipschitz(self, B):
        """Row-sum bound of the linear map from block inputs to block outputs."""
        s = {key: np.sum(np.abs(wl[:B]) + np.abs(wr[:B])) for key, (wl, wr) in self.W.items()}
        (a11, a12), (a21, a22) = np.abs(self.A)
        return max(s["a1"] + (a22 + a12) * s["l"], s["a2"] + (a21 + a11) * s["l"])


def solve_nonlinear_picard(system: PlanarSystem, x0, grid, max_iter: int = 200,
                           tol: float = 1e-8, delta: Optional[float] = None,
                           windowed: bool = True) -> Trajectory:
    """Fixed point of the variation-of-constants operator by Picard iteration.

    The iteration ``xi <- T(xi)`` starts from the constant function ``x0``
    and stops when the weighted distance between consecutive iterates drops
    below ``tol``.  Because the operator is causal, the iteration can be
    run window by window: rows before the current window are final.  The
    window length is chosen so that the operator restricted to it contracts
    with factor 1/2 near the window's starting value, and halved whenever
    the iteration stops contracting.  ``windowed=False`` iterates on the
    whole grid at once, which only converges for small data.

    When ``delta`` (a basin radius) is given and ``|x0|`` exceeds it, a
    warning is issued since contraction is then not guaranteed.
    """
    system = validate(system)
    x0 = np.asarray(x0, dtype=float)
    if delta is not None and np.max(np.abs(x0)) >= delta:
        warnings.warn(f"|x0| = {np.max(np.abs(x0)):.3g} is not below the basin radius {delta:.3g}",
                      RuntimeWarning, stacklevel=2)
    grid = np.asarray(grid, dtype=float)
    h, n = _grid_params(grid)
    nu = system.orders.nu
    ev = get_evaluator(char_coeffs(system), system.orders)
    gk = ev.grid(h, n)
    phi0 = homogeneous_part(gk, system.A, x0)
    if not windowed or system.nonlinearity is None:
        return _picard_global(system, gk, phi0, grid, x0, max_iter, tol, nu)

    op = _BlockOperator(system, gk)
    nl = system.nonlinearity
    xi = np.tile(x0, (n + 1, 1))
    g = _source(system, xi, grid)
    lo, total_iter, blocks = 1, 0, 0
    while lo <= n:
        # the iterates of a block stay near its starting value; the radius
        # only steers the block length, contraction is checked on the fly
        radius = 2.0 * max(np.max(np.abs(xi[lo - 1])), 1e-3)
        lip = nl.lipschitz_bound(radius)
        B = 1
        while B < 256 and lo + 2 * B - 1 <= n and lip * op.lipschitz(2 * B) <= 0.5:
            B *= 2
        while True:
            hi = min(lo + B - 1, n)
            try:
                block, k = _picard_block(system, op, phi0, g, xi[lo - 1], grid, lo, hi,
                                         max_iter, tol, nu)
                break
            except NotContractive:
                if B == 1:
                    raise
                B //= 2
        total_iter += k
        blocks += 1
        xi[lo:hi + 1] = block
        g[lo:hi + 1] = _source(system, block, grid[lo:hi + 1])
        lo = hi + 1
    residual = weighted_sup(grid, _apply(system, gk, phi0, grid, x0, xi) - xi, nu)
    return Trajectory(0.0, h, xi, "picard", {"iterations": total_iter, "windows": blocks,
                                             "converged": True, "residual": residual})


def _picard_block(system, op, phi0, g, start, grid, lo, hi, max_iter, tol, nu):
    """Iterate the operator on rows ``lo..hi`` with all earlier rows frozen."""
    hist = op.history(g, lo, hi)
    block = np.tile(start, (hi - lo + 1, 1))
    tb = grid[lo:hi + 1]
    prev, stalls = np.inf, 0
    for k in range(1, max_iter + 1):
        new = phi0[lo:hi + 1] + op.combine(hist, _source(system, block, tb))
        if not np.all(np.isfinite(new)) or np.max(np.abs(new)) > BLOWUP_THRESHOLD:
            raise NotContractive(f"iterates diverged in the window starting at t = {grid[lo]:.6g}")
        dist = weighted_sup(tb, new - block, nu)
        block = new
        if dist < tol:
            return block, k
        stalls = stalls + 1 if dist >= prev else 0
        if stalls >= 3:
            raise NotContractive(
                f"weighted distance failed to decrease 3 times at t = {grid[lo]:.6g}")
        prev = dist
    raise NotContractive(f"no convergence in {max_iter} iterations at t = {grid[lo]:.6g}")


def _picard_global(system, gk, phi0, grid, x0, max_iter, tol, nu):
    h = gk.h
    xi = np.tile(x0, (len(grid), 1))
    prev, stalls, history = np.inf, 0, []
    for k in range(1, max_iter + 1):
        new = _apply(system, gk, phi0, grid, x0, xi)
        if not np.all(np.isfinite(new)) or np.max(np.abs(new)) > BLOWUP_THRESHOLD:
            raise NotContractive(f"iterates left every bounded set at iteration {k}")
        dist = weighted_sup(grid, new - xi, nu)
        history.append(dist)
        xi = new
        if dist < tol:
            return Trajectory(0.0, h, xi, "picard",
                              {"iterations": k, "converged": True, "distances": history})
        stalls = stalls + 1 if dist >= prev else 0
        if stalls >= 3:
            raise NotContractive(f"weighted distance failed to decrease 3 times (last {dist:.3g})")
        prev = dist
    warnings.warn(f"Picard iteration stopped after {max_iter} iterations "
                  f"(distance {history[-1]:.3g})", RuntimeWarning, stacklevel=2)
    return Trajectory(0.0, h, xi, "picard",
                      {"iterations": max_iter, "converged": False, "distances": history})
