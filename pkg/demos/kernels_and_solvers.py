"""
Solution kernels, variation of constants and time stepping
==========================================================

The solution of ``D^alpha x = A x + f(t)`` is assembled from the kernels
``R^lam = L^-1{s^(l-lam-1)/Q}`` and ``S^beta = L^-1{s^(l-beta)/Q}``.
They are computed here by contour quadrature and checked against the
Mittag-Leffler function in the decoupled case.  The same linear system is
then solved by variation of constants and by the implicit trapezoidal
product-integration rule.
"""

import numpy as np
from scipy.special import gamma

from fracplanar import (
    CharTriple, FracOrders, SpecFunKind, StepperConfig, eval_R, eval_S, linear_voc_solution,
    paper_example, solve_pi_trapezoidal, uniform_grid,
)


def mittag_leffler(alpha, z, terms=200):
    k = np.arange(terms)
    return float(np.sum(z ** k / gamma(alpha * k + 1)))


# decoupled system: R^0 - a22 R^a2 is the Mittag-Leffler function E_a1(a11 t^a1)
orders = FracOrders(0.4, 0.7)
a11, a22 = -1.0, -0.5
triple = CharTriple(a11, a22, a11 * a22)
for t in (0.25, 1.0, 2.0):
    r = (eval_R(SpecFunKind("R", "0"), t, triple, orders)
         - a22 * eval_R(SpecFunKind("R", "a2"), t, triple, orders))
    print(f"t = {t:4.2f}: contour {r:.15f}   series {mittag_leffler(0.4, a11 * t ** 0.4):.15f}")

# decay of the kernels for a coupled example: t^nu R and t^(nu+1) S level off
ex = paper_example(3).system
t = 2.0 ** np.arange(0, 8)
nu = ex.orders.nu
print("\nt^nu |R^0(t)|       :", np.round(t ** nu * np.abs(eval_R(SpecFunKind("R", "0"), t, ex.triple, ex.orders)), 4))
print("t^(nu+1) |S^l(t)|   :", np.round(t ** (nu + 1) * np.abs(eval_S(SpecFunKind("S", "l"), t, ex.triple, ex.orders)), 4))

# the two linear solvers on the same forced problem
grid = uniform_grid(1 / 200, 10.0)
voc = linear_voc_solution(ex, (1.0, 2.0), grid)
pi = solve_pi_trapezoidal(ex, (1.0, 2.0), StepperConfig(t_end=10.0))
rel = np.max(np.abs(voc.samples - pi.samples)) / np.max(np.abs(pi.samples))
print(f"\nvariation of constants vs trapezoidal stepping on [0, 10]: relative gap {rel:.2e}")

# with small orders the stepper converges slowly; the kernel formula does not depend on h
ex5 = paper_example(5).system
ref = linear_voc_solution(ex5, (1.0, 2.0), uniform_grid(1 / 800, 10.0)).samples[::4]
for m in (200, 400, 800):
    x = solve_pi_trapezoidal(ex5, (1.0, 2.0), StepperConfig(t_end=10.0, h=1 / m)).samples[::m // 200]
    print(f"orders (0.3, 0.4), h = 1/{m}: stepper off by {np.max(np.abs(x - ref)) / np.max(np.abs(ref)):.1e}")
