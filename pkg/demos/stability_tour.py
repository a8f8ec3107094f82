"""
Deciding stability of a planar multi-order system
=================================================

A system ``D^alpha x = A x`` with two different Caputo orders is
asymptotically stable when all zeros of

    Q(s) = s^(a1+a2) - a11 s^a2 - a22 s^a1 + det A

lie in the open left half plane.  This tour runs the explicit criteria, the
purely-imaginary-zero test and the argument-principle count on the eight
built-in examples, then on a system where the criteria stay silent.
"""

import numpy as np

from fracplanar import (
    CharTriple, FracOrders, imaginary_zero_test, locate_zeros, paper_example, stability_verdict,
    trig_consts, winding_count,
)

# the eight built-in examples; each is covered by one explicit criterion
for n in range(1, 9):
    ex = paper_example(n)
    v = stability_verdict(ex.system)
    a, b, c = ex.system.triple
    print(f"example {n}: (a, b, c) = ({a:g}, {b:g}, {c:g})  {v.status.value:28s} "
          f"criteria {v.criteria_hit}  zeros in Re s >= 0: {v.winding_count}")

# the constants entering the criteria for orders (1/3, 1/2)
orders = FracOrders(1 / 3, 1 / 2)
print("\ntrig constants for alpha = (1/3, 1/2):", trig_consts(orders))

# raising a22 eventually pushes two zeros across the imaginary axis
print("\nsweep of b = a22 with a = 0, c = 0.5:")
for b in (1.0, 1.5, 2.0, 2.5, 3.0):
    tr = CharTriple(0.0, b, 0.5)
    v = stability_verdict(tr, orders)
    print(f"  b = {b:3.1f}: {v.status.value:28s} criteria {v.criteria_hit}, "
          f"count {winding_count(tr, orders)}")

# where are the zeros?  locate_zeros covers the whole principal sheet
tr = CharTriple(0.0, 3.0, 0.5)
print("\nzeros of Q for b = 3:", np.round(locate_zeros(tr, orders), 4))

# the imaginary-axis test reports every root of Im Q(i w) and checks Re Q there
rep = imaginary_zero_test(CharTriple(1.0, 1.0, 3.0), FracOrders(0.3, 0.4))
print("\nimaginary-axis test for (1, 1, 3), alpha = (0.3, 0.4):",
      f"zero free = {rep.zero_free}, roots of Im Q(iw) = {np.round(rep.h2_roots, 4)}")
