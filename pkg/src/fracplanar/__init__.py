"""Stability and asymptotics of planar linear and nonlinear multi-order fractional systems.

The system is ``D^alpha x = A x + f(t)`` (Caputo derivatives, one order per
component) or ``D^alpha x = A x + g(x)`` with a polynomial ``g`` vanishing
to second order.  Stability of the linear part is decided from the
characteristic function ``Q(s) = s^(a1+a2) - a11 s^a2 - a22 s^a1 + det A``.
"""

from .analysis import (
    BasinReport,
    DecayReport,
    DecayVerdict,
    basin_details,
    basin_estimate,
    decay_exponent,
    ml_stability_check,
    weighted_norm,
)
from .charfun import boundary_trace, eval_Q, inner_radius, outer_radius, trig_consts
from .core import (
    CharTriple,
    FracOrders,
    PaperExample,
    PaperForcing,
    PlanarSystem,
    PolynomialField,
    StabilityVerdict,
    Status,
    TabulatedForcing,
    Trajectory,
    char_coeffs,
    load_system_spec,
    paper_example,
    paper_forcing,
    system_from_spec,
    system_to_spec,
    validate,
)
from .exceptions import *  # noqa: F401,F403
from .solver import StepperConfig, solve_nonlinear_picard, solve_pi_trapezoidal
from .specfun import (
    SpecFunKind,
    compute_M_beta,
    convolve_S,
    eval_R,
    eval_S,
    linear_voc_solution,
    uniform_grid,
)
from .stability import (
    canonical_form,
    criteria_report,
    imaginary_zero_test,
    locate_zeros,
    stability_verdict,
    sufficient_criteria,
    winding_count,
)

__version__ = "0.1.0"
