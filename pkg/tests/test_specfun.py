import numpy as np
import pytest
from scipy.special import gamma

from fracplanar import (
    CharTriple, FracOrders, PlanarSystem, SpecFunKind, compute_M_beta, convolve_S, eval_R, eval_S,
    linear_voc_solution, paper_example, paper_forcing, uniform_grid,
)
from fracplanar.exceptions import ContourInvalid
from fracplanar.specfun import KernelEvaluator, get_evaluator

from oracles import mittag_leffler, ml1

O = FracOrders(1 / 3, 1 / 2)
EX1 = paper_example(1).system
EX3 = paper_example(3).system


def diag(a11, a22, orders):
    return CharTriple(a11, a22, a11 * a22), orders


def test_kind_symbols():
    o = FracOrders(0.3, 0.4)
    assert SpecFunKind("R", "0").value(o) == 0
    assert SpecFunKind("R", "alpha1").value(o) == 0.3
    assert SpecFunKind("S", "a2").value(o) == 0.4
    assert SpecFunKind("S", "l").value(o) == pytest.approx(0.7)
    with pytest.raises(ValueError):
        SpecFunKind("S", "0")
    with pytest.raises(ValueError):
        SpecFunKind("Q", "l")


@pytest.mark.parametrize("a11,a22,orders", [
    (-1.0, -0.5, FracOrders(1 / 3, 1 / 2)),
    (-2.0, -0.3, FracOrders(0.6, 0.9)),
    (-0.2, -3.0, FracOrders(0.45, 0.55)),
])
def test_R_reduces_to_mittag_leffler(a11, a22, orders):
    tr, o = diag(a11, a22, orders)
    t = np.array([0.1, 0.5, 1.0, 1.5, 2.0])
    ev = get_evaluator(tr, o)
    r1 = ev.R(0, t) - a22 * ev.R(o.alpha2, t)
    r2 = ev.R(0, t) - a11 * ev.R(o.alpha1, t)
    for k, tk in enumerate(t):
        assert r1[k] == pytest.approx(ml1(o.alpha1, a11 * tk ** o.alpha1), rel=1e-8)
        assert r2[k] == pytest.approx(ml1(o.alpha2, a22 * tk ** o.alpha2), rel=1e-8)
    s = ev.S(o.alpha1, t) - a22 * ev.S(o.l, t)
    for k, tk in enumerate(t):
        ref = tk ** (o.alpha1 - 1) * mittag_leffler(o.alpha1, o.alpha1, a11 * tk ** o.alpha1)
        assert s[k] == pytest.approx(ref, rel=1e-8)


def test_R0_at_origin():
    tr = CharTriple(0, 0, 1)
    v = eval_R(SpecFunKind("R", "0"), np.array([1e-4, 1e-6, 1e-8]), tr, O)
    assert np.all(np.abs(v - 1) < [2e-2, 1e-3, 1e-4])
    assert abs(v[-1] - 1) < abs(v[0] - 1)


def test_half_contour_matches_full():
    ev_full = KernelEvaluator(EX1.triple, EX1.orders, symmetric=False)
    ev_half = get_evaluator(EX1.triple, EX1.orders)
    t = np.array([0.05, 0.7, 3.4, 20.0, 100.0])
    for lam in (0, 1 / 3, 1 / 2):
        assert np.allclose(ev_full.R(lam, t), ev_half.R(lam, t), rtol=1e-9, atol=1e-12)


def test_delta_override_and_residues():
    # a narrow contour without residues must agree with the default wide one
    ev_wide = get_evaluator(EX1.triple, EX1.orders)
    assert len(ev_wide.zeros) == 2
    ev_narrow = KernelEvaluator(EX1.triple, EX1.orders, delta=0.05)
    t = np.array([0.3, 2.0, 10.0])
    assert np.allclose(ev_wide.S(1 / 2, t), ev_narrow.S(1 / 2, t), rtol=1e-7, atol=1e-12)


def test_contour_invalid_for_unstable():
    with pytest.raises(ContourInvalid):
        KernelEvaluator(CharTriple(1, 1, -1), O)
    with pytest.raises(ContourInvalid):
        KernelEvaluator(CharTriple(0, 3, 0.5), O)


def test_S_small_time_exponent():
    ev = get_evaluator(EX3.triple, EX3.orders)
    small = 2.0 ** -np.arange(1, 11)
    for beta in (EX3.orders.alpha1, EX3.orders.alpha2, EX3.orders.l):
        v = small ** (1 - beta) * np.abs(ev.S(beta, small))
        assert np.all(np.isfinite(v)) and v.max() < 10


def test_R_decay_bound_example1():
    big = 2.0 ** np.arange(0, 8)
    for lam in (0, 1 / 3, 1 / 2):
        v = big ** (1 / 3) * np.abs(eval_R(SpecFunKind("R", 0 if lam == 0 else lam), big, EX1.triple, EX1.orders))
        assert np.all(np.isfinite(v)) and v.max() < 50


def test_convolution_zero_and_linearity():
    grid = uniform_grid(1 / 50, 4)
    k = SpecFunKind("S", "a1")
    z = convolve_S(k, lambda t: 0 * t, grid, EX3.triple, EX3.orders)
    assert np.all(z == 0)
    f = lambda t: np.cos(t)  # noqa: E731
    g = lambda t: 1 / (1 + t) ** 2  # noqa: E731
    lhs = convolve_S(k, lambda t: 2.5 * f(t) - 1.5 * g(t), grid, EX3.triple, EX3.orders)
    rhs = (2.5 * convolve_S(k, f, grid, EX3.triple, EX3.orders)
           - 1.5 * convolve_S(k, g, grid, EX3.triple, EX3.orders))
    assert np.max(np.abs(lhs - rhs)) <= 1e-9 * max(1, np.max(np.abs(lhs)))


@pytest.mark.parametrize("a11,a22,orders", [(-1.0, -0.5, O), (-0.7, -2.0, FracOrders(0.6, 0.9))])
def test_convolution_of_one_against_series(a11, a22, orders):
    tr, o = diag(a11, a22, orders)
    grid = uniform_grid(1 / 100, 2)
    one = lambda t: np.ones_like(t)  # noqa: E731
    c = (convolve_S(SpecFunKind("S", "a1"), one, grid, tr, o, verify=True)
         - a22 * convolve_S(SpecFunKind("S", "l"), one, grid, tr, o, verify=True))
    for k in (10, 50, 100, 200):
        t = grid[k]
        ref = (ml1(o.alpha1, a11 * t ** o.alpha1) - 1) / a11
        assert c[k] == pytest.approx(ref, rel=1e-5, abs=1e-8)


def test_convolution_with_paper_forcing_vanishes():
    grid = uniform_grid(1 / 20, 128)
    f = paper_forcing(1)
    for idx in ("a1", "a2", "l"):
        c = convolve_S(SpecFunKind("S", idx), f, grid, EX3.triple, EX3.orders)
        peak = np.max(np.abs(c))
        at64, at128 = abs(c[64 * 20]), abs(c[128 * 20])
        assert at128 < 0.2 * peak and at128 < at64 * 1.01


def test_voc_zero_solution():
    s = PlanarSystem(EX3.A, EX3.orders)
    tr = linear_voc_solution(s, (0.0, 0.0), uniform_grid(1 / 100, 3))
    assert np.all(tr.samples == 0) and tr.method == "voc"


def test_voc_diagonal_matches_series():
    o = FracOrders(0.4, 0.7)
    s = PlanarSystem(np.diag([-1.0, -0.6]), o)
    tr = linear_voc_solution(s, (1.0, -2.0), uniform_grid(1 / 100, 2))
    for k in (0, 20, 100, 200):
        t = tr.t[k]
        assert tr.samples[k, 0] == pytest.approx(ml1(0.4, -t ** 0.4), abs=1e-6)
        assert tr.samples[k, 1] == pytest.approx(-2 * ml1(0.7, -0.6 * t ** 0.7), abs=1e-6)


def test_voc_initial_condition_extrapolates():
    for ex in (EX1, EX3):
        tr = linear_voc_solution(ex, (1.0, 2.0), uniform_grid(1 / 2000, 0.01))
        # near 0 the solution expands in powers k1 alpha1 + k2 alpha2
        t = tr.t[1:12]
        a1, a2 = ex.orders.alpha1, ex.orders.alpha2
        basis = np.column_stack([t ** p for p in (0, a1, a2, 2 * a1, a1 + a2, 2 * a2)])
        for j in range(2):
            coef = np.linalg.lstsq(basis, tr.samples[1:12, j], rcond=None)[0]
            assert abs(coef[0] - (1.0, 2.0)[j]) < 1e-3


def test_M_beta_properties():
    tr, o = EX1.triple, EX1.orders
    k = SpecFunKind("S", "a1")
    m64 = compute_M_beta(k, tr, o, 64)
    m128 = compute_M_beta(k, tr, o, 128)
    assert m64 <= m128 <= 1.1 * m64
    ev = get_evaluator(tr, o)
    base = compute_M_beta(k, tr, o, 16, kernel=lambda t: ev.S(o.alpha1, t))
    dbl = compute_M_beta(k, tr, o, 16, kernel=lambda t: 2 * ev.S(o.alpha1, t))
    assert dbl == pytest.approx(2 * base, rel=1e-12)
    for idx in ("a1", "a2", "l"):
        assert np.isfinite(compute_M_beta(SpecFunKind("S", idx), EX3.triple, EX3.orders, 128))


def test_M_beta_quadrature_against_closed_form():
    # S(tau) = tau^(b-1): the integral is a Beta function
    o = FracOrders(0.3, 0.6)
    b = 0.6
    m = compute_M_beta(SpecFunKind("S", "a2"), CharTriple(-1, -1, 1), o, 1,
                       kernel=lambda t: t ** (b - 1))
    ref = gamma(b) * gamma(1 - o.nu) / gamma(b + 1 - o.nu)
    assert m == pytest.approx(ref, rel=1e-8)
