"""Independent reference values used by the tests.

Nothing here calls into the package's numerical code: the Mittag-Leffler
functions come from their power series in high-precision arithmetic and the
characteristic function from numpy's own complex power.
"""

import mpmath as mp
import numpy as np


def mittag_leffler(alpha, beta, z):
    """``E_{alpha,beta}(z) = sum_k z^k / Gamma(alpha k + beta)`` for real z.

    The working precision grows with the size of the largest series term,
    about ``exp(|z|^(1/alpha))``, so cancellation for negative z is harmless.
    """
    z = float(z)
    lost = abs(z) ** (1.0 / alpha) / 2.3 if z else 0.0
    with mp.workdps(int(30 + lost)):
        zz, al, be = mp.mpf(z), mp.mpf(alpha), mp.mpf(beta)
        peak = 2.0 * abs(z) ** (1.0 / alpha) / alpha + 10
        total, k = mp.mpf(0), 0
        while True:
            term = zz ** k / mp.gamma(al * k + be)
            total += term
            k += 1
            if k > peak and abs(term) < mp.mpf(10) ** -25 * max(1, abs(total)):
                return float(total)


def ml1(alpha, z):
    return mittag_leffler(alpha, 1.0, z)


def q_direct(triple, orders, s):
    """Q(s) with numpy's principal complex power."""
    a, b, c = triple
    a1, a2 = orders
    s = np.asarray(s, dtype=complex)
    return s ** (a1 + a2) - a * s ** a2 - b * s ** a1 + c


def brute_zero_count(triple, orders, half_angle=np.pi / 2, n=400_000):
    """Zeros of Q in ``{|arg s| < half_angle}`` from a dense, fixed contour walk.

    The contour is the boundary of ``{r_lo <= |s| <= r_hi, |arg s| <= half_angle}``
    with generous radii; the winding number is read off the unwrapped phase.
    """
    a, b, c = triple
    l = sum(orders)
    scale = abs(a) + abs(b) + abs(c) + 1.0
    r_hi = (8 * scale) ** (1.0 / min(l - max(orders), min(orders))) + 8 * scale ** (1.0 / l)
    r_lo = min(1e-3, (abs(c) / (8 * scale)) ** (1.0 / min(orders)))
    th = half_angle
    m = n // 4
    rays = np.geomspace(r_lo, r_hi, m)
    phis = np.linspace(-th, th, m)
    path = np.concatenate([
        r_lo * np.exp(1j * phis[::-1]) * 0 + rays * np.exp(-1j * th),  # lower ray outward
        r_hi * np.exp(1j * phis),                                      # big arc
        rays[::-1] * np.exp(1j * th),                                   # upper ray inward
        r_lo * np.exp(1j * phis[::-1]),                                 # small arc clockwise
    ])
    q = q_direct(triple, orders, path)
    phase = np.unwrap(np.angle(np.append(q, q[0])))
    return int(round((phase[-1] - phase[0]) / (2 * np.pi)))


# ---------------------------------------------------------------------------
# samplers that land inside the hypotheses of each explicit criterion

def _q(a1, a2):
    hp = np.pi / 2
    sl = np.sin((a1 + a2) * hp)
    return np.sin(a1 * hp) / sl, np.sin(a2 * hp) / sl


def _margin(rng):
    # log-uniform relative slack, down to near-boundary cases
    return 1.0 + 10 ** rng.uniform(-6, 0.5)


def sample_lemma(tag, rng):
    """Random ``((a, b, c), (alpha1, alpha2))`` satisfying the hypothesis of ``tag``."""
    while True:
        a1, a2 = np.sort(rng.uniform(0.05, 1.0, 2))
        if a2 - a1 > 1e-3:
            break
    q1, q2 = _q(a1, a2)
    u = _margin(rng)
    if tag == "L3.2":
        a, b = -rng.uniform(0, 5, 2) * (rng.uniform(size=2) > 0.2)
        c = rng.uniform(1e-3, 5)
    elif tag == "L3.3":
        a, b = 0.0, rng.uniform(1e-2, 5)
        c = (b * q1) ** (a1 / a2) * b * q2 * u
    elif tag == "L3.4":
        a, b = rng.uniform(1e-2, 5), 0.0
        c = (a * q2) ** (a2 / a1) * a * q1 * u
    elif tag == "L3.5i":
        while True:
            a, b = rng.uniform(1e-2, 4, 2)
            if a * q2 + b * q1 > 1:
                break
        c = (a * q2 * ((a + b) * q2) ** (a2 / a1) + b * (a + b) * q2 ** 2) * u
    elif tag == "L3.5ii":
        a, b = rng.uniform(1e-3, 1, 2)
        s = a * q2 + b * q1
        if s > 1:
            a, b = a / s * rng.uniform(0.2, 1), b / s * rng.uniform(0.2, 1)
        c = (a * q1 + b * q2) * u
    elif tag == "L3.6i":
        a = -rng.uniform(1e-2, 3)
        b = (1 - a * q2) / q1 * _margin(rng)
        c = (b * q1) ** (a1 / a2) * b * q2 * u
    elif tag == "L3.6ii":
        a = -rng.uniform(1e-2, 3)
        b = rng.uniform(1e-3, 1) * (1 - a * q2) / q1
        c = b * q2 * u
    else:
        raise ValueError(tag)
    return (float(a), float(b), float(c)), (float(a1), float(a2))


LEMMA_TAGS = ("L3.2", "L3.3", "L3.4", "L3.5i", "L3.5ii", "L3.6i", "L3.6ii")


def imaginary_locus_triple(rng):
    """Random ``(a, b, c)`` with a, b, c > 0 such that Q has the zero ``i omega0``.

    Inverts ``a = rho2 w^a1 - c rho1 w^-a2``, ``b = c rho2 w^-a1 - rho1 w^a2``.
    """
    while True:
        a1, a2 = np.sort(rng.uniform(0.05, 1.0, 2))
        if a2 - a1 < 1e-2:
            continue
        hp = np.pi / 2
        sd = np.sin((a2 - a1) * hp)
        r1, r2 = np.sin(a1 * hp) / sd, np.sin(a2 * hp) / sd
        w = 10 ** rng.uniform(-1, 1)
        lo = r1 * w ** (a2 + a1) / r2
        hi = r2 * w ** (a1 + a2) / r1
        c = lo * (hi / lo) ** rng.uniform(0.05, 0.95)
        a = r2 * w ** a1 - c * r1 * w ** -a2
        b = c * r2 * w ** -a1 - r1 * w ** a2
        if a > 0 and b > 0:
            return (float(a), float(b), float(c)), (float(a1), float(a2)), float(w)
