"""Domain types, validation and construction of planar multi-order systems.

A planar system is

    D^alpha x(t) = A x(t) + f(t)        (linear, non-autonomous)
    D^alpha x(t) = A x(t) + f(x(t))     (nonlinear, autonomous)

with Caputo derivatives of orders ``alpha = (alpha1, alpha2)`` acting
componentwise.  The characteristic function of ``A`` is

    Q(s) = s^(alpha1 + alpha2) - a11 s^alpha2 - a22 s^alpha1 + det A,

so everything about stability only depends on the triple
``(a, b, c) = (a11, a22, det A)``.
"""

from __future__ import annotations

import enum
import json
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, NamedTuple, Optional, Sequence, Union

import jsonschema
import numpy as np

from .exceptions import (
    EqualOrdersWithoutFlag,
    NonlinearityViolatesLipschitzAtZero,
    OrdersOutOfRange,
    ValidationError,
)

__all__ = [
    "FracOrders",
    "CharTriple",
    "PolynomialField",
    "PaperForcing",
    "TabulatedForcing",
    "PlanarSystem",
    "Trajectory",
    "Status",
    "StabilityVerdict",
    "PaperExample",
    "char_coeffs",
    "paper_forcing",
    "validate",
    "system_from_spec",
    "system_to_spec",
    "load_system_spec",
    "paper_example",
    "SYSTEM_SPEC_SCHEMA",
]


@dataclass(frozen=True)
class FracOrders:
    """Orders ``(alpha1, alpha2)`` of the two Caputo derivatives.

    Equal orders are only accepted with ``allow_equal=True``; stability
    criteria refuse them later on.
    """

    alpha1: float
    alpha2: float
    allow_equal: bool = False

    def __post_init__(self):
        a1, a2 = float(self.alpha1), float(self.alpha2)
        object.__setattr__(self, "alpha1", a1)
        object.__setattr__(self, "alpha2", a2)
        for a in (a1, a2):
            if not (np.isfinite(a) and 0.0 < a <= 1.0):
                raise OrdersOutOfRange(f"orders must lie in (0, 1], got {(a1, a2)}")
        if a1 == a2 and not self.allow_equal:
            raise EqualOrdersWithoutFlag(
                f"alpha1 == alpha2 == {a1}; pass allow_equal=True for the commensurate case"
            )

    @property
    def nu(self) -> float:
        return min(self.alpha1, self.alpha2)

    @property
    def l(self) -> float:  # noqa: E743
        return self.alpha1 + self.alpha2

    @property
    def as_array(self) -> np.ndarray:
        return np.array([self.alpha1, self.alpha2])

    @property
    def is_commensurate(self) -> bool:
        return self.alpha1 == self.alpha2


class CharTriple(NamedTuple):
    """Coefficients of ``Q(s) = s^l - a s^alpha2 - b s^alpha1 + c``."""

    a: float
    b: float
    c: float


def char_coeffs(system) -> CharTriple:
    """Return ``(a11, a22, det A)`` for a :class:`PlanarSystem` or a 2x2 matrix."""
    A = np.asarray(system.A if isinstance(system, PlanarSystem) else system, dtype=float)
    if A.shape != (2, 2):
        raise ValidationError(f"A must be 2x2, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValidationError("A has non-finite entries")
    return CharTriple(
        float(A[0, 0]), float(A[1, 1]), float(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0])
    )


Term = tuple[float, int, int]


@dataclass(frozen=True)
class PolynomialField:
    """Polynomial vector field ``f(x) = (f1(x), f2(x))``.

    Each component is a tuple of terms ``(coef, p1, p2)`` standing for
    ``coef * x1**p1 * x2**p2``.
    """

    x1: tuple[Term, ...] = ()
    x2: tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "x1", _normalize_terms(self.x1))
        object.__setattr__(self, "x2", _normalize_terms(self.x2))

    @property
    def components(self) -> tuple[tuple[Term, ...], tuple[Term, ...]]:
        return (self.x1, self.x2)

    def is_zero(self) -> bool:
        return not self.x1 and not self.x2

    def min_degree(self) -> Optional[int]:
        degs = [p1 + p2 for comp in self.components for _, p1, p2 in comp]
        return min(degs) if degs else None

    def __call__(self, x) -> np.ndarray:
        """Evaluate at ``x`` of shape ``(..., 2)``."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1] + (2,))
        for i, comp in enumerate(self.components):
            for coef, p1, p2 in comp:
                out[..., i] += coef * x[..., 0] ** p1 * x[..., 1] ** p2
        return out

    def jacobian(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        J = np.zeros((2, 2))
        for i, comp in enumerate(self.components):
            for coef, p1, p2 in comp:
                if p1:
                    J[i, 0] += coef * p1 * x[0] ** (p1 - 1) * x[1] ** p2
                if p2:
                    J[i, 1] += coef * p2 * x[0] ** p1 * x[1] ** (p2 - 1)
        return J

    def lipschitz_bound(self, r: float) -> float:
        """Upper bound of the max-norm Lipschitz constant of f on B(0, r).

        For the term ``c x1^p1 x2^p2`` both partial derivatives are bounded
        by ``|c| p_k r^(p1+p2-1)`` on the ball, and a row of the Jacobian
        contributes its absolute sum.
        """
        r = float(r)
        bounds = []
        for comp in self.components:
            total = 0.0
            for coef, p1, p2 in comp:
                deg = p1 + p2
                total += abs(coef) * deg * r ** (deg - 1)
            bounds.append(total)
        return max(bounds)

    def to_spec(self) -> dict:
        return {
            "x1": [[c, p1, p2] for c, p1, p2 in self.x1],
            "x2": [[c, p1, p2] for c, p1, p2 in self.x2],
        }


def _normalize_terms(terms) -> tuple[Term, ...]:
    merged: dict[tuple[int, int], float] = defaultdict(float)
    for term in terms:
        if len(term) != 3:
            raise ValidationError(f"term must be (coef, p1, p2), got {term!r}")
        coef, p1, p2 = term
        if int(p1) != p1 or int(p2) != p2 or p1 < 0 or p2 < 0:
            raise ValidationError(f"powers must be non-negative integers, got {term!r}")
        merged[(int(p1), int(p2))] += float(coef)
    return tuple(
        (coef, p1, p2) for (p1, p2), coef in sorted(merged.items()) if coef != 0.0
    )


class PaperForcing:
    """The forcing pair ``f_i(t) = 1`` on ``[0, 1)`` and ``t^(-2i)`` afterwards."""

    decay_exponent = 2.0

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.stack([paper_forcing(1)(t), paper_forcing(2)(t)], axis=-1)

    def __eq__(self, other):
        return isinstance(other, PaperForcing)

    def __hash__(self):
        return hash(PaperForcing)

    def __repr__(self):
        return "PaperForcing()"


class TabulatedForcing:
    """Forcing given by samples ``[(t, f1, f2), ...]`` with linear interpolation.

    Outside the table the end values are held constant.
    """

    decay_exponent = None

    def __init__(self, table):
        table = np.asarray(table, dtype=float)
        if table.ndim != 2 or table.shape[1] != 3 or len(table) < 2:
            raise ValidationError("forcing table needs at least two rows of [t, f1, f2]")
        if np.any(np.diff(table[:, 0]) <= 0):
            raise ValidationError("forcing table times must be strictly increasing")
        self.table = table

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        tt = self.table[:, 0]
        return np.stack(
            [np.interp(t, tt, self.table[:, 1]), np.interp(t, tt, self.table[:, 2])],
            axis=-1,
        )

    def __eq__(self, other):
        return isinstance(other, TabulatedForcing) and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash(self.table.tobytes())


def paper_forcing(component_index: int) -> Callable:
    """Scalar forcing ``f_i`` used throughout the worked examples."""
    if component_index not in (1, 2):
        raise ValueError(f"component_index must be 1 or 2, got {component_index!r}")
    power = 2 * component_index

    def f(t):
        t = np.asarray(t, dtype=float)
        safe = np.where(t >= 1.0, t, 1.0)
        out = np.where(t >= 1.0, safe ** (-power), 1.0)
        return out if out.ndim else float(out)

    f.__name__ = f"f{component_index}"
    return f


Forcing = Union[PaperForcing, TabulatedForcing, Callable]


@dataclass(frozen=True, eq=False)
class PlanarSystem:
    """A 2x2 multi-order system with an optional forcing or nonlinearity."""

    A: np.ndarray
    orders: FracOrders
    forcing: Optional[Forcing] = None
    nonlinearity: Optional[PolynomialField] = None

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.shape != (2, 2):
            raise ValidationError(f"A must be 2x2, got shape {A.shape}")
        A.setflags(write=False)
        object.__setattr__(self, "A", A)

    @property
    def triple(self) -> CharTriple:
        return char_coeffs(self)

    @property
    def is_linear(self) -> bool:
        return self.nonlinearity is None or self.nonlinearity.is_zero()

    def rhs(self, t, x) -> np.ndarray:
        """``A x + f(t) + g(x)`` for a single state ``x``."""
        out = self.A @ np.asarray(x, dtype=float)
        if self.forcing is not None:
            out = out + self.forcing(t)
        if self.nonlinearity is not None:
            out = out + self.nonlinearity(x)
        return out

    def with_(self, **changes) -> "PlanarSystem":
        kw = dict(A=self.A, orders=self.orders, forcing=self.forcing,
                  nonlinearity=self.nonlinearity)
        kw.update(changes)
        return PlanarSystem(**kw)


def validate(system: PlanarSystem) -> PlanarSystem:
    """Check the invariants of ``system`` and return a normalized copy."""
    if not isinstance(system.orders, FracOrders):
        raise ValidationError("orders must be a FracOrders instance")
    # re-running the constructor re-checks range and equality flag
    orders = FracOrders(system.orders.alpha1, system.orders.alpha2, system.orders.allow_equal)
    char_coeffs(system)
    nl = system.nonlinearity
    if nl is not None:
        nl = PolynomialField(nl.x1, nl.x2)
        for comp in nl.components:
            for coef, p1, p2 in comp:
                if p1 + p2 < 2:
                    raise NonlinearityViolatesLipschitzAtZero(
                        f"term {coef}*x1^{p1}*x2^{p2} has degree {p1 + p2} < 2; "
                        "constant and linear parts belong in A or the forcing"
                    )
        if nl.is_zero():
            nl = None
    if system.forcing is not None and nl is not None:
        raise ValidationError("a system carries either a forcing or a nonlinearity, not both")
    return PlanarSystem(system.A, orders, system.forcing, nl)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Samples of a solution on the uniform grid ``t_n = t0 + n h``."""

    t0: float
    h: float
    samples: np.ndarray
    method: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 2 or s.shape[1] != 2 or len(s) == 0:
            raise ValueError("samples must be a non-empty (N, 2) array")
        if self.method not in ("pi-trapezoidal", "voc", "picard", "external"):
            raise ValueError(f"unknown method tag {self.method!r}")
        if not self.h > 0:
            raise ValueError("step must be positive")
        object.__setattr__(self, "samples", s)

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(len(self.samples))

    @property
    def t_end(self) -> float:
        return self.t0 + self.h * (len(self.samples) - 1)

    def norms(self) -> np.ndarray:
        """Max-norm of every sample."""
        return np.max(np.abs(self.samples), axis=1)

    def __len__(self):
        return len(self.samples)


class Status(str, enum.Enum):
    ASYMPTOTICALLY_STABLE = "AsymptoticallyStable"
    NOT_ASYMPTOTICALLY_STABLE = "NotAsymptoticallyStable"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class StabilityVerdict:
    status: Status
    criteria_hit: list[str]
    winding_count: Optional[int] = None
    imaginary_zero_free: Optional[bool] = None
    diagnostics: str = ""

    @property
    def stable(self) -> bool:
        return self.status is Status.ASYMPTOTICALLY_STABLE

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "criteria_hit": list(self.criteria_hit),
            "winding_count": self.winding_count,
            "imaginary_zero_free": self.imaginary_zero_free,
            "diagnostics": self.diagnostics,
        }


# ---------------------------------------------------------------------------
# system-spec documents

_TERMS = {
    "type": "array",
    "items": {
        "type": "array",
        "prefixItems": [{"type": "number"}, {"type": "integer", "minimum": 0},
                  {"type": "integer", "minimum": 0}],
        "minItems": 3,
        "maxItems": 3,
    },
}

SYSTEM_SPEC_SCHEMA = {
    "type": "object",
    "properties": {
        "alpha": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        "A": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
            "minItems": 2,
            "maxItems": 2,
        },
        "forcing": {
            "oneOf": [
                {"enum": ["paper", "none"]},
                {
                    "type": "object",
                    "properties": {
                        "table": {
                            "type": "array",
                            "items": {"type": "array", "items": {"type": "number"},
                                      "minItems": 3, "maxItems": 3},
                            "minItems": 2,
                        }
                    },
                    "required": ["table"],
                    "additionalProperties": False,
                },
            ]
        },
        "nonlinearity": {
            "type": "object",
            "properties": {"x1": _TERMS, "x2": _TERMS},
            "additionalProperties": False,
        },
        "allow_equal_orders": {"type": "boolean"},
    },
    "required": ["alpha", "A"],
    "additionalProperties": False,
}


def system_from_spec(doc: dict) -> PlanarSystem:
    """Build and validate a system from a parsed system-spec document."""
    try:
        jsonschema.validate(doc, SYSTEM_SPEC_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ValidationError(f"invalid system spec: {exc.message}") from None
    orders = FracOrders(*doc["alpha"], allow_equal=doc.get("allow_equal_orders", False))
    forcing_doc = doc.get("forcing", "none")
    if forcing_doc == "paper":
        forcing = PaperForcing()
    elif forcing_doc == "none":
        forcing = None
    else:
        forcing = TabulatedForcing(forcing_doc["table"])
    nl = None
    if "nonlinearity" in doc:
        nl = PolynomialField(
            tuple(map(tuple, doc["nonlinearity"].get("x1", []))),
            tuple(map(tuple, doc["nonlinearity"].get("x2", []))),
        )
    return validate(PlanarSystem(np.array(doc["A"], dtype=float), orders, forcing, nl))


def system_to_spec(system: PlanarSystem) -> dict:
    doc = {
        "alpha": [system.orders.alpha1, system.orders.alpha2],
        "A": system.A.tolist(),
    }
    if isinstance(system.forcing, PaperForcing):
        doc["forcing"] = "paper"
    elif isinstance(system.forcing, TabulatedForcing):
        doc["forcing"] = {"table": system.forcing.table.tolist()}
    elif system.forcing is None:
        doc["forcing"] = "none"
    else:
        raise ValidationError("only the built-in or tabulated forcings can be serialized")
    if system.nonlinearity is not None:
        doc["nonlinearity"] = system.nonlinearity.to_spec()
    if system.orders.allow_equal:
        doc["allow_equal_orders"] = True
    return doc


def load_system_spec(source) -> PlanarSystem:
    """Load a system from a JSON file path, a JSON string or a dict."""
    if isinstance(source, dict):
        return system_from_spec(source)
    if isinstance(source, (str, Path)) and Path(source).exists():
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = str(source)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"system spec is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ValidationError("system spec must be a JSON object")
    return system_from_spec(doc)


# ---------------------------------------------------------------------------
# the eight worked examples

@dataclass(frozen=True, eq=False)
class PaperExample:
    number: int
    system: PlanarSystem
    initial_conditions: tuple[tuple[float, float], ...]
    nu: float
    lemma: str

    @property
    def x0(self) -> tuple[float, float]:
        return self.initial_conditions[0]


_EXAMPLE_DATA = {
    # n: (alpha, A, nonlinear?, lemma)
    1: ((1 / 3, 1 / 2), [[0.0, 0.25], [-2.0, 1.0]], False, "L3.3"),
    2: ((1 / 3, 1 / 2), [[0.0, 0.25], [-2.0, 1.0]], True, "L3.3"),
    3: ((0.6, 0.8), [[1.0, 2.0], [-1.0, 0.0]], False, "L3.4"),
    4: ((0.6, 0.8), [[1.0, 2.0], [-1.0, 0.0]], True, "L3.4"),
    5: ((0.3, 0.4), [[1.0, -1.0], [2.0, 1.0]], False, "L3.5i"),
    6: ((0.3, 0.4), [[0.1, -0.4], [0.7, 0.2]], True, "L3.5ii"),
    7: ((0.4, 0.5), [[-1.0, 2.0], [-5.0, 4.0]], False, "L3.6i"),
    8: ((0.4, 0.5), [[-1.0, -2.0], [2.0, 2.0]], True, "L3.6ii"),
}

# x1^2 x2^2 in the first equation, x1^2 + x2^2 in the second
_EXAMPLE_NONLINEARITY = PolynomialField(((1.0, 2, 2),), ((1.0, 2, 0), (1.0, 0, 2)))


def paper_example(n: int) -> PaperExample:
    """System, initial data and expected decay order of worked example ``n``."""
    if n not in _EXAMPLE_DATA:
        raise ValueError(f"example number must be in 1..8, got {n!r}")
    alpha, A, nonlinear, lemma = _EXAMPLE_DATA[n]
    orders = FracOrders(*alpha)
    if nonlinear:
        system = PlanarSystem(np.array(A), orders, None, _EXAMPLE_NONLINEARITY)
        ics = ((0.1, -0.2), (1.0, -1.0)) if n == 2 else ((0.1, -0.2),)
    else:
        system = PlanarSystem(np.array(A), orders, PaperForcing(), None)
        ics = ((1.0, 2.0),)
    return PaperExample(n, validate(system), ics, orders.nu, lemma)
