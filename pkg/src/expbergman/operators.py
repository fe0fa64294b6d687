"""Generalized Volterra operators on truncated power series.

    GI f(z) = int_0^z f'(phi(xi)) g(xi) dxi,     GV f(z) = int_0^z f(phi(xi)) g(xi) dxi,

with the classical cases ``V_g f = int f g'`` (``GV`` with ``phi = id`` and
symbol ``g'``) and ``J_g f = int f' g`` (``GI`` with ``phi = id``).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .series import (PowerSeries, compose, differentiate, horner, identity,
                     integrate_from_0, multiply)
from .spaces import norm

__all__ = [
    "SymbolPair",
    "OperatorSpec",
    "OPERATORS",
    "apply_GI",
    "apply_GV",
    "apply_Vg",
    "apply_Jg",
    "operator_norm_lower_bound",
]

OPERATORS = ("GI", "GV", "Vg", "Jg")


def _truncate(f: PowerSeries, cap: int) -> PowerSeries:
    if f.degree_cap <= cap:
        return f
    exact = f.is_polynomial and not np.any(f.coeffs[cap + 1:])
    return PowerSeries(f.coeffs[: cap + 1], exact)


def _is_identity(phi: PowerSeries) -> bool:
    c = phi.coeffs
    return c.size >= 2 and c[0] == 0 and c[1] == 1 and not np.any(c[2:])


@dataclass(frozen=True, eq=False)
class SymbolPair:
    """Symbols ``(phi, g)`` of a generalized Volterra operator.

    ``certificate`` is the sampled maximum of ``|phi|`` on the circle
    ``|z| = r_cert`` (4096 points); by the maximum principle it bounds ``|phi|``
    on the working disk ``|z| <= r_cert``. Construction fails unless it is
    below one.
    """

    phi: PowerSeries
    g: PowerSeries
    r_cert: float = 0.99
    certificate: float = field(init=False)

    def __post_init__(self):
        if abs(complex(self.phi.coeffs[0])) >= 1.0:
            raise ValueError("|phi(0)| >= 1: phi is not a self-map of the disk")
        if not 0 < self.r_cert < 1:
            raise ValueError("r_cert must lie in (0, 1)")
        circle = self.r_cert * np.exp(2j * np.pi * np.arange(4096) / 4096)
        cert = float(np.max(np.abs(horner(self.phi.coeffs, circle))))
        if not cert < 1.0:
            raise ValueError(f"sampled max |phi| on |z|={self.r_cert:g} is {cert:.6g} >= 1")
        object.__setattr__(self, "certificate", cert)

    @property
    def phi_is_identity(self) -> bool:
        return _is_identity(self.phi)

    def scaled(self, t: complex) -> SymbolPair:
        return SymbolPair(self.phi, t * self.g, self.r_cert)


def _compose(f: PowerSeries, phi: PowerSeries, cap: int) -> PowerSeries:
    if _is_identity(phi):
        return _truncate(f, cap)
    return compose(f, phi, cap)


def _default_cap(s: SymbolPair, f: PowerSeries) -> int:
    deg_phi = max(int(np.max(np.nonzero(s.phi.coeffs)[0], initial=1)), 1)
    return f.degree_cap * deg_phi + s.g.degree_cap + 1


def _apply(inner: PowerSeries, s: SymbolPair, cap: int) -> PowerSeries:
    comp = _compose(inner, s.phi, max(cap - 1, 0))
    prod = multiply(comp, s.g, min(max(cap - 1, 0), comp.degree_cap + s.g.degree_cap))
    return _truncate(integrate_from_0(prod), cap)


def apply_GI(s: SymbolPair, f: PowerSeries, cap: int | None = None) -> PowerSeries:
    """``int_0^z f'(phi) g``, truncated at degree ``cap``."""
    cap = _default_cap(s, f) if cap is None else int(cap)
    return _apply(differentiate(f), s, cap)


def apply_GV(s: SymbolPair, f: PowerSeries, cap: int | None = None) -> PowerSeries:
    """``int_0^z f(phi) g``, truncated at degree ``cap``."""
    cap = _default_cap(s, f) + 1 if cap is None else int(cap)
    return _apply(f, s, cap)


def apply_Vg(g0: PowerSeries, f: PowerSeries) -> PowerSeries:
    """``V_{g0} f = int_0^z f g0'`` (exact product, no truncation)."""
    dg = differentiate(g0)
    return integrate_from_0(multiply(f, dg, f.degree_cap + dg.degree_cap))


def apply_Jg(g0: PowerSeries, f: PowerSeries) -> PowerSeries:
    """``J_{g0} f = int_0^z f' g0`` (exact product, no truncation)."""
    df = differentiate(f)
    return integrate_from_0(multiply(df, g0, df.degree_cap + g0.degree_cap))


@dataclass(frozen=True)
class OperatorSpec:
    """Operator selection as read from a run configuration.

    ``g`` is the symbol multiplying the integrand for ``GI``/``GV`` and the
    function ``g0`` itself for ``Vg``/``Jg``. ``phi`` is ignored for ``Vg``
    and ``Jg``.
    """

    op: str
    phi: tuple = ((0.0, 0.0), (1.0, 0.0))
    g: tuple = ((1.0, 0.0),)

    def __post_init__(self):
        if self.op not in OPERATORS:
            raise ValueError(f"unknown operator {self.op!r}; expected one of {OPERATORS}")
        for name in ("phi", "g"):
            val = tuple(tuple(map(float, c)) if isinstance(c, (list, tuple)) else (float(c), 0.0)
                        for c in getattr(self, name))
            if not val:
                raise ValueError(f"{name} needs at least one coefficient")
            object.__setattr__(self, name, val)

    @property
    def family(self) -> str:
        """``GI`` or ``GV``: the generalized operator used for evaluation."""
        return {"GI": "GI", "GV": "GV", "Vg": "GV", "Jg": "GI"}[self.op]

    def symbols(self, r_cert: float = 0.99) -> SymbolPair:
        g = PowerSeries.from_pairs(self.g)
        if self.op == "Vg":
            return SymbolPair(identity(), differentiate(g), r_cert)
        if self.op == "Jg":
            return SymbolPair(identity(), g, r_cert)
        return SymbolPair(PowerSeries.from_pairs(self.phi), g, r_cert)

    def apply(self, f: PowerSeries, cap: int | None = None, r_cert: float = 0.99) -> PowerSeries:
        s = self.symbols(r_cert)
        return apply_GI(s, f, cap) if self.family == "GI" else apply_GV(s, f, cap)

    def to_dict(self) -> dict:
        return {"op": self.op, "phi": [list(c) for c in self.phi], "g": [list(c) for c in self.g]}

    @classmethod
    def from_dict(cls, d: dict) -> OperatorSpec:
        return cls(d["op"], tuple(map(tuple, d.get("phi", cls.phi))), tuple(map(tuple, d.get("g", cls.g))))


def operator_norm_lower_bound(op: OperatorSpec, p: float, q: float, family, grid, w,
                              cap: int | None = None) -> dict:
    """``max_f ||T f||_{A^q} / ||f||_{A^p}`` over ``family``: a lower bound for ``||T||``.

    Members with zero (or non-finite) ``A^p`` norm are skipped with a warning.
    Returns ``best_ratio``, the ``witness`` index and all ``ratios`` (``nan``
    for skipped members).
    """
    family = list(family)
    if not family:
        raise ValueError("operator norm estimate needs a nonempty family")
    s = op.symbols(min(grid.r_max, 0.999))
    ratios = []
    for i, f in enumerate(family):
        nf = norm(f, "A", p, grid, w).value
        if not (nf > 0 and np.isfinite(nf)):
            warnings.warn(f"family member {i} has A^p norm {nf}; skipped", RuntimeWarning,
                          stacklevel=2)
            ratios.append(float("nan"))
            continue
        Tf = apply_GI(s, f, cap) if op.family == "GI" else apply_GV(s, f, cap)
        ratios.append(norm(Tf, "A", q, grid, w).value / nf)
    arr = np.array(ratios)
    if np.all(np.isnan(arr)):
        raise ValueError("every family member has zero norm")
    k = int(np.nanargmax(arr))
    return {"best_ratio": float(arr[k]), "witness": k, "ratios": [float(x) for x in arr]}
