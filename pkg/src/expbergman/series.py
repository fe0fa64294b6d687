"""Truncated power series on the unit disk.

A :class:`PowerSeries` holds Taylor coefficients ``a_0 .. a_N`` of an analytic
function. ``is_polynomial`` marks whether the coefficient list is the whole
function (a polynomial) or the truncation of an infinite series; operations
keep track of that so composition can refuse uncontrolled re-expansions.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import comb

import numpy as np

__all__ = [
    "PowerSeries",
    "differentiate",
    "integrate_from_0",
    "multiply",
    "compose",
    "evaluate",
    "monomial",
    "identity",
    "constant",
    "horner",
]


@dataclass(frozen=True, eq=False)
class PowerSeries:
    coeffs: np.ndarray
    is_polynomial: bool = True

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree_cap(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, z):
        return evaluate(self, z)

    def __add__(self, other: PowerSeries) -> PowerSeries:
        n = max(self.coeffs.size, other.coeffs.size)
        out = np.zeros(n, dtype=complex)
        out[: self.coeffs.size] += self.coeffs
        out[: other.coeffs.size] += other.coeffs
        return PowerSeries(out, self.is_polynomial and other.is_polynomial)

    def __sub__(self, other: PowerSeries) -> PowerSeries:
        return self + (-1.0) * other

    def __mul__(self, t) -> PowerSeries:
        if isinstance(t, PowerSeries):
            return multiply(self, t, self.degree_cap + t.degree_cap)
        return PowerSeries(self.coeffs * complex(t), self.is_polynomial)

    __rmul__ = __mul__

    def __neg__(self) -> PowerSeries:
        return (-1.0) * self

    def padded(self, cap: int) -> np.ndarray:
        """Coefficients truncated or zero-padded to length ``cap + 1``."""
        out = np.zeros(cap + 1, dtype=complex)
        k = min(cap + 1, self.coeffs.size)
        out[:k] = self.coeffs[:k]
        return out

    def allclose(self, other: PowerSeries, atol: float = 0.0, rtol: float = 0.0) -> bool:
        n = max(self.degree_cap, other.degree_cap)
        return bool(np.allclose(self.padded(n), other.padded(n), atol=atol, rtol=rtol))

    def to_pairs(self) -> list[list[float]]:
        return [[float(c.real), float(c.imag)] for c in self.coeffs]

    @classmethod
    def from_pairs(cls, pairs, is_polynomial: bool = True) -> PowerSeries:
        """Build from ``[[re, im], ...]`` (plain real numbers are accepted too)."""
        vals = []
        for p in pairs:
            if isinstance(p, (list, tuple)):
                if len(p) != 2:
                    raise ValueError(f"series literal entries must be [re, im] pairs, got {p!r}")
                vals.append(complex(float(p[0]), float(p[1])))
            else:
                vals.append(complex(float(p)))
        return cls(np.array(vals, dtype=complex), is_polynomial)


def monomial(k: int, coeff: complex = 1.0) -> PowerSeries:
    c = np.zeros(k + 1, dtype=complex)
    c[k] = coeff
    return PowerSeries(c)


def identity() -> PowerSeries:
    return monomial(1)


def constant(value: complex) -> PowerSeries:
    return PowerSeries([value])


def differentiate(f: PowerSeries) -> PowerSeries:
    a = f.coeffs
    if a.size == 1:
        return PowerSeries([0.0], f.is_polynomial)
    return PowerSeries(a[1:] * np.arange(1, a.size), f.is_polynomial)


def integrate_from_0(f: PowerSeries) -> PowerSeries:
    a = f.coeffs
    out = np.zeros(a.size + 1, dtype=complex)
    out[1:] = a / np.arange(1, a.size + 1)
    return PowerSeries(out, f.is_polynomial)


def multiply(f: PowerSeries, g: PowerSeries, cap: int) -> PowerSeries:
    """Cauchy product truncated at degree ``cap`` (``cap <= N_f + N_g``)."""
    if cap < 0 or cap > f.degree_cap + g.degree_cap:
        raise ValueError(f"cap={cap} outside [0, {f.degree_cap + g.degree_cap}]")
    prod = np.convolve(f.coeffs, g.coeffs)[: cap + 1]
    exact = f.is_polynomial and g.is_polynomial and cap == f.degree_cap + g.degree_cap
    if f.is_polynomial and g.is_polynomial and not exact:
        exact = not np.any(np.convolve(f.coeffs, g.coeffs)[cap + 1:])
    return PowerSeries(prod, exact)


def _mul_trunc(a: np.ndarray, b: np.ndarray, cap: int) -> np.ndarray:
    out = np.convolve(a, b)[: cap + 1]
    if out.size < cap + 1:
        out = np.pad(out, (0, cap + 1 - out.size))
    return out


def taylor_shift(f: PowerSeries, c: complex) -> tuple[PowerSeries, float]:
    """Re-expand polynomial ``f`` about ``c``: returns ``b`` with ``f(c + h) = sum b_k h^k``.

    The second return value is the cancellation factor
    ``max_k sum_n |a_n| C(n,k) |c|^(n-k) / max(|b_k|, tiny)``; rounding error of
    ``b_k`` is about that factor times machine epsilon.
    """
    a = f.coeffs
    n = a.size
    b = np.zeros(n, dtype=complex)
    mag = np.zeros(n)
    for k in range(n):
        for j in range(k, n):
            term = a[j] * comb(j, k) * c ** (j - k)
            b[k] += term
            mag[k] += abs(term)
    scale = np.maximum(np.abs(b), np.finfo(float).tiny)
    nz = mag > 0
    with np.errstate(over="ignore"):  # total cancellation gives cond = inf
        cond = float(np.max(mag[nz] / scale[nz])) if np.any(nz) else 1.0
    return PowerSeries(b, True), cond


def compose(f: PowerSeries, phi: PowerSeries, cap: int) -> PowerSeries:
    """Taylor coefficients of ``f(phi(z))`` up to degree ``cap``.

    With ``phi(0) = 0`` this is nested (Horner) truncated multiplication and
    is exact in the retained degrees. With ``phi(0) != 0`` the function ``f``
    must be a polynomial: it is re-expanded about ``phi(0)`` first. A
    ``RuntimeWarning`` is emitted when that re-expansion loses more than
    eight digits to cancellation.
    """
    c0 = complex(phi.coeffs[0])
    if abs(c0) >= 1.0:
        raise ValueError(f"|phi(0)| = {abs(c0):.6g} >= 1: phi is not a self-map candidate")
    if cap < 0:
        raise ValueError("cap must be nonnegative")
    if c0 != 0:
        if not f.is_polynomial:
            raise ValueError("composition with phi(0) != 0 needs a polynomial f; "
                             "use pointwise evaluation for truncated series")
        f, cond = taylor_shift(f, c0)
        if cond * np.finfo(float).eps > 1e-8:
            warnings.warn(f"re-expansion about phi(0) has cancellation factor {cond:.3g}",
                          RuntimeWarning, stacklevel=2)
        psi = phi.padded(max(phi.degree_cap, 1)).copy()
        psi[0] = 0.0
    else:
        psi = phi.coeffs.copy()
    psi = psi[: cap + 1]
    a = f.coeffs
    acc = np.zeros(cap + 1, dtype=complex)
    acc[0] = a[-1]
    for k in range(a.size - 2, -1, -1):
        acc = _mul_trunc(acc, psi, cap)
        acc[0] += a[k]
    deg_f, deg_p = f.degree_cap, int(np.max(np.nonzero(psi)[0], initial=0))
    exact = f.is_polynomial and phi.is_polynomial and deg_f * deg_p <= cap
    return PowerSeries(acc, exact)


def _growth_ratio(a: np.ndarray) -> float:
    """Root-test estimate of ``1/radius of convergence`` from the top coefficients."""
    n = a.size
    if n < 4:
        return 0.0
    ks = np.arange(n // 2, n)
    mags = np.abs(a[ks])
    nz = mags > 0
    if not np.any(nz):
        return 0.0
    return float(np.max(mags[nz] ** (1.0 / ks[nz])))


def evaluate(f: PowerSeries, z):
    """Horner evaluation of the truncated polynomial at ``z`` (scalar or array)."""
    z_arr = np.asarray(z, dtype=complex)
    if not f.is_polynomial and z_arr.size:
        growth = _growth_ratio(f.coeffs)
        if growth * float(np.max(np.abs(z_arr))) >= 1.0:
            warnings.warn("evaluation point lies where the truncated series may diverge "
                          f"(|z| * growth = {growth * float(np.max(np.abs(z_arr))):.3g})",
                          RuntimeWarning, stacklevel=2)
    return horner(f.coeffs, z_arr)


def horner(coeffs: np.ndarray, z):
    """Evaluate ``sum coeffs[k] z**k`` without divergence diagnostics."""
    z_arr = np.asarray(z, dtype=complex)
    acc = np.full(z_arr.shape, coeffs[-1], dtype=complex)
    for k in range(coeffs.size - 2, -1, -1):
        acc = acc * z_arr + coeffs[k]
    if acc.ndim == 0:
        return complex(acc)
    return acc
