"""Norms in ``A^p_omega``, ``A^inf_omega``, ``S^p_omega``, ``S^inf_omega`` and related checks.

``S`` spaces carry the extra factor ``(1 + phi'(|z|))^(-1)`` inside the
weighted integrand; they measure derivatives in Littlewood-Paley formulas.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kernel import KernelMoments, proxy_coeffs
from .quadrature import DiskGrid, local_disk_rule, refined_sup
from .series import PowerSeries, _growth_ratio, differentiate, horner

__all__ = [
    "NormReport",
    "parse_space",
    "norm",
    "littlewood_paley_ratio",
    "atomic_family",
    "atomic_family_report",
    "subharmonic_constant",
]


def parse_space(space: str) -> str:
    """Normalize tags like ``"A"``, ``"A^p"``, ``"S^inf"`` to ``"A"`` or ``"S"``."""
    tag = str(space).strip().upper()[:1]
    if tag not in ("A", "S"):
        raise ValueError(f"unknown space tag {space!r}; expected A or S")
    return tag


def _check_p(p: float) -> float:
    p = float(p)
    if not p > 0:
        raise ValueError(f"exponent p must lie in (0, inf], got {p}")
    return p


def _radial_factor(w, r, space: str, p: float) -> np.ndarray:
    """``omega^(p/2) (1 + phi')^(-p)`` (S) or ``omega^(p/2)`` (A); ``p = 1`` for sup norms."""
    out = np.exp(0.5 * p * w.log_omega(r))
    if space == "S":
        out = out / (1.0 + w.phi1(r)) ** p
    return out


@dataclass
class NormReport:
    value: float
    space: str
    p: float
    grid: dict
    diagnostics: dict = field(default_factory=dict)

    @property
    def tag(self) -> str:
        return f"{self.space}^{'inf' if np.isinf(self.p) else format(self.p, 'g')}"

    def to_dict(self) -> dict:
        return {"space": self.tag, "value": self.value, "grid": self.grid,
                "diagnostics": self.diagnostics}


def norm(f: PowerSeries, space: str, p: float, grid: DiskGrid, w) -> NormReport:
    """Weighted norm of ``f`` by disk quadrature.

    Parameters
    ----------
    f
        Function to measure.
    space
        ``"A"`` or ``"S"`` (``"A^p"`` style tags are accepted).
    p
        Exponent in ``(0, inf]``.
    grid, w
        Quadrature grid and weight.

    Notes
    -----
    ``diagnostics["edge_fraction"]`` is the share of the integrand carried by
    the outermost ring (sup norms: ratio of the outermost-ring maximum to the
    overall maximum). A large value means ``grid.r_max`` cuts off mass.
    """
    space = parse_space(space)
    p = _check_p(p)
    vals = np.abs(grid.series_values(f.coeffs))
    diag = {"degree_cap": f.degree_cap, "is_polynomial": f.is_polynomial}
    if not f.is_polynomial:
        diag["growth_times_rmax"] = _growth_ratio(f.coeffs) * grid.r_max

    if np.isinf(p):
        dens = vals * _radial_factor(w, grid.radii, space, 1.0)[:, None]
        top = float(dens.max())
        if top == 0.0:
            value = 0.0
        else:
            def func(pts):
                r = np.abs(pts)
                return np.abs(horner(f.coeffs, pts)) * _radial_factor(w, r, space, 1.0)
            value = refined_sup(dens, grid, func)
        diag["edge_fraction"] = float(dens[-1].max() / top) if top > 0 else 0.0
    else:
        dens = vals**p * _radial_factor(w, grid.radii, space, p)[:, None]
        rings = dens.sum(axis=1) / grid.n_theta * grid.radial_weights
        total = float(rings.sum())
        value = total ** (1.0 / p)
        diag["edge_fraction"] = float(rings[-1] / total) if total > 0 else 0.0
    return NormReport(float(value), space, p, grid.to_dict(), diag)


def littlewood_paley_ratio(f: PowerSeries, p: float, grid: DiskGrid, w) -> float:
    """``(|f(0)|^p + ||f'||_{S^p}^p)^(1/p) / ||f||_{A^p}``; for ``p = inf`` the sum is linear."""
    p = _check_p(p)
    den = norm(f, "A", p, grid, w).value
    if den == 0.0:
        raise ValueError("Littlewood-Paley ratio undefined for f = 0")
    f0 = abs(complex(f.coeffs[0]))
    dnorm = norm(differentiate(f), "S", p, grid, w).value
    if np.isinf(p):
        return (f0 + dnorm) / den
    return (f0**p + dnorm**p) ** (1.0 / p) / den


def _lp_norm(x: np.ndarray, p: float) -> float:
    x = np.abs(np.asarray(x, dtype=complex))
    if np.isinf(p):
        return float(x.max()) if x.size else 0.0
    return float(np.sum(x**p) ** (1.0 / p))


def atomic_family(lattice, m: KernelMoments, grid: DiskGrid, p: float, coefficients) -> PowerSeries:
    """``F = sum_k lambda_k Ft_{z_k} / tau(z_k)^(2/p)`` (no ``tau`` factor for ``p = inf``).

    ``Ft_a = K_a omega(a)^(1/2) tau(a)^2`` is the kernel proxy; the result is
    truncated at the moment degree ``m.N``. ``grid`` fixes the working disk:
    every center must lie inside it.
    """
    p = _check_p(p)
    centers = np.asarray(lattice.centers, dtype=complex)
    lam = np.asarray(coefficients, dtype=complex)
    if lam.shape != centers.shape:
        raise ValueError(f"need one coefficient per center ({centers.size}), got {lam.size}")
    if not np.isfinite(_lp_norm(lam, p)):
        raise ValueError("coefficient sequence has infinite norm")
    if centers.size and np.max(np.abs(centers)) > grid.r_max:
        raise ValueError("lattice extends beyond the grid")
    w = m.weight
    out = np.zeros(m.N + 1, dtype=complex)
    for a, c in zip(centers, lam):
        if c == 0:
            continue
        scale = 1.0 if np.isinf(p) else float(w.tau(abs(a))) ** (-2.0 / p)
        out += c * scale * proxy_coeffs(m, a)
    return PowerSeries(out, is_polynomial=False)


def atomic_family_report(lattice, m: KernelMoments, grid: DiskGrid, p: float,
                         coefficients) -> dict:
    """``||F||_{A^p}``, ``||lambda||_{l^p}`` and their ratio for :func:`atomic_family`."""
    F = atomic_family(lattice, m, grid, p, coefficients)
    nf = norm(F, "A", p, grid, m.weight).value
    nl = _lp_norm(coefficients, p)
    return {"n_atoms": int(np.size(coefficients)), "p": p, "norm_F": nf, "norm_lambda": nl,
            "ratio": nf / nl if nl > 0 else 0.0}


def subharmonic_constant(f: PowerSeries, points, p: float, beta: float, w, delta: float,
                         gamma: float = 0.0, n_r: int = 12, n_theta: int = 24) -> np.ndarray:
    """Smallest ``M`` with ``|f(z)|^p W(z) <= M (delta tau(z))^(-2) int_{D_delta(z)} |f|^p W dA``.

    Here ``W = omega^beta (1 + phi')^(-gamma)``. The local integral uses a polar
    Gauss rule on each disk. Returns one value per point (``nan`` where the
    local integral vanishes).
    """
    p = _check_p(p)
    if np.isinf(p):
        raise ValueError("the local mean-value estimate needs finite p")

    def W(r):
        return np.exp(beta * w.log_omega(r) - gamma * np.log1p(w.phi1(r)))

    out = []
    for z in np.atleast_1d(np.asarray(points, dtype=complex)):
        rad = delta * float(w.tau(abs(z)))
        pts, wts = local_disk_rule(z, rad, n_r=n_r, n_theta=n_theta)
        if np.max(np.abs(pts)) >= 1.0:
            raise ValueError(f"D_delta({z}) leaves the disk")
        mean = float(np.dot(wts, np.abs(horner(f.coeffs, pts)) ** p * W(np.abs(pts)))) / rad**2
        val = abs(complex(horner(f.coeffs, z))) ** p * float(W(abs(z)))
        out.append(val / mean if mean > 0 else np.nan)
    return np.array(out)
