"""Reproducing kernels of ``A^2_omega`` for radial weights, and their band checks.

For a radial weight the monomials are orthogonal, so

    K_z(zeta) = sum_n (zeta conj(z))**n / c_n,    c_n = ||z^n||^2,

truncated at the degree ``N`` of the moment table.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .quadrature import DiskGrid, KernelMoments, local_disk_rule, radial_moments, refined_sup
from .series import PowerSeries, horner

__all__ = [
    "KernelMoments",
    "KernelTruncationError",
    "BandReport",
    "kernel_moments",
    "kernel_coeffs",
    "kernel_eval",
    "kernel_on_grid",
    "kernel_norm",
    "normalized_kernel",
    "test_function",
    "proxy_coeffs",
    "kernel_norm_band",
    "kernel_integral_band",
    "diagonal_band",
    "normalized_comparison_band",
    "test_function_report",
]

TAIL_TOL = 1e-10


class KernelTruncationError(ValueError):
    def __init__(self, msg: str, suggested_N: int):
        super().__init__(msg)
        self.suggested_N = suggested_N


def kernel_moments(w, N: int = 128) -> KernelMoments:
    return radial_moments(w, N, power=1.0)


def kernel_coeffs(m: KernelMoments, z: complex) -> np.ndarray:
    n = np.arange(m.N + 1)
    zc = np.conj(complex(z))
    if zc == 0:
        out = np.zeros(m.N + 1, dtype=complex)
        out[0] = 1.0 / m.c[0]
        return out
    return np.exp(n * np.log(zc)) / m.c


def _diag(m: KernelMoments, x) -> np.ndarray:
    """Truncated ``K_x(x)`` for radii ``x``."""
    x = np.asarray(x, dtype=float)
    return horner(1.0 / m.c, x * x).real


def _tail(m: KernelMoments, x) -> np.ndarray:
    """Bound on ``sum_{n>N} x^n / c_n`` from log-convexity of the moments."""
    x = np.asarray(x, dtype=float)
    rho = x * m.c[-1] / m.c_next
    with np.errstate(divide="ignore", under="ignore"):
        first = np.exp((m.N + 1) * np.log(np.maximum(x, 1e-300))) / m.c_next
        out = np.where(rho < 1.0, first / np.maximum(1.0 - rho, 1e-300), np.inf)
    return np.where(x == 0, 0.0, out)


def weighted_tail(m: KernelMoments, z_abs: float, zeta_abs) -> np.ndarray:
    """Truncation error of ``|K_z(zeta)| omega(zeta)^(1/2)`` relative to ``K_z(z) omega(z)^(1/2)``.

    The reference is the size of ``||K_z||_{A^inf}``, so a far-away node where
    the weight has already killed the kernel does not count as a failure.
    """
    w = m.weight
    zeta_abs = np.asarray(zeta_abs, dtype=float)
    lw = 0.5 * (w.log_omega(zeta_abs) - w.log_omega(z_abs))
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        out = _tail(m, z_abs * zeta_abs) * np.exp(lw) / _diag(m, z_abs)
    return np.nan_to_num(out, nan=np.inf)


def _suggest_N(m: KernelMoments, z_abs: float, zeta_abs, tol: float) -> int:
    N = m.N
    while N < 8192:
        N = int(np.ceil(1.5 * N)) + 8
        trial = radial_moments(m.weight, N, m.power)
        if np.max(weighted_tail(trial, z_abs, zeta_abs)) <= tol:
            return N
    return N


def _check(m: KernelMoments, z_abs: float, zeta_abs, tol: float = TAIL_TOL) -> None:
    err = weighted_tail(m, z_abs, zeta_abs)
    worst = float(np.max(err)) if np.size(err) else 0.0
    if worst > tol:
        zeta_abs = np.atleast_1d(zeta_abs)
        bad = float(zeta_abs[int(np.argmax(err))])
        n_new = _suggest_N(m, z_abs, zeta_abs, tol)
        raise KernelTruncationError(
            f"kernel series truncated at N={m.N} is inaccurate for |z|={z_abs:.4g}, "
            f"|zeta|={bad:.4g} (weighted tail {worst:.3g} > {tol:g}); try N >= {n_new}",
            n_new)


def kernel_eval(m: KernelMoments, z: complex, zeta, check: bool = True):
    """``K_z(zeta)`` from the truncated series; ``zeta`` may be an array."""
    zeta = np.asarray(zeta, dtype=complex)
    if check:
        _check(m, abs(complex(z)), np.abs(zeta))
    vals = horner(1.0 / m.c, zeta * np.conj(complex(z)))
    return vals


def kernel_on_grid(m: KernelMoments, grid: DiskGrid, z: complex, check: bool = True) -> np.ndarray:
    """``K_z`` at all grid nodes, shape ``(n_r, n_theta)``."""
    if check:
        _check(m, abs(complex(z)), grid.radii)
    return grid.series_values(kernel_coeffs(m, z))


def kernel_norm(m: KernelMoments, grid: DiskGrid, z: complex, p: float) -> float:
    """``||K_z||_{A^p_omega}`` by quadrature (``p = inf`` gives the weighted sup)."""
    w = m.weight
    if not p > 0:
        raise ValueError("p must be > 0")
    K = kernel_on_grid(m, grid, z)
    half_w = np.exp(0.5 * w.log_omega(grid.radii))[:, None]
    if np.isinf(p):
        def func(pts):
            return np.abs(kernel_eval(m, z, pts, check=False)) * np.exp(0.5 * w.log_omega(np.abs(pts)))
        return refined_sup(np.abs(K) * half_w, grid, func)
    integrand = np.abs(K) ** p * half_w**p
    val = float(np.dot(integrand.sum(axis=1) / grid.n_theta, grid.radial_weights)) ** (1.0 / p)
    return val


def kernel_norm_exact2(m: KernelMoments, z: complex) -> float:
    """``||K_z||_{A^2} = K_z(z)^(1/2)`` from the series."""
    return float(np.sqrt(_diag(m, abs(complex(z)))))


def normalized_kernel(m: KernelMoments, grid: DiskGrid, z: complex, p: float,
                      cap: int | None = None) -> PowerSeries:
    """``k_{p,z} = K_z / ||K_z||_{A^p}`` as a truncated series."""
    cap = m.N if cap is None else min(int(cap), m.N)
    norm = kernel_norm(m, grid, z, p)
    return PowerSeries(kernel_coeffs(m, z)[: cap + 1] / norm, is_polynomial=False)


def test_function(m: KernelMoments, grid: DiskGrid | None, a: complex) -> PowerSeries:
    """Kernel proxy ``K_a omega(a)^(1/2) tau(a)^2`` for the peak functions at ``a``.

    Only meaningful away from the center (``|a| >= 0.3``).
    """
    ra = abs(complex(a))
    if ra < 0.3:
        raise ValueError(f"test functions need |a| >= 0.3, got {ra:.4g}")
    if grid is not None and ra > grid.r_max:
        raise ValueError("center lies outside the grid")
    return PowerSeries(proxy_coeffs(m, a), is_polynomial=False)


def proxy_coeffs(m: KernelMoments, a: complex) -> np.ndarray:
    """Coefficients of ``K_a omega(a)^(1/2) tau(a)^2`` for any ``|a| < 1`` (no range check)."""
    w = m.weight
    ra = abs(complex(a))
    scale = float(np.exp(0.5 * w.log_omega(ra)) * w.tau(ra) ** 2)
    return kernel_coeffs(m, a) * scale


test_function.__test__ = False  # not a pytest test


@dataclass
class BandReport:
    """Sampled ratio that should stay within ``max/min <= threshold``."""

    name: str
    r: np.ndarray
    ratio: np.ndarray
    threshold: float
    params: dict = field(default_factory=dict)

    @property
    def band_lo(self) -> float:
        return float(np.min(self.ratio))

    @property
    def band_hi(self) -> float:
        return float(np.max(self.ratio))

    @property
    def spread(self) -> float:
        return self.band_hi / self.band_lo if self.band_lo > 0 else float("inf")

    @property
    def passed(self) -> bool:
        return bool(np.all(np.isfinite(self.ratio)) and self.band_lo > 0
                    and self.spread <= self.threshold)

    def rows(self) -> list[dict]:
        return [{"r": float(r), "ratio": float(q), "band_lo": self.band_lo, "band_hi": self.band_hi}
                for r, q in zip(self.r, self.ratio)]

    def to_dict(self) -> dict:
        return {"band": self.name, "params": self.params, "threshold": self.threshold,
                "spread": self.spread, "passed": self.passed, "rows": self.rows()}


def kernel_norm_band(m: KernelMoments, grid: DiskGrid, radii, p: float,
                     threshold: float = 3.0) -> BandReport:
    """``||K_r||_p omega(r)^(1/2) tau(r)^(2(p-1)/p)``; for ``p = inf`` the factor is ``tau(r)^2``."""
    w = m.weight
    radii = np.asarray(radii, dtype=float)
    expo = 2.0 if np.isinf(p) else 2.0 * (p - 1.0) / p
    ratio = np.array([kernel_norm(m, grid, r, p) * np.exp(0.5 * w.log_omega(r)) * w.tau(r) ** expo
                      for r in radii])
    return BandReport("kernel-norm", radii, ratio, threshold, {"p": p})


def kernel_integral_band(m: KernelMoments, grid: DiskGrid, radii, p: float, beta: float,
                         threshold: float = 10.0) -> BandReport:
    """``int |K_z|^p omega^(p/2) tau^beta dA`` against ``omega(z)^(-p/2) tau(z)^(2(1-p)+beta)``."""
    w = m.weight
    radii = np.asarray(radii, dtype=float)
    wt = (np.exp(0.5 * p * w.log_omega(grid.radii)) * w.tau(grid.radii) ** beta)[:, None]
    out = []
    for r in radii:
        K = kernel_on_grid(m, grid, r)
        val = float(np.dot((np.abs(K) ** p * wt).sum(axis=1) / grid.n_theta, grid.radial_weights))
        out.append(val * np.exp(0.5 * p * w.log_omega(r)) * w.tau(r) ** (-2.0 * (1.0 - p) - beta))
    return BandReport("kernel-integral", radii, np.array(out), threshold, {"p": p, "beta": beta})


def diagonal_band(m: KernelMoments, grid: DiskGrid, radii, p: float, delta: float,
                  threshold: float = 10.0) -> BandReport:
    """``|k_{p,z}(zeta)|^p omega(zeta)^(p/2) tau(z)^2`` for ``zeta`` in ``D_delta(z)``, finite ``p``."""
    if not np.isfinite(p):
        raise ValueError("the diagonal band is stated for finite p")
    w = m.weight
    rs, vals = [], []
    for r in np.asarray(radii, dtype=float):
        norm = kernel_norm(m, grid, r, p)
        pts, _ = local_disk_rule(r, delta * w.tau(r), n_r=4, n_theta=8)
        K = kernel_eval(m, r, pts)
        q = (np.abs(K) / norm) ** p * np.exp(0.5 * p * w.log_omega(np.abs(pts))) * w.tau(r) ** 2
        rs.extend([r] * q.size)
        vals.extend(q.tolist())
    return BandReport("normalized-kernel-diagonal", np.array(rs), np.array(vals), threshold,
                      {"p": p, "delta": delta})


def normalized_comparison_band(m: KernelMoments, grid: DiskGrid, radii, p: float, q: float,
                               n_points: int = 8, threshold: float = 10.0) -> BandReport:
    """``|k_{p,z}(zeta)|^q / (tau(z)^(2(1-q/p)) |k_{q,z}(zeta)|^q)`` at sampled ``zeta``."""
    w = m.weight
    rs, vals = [], []
    zeta = 0.5 * np.exp(2j * np.pi * np.arange(n_points) / n_points)
    for r in np.asarray(radii, dtype=float):
        npn, nq = kernel_norm(m, grid, r, p), kernel_norm(m, grid, r, q)
        K = np.abs(kernel_eval(m, r, zeta))
        expo = 2.0 * (1.0 - q / p) if np.isfinite(p) else 2.0
        ratio = (K / npn) ** q / (w.tau(r) ** expo * (K / nq) ** q)
        rs.extend([r] * ratio.size)
        vals.extend(ratio.tolist())
    return BandReport("normalized-kernel-comparison", np.array(rs), np.array(vals), threshold,
                      {"p": p, "q": q})


def test_function_report(m: KernelMoments, radii, delta: float) -> dict:
    """Band checks for the kernel proxy: on-diagonal size, BL1 band, derivative band, decay."""
    from .series import differentiate

    w = m.weight
    radii = np.asarray(radii, dtype=float)
    diag, bl1_lo, bl1_hi, der_lo, der_hi, decay = [], [], [], [], [], []
    for a in radii:
        F = test_function(m, None, a)
        dF = differentiate(F)
        diag.append(abs(horner(F.coeffs, a)) * np.exp(0.5 * w.log_omega(a)))
        pts, _ = local_disk_rule(a, delta * w.tau(a), n_r=4, n_theta=8)
        rp = np.abs(pts)
        hw = np.exp(0.5 * w.log_omega(rp))
        v = np.abs(horner(F.coeffs, pts)) * hw
        d = np.abs(horner(dF.coeffs, pts)) * hw / (1.0 + w.phi1(rp))
        bl1_lo.append(v.min())
        bl1_hi.append(v.max())
        der_lo.append(d.min())
        der_hi.append(d.max())
        decay.append(abs(F.coeffs[0]) * np.exp(0.5 * w.log_omega(0.0)) / diag[-1])
    return {
        "r": radii.tolist(),
        "diagonal": [float(x) for x in diag],
        "bl1_min": [float(x) for x in bl1_lo],
        "bl1_max": [float(x) for x in bl1_hi],
        "derivative_min": [float(x) for x in der_lo],
        "derivative_max": [float(x) for x in der_hi],
        "decay_at_origin": [float(x) for x in decay],
    }
