"""Radial moments and area quadrature adapted to exponentially decaying weights.

Area integrals use the normalized measure ``dA = dx dy / pi``, so the unit
disk has mass one and the sub-disk of radius ``r`` has mass ``r**2``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "KernelMoments",
    "DiskGrid",
    "MomentConvergenceError",
    "GridResolutionError",
    "radial_moments",
    "auto_rmax",
    "disk_grid",
    "integrate",
    "local_disk_rule",
    "refined_sup",
]


class MomentConvergenceError(RuntimeError):
    pass


class GridResolutionError(ValueError):
    pass


@functools.lru_cache(maxsize=32)
def _gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@dataclass(frozen=True, eq=False)
class KernelMoments:
    """Squared monomial norms ``c_n = ||z^n||^2 = 2 int_0^1 r^(2n+1) omega(r)^s dr``.

    ``c_next`` is ``c_{N+1}``; it bounds the truncation tail of the kernel
    series (moment sequences are log-convex, so term ratios beyond ``N`` are
    at most ``|z zeta| c_N / c_{N+1}``).
    """

    c: np.ndarray
    c_next: float
    weight: object
    power: float = 1.0

    @property
    def N(self) -> int:
        return self.c.size - 1


def _omega_pow(w, r, s):
    if hasattr(w, "log_omega"):
        return np.exp(s * w.log_omega(r))
    return np.asarray(w.omega(r), dtype=float) ** s


def _panel_sum(w, s, lo, hi, exps, m):
    """GL(m) on each u-panel ``[lo_k, hi_k]``; returns contributions (panels, moments)."""
    x, wx = _gauss_legendre(m)
    half = 0.5 * (hi - lo)
    u = 0.5 * (hi + lo)[:, None] + half[:, None] * x[None, :]
    r = 1.0 - u
    base = 2.0 * _omega_pow(w, r, s) * half[:, None] * wx[None, :]
    logr = np.log1p(-u)
    vals = np.exp(logr[..., None] * exps[None, None, :]) * base[..., None]
    return vals.sum(axis=1)


def radial_moments(w, N: int, power: float = 1.0, rtol: float = 1e-11,
                   max_rounds: int = 30) -> KernelMoments:
    """Moments ``c_0 .. c_N`` (plus ``c_{N+1}``) by adaptive Gauss-Legendre panels.

    The integral is taken in ``u = 1 - r``; panels are geometric toward
    ``u = 0`` and each panel is bisected until 24- and 48-point rules agree.
    ``w`` only needs ``omega(r)`` (or ``log_omega``).
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    if not power > 0:
        raise ValueError("power must be > 0")
    exps = 2.0 * np.arange(N + 2) + 1.0

    # geometric panels down to where the weight is numerically zero
    edges = [1.0]
    for _ in range(200):
        u = edges[-1] / 2.0
        edges.append(u)
        if u < 1e-16 or float(_omega_pow(w, np.array([1.0 - u]), power)[0]) < 1e-300:
            break
    edges.append(0.0)
    hi = np.array(edges[:-1])
    lo = np.array(edges[1:])

    total = None
    for _ in range(max_rounds):
        coarse = _panel_sum(w, power, lo, hi, exps, 24)
        fine = _panel_sum(w, power, lo, hi, exps, 48)
        total = fine.sum(axis=0)
        err = np.abs(fine - coarse)
        # a panel is fine if its error is negligible relative to every moment it feeds
        bad = np.any(err > 0.1 * rtol * np.maximum(total, 1e-300)[None, :], axis=1)
        if not np.any(bad):
            break
        mid = 0.5 * (lo[bad] + hi[bad])
        lo = np.concatenate([lo[~bad], lo[bad], mid])
        hi = np.concatenate([hi[~bad], mid, hi[bad]])
        order = np.argsort(lo)
        lo, hi = lo[order], hi[order]
    else:
        rel = err.sum(axis=0) / np.maximum(total, 1e-300)
        worst = int(np.argmax(rel))
        raise MomentConvergenceError(
            f"radial moment quadrature did not reach rtol={rtol:g}; worst index n={worst} "
            f"(estimated relative error {rel[worst]:.3g})")
    if not np.all(total > 0) or not np.all(np.diff(total) < 0):
        raise MomentConvergenceError("moments are not positive and strictly decreasing")
    c = total[:-1].copy()
    c.setflags(write=False)
    return KernelMoments(c, float(total[-1]), w, float(power))


@dataclass(frozen=True, eq=False)
class DiskGrid:
    """Tensor grid: radial Gauss-Legendre nodes times ``n_theta`` uniform angles.

    ``radial_weights`` integrate against ``2 r dr`` on ``[0, r_max]`` so that
    the flattened ``weights`` sum to ``r_max**2``. Nodes are ordered
    radius-major: ``nodes.reshape(n_r, n_theta)[i, j] = r_i exp(2 pi i j / n_theta)``.
    """

    radii: np.ndarray
    radial_weights: np.ndarray
    n_theta: int
    r_max: float

    @property
    def n_r(self) -> int:
        return self.radii.size

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_r, self.n_theta)

    @property
    def theta(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_theta) / self.n_theta

    @functools.cached_property
    def nodes(self) -> np.ndarray:
        z = self.radii[:, None] * np.exp(1j * self.theta)[None, :]
        return z.ravel()

    @functools.cached_property
    def weights(self) -> np.ndarray:
        return np.repeat(self.radial_weights / self.n_theta, self.n_theta)

    @property
    def abs_nodes(self) -> np.ndarray:
        return np.repeat(self.radii, self.n_theta)

    def series_values(self, coeffs) -> np.ndarray:
        """Values of ``sum a_n z^n`` at all nodes, shape ``(n_r, n_theta)``.

        Uses one FFT per radius; coefficients beyond ``n_theta`` are folded
        (aliasing is exact on the uniform angle set).
        """
        a = np.asarray(coeffs, dtype=complex)
        n = np.arange(a.size)
        with np.errstate(under="ignore"):
            rows = a[None, :] * np.exp(n[None, :] * np.log(self.radii)[:, None])
        M = self.n_theta
        if a.size > M:
            pad = (-a.size) % M
            rows = np.pad(rows, ((0, 0), (0, pad))).reshape(self.n_r, -1, M).sum(axis=1)
        return np.fft.ifft(rows, n=M, axis=1) * M

    def to_dict(self) -> dict:
        return {"n_r": self.n_r, "n_theta": self.n_theta, "r_max": float(self.r_max)}


def auto_rmax(w, tail: float = 1e-30, power: int = 8) -> float:
    """Radius beyond which ``omega(r) (1 + phi'(r))**power < tail`` for all larger radii."""
    log_tail = np.log(tail)

    def g(r):
        return float(w.log_omega(r) + power * np.log1p(w.phi1(r)) - log_tail)

    u = np.logspace(-12, 0, 2000)[::-1]
    r = 1.0 - u[:-1]
    vals = np.array([g(x) for x in r])
    above = np.nonzero(vals >= 0)[0]
    if above.size == 0:
        return 0.5
    k = int(above[-1])
    if k + 1 >= r.size:
        return float(r[-1])
    root = brentq(g, r[k], r[k + 1], xtol=1e-15)
    return float(max(root, 0.5))


def _radial_rule(n_r: int, r_max: float):
    x, wx = _gauss_legendre(n_r)
    v = 0.5 * (x + 1.0)
    wv = 0.5 * wx
    L = -np.log1p(-r_max)
    r = -np.expm1(-L * v)
    dr = L * (1.0 - r) * wv
    return r, 2.0 * r * dr


def _spacing_ok(w, r: np.ndarray, r_max: float, frac: float = 0.25) -> bool:
    pts = np.concatenate([[0.0], r, [r_max]])
    gaps = np.diff(pts)
    t = np.minimum(w.tau(pts[:-1]), w.tau(pts[1:]))
    return bool(np.all(gaps <= frac * t))


def disk_grid(w, n_r: int, n_theta: int, r_max: Union[float, str] = "auto") -> DiskGrid:
    """Quadrature on ``|z| <= r_max`` with radial clustering ``1 - r = (1 - r_max)**v``.

    Gauss-Legendre in ``v`` on ``[0, 1]``; the radial gaps must stay below
    ``tau(r)/4`` everywhere, otherwise :class:`GridResolutionError` suggests
    the smallest ``n_r`` that satisfies it.
    """
    if isinstance(r_max, str):
        if r_max != "auto":
            raise ValueError(f"r_max must be a float or 'auto', got {r_max!r}")
        r_max = auto_rmax(w)
    r_max = float(r_max)
    if not 0.0 < r_max < 1.0:
        raise ValueError(f"r_max must lie in (0, 1), got {r_max}")
    if n_theta < 2 or n_theta % 2:
        raise ValueError(f"n_theta must be even and >= 2, got {n_theta}")
    if n_r < 1:
        raise ValueError("n_r must be >= 1")
    r, wr = _radial_rule(n_r, r_max)
    if not _spacing_ok(w, r, r_max):
        m = n_r
        while m < 100000:
            m = int(np.ceil(m * 1.2)) + 1
            if _spacing_ok(w, _radial_rule(m, r_max)[0], r_max):
                break
        raise GridResolutionError(
            f"n_r={n_r} leaves radial gaps wider than tau/4 below r_max={r_max:.6g}; "
            f"use n_r >= {m}")
    r.setflags(write=False)
    wr.setflags(write=False)
    return DiskGrid(r, wr, int(n_theta), r_max)


def integrate(grid: DiskGrid, f: Union[Callable, np.ndarray]) -> complex:
    """``sum_j w_j f(z_j)``; ``f`` is a callable on node arrays or precomputed values."""
    vals = f(grid.nodes) if callable(f) else np.asarray(f)
    vals = np.asarray(vals).reshape(-1)
    if vals.size != grid.nodes.size:
        raise ValueError(f"expected {grid.nodes.size} values, got {vals.size}")
    bad = ~np.isfinite(vals)
    if np.any(bad):
        z = grid.nodes[int(np.argmax(bad))]
        raise FloatingPointError(f"non-finite integrand at node z={z.real:.6g}{z.imag:+.6g}j")
    per_ring = (vals.reshape(grid.shape)).sum(axis=1) / grid.n_theta
    return complex(np.dot(per_ring, grid.radial_weights))


def local_disk_rule(center: complex, radius: float, n_r: int = 12, n_theta: int = 24):
    """Nodes and weights for ``int_{|z - center| < radius} f dA`` (weights sum to ``radius**2``)."""
    x, wx = _gauss_legendre(n_r)
    rho = 0.5 * radius * (x + 1.0)
    wr = 2.0 * rho * 0.5 * radius * wx
    th = 2.0 * np.pi * (np.arange(n_theta) + 0.5) / n_theta
    nodes = center + (rho[:, None] * np.exp(1j * th)[None, :]).ravel()
    weights = np.repeat(wr / n_theta, n_theta)
    return nodes, weights


def refined_sup(vals: np.ndarray, grid: DiskGrid, func, top: int = 5) -> float:
    """Grid maximum of ``vals`` (shape ``grid.shape``), refined near the top nodes.

    ``func`` evaluates the same nonnegative quantity at arbitrary points; it is
    sampled at the origin and on a small disk around each of the ``top``
    largest nodes, with radius equal to the local node spacing.
    """
    flat = np.asarray(vals).ravel()
    # the origin is not a node of the radial rule
    best = max(float(np.max(flat)), float(np.max(func(np.zeros(1, dtype=complex)))))
    idx = np.argsort(flat)[-top:]
    radii = grid.radii
    gaps = np.diff(np.concatenate([[0.0], radii, [grid.r_max]]))
    for k in idx:
        i = int(k) // grid.n_theta
        h = max(gaps[i], gaps[i + 1], radii[i] * 2 * np.pi / grid.n_theta)
        pts, _ = local_disk_rule(grid.nodes[k], h, n_r=6, n_theta=12)
        pts = pts[np.abs(pts) <= grid.r_max]
        if pts.size:
            best = max(best, float(np.max(func(pts))))
    return best
