"""Radial exponential-type weights ``omega = exp(-2 phi)`` on the unit disk.

The family handled here is

    omega(r) = (1 - r)**gamma * exp(-b / (1 - r)**alpha),

with potential ``2 phi(r) = -gamma log(1 - r) + b (1 - r)**(-alpha)``.
All radial functions accept scalars or numpy arrays of radii in ``[0, 1)``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

__all__ = [
    "RadialWeight",
    "ClassLReport",
    "make_weight",
    "tau",
    "check_class_L",
    "estimate_m_tau",
    "check_tau_comparability",
]


def _radii(r):
    r = np.asarray(r, dtype=float)
    if np.any(r >= 1.0) or np.any(r < 0.0) or not np.all(np.isfinite(r)):
        raise ValueError("radius must lie in [0, 1)")
    return r


@dataclass(frozen=True)
class RadialWeight:
    """Exponential weight with its potential and the derived length scale.

    Parameters
    ----------
    gamma
        Power of ``(1 - r)`` in front of the exponential, ``gamma >= 0``.
    alpha
        Exponent of the blow-up ``(1 - r)**(-alpha)``, ``alpha > 0``.
    b
        Scale of the exponential, ``b > 0``.
    eps_center
        Radius below which the Laplacian of ``phi`` is frozen. The radial
        potential has a conical point at the origin, so ``phi'(r)/r`` blows up
        there.
    """

    gamma: float
    alpha: float
    b: float
    eps_center: float = 0.05

    def phi(self, r):
        r = _radii(r)
        u = 1.0 - r
        return 0.5 * (-self.gamma * np.log(u) + self.b * u ** (-self.alpha))

    def phi1(self, r):
        r = _radii(r)
        u = 1.0 - r
        return 0.5 * (self.gamma / u + self.alpha * self.b * u ** (-self.alpha - 1.0))

    def phi2(self, r):
        r = _radii(r)
        u = 1.0 - r
        a = self.alpha
        return 0.5 * (self.gamma / u**2 + a * (a + 1.0) * self.b * u ** (-a - 2.0))

    def log_omega(self, r):
        return -2.0 * self.phi(r)

    def omega(self, r):
        return np.exp(self.log_omega(r))

    def laplacian(self, r):
        """``phi'' + phi'/r`` evaluated at ``max(r, eps_center)``."""
        r = np.maximum(_radii(r), self.eps_center)
        return self.phi2(r) + self.phi1(r) / r

    def tau(self, r):
        return self.laplacian(r) ** -0.5

    def psi(self, r):
        return 1.0 / (1.0 + self.phi1(r))

    def to_dict(self) -> dict:
        return {
            "gamma": float(self.gamma),
            "alpha": float(self.alpha),
            "b": float(self.b),
            "eps_center": float(self.eps_center),
        }


def make_weight(gamma: float = 0.0, alpha: float = 1.0, b: float = 1.0,
                eps_center: float = 0.05) -> RadialWeight:
    """Validate parameters and build a :class:`RadialWeight`."""
    checks = [
        ("gamma", gamma, gamma >= 0, "gamma must be >= 0"),
        ("alpha", alpha, alpha > 0, "alpha must be > 0"),
        ("b", b, b > 0, "b must be > 0"),
        ("eps_center", eps_center, 0 < eps_center < 0.2, "eps_center must lie in (0, 0.2)"),
    ]
    for name, value, ok, msg in checks:
        if not np.isfinite(value) or not ok:
            raise ValueError(f"invalid weight parameter {name}={value!r}: {msg}")
    return RadialWeight(float(gamma), float(alpha), float(b), float(eps_center))


def tau(w: RadialWeight, r):
    """Length scale ``(Delta phi)^(-1/2)`` at radius ``r``; raises for ``r >= 1``."""
    out = w.tau(r)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class ClassLReport:
    c1_est: float
    c2_est: float
    m_tau: float
    r_peak: float
    tau_decreasing: bool
    tau_to_zero: bool
    tau_prime_to_zero: bool
    tau_log_condition: bool
    condition_A: bool
    condition_B: bool

    @property
    def passed(self) -> bool:
        return all((self.tau_decreasing, self.tau_to_zero, self.tau_prime_to_zero,
                    self.condition_A, self.condition_B))

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__} | {"passed": self.passed}


def default_class_grid(n: int = 4000) -> np.ndarray:
    """Radii in ``[0, 0.999]``, denser near the boundary."""
    s = np.linspace(0.0, 1.0, n)
    return 0.999 * (1.0 - (1.0 - s) ** 2)


def check_class_L(w, grid=None) -> ClassLReport:
    """Sample the class-L conditions for the radius function of ``w``.

    ``w`` only needs a vectorized ``tau(r)`` method, so test doubles work.

    ``tau_decreasing`` is checked beyond ``r_peak``, the sampled maximizer of
    tau: with the regularized Laplacian, tau rises on ``[eps_center, r_peak]``
    for the conical weights of this family.
    """
    r = np.sort(np.asarray(default_class_grid() if grid is None else grid, dtype=float))
    if r.size < 200:
        raise ValueError("class-L check needs at least 200 radii")
    t = np.asarray(w.tau(r), dtype=float)
    ratio = t / (1.0 - r)
    slope = np.abs(np.diff(t) / np.diff(r))

    c1 = float(ratio.max())
    c2 = float(slope.max())
    m_tau = 0.25 * min(1.0, 1.0 / c1, 1.0 / c2) if c2 > 0 else 0.25 * min(1.0, 1.0 / c1)

    # bounded ratios: the maximum must not sit in the outermost tenth of the grid
    k = int(0.9 * r.size)
    cond_a = bool(ratio[k:].max() <= 1.01 * ratio[:k].max())
    cond_b = bool(slope[k:].max() <= 1.01 * slope[:k].max()) if c2 > 0 else True

    i_peak = int(np.argmax(t))
    tail = t[i_peak:]
    decreasing = bool(tail.size > 1 and np.all(np.diff(tail) < 0))
    to_zero = bool(t[-1] < 0.05 * t.max())
    tail_slope = slope[k:]
    tprime_zero = bool(tail_slope.size > 0 and tail_slope[-1] < 0.2 * max(c2, 1e-300)
                       and tail_slope[-1] <= tail_slope[0])
    logc = slope[k:] * np.log(1.0 / t[k + 1:])
    log_cond = bool(logc.size > 0 and logc[-1] < logc[0])
    return ClassLReport(c1, c2, m_tau, float(r[i_peak]), decreasing, to_zero,
                        tprime_zero, log_cond, cond_a, cond_b)


@functools.lru_cache(maxsize=64)
def estimate_m_tau(w: RadialWeight) -> float:
    """``m_tau`` of ``w`` from the default class-L sampling grid (cached)."""
    return check_class_L(w).m_tau


def check_tau_comparability(w: RadialWeight, delta: float, n_pairs: int = 500,
                            seed: int = 0, r_range=(0.0, 0.99)) -> dict:
    """Sample pairs ``|z - a| < delta tau(a)`` and test ``tau(a)/2 <= tau(z) <= 2 tau(a)``."""
    rng = np.random.default_rng(seed)
    ra = rng.uniform(*r_range, n_pairs)
    a = ra * np.exp(2j * np.pi * rng.uniform(size=n_pairs))
    ta = w.tau(ra)
    rho = delta * ta * np.sqrt(rng.uniform(size=n_pairs))
    z = a + rho * np.exp(2j * np.pi * rng.uniform(size=n_pairs))
    tz = w.tau(np.abs(z))
    q = tz / ta
    ok = (q >= 0.5) & (q <= 2.0)
    return {"n_pairs": n_pairs, "fraction_ok": float(ok.mean()),
            "min_ratio": float(q.min()), "max_ratio": float(q.max()), "passed": bool(ok.all())}
