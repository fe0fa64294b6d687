"""(delta, tau)-lattices: separated point sets whose ``tau``-disks cover a sub-disk.

``D_delta(a)`` denotes the Euclidean disk of radius ``delta * tau(|a|)`` about
``a``. A lattice ``{z_k}`` must satisfy

(i)   separation: ``z_n`` is not in ``D_delta(z_k)`` for ``n != k``;
(ii)  coverage: the disks ``D_delta(z_k)`` cover ``|z| <= r_max``;
(iii) ``D_delta(z)`` is inside ``D_{3 delta}(z_k)`` whenever ``z`` is in ``D_delta(z_k)``;
(iv)  the disks ``D_{3 delta}(z_k)`` overlap with bounded multiplicity.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .quadrature import DiskGrid
from .weights import estimate_m_tau

__all__ = [
    "Lattice",
    "LatticeReport",
    "MULTIPLICITY_BOUND",
    "build_lattice",
    "verify_lattice",
    "tau_probe",
]

MULTIPLICITY_BOUND = 256


@dataclass(frozen=True, eq=False)
class Lattice:
    centers: np.ndarray
    delta: float
    r_max: float
    weight: object
    kappa: float = 1.2
    n_rings: int = 0

    def __len__(self) -> int:
        return self.centers.size

    @property
    def tau(self) -> np.ndarray:
        return self.weight.tau(np.abs(self.centers))

    def to_csv(self, path) -> None:
        """Write ``re, im, tau`` rows."""
        t = self.tau
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["re", "im", "tau"])
            for z, s in zip(self.centers, t):
                out.writerow([f"{z.real:.17g}", f"{z.imag:.17g}", f"{s:.17g}"])


def _ring_conflicts(cand: np.ndarray, tc: np.ndarray, prev: np.ndarray, tp: np.ndarray,
                    delta: float) -> np.ndarray:
    """Mask of candidates within ``delta * max(tau)`` of a point of the previous ring."""
    if prev.size == 0 or cand.size == 0:
        return np.zeros(cand.size, dtype=bool)
    ang_p = np.mod(np.angle(prev), 2 * np.pi)
    order = np.argsort(ang_p)
    ang_p, prev, tp = ang_p[order], prev[order], tp[order]
    pos = np.searchsorted(ang_p, np.mod(np.angle(cand), 2 * np.pi))
    bad = np.zeros(cand.size, dtype=bool)
    for shift in (-2, -1, 0, 1):
        j = np.mod(pos + shift, prev.size)
        d = np.abs(cand - prev[j])
        bad |= d < delta * np.maximum(tc, tp[j])
    return bad


def build_lattice(w, delta: float, r_max: float, kappa: float = 1.2) -> Lattice:
    """Ring construction of a (delta, tau)-lattice covering ``|z| <= r_max``.

    Rings sit at ``r_{j+1} = r_j + kappa delta tau(r_j)`` starting from the
    center point 0; each ring carries ``floor(2 pi r / (kappa delta tau(r)))``
    equally spaced points, odd rings rotated by half a step. A pruning pass
    drops any point that is too close to a point already kept on the previous
    or the same ring. ``kappa`` slightly above 1 keeps chords, not arcs, at
    least ``delta tau`` while the staggered holes stay well inside the disks.
    """
    m_tau = estimate_m_tau(w)
    if not 0 < delta < m_tau:
        raise ValueError(f"delta={delta:g} must lie in (0, m_tau={m_tau:.6g})")
    if not 0 <= r_max < 1:
        raise ValueError(f"r_max={r_max:g} must lie in [0, 1)")
    if not 1.0 <= kappa < 1.4:
        raise ValueError("kappa must lie in [1, 1.4)")
    rings = [np.zeros(1, dtype=complex)]
    r = 0.0
    j = 0
    while r < r_max:
        r = r + kappa * delta * float(w.tau(r))
        if r >= 1.0:
            raise ValueError("ring construction left the disk; lower r_max")
        j += 1
        t = float(w.tau(r))
        M = max(int(np.floor(2 * np.pi * r / (kappa * delta * t))), 1)
        theta = 2 * np.pi * (np.arange(M) + (0.5 if j % 2 else 0.0)) / M
        cand = r * np.exp(1j * theta)
        tc = np.full(M, t)
        prev = rings[-1]
        bad = _ring_conflicts(cand, tc, prev, w.tau(np.abs(prev)), delta)
        if len(rings) > 1:
            prev2 = rings[-2]
            bad |= _ring_conflicts(cand, tc, prev2, w.tau(np.abs(prev2)), delta)
        cand = cand[~bad]
        # same-ring neighbours (only possible for tiny M)
        if cand.size > 1:
            keep = [0]
            for i in range(1, cand.size):
                if abs(cand[i] - cand[keep[-1]]) >= delta * t:
                    keep.append(i)
            if len(keep) > 1 and abs(cand[keep[-1]] - cand[keep[0]]) < delta * t:
                keep.pop()
            cand = cand[keep]
        rings.append(cand)
    centers = np.concatenate(rings)
    centers.setflags(write=False)
    return Lattice(centers, float(delta), float(r_max), w, float(kappa), j)


def tau_probe(w, r_max: float, n: int, seed: int = 0) -> np.ndarray:
    """``n`` random points in ``|z| <= r_max`` with density proportional to ``tau^(-2)``.

    This matches the local density of a lattice, so holes between centers are
    hit at every scale.
    """
    rng = np.random.default_rng(seed)
    s = np.linspace(0.0, 1.0, 20001)
    r = r_max * (1.0 - (1.0 - s) ** 3)
    dens = r / w.tau(r) ** 2
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(r))])
    cdf /= cdf[-1]
    radii = np.interp(rng.uniform(size=n), cdf, r)
    return radii * np.exp(2j * np.pi * rng.uniform(size=n))


@dataclass
class LatticeReport:
    n_centers: int
    n_probe: int
    separation_ok: bool
    min_separation: float
    coverage_ok: bool
    coverage_fraction: float
    multiplicity_max: int
    multiplicity_ok: bool
    property_iii_ok: bool
    outer_ring_ok: bool

    @property
    def passed(self) -> bool:
        return all((self.separation_ok, self.coverage_ok, self.multiplicity_ok,
                    self.property_iii_ok, self.outer_ring_ok))

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__} | {"passed": self.passed}


def _tau_upper(w, s: np.ndarray, r_peak: float) -> np.ndarray:
    """``max tau`` over radii ``>= s`` (tau decreases beyond ``r_peak``)."""
    return w.tau(np.clip(s, r_peak, 0.999999))


def _probe_counts(tree: cKDTree, tz: np.ndarray, w, pts: np.ndarray, delta: float,
                  r_peak: float, chunk: int = 200_000):
    """Coverage flags and ``D_{3 delta}`` multiplicities at probe points.

    Neighbours are taken by k-nearest search; ``k`` doubles for the points where
    the k-th neighbour could still contain the probe. Since ``3 delta tau`` is a
    contraction in the distance (``3 delta sup|tau'| < 1``), testing the k-th
    neighbour suffices.
    """
    covered = np.zeros(pts.size, dtype=bool)
    mult = np.zeros(pts.size, dtype=np.int64)
    xy = np.c_[pts.real, pts.imag]
    absz = np.abs(pts)
    n = tz.size
    for s in range(0, pts.size, chunk):
        todo = np.arange(s, min(s + chunk, pts.size))
        k = min(32, n)
        while todo.size:
            d, i = tree.query(xy[todo], k=k)
            d = d.reshape(todo.size, -1)
            i = i.reshape(todo.size, -1)
            rad = delta * tz[i]
            covered[todo] = np.any(d < rad, axis=1)
            mult[todo] = np.sum(d < 3 * rad, axis=1)
            dk = d[:, -1]
            done = (k >= n) | (dk > 3 * delta * _tau_upper(w, absz[todo] - dk, r_peak))
            todo = todo[~done]
            k = min(2 * k, n)
    return covered, mult


def verify_lattice(L: Lattice, probe, extra_points=None, n_iii: int = 200,
                   seed: int = 0) -> LatticeReport:
    """Check properties (i)-(iv) of ``L``.

    Parameters
    ----------
    probe
        :class:`DiskGrid` (or complex array) covering ``|z| <= L.r_max``.
        Coverage and multiplicity are evaluated at its nodes.
    extra_points
        Further probe points, e.g. from :func:`tau_probe`.
    n_iii
        Number of centers sampled for property (iii).
    """
    w, delta = L.weight, L.delta
    z = np.asarray(L.centers)
    tz = w.tau(np.abs(z))
    xy = np.c_[z.real, z.imag]
    tree = cKDTree(xy)

    # (i): the nearest other center already lies outside D_delta(z_k)
    if z.size > 1:
        d, _ = tree.query(xy, k=2)
        min_sep = float(np.min(d[:, 1] / (delta * tz)))
    else:
        min_sep = float("inf")
    sep_ok = min_sep >= 1.0

    pts = probe.nodes if isinstance(probe, DiskGrid) else np.asarray(probe, dtype=complex).ravel()
    if extra_points is not None:
        pts = np.concatenate([pts, np.asarray(extra_points, dtype=complex).ravel()])
    pts = pts[np.abs(pts) <= L.r_max]
    r_grid = np.linspace(0.0, 0.999, 4000)
    r_peak = float(r_grid[np.argmax(w.tau(r_grid))])
    covered, mult = _probe_counts(tree, tz, w, pts, delta, r_peak)
    cov_frac = float(covered.mean()) if pts.size else 1.0
    mmax = int(mult.max()) if pts.size else 0

    # (iii): points of D_delta(z_k), then points of their own delta-disks
    rng = np.random.default_rng(seed)
    pick = rng.choice(z.size, size=min(n_iii, z.size), replace=False)
    ang = 2 * np.pi * np.arange(16) / 16
    iii_ok = True
    for k in pick:
        a, ta = z[k], tz[k]
        inner = a + delta * ta * np.r_[0.0, 0.999 * np.exp(1j * ang)]
        inner = inner[np.abs(inner) < 1]
        tin = w.tau(np.abs(inner))
        outer = inner[:, None] + delta * tin[:, None] * np.exp(1j * ang)[None, :]
        if np.any(np.abs(outer - a) >= 3 * delta * ta):
            iii_ok = False
            break

    r_out = float(np.max(np.abs(z)))
    outer_ok = bool(r_out >= L.r_max and r_out - L.r_max <= L.kappa * delta * w.tau(L.r_max) * 2)
    return LatticeReport(int(z.size), int(pts.size), sep_ok, min_sep, bool(covered.all()), cov_frac,
                         mmax, mmax <= MULTIPLICITY_BOUND, iii_ok, outer_ok)
