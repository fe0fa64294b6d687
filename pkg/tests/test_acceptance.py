"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import time

import numpy as np
import pytest

from expbergman.cli import main, random_polynomials, run
from expbergman.config import RunConfig
from expbergman.criteria import (berezin_G_t, carleson_average, evaluate_boundedness,
                                 pullback_measure, radial_sweep)
from expbergman.kernel import kernel_eval, kernel_norm, kernel_norm_band, kernel_on_grid
from expbergman.lattice import MULTIPLICITY_BOUND, build_lattice, tau_probe, verify_lattice
from expbergman.operators import OperatorSpec, SymbolPair, apply_GI, apply_Jg, apply_Vg
from expbergman.quadrature import disk_grid, integrate
from expbergman.series import (PowerSeries, compose, constant, differentiate, evaluate, identity,
                               multiply)
from expbergman.spaces import littlewood_paley_ratio


@pytest.fixture
def verdict(capsys):
    def emit(n: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n[acceptance {n:2d}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


@pytest.fixture(scope="module")
def suite(w, grid_fine, m640):
    """Criterion reports shared by criteria 7, 8 and 10."""
    outer = radial_sweep(w, 0.9, 0.5)
    full = radial_sweep(w, 0.9)
    half = ((0.0, 0.0), (0.5, 0.0))
    cases = {
        "GI id g=1 p=2 q=4": (OperatorSpec("GI"), 2, 4, outer),
        "GI id g=0 p=2 q=4": (OperatorSpec("GI", g=((0.0, 0.0),)), 2, 4, outer),
        "GV id g=1 p=2 q=2": (OperatorSpec("GV"), 2, 2, full),
        "GI z/2 g=1 p=2 q=2": (OperatorSpec("GI", phi=half), 2, 2, full),
        "GV z/2 g=1 p=2 q=2": (OperatorSpec("GV", phi=half), 2, 2, full),
        "GV z/2 g=1 p=2 q=4": (OperatorSpec("GV", phi=half), 2, 4, full),
        "Jg g=1 p=4 q=2": (OperatorSpec("Jg"), 4, 2, full),
        "Vg g=z p=2 q=2": (OperatorSpec("Vg", g=((0.0, 0.0), (1.0, 0.0))), 2, 2, full),
    }
    return {name: evaluate_boundedness(op, p, q, sw, grid_fine, m640, w)
            for name, (op, p, q, sw) in cases.items()}


def test_01_reproducing_property(w, grid, m128, verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    fams = random_polynomials(rng, 20, 40)
    zs = rng.uniform(0, 0.8, 20) * np.exp(2j * np.pi * rng.uniform(size=20))
    zs[0] = 0.8  # include the edge of the stated range
    omega = w.omega(grid.abs_nodes)
    worst = 0.0
    for f, z in zip(fams, zs):
        # The N-term kernel reproduces every polynomial of degree <= N exactly
        # (orthogonality of monomials), so the tail check for the full kernel
        # does not apply here.
        K = kernel_on_grid(m128, grid, z, check=False).ravel()
        inner = integrate(grid, grid.series_values(f.coeffs).ravel() * np.conj(K) * omega)
        fz = evaluate(f, z)
        worst = max(worst, abs(inner - fz) / abs(fz))
    dt = time.perf_counter() - t0
    verdict(1, worst <= 1e-6 and dt < 30, f"max relative error {worst:.2e} (<= 1e-6), {dt:.1f} s (< 30 s)")


def test_02_kernel_norm_identity(w, grid_fine, m640, verdict):
    radii = np.linspace(0.0, 0.9, 20)
    err = max(abs(kernel_norm(m640, grid_fine, r, 2) ** 2 / kernel_eval(m640, r, r).real - 1) for r in radii)
    verdict(2, err <= 1e-6, f"max relative error {err:.2e} over 20 radii (<= 1e-6)")


def test_03_kernel_norm_bands(w, grid_fine, m640, verdict):
    radii = np.linspace(0.3, 0.9, 13)
    spreads = {p: kernel_norm_band(m640, grid_fine, radii, p).spread for p in (1.0, 2.0, np.inf)}
    text = ", ".join(f"p={p:g}: {s:.3f}" for p, s in spreads.items())
    verdict(3, all(s <= 3 for s in spreads.values()), f"spreads {text} (<= 3)")


def test_04_littlewood_paley_band(w, grid, verdict):
    fam = random_polynomials(np.random.default_rng(404), 20, 30)
    spreads = {}
    for p in (1.0, 2.0, np.inf):
        r = np.array([littlewood_paley_ratio(f, p, grid, w) for f in fam])
        spreads[p] = r.max() / r.min()
    text = ", ".join(f"p={p:g}: {s:.3f}" for p, s in spreads.items())
    verdict(4, all(s <= 10 for s in spreads.values()), f"spreads {text} (<= 10)")


def test_05_lattice(w, m_tau, verdict):
    t0 = time.perf_counter()
    L = build_lattice(w, m_tau / 4, 0.95)
    probe = disk_grid(w, 256, 1536, 0.95)
    rep = verify_lattice(L, probe, tau_probe(w, 0.95, 250_000, seed=5))
    dt = time.perf_counter() - t0
    ok = (rep.separation_ok and rep.coverage_fraction == 1.0 and rep.multiplicity_max <= MULTIPLICITY_BOUND
          and dt < 10)
    verdict(5, ok, f"{rep.n_centers} centers, min separation ratio {rep.min_separation:.3f} (>= 1), "
                   f"coverage {100 * rep.coverage_fraction:.2f}% of {rep.n_probe} probes, "
                   f"multiplicity {rep.multiplicity_max} (<= 256), {dt:.1f} s (< 10 s)")


def _max_err(a: PowerSeries, b: PowerSeries) -> float:
    n = max(a.coeffs.size, b.coeffs.size)
    x = np.pad(a.coeffs, (0, n - a.coeffs.size))
    y = np.pad(b.coeffs, (0, n - b.coeffs.size))
    return float(np.max(np.abs(x - y)) / max(1.0, np.max(np.abs(y))))


def test_06_operator_identities(verdict):
    rng = np.random.default_rng(606)
    worst = 0.0
    for _ in range(50):
        f, g = random_polynomials(rng, 2, 12)
        # |phi| <= 0.2 + 0.5 + 0.1 + 0.1 on the disk
        phi = PowerSeries(np.r_[0.2 * rng.uniform(), 0.5, 0.1 * rng.uniform(size=2)]
                          * np.exp(2j * np.pi * rng.uniform(size=4)))
        f0g0 = constant(f.coeffs[0] * g.coeffs[0])
        worst = max(worst, _max_err(apply_GI(SymbolPair(identity(), constant(1.0)), f), f - constant(f.coeffs[0])))
        fg = multiply(f, g, f.degree_cap + g.degree_cap)
        worst = max(worst, _max_err(apply_Vg(g, f) + apply_Jg(g, f), fg - f0g0))
        s = SymbolPair(phi, g)
        df = differentiate(f)
        comp = compose(df, phi, df.degree_cap * phi.degree_cap)
        rhs = multiply(comp, g, comp.degree_cap + g.degree_cap)
        worst = max(worst, _max_err(differentiate(apply_GI(s, f)), rhs))
    verdict(6, worst <= 1e-13, f"max coefficient error {worst:.2e} over 50 triples (<= 1e-13)")


def test_07_criterion_rigidity(suite, verdict):
    rep, zero = suite["GI id g=1 p=2 q=4"], suite["GI id g=0 p=2 q=4"]
    growth = rep.values[-1] / rep.values[0]
    ok = (growth >= 10 and rep.verdict == "unbounded-indicated" and zero.statistic == 0.0
          and np.all(zero.values == 0))
    verdict(7, ok, f"g=1: growth {growth:.1f}x from r=0.5 to 0.9 (>= 10), {rep.verdict}; "
                   f"g=0: statistic {zero.statistic}")


def test_08_criterion_boundedness(suite, verdict):
    rep = suite["GV id g=1 p=2 q=2"]
    d = rep.diagnostics
    on = run(RunConfig(command="opnorm", op="GV", p=2, q=2, family_size=10, seed=0))
    ok = (rep.verdict == "bounded-indicated" and d["relative_change"] < 0.10
          and np.isfinite(d["sup_psi_g"]) and d["sup_psi_g_verdict"] == "bounded-indicated"
          and on["stable"] and on["relative_change"] < 0.05)
    verdict(8, ok, f"statistic {rep.statistic:.5f}, change over last tau-step {100 * d['relative_change']:.2f}% "
                   f"(< 10%), sup psi|g0'| {d['sup_psi_g']:.4f}, {rep.verdict}; opnorm lower bound "
                   f"{on['best_ratio']:.5f}, change on doubling {100 * on['relative_change']:.2f}% (< 5%)")


def test_09_carleson_band(w, grid_fine, m640, m_tau, verdict):
    p, q, t = 2.0, 1.0, 2.0
    s = p / q
    mu = pullback_measure(SymbolPair(PowerSeries([0.0, 0.5]), constant(1.0)), q, grid_fine, w)
    radii = np.linspace(0.5, 0.9, 9)
    factor = w.tau(radii) ** (2 * (1 - 1 / s))
    G = factor * berezin_G_t(mu, t, radii, m640, grid_fine, w)
    A = factor * carleson_average(mu, w, m_tau / 4, radii)
    ratio = G / A
    spread = float(ratio.max() / ratio.min())
    ok = bool(np.all(np.isfinite(ratio)) and np.all(A > 0) and spread <= 10)
    verdict(9, ok, f"G_t / averaging spread {spread:.3f} over r in [0.5, 0.9] (<= 10)")


def test_10_necessary_condition(suite, verdict):
    bounded = {k: r for k, r in suite.items() if r.verdict == "bounded-indicated"}
    checked = {k: r.diagnostics["necessary_verdict"] for k, r in bounded.items()
               if "necessary_verdict" in r.diagnostics}
    finite = all(np.isfinite(bounded[k].diagnostics["necessary_sup"]) for k in checked)
    ok = (len(checked) >= 4 and finite and all(v == "bounded-indicated" for v in checked.values()))
    verdict(10, ok, f"{len(checked)} bounded-indicated examples, necessary sup finite and stable in all")


def test_11_determinism(tmp_path, verdict):
    jobs = [["weight-info"], ["kernel-bands"], ["lp-check", "--seed", "3"], ["lattice", "--rmax", "0.9"],
            ["criterion"], ["opnorm", "--seed", "3"], ["xcheck", "--seed", "3"]]
    same = []
    for job in jobs:
        blobs = []
        for k in range(2):
            out = tmp_path / f"{job[0]}-{k}.json"
            assert main(job + ["--out", str(out)]) == 0
            blobs.append(out.read_bytes())
        same.append(blobs[0] == blobs[1])
    verdict(11, all(same), f"{sum(same)}/{len(jobs)} commands byte-identical across two runs")
