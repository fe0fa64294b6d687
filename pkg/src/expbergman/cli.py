"""Command line front-end.

Examples
--------
    expbergman weight-info
    expbergman criterion --config run.json --out report.json
    expbergman lattice --rmax 0.9 --format csv
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import jsonschema
import numpy as np

from .config import COMMANDS, RunConfig, load_config
from .criteria import evaluate_boundedness, radial_sweep
from .kernel import (diagonal_band, kernel_integral_band, kernel_moments, kernel_norm_band,
                     normalized_comparison_band, normalized_kernel)
from .lattice import build_lattice, tau_probe, verify_lattice
from .operators import OperatorSpec, operator_norm_lower_bound
from .quadrature import disk_grid
from .reports import write_report
from .series import PowerSeries
from .spaces import littlewood_paley_ratio
from .weights import check_class_L, check_tau_comparability, estimate_m_tau, make_weight

__all__ = ["main", "run", "random_polynomials", "operator_family"]

BAND_P = (1.0, 2.0, float("inf"))
KERNEL_CENTERS = (0.0, 0.3, 0.6, 0.8, 0.9)
OPNORM_STABLE = 0.05


def random_polynomials(rng: np.random.Generator, count: int, max_degree: int) -> list[PowerSeries]:
    """Polynomials with random degree in ``[0, max_degree]`` and complex normal coefficients."""
    out = []
    for _ in range(count):
        d = int(rng.integers(0, max_degree + 1))
        out.append(PowerSeries(rng.normal(size=d + 1) + 1j * rng.normal(size=d + 1)))
    return out


def operator_family(m, grid, p: float, size: int, seed: int, max_degree: int = 30,
                    r_limit: float = 0.95) -> list[PowerSeries]:
    """Normalized kernels at the standard centers (below ``r_limit``), then random polynomials."""
    fam = [normalized_kernel(m, grid, a, p) for a in KERNEL_CENTERS if a < r_limit][:size]
    rng = np.random.default_rng(seed)
    fam += random_polynomials(rng, max(size - len(fam), 0), max_degree)
    return fam


def _weight(cfg: RunConfig):
    return make_weight(cfg.gamma, cfg.alpha, cfg.b, cfg.eps_center)


def _grid(cfg: RunConfig, w):
    return disk_grid(w, cfg.n_r, cfg.n_theta, cfg.grid_rmax)


def _head(cfg: RunConfig, w) -> dict:
    return {"command": cfg.command, "weight": w.to_dict(), "seed": cfg.seed}


def cmd_weight_info(cfg: RunConfig) -> dict:
    w = _weight(cfg)
    rep = check_class_L(w)
    comp = check_tau_comparability(w, rep.m_tau / 2, seed=cfg.seed)
    rows = [{"r": float(r), "phi1": float(w.phi1(r)), "laplacian": float(w.laplacian(r)),
             "tau": float(w.tau(r)), "psi": float(w.psi(r))}
            for r in np.linspace(cfg.rmin, cfg.rmax, 11)]
    return _head(cfg, w) | {"class_L": rep.to_dict(), "tau_comparability": comp, "rows": rows}


def cmd_kernel_bands(cfg: RunConfig) -> dict:
    w = _weight(cfg)
    grid, m = _grid(cfg, w), kernel_moments(w, cfg.degree)
    lo = max(cfg.rmin, 0.3)
    radii = np.linspace(lo, cfg.rmax, 13)
    outer = np.linspace(max(lo, 0.5), cfg.rmax, 9)
    delta = cfg.delta if cfg.delta is not None else estimate_m_tau(w) / 4
    bands = [kernel_norm_band(m, grid, radii, p) for p in BAND_P]
    bands += [kernel_integral_band(m, grid, outer, p, beta) for p in (1.0, 2.0) for beta in (-2.0, 0.0, 2.0)]
    bands += [diagonal_band(m, grid, outer, p, delta) for p in (1.0, 2.0)]
    bands += [normalized_comparison_band(m, grid, outer, p, q) for p, q in ((1.0, 2.0), (2.0, 1.0))]
    rows = []
    for b in bands:
        for row in b.rows():
            rows.append({"band": b.name, "params": json.dumps(b.params, sort_keys=True)} | row)
    summary = [{"band": b.name, "params": b.params, "spread": b.spread, "threshold": b.threshold,
                "passed": b.passed} for b in bands]
    return _head(cfg, w) | {"grid": grid.to_dict(), "degree": m.N, "delta": delta,
                            "bands": summary, "passed": all(b.passed for b in bands), "rows": rows}


def cmd_lp_check(cfg: RunConfig) -> dict:
    w = _weight(cfg)
    grid = _grid(cfg, w)
    fam = random_polynomials(np.random.default_rng(cfg.seed), cfg.family_size, cfg.poly_degree)
    rows, summary = [], []
    for p in BAND_P:
        ratios = np.array([littlewood_paley_ratio(f, p, grid, w) for f in fam])
        spread = float(ratios.max() / ratios.min())
        summary.append({"p": p, "min": float(ratios.min()), "max": float(ratios.max()),
                        "spread": spread, "passed": spread <= 10.0})
        rows += [{"p": p, "index": i, "degree": f.degree_cap, "ratio": float(r)}
                 for i, (f, r) in enumerate(zip(fam, ratios))]
    return _head(cfg, w) | {"grid": grid.to_dict(), "summary": summary,
                            "passed": all(s["passed"] for s in summary), "rows": rows}


def cmd_lattice(cfg: RunConfig) -> dict:
    w = _weight(cfg)
    delta = cfg.delta if cfg.delta is not None else estimate_m_tau(w) / 4
    L = build_lattice(w, delta, cfg.rmax)
    if cfg.rmax > 0:
        probe = disk_grid(w, cfg.n_r, cfg.n_theta, cfg.rmax)
        extra = tau_probe(w, cfg.rmax, 250_000, cfg.seed)
    else:
        probe, extra = np.zeros(1, dtype=complex), None
    rep = verify_lattice(L, probe, extra, seed=cfg.seed)
    if cfg.lattice_csv:
        L.to_csv(cfg.lattice_csv)
    body = {"delta": delta, "r_max": cfg.rmax, "kappa": L.kappa, "n_rings": L.n_rings} | rep.to_dict()
    return _head(cfg, w) | body | {"rows": [body]}


def _operator(cfg: RunConfig) -> OperatorSpec:
    return OperatorSpec(cfg.op, cfg.phi, cfg.g)


def cmd_criterion(cfg: RunConfig) -> dict:
    w = _weight(cfg)
    grid, m = _grid(cfg, w), kernel_moments(w, cfg.degree)
    sweep = radial_sweep(w, cfg.rmax, cfg.rmin, cfg.step)
    rep = evaluate_boundedness(_operator(cfg), cfg.p, cfg.q, sweep, grid, m, w)
    return _head(cfg, w) | {"operator": _operator(cfg).to_dict()} | rep.to_dict() | {"rows": rep.sweep_rows()}


def _opnorm(cfg: RunConfig, w, grid, m) -> dict:
    op = _operator(cfg)
    fam = operator_family(m, grid, cfg.p, cfg.family_size, cfg.seed, cfg.poly_degree, grid.r_max)
    extra = random_polynomials(np.random.default_rng(cfg.seed + 1), cfg.family_size, cfg.poly_degree)
    base = operator_norm_lower_bound(op, cfg.p, cfg.q, fam, grid, w)
    doubled = operator_norm_lower_bound(op, cfg.p, cfg.q, fam + extra, grid, w)
    b0, b1 = base["best_ratio"], doubled["best_ratio"]
    change = abs(b1 - b0) / b0 if b0 > 0 else 0.0
    return {"best_ratio": b0, "witness": base["witness"], "best_ratio_doubled": b1,
            "relative_change": change, "stable": change < OPNORM_STABLE,
            "rows": [{"index": i, "ratio": r} for i, r in enumerate(doubled["ratios"])]}


def cmd_opnorm(cfg: RunConfig) -> dict:
    w = _weight(cfg)
    grid, m = _grid(cfg, w), kernel_moments(w, cfg.degree)
    return _head(cfg, w) | {"operator": _operator(cfg).to_dict(), "p": cfg.p, "q": cfg.q} | _opnorm(cfg, w, grid, m)


def cmd_xcheck(cfg: RunConfig) -> dict:
    w = _weight(cfg)
    grid, m = _grid(cfg, w), kernel_moments(w, cfg.degree)
    sweep = radial_sweep(w, cfg.rmax, cfg.rmin, cfg.step)
    rep = evaluate_boundedness(_operator(cfg), cfg.p, cfg.q, sweep, grid, m, w)
    on = _opnorm(cfg, w, grid, m)
    if rep.verdict == "bounded-indicated":
        consistent = on["stable"]
    elif rep.verdict == "unbounded-indicated":
        consistent = True  # a finite family can only give a lower bound
    else:
        consistent = False
    stat = rep.statistic
    q_eff = 1.0 if np.isinf(cfg.q) else cfg.q
    scale = stat ** (1.0 / q_eff) if stat > 0 else 0.0
    ratio = on["best_ratio"] / scale if scale > 0 else (0.0 if on["best_ratio"] == 0 else float("inf"))
    return _head(cfg, w) | {
        "operator": _operator(cfg).to_dict(), "p": cfg.p, "q": cfg.q,
        "criterion": rep.criterion, "statistic": stat, "verdict": rep.verdict,
        "opnorm_lower_bound": on["best_ratio"], "opnorm_stable": on["stable"],
        "opnorm_over_statistic": ratio, "consistent": consistent,
        "rows": rep.sweep_rows()}


HANDLERS = {
    "weight-info": cmd_weight_info,
    "kernel-bands": cmd_kernel_bands,
    "lp-check": cmd_lp_check,
    "lattice": cmd_lattice,
    "criterion": cmd_criterion,
    "opnorm": cmd_opnorm,
    "xcheck": cmd_xcheck,
}


def run(cfg: RunConfig) -> dict:
    """Execute ``cfg.command`` and return the report dictionary."""
    return HANDLERS[cfg.command](cfg)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="expbergman",
                                 description="Weighted Bergman space computations with exponential weights.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON run configuration")
    ap.add_argument("--out", help="output file (default: stdout)")
    ap.add_argument("--format", choices=("json", "csv"))
    ap.add_argument("--seed", type=int)
    ap.add_argument("--rmax", type=float, help="outer radius of the sweep or lattice")
    ap.add_argument("--degree", type=int, help="number of kernel moments")
    ap.add_argument("--dump-config", action="store_true", help="print the effective configuration and exit")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        base = load_config(args.config) if args.config else RunConfig()
        overrides = {"command": args.command}
        for key in ("out", "format", "seed", "rmax", "degree"):
            val = getattr(args, key)
            if val is not None:
                overrides[key] = val
        cfg = dataclasses.replace(base, **overrides)
    except (OSError, ValueError, TypeError, jsonschema.ValidationError) as exc:
        msg = exc.message if isinstance(exc, jsonschema.ValidationError) else str(exc)
        print(f"expbergman: invalid configuration: {msg}", file=sys.stderr)
        return 2
    if args.dump_config:
        sys.stdout.write(cfg.to_json())
        return 0
    try:
        report = run(cfg)
    except Exception as exc:
        mod = getattr(exc, "__module__", None) or type(exc).__module__
        tb = exc.__traceback__
        while tb is not None and tb.tb_next is not None:
            tb = tb.tb_next
        where = tb.tb_frame.f_globals.get("__name__", mod) if tb is not None else mod
        print(f"expbergman: {cfg.command} failed in {where}: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 3
    text = write_report(report, cfg.out, cfg.format)
    if cfg.out is None:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
