"""Command-line driver: reproducible experiments with machine-readable
output.

Subcommands: count, ids, backtrack, martingale, lyapunov, selfcheck.
Configuration comes from an optional JSON file (--config) overridden by
flags; every artifact embeds the resolved configuration.  Exit codes:
0 ok, 1 bad config / hypothesis violation, 2 count mismatch,
3 supermartingale violation.

CSV output uses '.' decimals, '\n' line endings, a header row and
17-significant-digit floats, so identical runs are byte-identical.
Report paths also render a PNG figure alongside the delimited output.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, backtrack, ids, martingale, plots, prufer, spectrum, \
    transferwalk
from .errors import AndersonWalkError
from .model import (NoiseDistribution, RngStream, derive_params, sample_noise,
                    sigma_threshold)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_MISMATCH = 2
EXIT_MARTINGALE = 3


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_json(path: Path, payload: dict, config: dict):
    payload = dict(payload)
    payload["config"] = config
    payload["version"] = __version__
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")


def _load_config(args) -> dict:
    cfg = {}
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
    # flags win over the file
    for key, val in vars(args).items():
        if key in ("config", "func", "command") or val is None:
            continue
        cfg[key] = val
    cfg.setdefault("seed", int(os.environ.get("ANDERSONWALK_SEED", "1")))
    cfg.setdefault("c0", 1.0)
    cfg.setdefault("noise", "rademacher")
    return cfg


def _dist(cfg) -> NoiseDistribution:
    noise = cfg["noise"]
    if isinstance(noise, dict):
        return NoiseDistribution.from_config(noise)
    return NoiseDistribution.from_config({"kind": noise})


def _params(cfg):
    return derive_params(cfg["lambda0"], cfg["sigma"], cfg["c0"])


def _out(cfg, stem, suffix) -> Path:
    base = Path(cfg.get("out", "."))
    base.mkdir(parents=True, exist_ok=True)
    return base / f"{stem}{suffix}"


def cmd_count(cfg) -> int:
    params = _params(cfg)
    dist = _dist(cfg)
    rng = RngStream(cfg["seed"])
    rows = []
    mismatches = 0
    for i in range(cfg["reps"]):
        om = sample_noise(dist, rng.substream(i), cfg["n"])
        h = spectrum.FiniteHamiltonian.from_noise(params.sigma, om)
        sturm = spectrum.count_in_interval(h, params.lambda0, cfg["lam"])
        passes = transferwalk.count_passes(params, om, cfg["lam"]).passes
        rows.append((i, cfg["n"], cfg["lam"], sturm, passes, sturm == passes))
        if sturm != passes:
            mismatches += 1
    write_csv(_out(cfg, "count", ".csv"),
              ["instance", "n", "lam", "sturm", "passes", "agree"], rows)
    write_json(_out(cfg, "count", ".json"),
               {"instances": cfg["reps"], "mismatches": mismatches}, cfg)
    if mismatches:
        print(f"count: {mismatches} mismatching instance(s)", file=sys.stderr)
        return EXIT_MISMATCH
    print(f"count: {cfg['reps']} instances, all counts agree")
    return EXIT_OK


def cmd_ids(cfg) -> int:
    params = _params(cfg)
    dist = _dist(cfg)
    grid = np.geomspace(cfg["lam_min"], cfg["lam_max"], cfg["grid_points"])
    est = ids.estimate_ids(params, dist, grid, cfg["n"], cfg["reps"],
                           RngStream(cfg["seed"]))
    gm = cfg.get("gamma_margin")
    bounds = None
    if gm and params.sigma > 0.0:
        bounds = np.array([ids.holder_bound(params, l, gm) for l in grid])
    rows = [(l, m, s, b if bounds is not None else math.nan)
            for l, m, s, b in zip(grid, est.mu_hat, est.stderr,
                                  bounds if bounds is not None else grid * math.nan)]
    write_csv(_out(cfg, "ids", ".csv"),
              ["lambda", "mu_hat", "stderr", "bound"], rows)
    summary = {"lambda0": params.lambda0, "sigma": params.sigma,
               "n": est.n, "reps": est.reps}
    try:
        fit = ids.fit_holder_exponent(est, params if gm else None, gm)
        summary["fit"] = {"exponent_hat": fit.exponent_hat,
                          "exponent_se": fit.exponent_se,
                          "intercept": fit.intercept,
                          "n_points": fit.n_points,
                          "paper_exponent": fit.paper_exponent}
    except AndersonWalkError as exc:
        summary["fit"] = {"error": f"{type(exc).__name__}: {exc}"}
    write_json(_out(cfg, "ids", ".json"), summary, cfg)
    plots.plot_ids(est, bounds, _out(cfg, "ids", ".png"))
    print(f"ids: {len(grid)}-point grid written, n={est.n}, reps={est.reps}")
    return EXIT_OK


def cmd_backtrack(cfg) -> int:
    params = _params(cfg)
    dist = _dist(cfg)
    kappa = cfg.get("kappa")
    if kappa is None:
        kappa = backtrack.kappa_max(params)
    b_grid = np.arange(1.0, cfg.get("b_max", 8.0) + 0.5)
    table = backtrack.backtrack_tail_estimate(
        params, dist, kappa, b_grid, cfg["n"], cfg["reps"],
        RngStream(cfg["seed"]))
    rows = list(zip(table.b_grid, table.p_hat, table.stderr, table.bound))
    write_csv(_out(cfg, "backtrack", ".csv"),
              ["B", "p_hat", "stderr", "bound"], rows)
    ok = bool(np.all(table.p_hat <= table.bound + 3.0 * table.stderr))
    write_json(_out(cfg, "backtrack", ".json"),
               {"kappa": kappa, "within_bound": ok}, cfg)
    plots.plot_tail(table, _out(cfg, "backtrack", ".png"))
    print(f"backtrack: tail table for {table.reps} runs, "
          f"bound {'respected' if ok else 'EXCEEDED'}")
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_martingale(cfg) -> int:
    params = _params(cfg)
    dist = _dist(cfg)
    kappa = cfg.get("kappa")
    if kappa is None:
        kappa = backtrack.kappa_max(params)
    consts = martingale.derive_constants(params, kappa)
    npts = cfg.get("grid_points", 512)
    alphas = 2.0 * math.pi * np.arange(npts) / npts
    atoms = [v for v, _ in dist.atoms] + [0.0]
    worst = -math.inf
    ratios = np.empty(npts)
    for j, a in enumerate(alphas):
        anchor = complex(math.cos(a), math.sin(a))
        r = max(martingale.supermartingale_ratio(anchor, consts, params, dist,
                                                 prev_omega=v)
                for v in atoms)
        ratios[j] = r
        worst = max(worst, r)
    ek = math.exp(-kappa)
    ok = worst <= ek * (1.0 + 1e-12)
    ledger = {f"c{i}": getattr(consts, f"c{i}") for i in range(1, 8)}
    ledger.update({"c_tilde": consts.c_tilde, "c_bar": consts.c_bar})
    write_json(_out(cfg, "martingale", ".json"),
               {"constants": ledger, "kappa": kappa, "delta": consts.delta,
                "delta_window": [consts.delta_lo, consts.delta_hi],
                "worst_ratio": worst, "exp_neg_kappa": ek,
                "aggregate_below_224": consts.aggregate_below_224,
                "supermartingale_ok": ok}, cfg)
    plots.plot_ratio_grid(alphas, ratios, ek, _out(cfg, "martingale", ".png"))
    if not ok:
        print(f"martingale: worst ratio {worst!r} exceeds e^-kappa {ek!r}",
              file=sys.stderr)
        return EXIT_MARTINGALE
    print(f"martingale: worst ratio - e^-kappa = {worst - ek:.3e} <= 0")
    return EXIT_OK


def cmd_lyapunov(cfg) -> int:
    params = _params(cfg)
    dist = _dist(cfg)
    est = transferwalk.lyapunov_estimate(params, dist, cfg["n"], cfg["reps"],
                                         RngStream(cfg["seed"]))
    pred = None
    if params.sigma > 0.0:
        pred = params.sigma ** 2 / (8.0 * params.sin_theta ** 2)
    write_csv(_out(cfg, "lyapunov", ".csv"), ["rep", "log_growth_rate"],
              list(enumerate(est.samples)))
    write_json(_out(cfg, "lyapunov", ".json"),
               {"gamma_hat": est.gamma_hat, "stderr": est.stderr,
                "weak_disorder_prediction": pred}, cfg)
    plots.plot_lyapunov_samples(est, pred, _out(cfg, "lyapunov", ".png"))
    print(f"lyapunov: gamma_hat = {est.gamma_hat:.6g} +- {est.stderr:.2g}")
    return EXIT_OK


def cmd_selfcheck(cfg) -> int:
    """Quick end-to-end invariant sweep; a cheap subset of the test suite."""
    params = derive_params(cfg.get("lambda0") or 1.0, cfg.get("sigma") or 0.01,
                           cfg["c0"])
    dist = _dist(cfg)
    rng = RngStream(cfg["seed"])
    failures = []

    om = sample_noise(dist, rng.substream(0), 200)
    h = spectrum.FiniteHamiltonian.from_noise(params.sigma, om)
    ev = spectrum.dense_eigenvalues(h)
    for e in (-1.5, -0.3, 0.7, 1.9):
        if spectrum.count_below(h, e) != int(np.sum(ev < e)):
            failures.append(f"count_below({e}) disagrees with dense solve")

    traj = transferwalk.walk_trajectory(params, om)
    gap = np.max(np.abs(traj.logrs + traj.logys))
    if gap > 1e-8:
        failures.append(f"radius/imaginary-part identity off by {gap:.3e}")

    if transferwalk.max_jump_ratio(traj) > transferwalk.m_bound(params) + 1e-12:
        failures.append("jump bound exceeded")

    sturm = spectrum.count_in_interval(h, params.lambda0, 0.05)
    passes = transferwalk.count_passes(params, om, 0.05).passes
    if sturm != passes:
        failures.append(f"pass count {passes} != interval count {sturm}")

    # inverse-image identity on random unimodular matrices
    from .halfplane import Mat2
    gen = rng.substream(1).generator()
    for _ in range(50):
        a, b, c = gen.normal(size=3)
        m = Mat2(math.exp(a), b, c, (1.0 + b * c) / math.exp(a))
        lhs, rhs = prufer.verify_cutetrick(m)
        if abs(lhs - rhs) > 1e-10 * (1.0 + abs(lhs)):
            failures.append("inverse-image identity failed")
            break

    if failures:
        for f in failures:
            print(f"selfcheck: FAIL {f}", file=sys.stderr)
        return EXIT_MISMATCH
    print("selfcheck: all checks passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="andersonwalk",
        description="transfer-matrix spectral counting, hyperbolic walks "
                    "and Monte Carlo IDS estimation")
    p.add_argument("--config", help="JSON config file; flags override it")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None,
                   help="worker hint; results never depend on it")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, n_default=None, reps_default=None):
        sp.add_argument("--lambda0", type=float, default=None)
        sp.add_argument("--sigma", type=float, default=None)
        sp.add_argument("--c0", type=float, default=None)
        sp.add_argument("--noise", default=None,
                        help="rademacher | uniform (atoms via config file)")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--n", type=int, default=n_default)
        sp.add_argument("--reps", type=int, default=reps_default)
        sp.add_argument("--seed", type=int, default=None)

    sp = sub.add_parser("count", help="Sturm counts vs boundary-value passes")
    common(sp, 100, 20)
    sp.add_argument("--lam", type=float, default=0.05)
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("ids", help="Monte Carlo IDS window masses + fit")
    common(sp, 1000, 10)
    sp.add_argument("--lam-min", dest="lam_min", type=float, default=1e-3)
    sp.add_argument("--lam-max", dest="lam_max", type=float, default=1e-1)
    sp.add_argument("--grid-points", dest="grid_points", type=int, default=10)
    sp.add_argument("--gamma-margin", dest="gamma_margin", type=float,
                    default=None)
    sp.set_defaults(func=cmd_ids)

    sp = sub.add_parser("backtrack", help="backtrack tail vs exponential bound")
    common(sp, 10000, 200)
    sp.add_argument("--kappa", type=float, default=None)
    sp.add_argument("--b-max", dest="b_max", type=float, default=8.0)
    sp.set_defaults(func=cmd_backtrack)

    sp = sub.add_parser("martingale", help="exact one-step ratio over a phase grid")
    common(sp)
    sp.add_argument("--kappa", type=float, default=None)
    sp.add_argument("--grid-points", dest="grid_points", type=int, default=512)
    sp.set_defaults(func=cmd_martingale)

    sp = sub.add_parser("lyapunov", help="top Lyapunov exponent estimate")
    common(sp, 100000, 30)
    sp.set_defaults(func=cmd_lyapunov)

    sp = sub.add_parser("selfcheck", help="quick invariant sweep")
    common(sp, None, None)
    sp.set_defaults(func=cmd_selfcheck)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        # per-command required keys
        needs = {"count": ("lambda0", "sigma", "n", "reps", "lam"),
                 "ids": ("lambda0", "sigma", "n", "reps"),
                 "backtrack": ("lambda0", "sigma", "n", "reps"),
                 "martingale": ("lambda0", "sigma"),
                 "lyapunov": ("lambda0", "sigma", "n", "reps"),
                 "selfcheck": ()}
        missing = [k for k in needs[args.command] if cfg.get(k) is None]
        if missing:
            print(f"missing config keys: {', '.join(missing)}", file=sys.stderr)
            return EXIT_CONFIG
        return args.func(cfg)
    except (AndersonWalkError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
