"""Experiment execution: turn a validated config into files on disk.

Every mode writes a `result.json` carrying the config hash, the resolved
parameters, the list of emitted artifacts, and a compact numeric summary.
Artifacts are CSV (header row, full-precision floats) plus optional
self-contained SVG plots.  Writes are atomic (temp file then rename) and
contain no wall-clock timestamps, so re-running a config byte-reproduces
the output; timing goes to stderr only.
"""

from __future__ import annotations

import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .. import diagnostics as diag
from .. import generator as gen
from .. import landscape as ls
from .. import priors
from .. import samplers as smp
from .checks import theory_check_suite
from .config import ExperimentConfig

__all__ = ["run_experiment"]


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


_SVG_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _write_svg(path: Path, xs, series: dict, title: str) -> None:
    """Minimal polyline plot; no external assets."""
    w, h, ml, mr, mt, mb = 640, 400, 60, 20, 30, 40
    all_y = np.concatenate([np.asarray(ys, dtype=float) for ys in series.values()])
    x = np.asarray(xs, dtype=float)
    x_lo, x_hi = float(x.min()), float(x.max())
    y_lo, y_hi = float(all_y.min()), float(all_y.max())
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    def sx(v):
        return ml + (v - x_lo) / (x_hi - x_lo) * (w - ml - mr)

    def sy(v):
        return h - mb - (v - y_lo) / (y_hi - y_lo) * (h - mt - mb)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
             f'viewBox="0 0 {w} {h}">',
             f'<rect width="{w}" height="{h}" fill="white"/>',
             f'<text x="{w // 2}" y="20" text-anchor="middle" '
             f'font-family="sans-serif" font-size="14">{title}</text>',
             f'<line x1="{ml}" y1="{h - mb}" x2="{w - mr}" y2="{h - mb}" '
             f'stroke="black"/>',
             f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{h - mb}" '
             f'stroke="black"/>']
    parts.append(f'<text x="{ml}" y="{h - mb + 18}" font-family="sans-serif" '
                 f'font-size="11">{x_lo:.4g}</text>')
    parts.append(f'<text x="{w - mr}" y="{h - mb + 18}" text-anchor="end" '
                 f'font-family="sans-serif" font-size="11">{x_hi:.4g}</text>')
    parts.append(f'<text x="{ml - 6}" y="{h - mb}" text-anchor="end" '
                 f'font-family="sans-serif" font-size="11">{y_lo:.4g}</text>')
    parts.append(f'<text x="{ml - 6}" y="{mt + 10}" text-anchor="end" '
                 f'font-family="sans-serif" font-size="11">{y_hi:.4g}</text>')
    for i, (label, ys) in enumerate(series.items()):
        color = _SVG_COLORS[i % len(_SVG_COLORS)]
        pts = " ".join(f"{sx(float(a)):.2f},{sy(float(b)):.2f}"
                       for a, b in zip(x, ys))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     f'stroke-width="1.5"/>')
        parts.append(f'<text x="{w - mr - 4}" y="{mt + 16 + 14 * i}" '
                     f'text-anchor="end" font-family="sans-serif" '
                     f'font-size="11" fill="{color}">{label}</text>')
    parts.append("</svg>")
    _atomic_write(path, "\n".join(parts) + "\n")


# ---------------------------------------------------------------------------
# mode runners: each returns (artifact names, summary dict, exit code)


def _run_landscape(cfg, out: Path):
    p = cfg.params
    d, n = p["d"], p["n"]
    params = ls.ModifiedLossParams.for_depth(d, xi=p["xi"], lam=p["lam"],
                                             beta=p["beta"])
    zs = np.zeros(n)
    zs[0] = 1.0
    r_vals = np.linspace(p["r_max"] / p["r_points"], p["r_max"], p["r_points"])
    t_vals = np.linspace(0.0, math.pi, p["theta_points"])
    rows = []
    for r in r_vals:
        for t in t_vals:
            x = r * (math.cos(t) * np.eye(n)[0] + math.sin(t) * np.eye(n)[1])
            loss = ls.ideal_loss(x, zs, d)
            mval, _ = ls.modified_loss(x, zs, d, params)
            v, _, script = ls.potential(x, zs, d, params)
            eig = diag.min_hessian_eig(x, zs, d, n)
            rows.append((float(r), float(t), float(loss), float(mval),
                         float(v), float(script), float(eig)))
    _write_csv(out / "landscape_scan.csv",
               ["r", "theta", "loss", "loss_modified", "potential",
                "generator_functional", "min_hessian_eig"], rows)
    artifacts = ["landscape_scan.csv"]
    if p["svg"]:
        by_theta = {}
        for label, t_idx in (("theta=0", 0), ("theta=pi", len(t_vals) - 1)):
            by_theta[label] = [rows[i * len(t_vals) + t_idx][2]
                               for i in range(len(r_vals))]
        _write_svg(out / "landscape_sections.svg", r_vals, by_theta,
                   f"loss vs radius (d={d}, n={n})")
        artifacts.append("landscape_sections.svg")
    summary = {"saddle_radius": ls.saddle_radius(d),
               "loss_at_minimizer": float(ls.ideal_loss(zs, zs, d)),
               "grid_points": len(rows)}
    return artifacts, summary, 0


def _run_wdc(cfg, out: Path):
    p = cfg.params
    k = p["k"]
    rows = []
    for idx, n in enumerate(p["n_values"]):
        rng = np.random.default_rng((cfg.seed, 4, idx))
        devs = []
        for _ in range(p["pairs"]):
            W = rng.standard_normal((n, k)) / math.sqrt(n)
            x = rng.standard_normal(k)
            y = rng.standard_normal(k)
            devs.append(gen.wdc_deviation(W, x, y).deviation)
        devs = np.sort(devs)
        rows.append((int(n), float(np.median(devs)),
                     float(devs[int(0.9 * (len(devs) - 1))]),
                     float(devs[-1])))
    _write_csv(out / "wdc_deviation.csv",
               ["n_rows", "median_deviation", "p90_deviation",
                "max_deviation"], rows)
    artifacts = ["wdc_deviation.csv"]
    if p["svg"]:
        _write_svg(out / "wdc_deviation.svg", [r[0] for r in rows],
                   {"median": [r[1] for r in rows],
                    "p90": [r[2] for r in rows]},
                   f"directional-curvature deviation vs rows (k={k})")
        artifacts.append("wdc_deviation.svg")
    summary = {"medians": [r[1] for r in rows],
               "monotone_decreasing":
                   all(a > b for a, b in zip([r[1] for r in rows],
                                             [r[1] for r in rows][1:]))}
    return artifacts, summary, 0


def _run_rric(cfg, out: Path):
    p = cfg.params
    G = gen.build_generator(p["dims"], seed=cfg.seed + 1)
    rows = []
    for idx, m in enumerate(p["m_values"]):
        rng = np.random.default_rng((cfg.seed, 5, idx))
        devs = []
        for _ in range(p["tuples"]):
            A = gen.gaussian_map(m, p["dims"][-1],
                                 seed=int(rng.integers(2**63)))
            xs = rng.standard_normal((4, p["dims"][0]))
            devs.append(gen.rric_deviation(A, G, *xs))
        devs = np.sort(devs)
        rows.append((int(m), float(np.median(devs)),
                     float(devs[int(0.9 * (len(devs) - 1))]),
                     float(devs[-1])))
    _write_csv(out / "rric_deviation.csv",
               ["m", "median_deviation", "p90_deviation", "max_deviation"],
               rows)
    artifacts = ["rric_deviation.csv"]
    if p["svg"]:
        _write_svg(out / "rric_deviation.svg", [r[0] for r in rows],
                   {"median": [r[1] for r in rows],
                    "p90": [r[2] for r in rows]},
                   "range-restricted isometry deviation vs measurements")
        artifacts.append("rric_deviation.svg")
    summary = {"medians": [r[1] for r in rows],
               "monotone_decreasing":
                   all(a > b for a, b in zip([r[1] for r in rows],
                                             [r[1] for r in rows][1:]))}
    return artifacts, summary, 0


def _run_mix(cfg, out: Path):
    p = cfg.params
    d, beta, eta = p["d"], p["beta"], p["eta"]
    snapshots = sorted(p["snapshot_steps"])
    zs = np.array([1.0, 0.0])
    params = ls.ModifiedLossParams.for_depth(d, beta=beta)

    def pg(Z):
        return ls.modified_loss(Z, zs, d, params)

    z0 = np.tile(np.array([-p["start_radius"], 0.0]), (p["chains"], 1))
    record_every = max(1, math.gcd(*snapshots) if len(snapshots) > 1
                       else snapshots[0])
    lcfg = smp.LangevinConfig(eta=eta, beta=beta, steps=snapshots[-1],
                              seed=cfg.seed + 61, record_every=record_every)
    run = smp.run_langevin_ensemble(pg, z0, lcfg)
    ref = diag.reference_grid_sampler(d, beta, 2, grid=p["grid"],
                                      count=p["chains"], seed=cfg.seed + 62)
    rows = []
    for t in snapshots:
        w1 = diag.sliced_w1(run.snapshot(t), ref.samples,
                            projections=p["projections"],
                            seed=cfg.seed + 63)
        rows.append((int(t), float(w1)))
    _write_csv(out / "mixing_w1.csv", ["step", "sliced_w1"], rows)
    artifacts = ["mixing_w1.csv"]
    if p["svg"]:
        _write_svg(out / "mixing_w1.svg", [r[0] for r in rows],
                   {"sliced W1": [r[1] for r in rows]},
                   f"transport distance to reference (beta={beta})")
        artifacts.append("mixing_w1.svg")
    summary = {"final_w1": rows[-1][1],
               "w1_curve": {str(t): w for t, w in rows}}
    return artifacts, summary, 0


def _invert_one(cfg, run_id: int):
    p = cfg.params
    dims = p["dims"]
    rng = np.random.default_rng((cfg.seed, 11, run_id))
    G = gen.build_generator(dims, seed=int(rng.integers(2**63)))
    z_true = rng.standard_normal(dims[0])
    y = gen.forward(G, z_true)[0]
    if p["noise_sigma"] > 0:
        y = y + p["noise_sigma"] * rng.standard_normal(dims[-1])
    m_obs = max(1, round(p["mask_fraction"] * dims[-1]))
    mask = np.zeros(dims[-1], dtype=bool)
    mask[rng.choice(dims[-1], size=m_obs, replace=False)] = True
    problem = gen.InverseProblem(
        generator=G, map=gen.MeasurementMap(matrix=None, m=dims[-1]),
        y=y, noise_sigma=p["noise_sigma"], mask=mask)
    z0 = rng.standard_normal(dims[0])

    def pg(z):
        return gen.empirical_loss_grad(problem, z)

    tr_c = smp.run_gd(pg, z0, eta=p["eta_csgm"], steps=p["steps"],
                      record_every=p["steps"])
    tr_i = smp.run_ilo_baseline(problem, split_layer=p["split_layer"],
                                radius=p["radius"], eta=p["eta_ilo"],
                                steps=p["steps"], z0=z0)
    return (run_id, m_obs, math.sqrt(2.0 * float(tr_c.losses[-1])),
            math.sqrt(2.0 * float(tr_i.losses[-1])))


def _run_invert(cfg, out: Path):
    p = cfg.params
    workers = int(os.environ.get("LANGSCAPE_THREADS", "1"))
    ids = range(p["runs"])
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda r: _invert_one(cfg, r), ids))
    else:
        rows = [_invert_one(cfg, r) for r in ids]
    rows.sort(key=lambda r: r[0])
    _write_csv(out / "invert_runs.csv",
               ["run", "observed_coords", "residual_latent_descent",
                "residual_intermediate_projected"], rows)
    artifacts = ["invert_runs.csv"]
    med_c = float(np.median([r[2] for r in rows]))
    med_i = float(np.median([r[3] for r in rows]))
    if p["svg"]:
        _write_svg(out / "invert_residuals.svg",
                   list(range(len(rows))),
                   {"latent descent": sorted(r[2] for r in rows),
                    "intermediate projected": sorted(r[3] for r in rows)},
                   "sorted residuals across runs")
        artifacts.append("invert_residuals.svg")
    summary = {"median_residual_latent": med_c,
               "median_residual_intermediate": med_i,
               "intermediate_beats_latent": med_i < med_c}
    return artifacts, summary, 0


def _run_posterior(cfg, out: Path):
    p = cfg.params
    prior = priors.GaussianMixturePrior(
        weights=np.asarray(p["prior_weights"], dtype=float),
        means=np.asarray(p["prior_means"], dtype=float),
        variances=np.asarray(p["prior_variances"], dtype=float))
    y = np.asarray(p["y"], dtype=float)
    g2 = p["g2"]
    tail = None if g2 == "identity" else np.asarray(g2, dtype=float)
    problem = gen.InverseProblem(
        generator=None, map=gen.MeasurementMap(matrix=None, m=len(y)),
        y=y, noise_sigma=p["sigma"])
    kept, rows = [], []
    for c in range(p["chains"]):
        lcfg = smp.LangevinConfig(eta=p["eta"], beta=1.0, steps=p["steps"],
                                  seed=cfg.seed + 101 + c,
                                  record_every=p["record_every"])
        traj = smp.posterior_sgld(problem, prior, tail, lcfg,
                                  likelihood_weight=p["likelihood_weight"])
        half = len(traj.states) // 2
        kept.append(traj.states[half:])
        for state in traj.states[half:]:
            rows.append((c, *map(float, state)))
    dim = prior.dim
    _write_csv(out / "posterior_samples.csv",
               ["chain"] + [f"x{i}" for i in range(dim)], rows)
    pooled = np.concatenate(kept)
    mean = pooled.mean(axis=0)
    cov = np.cov(pooled.T).reshape(dim, dim)
    summary = {"sample_count": int(len(pooled)),
               "mean": [float(v) for v in mean],
               "cov": [[float(v) for v in row] for row in cov]}
    artifacts = ["posterior_samples.csv"]
    if p["svg"]:
        qs = np.linspace(0.0, 1.0, 201)
        series = {f"x{i}": np.quantile(pooled[:, i], qs)
                  for i in range(dim)}
        _write_svg(out / "posterior_marginals.svg", qs, series,
                   "pooled marginal quantiles after burn-in")
        artifacts.append("posterior_marginals.svg")
    return artifacts, summary, 0


def _run_theory_check(cfg, out: Path, strict: bool):
    p = cfg.params
    ids = p["checks"] or None
    t0 = time.monotonic()
    results = theory_check_suite(cfg.seed, ids)
    records = []
    for r in results:
        records.append(r.record())
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.check_id}: {status} (statistic {r.statistic:.6g}, "
              f"bound {r.bound:.6g})")
    all_pass = all(r.passed for r in results)
    report = {"seed": cfg.seed, "all_pass": all_pass, "checks": records}
    _atomic_write(out / "theory_report.json",
                  json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(f"theory-check: {sum(r.passed for r in results)}/{len(results)} "
          f"passed in {time.monotonic() - t0:.1f}s", file=sys.stderr)
    summary = {"all_pass": all_pass,
               "failed": [r.check_id for r in results if not r.passed]}
    code = 0 if (all_pass or not strict) else 3
    return ["theory_report.json"], summary, code


def run_experiment(config: ExperimentConfig, strict_checks: bool = True) -> int:
    """Execute one validated config; returns the process exit code."""
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.monotonic()
    if config.mode == "landscape":
        artifacts, summary, code = _run_landscape(config, out)
    elif config.mode == "wdc":
        artifacts, summary, code = _run_wdc(config, out)
    elif config.mode == "rric":
        artifacts, summary, code = _run_rric(config, out)
    elif config.mode == "mix":
        artifacts, summary, code = _run_mix(config, out)
    elif config.mode == "invert":
        artifacts, summary, code = _run_invert(config, out)
    elif config.mode == "posterior":
        artifacts, summary, code = _run_posterior(config, out)
    elif config.mode == "theory-check":
        artifacts, summary, code = _run_theory_check(config, out,
                                                     strict_checks)
    else:  # pragma: no cover - validate_config rejects unknown modes
        raise ValueError(f"unhandled mode {config.mode!r}")
    result = {"mode": config.mode, "config_hash": config.hash(),
              "params": config.params, "artifacts": sorted(artifacts),
              "summary": summary}
    _atomic_write(out / "result.json",
                  json.dumps(result, indent=2, sort_keys=True) + "\n")
    print(f"[{config.mode}] wrote {len(artifacts) + 1} files to {out} "
          f"in {time.monotonic() - t0:.1f}s", file=sys.stderr)
    return code
