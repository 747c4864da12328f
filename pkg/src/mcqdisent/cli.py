"""Command-line front end.

    mcqdisent simulate  --config run.yaml --out out/
    mcqdisent ensemble  --config run.yaml --n-runs 10 --ratios 2,1,0.5
    mcqdisent scatter   --config run.yaml --n-per-ratio 200
    mcqdisent histogram --config run.yaml
    mcqdisent linearize --config run.yaml --models exact,gaussian

Exit codes: 0 ok, 2 config error, 3 cap exceeded, 4 invariant violation,
5 geometry error, 6 domain error, 1 anything else.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from mcqdisent import plotting
from mcqdisent.analysis import CrossingError, collapse_stats, early_slope, linearize, reference_line
from mcqdisent.config import RunConfig, config_to_dict, dump_config, load_config, resolve_t_max, with_overrides
from mcqdisent.dynamics import (
    EXACT,
    GAUSSIAN,
    NUMERICAL,
    CoherenceSeries,
    coherence_factorized,
    coherence_gaussian,
    draw_phases,
    evolve_numerical,
    global_energies,
    init_global_state,
    omega_rms,
    reduce_to_ab,
)
from mcqdisent.electrostatics import FlipCoefficients, flip_coefficients
from mcqdisent.errors import CapExceededError, InvariantViolation, McqError
from mcqdisent.geometry import build_scene, make_phase_rng, scene_to_text
from mcqdisent.measures import BPRV, BM, CHSH, closed_form_values, s_bm_generic, s_chsh_fixed
from mcqdisent.report import OutputBundle, versions, write_csv, write_json
from mcqdisent.spectra import enumerate_flip_energies, gaussian_fit_amplitude, histogram, rms_from_coefficients, summarize
from mcqdisent.timescales import ensemble_configs, scatter_ensemble, timescales

logger = logging.getLogger("mcqdisent")

C_TOL = 1e-12


def _chunks(n: int, k: int) -> list[range]:
    k = max(1, min(k, n))
    bounds = np.linspace(0, n, k + 1).astype(int)
    return [range(bounds[i], bounds[i + 1]) for i in range(k)]


def _numerical_curves(scene, phases, times, threads: int, cap: int):
    """c(t), generic S_BM and S_CHSH from state-vector evolution."""
    if scene.n_env > cap:
        raise CapExceededError("state vector", scene.n_env, cap)
    energies = global_energies(scene, cap=cap)
    state = init_global_state(scene.n_env, phases, cap=cap)
    out = np.empty((3, len(times)))

    def work(idx: range):
        for i in idx:
            rho = reduce_to_ab(evolve_numerical(state, scene, float(times[i]), energies)).check()
            out[0, i] = 2.0 * rho.rho[0, 3].real
            out[1, i] = s_bm_generic(rho).value
            out[2, i] = s_chsh_fixed(rho).value

    parts = _chunks(len(times), threads)
    if threads > 1 and len(parts) > 1:
        with ThreadPoolExecutor(threads) as pool:
            list(pool.map(work, parts))
    else:
        for part in parts:
            work(part)
    return out


def _model_for_summary(models) -> str:
    for m in (EXACT, GAUSSIAN, NUMERICAL):
        if m in models:
            return m
    raise AssertionError(models)


def _simulate_core(cfg: RunConfig, bundle: OutputBundle, threads: int, plots: bool):
    """Emit the single-scene files into ``bundle.directory``."""
    out = bundle.directory
    scene = build_scene(cfg.scene, cfg.constants)
    coeffs = flip_coefficients(scene)
    rep = timescales(coeffs)
    t_max = resolve_t_max(cfg.time_grid, rep.tau_e)
    times = np.linspace(0.0, t_max, int(cfg.time_grid.n_steps))
    scaled = times / rep.tau_e if math.isfinite(rep.tau_e) else np.zeros_like(times)
    scaled_geo = times / rep.tau_geo if math.isfinite(rep.tau_geo) else np.zeros_like(times)

    c = {EXACT: coherence_factorized(coeffs, times), GAUSSIAN: coherence_gaussian(coeffs, times)}
    if np.any(np.abs(c[EXACT]) > 1.0 + C_TOL) or abs(c[EXACT][0] - 1.0) > C_TOL:
        raise InvariantViolation("exact coherence factor left [-1, 1] or c(0) != 1")
    generic = {}
    if NUMERICAL in cfg.models:
        phases = draw_phases(make_phase_rng(cfg.scene.seed), scene.n_env)
        num = _numerical_curves(scene, phases, times, threads, cfg.caps.state_vector)
        c[NUMERICAL] = num[0]
        generic = {BM: num[1], CHSH: num[2]}

    bundle.add(out / "scene.txt").write_text(scene_to_text(scene))
    bundle.add(write_json(out / "timescales.json", rep.as_dict()))

    header = ["t_fs", "t_over_tauE", "c_exact", "c_gauss", "f"]
    cols = [times, scaled, c[EXACT], c[GAUSSIAN], np.abs(c[EXACT])]
    if NUMERICAL in c:
        header.append("c_numerical")
        cols.append(c[NUMERICAL])
    bundle.add(write_csv(out / "coherence.csv", header, cols))

    header = ["t_fs", "t_over_tauE", "t_over_tauGeo"]
    cols = [times, scaled, scaled_geo]
    values = {}
    for model in cfg.models:
        for measure in cfg.measures:
            if model == NUMERICAL and measure in generic:
                v = generic[measure]
            else:
                v = closed_form_values(measure, c[model])
            values[(model, measure)] = v
            header.append(f"S_{measure.upper()}_{model}")
            cols.append(v)
    bundle.add(write_csv(out / "correlations.csv", header, cols))

    if plots:
        bundle.add(plotting.plot_coherence(out / "coherence.csv", out / "coherence.svg"))
        if cfg.measures:
            bundle.add(plotting.plot_correlations(out / "correlations.csv", out / "correlations.svg", cfg.measures, cfg.models))
    return rep, times, values


def _start(cfg: RunConfig, command: str) -> OutputBundle:
    out = Path(cfg.outputs)
    out.mkdir(parents=True, exist_ok=True)
    bundle = OutputBundle(out, command)
    bundle.manifest["_t0"] = time.perf_counter()
    return bundle


def _finish(cfg: RunConfig, bundle: OutputBundle, extra: dict | None = None) -> OutputBundle:
    t0 = bundle.manifest.pop("_t0")
    out = bundle.directory
    # the echo is location- and thread-independent so bundles compare byte for byte
    echo = replace(cfg, threads=1, outputs=".")
    bundle.add(out / "config.yaml").write_text(dump_config(echo))
    manifest = {
        "command": bundle.command,
        "config": config_to_dict(echo),
        "seed": cfg.scene.seed,
        "versions": versions(),
        "files": sorted(p.relative_to(out).as_posix() for p in bundle.files) + ["manifest.json"],
        "errors": bundle.errors,
        "replay": f"mcqdisent {bundle.command} --config config.yaml --out <dir>",
    }
    manifest.update(extra or {})
    bundle.manifest = manifest
    write_json(out / "manifest.json", manifest)
    # wall time is the one non-reproducible record, kept out of the manifest
    write_json(out / "timing.json", {"wall_time_s": time.perf_counter() - t0, "threads": cfg.threads})
    return bundle


def cmd_simulate(cfg: RunConfig) -> OutputBundle:
    bundle = _start(cfg, "simulate")
    _simulate_core(cfg, bundle, cfg.threads, cfg.plots)
    return _finish(cfg, bundle)


def _ensemble_member(args):
    i, member_cfg, ratio, directory = args
    directory.mkdir(parents=True, exist_ok=True)
    bundle = OutputBundle(directory, "simulate")
    try:
        rep, times, values = _simulate_core(member_cfg, bundle, 1, False)
    except McqError as exc:
        return i, ratio, member_cfg, None, f"run {i} (seed {member_cfg.scene.seed}): {exc}", bundle.files
    return i, ratio, member_cfg, (rep, times, values), None, bundle.files


def cmd_ensemble(cfg: RunConfig, n_runs: int | None = None, radius_ratios=None) -> OutputBundle:
    n_runs = cfg.ensemble.n_runs if n_runs is None else int(n_runs)
    ratios = tuple(cfg.ensemble.radius_ratios if radius_ratios is None else radius_ratios)
    cfg = replace(cfg, ensemble=replace(cfg.ensemble, n_runs=n_runs, radius_ratios=ratios))
    bundle = _start(cfg, "ensemble")
    out = bundle.directory
    measure, threshold = cfg.ensemble.measure, cfg.ensemble.threshold
    if measure not in cfg.measures:
        cfg = replace(cfg, measures=tuple(cfg.measures) + (measure,))
    summary_model = _model_for_summary(cfg.models)

    jobs = []
    for i, (scene_cfg, ratio) in enumerate(ensemble_configs(cfg.scene, ratios, n_runs)):
        member = replace(cfg, scene=scene_cfg)
        jobs.append((i, member, ratio, out / "runs" / f"run_{i:04d}"))
    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            results = list(pool.map(_ensemble_member, jobs))
    else:
        results = [_ensemble_member(j) for j in jobs]

    ok = []
    for i, ratio, member, res, err, files in results:
        bundle.files.extend(files)
        if err:
            logger.warning(err)
            bundle.errors.append(err)
        else:
            ok.append((i, ratio, member, res))

    bundle.add(write_csv(
        out / "members.csv",
        ["curve_id", "ratio", "seed", "R_B_nm", "tau_e_fs", "tau_geo_fs"],
        [[i for i, *_ in ok], [r for _, r, _, _ in ok], [m.scene.seed for _, _, m, _ in ok],
         [m.scene.R_B for _, _, m, _ in ok], [res[0].tau_e for *_, res in ok], [res[0].tau_geo for *_, res in ok]],
    ))

    summary = {"measure": measure, "threshold": threshold, "model": summary_model}
    curves = [(res[0], res[1], res[2][(summary_model, measure)]) for *_, res in ok]
    for scale in ("tau_e", "tau_geo"):
        if not curves:
            summary[scale] = None
            continue
        try:
            stats = collapse_stats(curves, threshold, scale=scale)
        except CrossingError as exc:
            bad = [ok[j][0] for j in exc.indices]
            msg = f"collapse ({scale}): runs {bad} never cross {measure} = {threshold}"
            bundle.errors.append(msg)
            logger.warning(msg)
            summary[scale] = None
            continue
        bundle.add(write_csv(out / f"collapse_{scale}.csv", ["curve_id", "crossing_scaled_time"],
                             [[i for i, *_ in ok], stats.crossing_times]))
        summary[scale] = {"dispersion": stats.dispersion, "mean_crossing": float(np.mean(stats.crossing_times))}
    bundle.add(write_json(out / "collapse_summary.json", summary))

    if cfg.plots and curves:
        for scale, label in (("raw", "t (fs)"), ("tau_geo", r"$t/\tau$"), ("tau_e", r"$t/\tau_E$")):
            series = []
            for (_, ratio, _, _), (rep, times, vals) in zip(ok, curves):
                unit = 1.0 if scale == "raw" else getattr(rep, scale)
                series.append((ratio, times / unit, vals))
            bundle.add(plotting.plot_collapse(series, out / f"ensemble_{scale}.svg", label, measure))
    return _finish(cfg, bundle, {"collapse": summary})


def cmd_scatter(cfg: RunConfig, ratios=None, n_per_ratio: int | None = None) -> OutputBundle:
    ratios = tuple(cfg.scatter.ratios if ratios is None else ratios)
    n_per_ratio = cfg.scatter.n_per_ratio if n_per_ratio is None else int(n_per_ratio)
    cfg = replace(cfg, scatter=replace(cfg.scatter, ratios=ratios, n_per_ratio=n_per_ratio))
    bundle = _start(cfg, "scatter")
    out = bundle.directory
    rows = scatter_ensemble(cfg.scene, ratios, n_per_ratio, threads=cfg.threads)
    bundle.add(write_csv(
        out / "scatter.csv",
        ["ratio", "seed", "tau_geo_fs", "tau_e_fs"],
        [[r.ratio for r in rows], [r.seed for r in rows], [r.tau_geo for r in rows], [r.tau_e for r in rows]],
    ))
    finite = [r.tau_geo for r in rows if math.isfinite(r.tau_geo)]
    top = 1.05 * max(finite) if finite else 1.0
    line = np.linspace(0.0, top, 50)
    bundle.add(write_csv(out / "reference_line.csv", ["tau_geo_fs", "tau_e_fs"], [line, line / math.sqrt(2.0)]))
    if cfg.plots:
        bundle.add(plotting.plot_scatter(out / "scatter.csv", out / "reference_line.csv", out / "scatter.svg"))
    return _finish(cfg, bundle)


def cmd_histogram(cfg: RunConfig) -> OutputBundle:
    bundle = _start(cfg, "histogram")
    out = bundle.directory
    scene = build_scene(cfg.scene, cfg.constants)
    coeffs = flip_coefficients(scene)
    src = cfg.histogram.source
    ms = enumerate_flip_energies(coeffs, src, cap=cfg.caps.enumeration)
    mom = summarize(ms)
    h = histogram(ms, cfg.histogram.n_bins)
    if mom.rms > 0:
        fit = gaussian_fit_amplitude(h, mom.mean, mom.rms)
        fit_vals = fit(h.bin_centers)
        fit_rec = {"amplitude": fit.amplitude, "mean": fit.mean, "sigma": fit.sigma}
    else:
        fit_vals = np.zeros(h.counts.size)
        fit_rec = {"amplitude": 0.0, "mean": mom.mean, "sigma": 0.0}
    bundle.add(out / "scene.txt").write_text(scene_to_text(scene))
    bundle.add(write_csv(out / "histogram.csv", ["bin_center_eV", "count", "fit_value"], [h.bin_centers, h.counts, fit_vals]))
    record = {
        "source": src,
        "n_values": len(ms),
        "n_bins": int(h.counts.size),
        "mean_eV": mom.mean,
        "rms_eV": mom.rms,
        "rms_from_coefficients_eV": rms_from_coefficients(coeffs, src),
        "raw_moments": {str(k): mom.raw_moment(k) for k in (1, 2, 3, 4)},
        "fit": fit_rec,
        "fit_total_count": float(np.sum(fit_vals)),
    }
    bundle.add(write_json(out / "moments.json", record))
    if cfg.plots:
        bundle.add(plotting.plot_histogram(out / "histogram.csv", out / "histogram.svg"))
    return _finish(cfg, bundle)


def _exponential_reference(coeffs: FlipCoefficients, times) -> np.ndarray:
    return np.exp(-omega_rms(coeffs) * np.asarray(times))


def cmd_linearize(cfg: RunConfig) -> OutputBundle:
    bundle = _start(cfg, "linearize")
    out = bundle.directory
    scene = build_scene(cfg.scene, cfg.constants)
    coeffs = flip_coefficients(scene)
    rep = timescales(coeffs)
    if not math.isfinite(rep.tau_e):
        raise InvariantViolation("linearization needs a coupled environment (tau_E is infinite)")
    times = np.linspace(0.0, resolve_t_max(cfg.time_grid, rep.tau_e), int(cfg.time_grid.n_steps))
    f = {}
    for model in cfg.models:
        if model == EXACT:
            f[model] = coherence_factorized(coeffs, times)
        elif model == GAUSSIAN:
            f[model] = coherence_gaussian(coeffs, times)
        else:
            phases = draw_phases(make_phase_rng(cfg.scene.seed), scene.n_env)
            f[model] = _numerical_curves(scene, phases, times, cfg.threads, cfg.caps.state_vector)[0]
    if cfg.linearize.diagnostic == "exponential":
        f["exponential"] = _exponential_reference(coeffs, times)

    t_window = cfg.linearize.window * rep.tau_e
    slopes = {}
    for name, vals in f.items():
        ls = linearize(CoherenceSeries(times, vals, rep.tau_e, name))
        fit = early_slope(ls, t_max=t_window)
        _, ref = reference_line(ls)
        ref_full = np.full(times.shape, np.nan)
        ref_full[ls.valid] = ref
        bundle.add(write_csv(
            out / f"linearize_{name}.csv",
            ["t_fs", "f", "ln_t", "ln_neg_ln_f", "valid", "reference_slope2"],
            [times, np.abs(vals), ls.x, ls.y, ls.valid, ref_full],
        ))
        slopes[name] = {"slope": fit.slope, "intercept": fit.intercept, "window": list(fit.window), "t_max_fs": t_window}
        if cfg.plots:
            bundle.add(plotting.plot_linearized(out / f"linearize_{name}.csv", out / f"linearize_{name}.svg"))
    bundle.add(write_json(out / "slopes.json", slopes))
    bundle.add(write_json(out / "timescales.json", rep.as_dict()))
    return _finish(cfg, bundle, {"slopes": {k: v["slope"] for k, v in slopes.items()}})


COMMANDS = ("simulate", "ensemble", "scatter", "histogram", "linearize")


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mcqdisent", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="YAML run config")
        p.add_argument("--seed", type=int, help="scene seed (unsigned 64-bit)")
        p.add_argument("--out", help="output directory")
        p.add_argument("--threads", type=int, help="worker threads")
        p.add_argument("--models", help="comma-separated subset of numerical,exact,gaussian")
        p.add_argument("--plot", action="store_true", help="also render SVG figures")
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "ensemble":
            p.add_argument("--n-runs", type=int)
            p.add_argument("--ratios", type=_floats, help="R_A/R_B values, e.g. 2,1,0.5")
        if name == "scatter":
            p.add_argument("--n-per-ratio", type=int)
            p.add_argument("--ratios", type=_floats)
        if name == "linearize":
            p.add_argument("--diagnostic", choices=("none", "exponential"))
    return parser


def run(argv=None) -> OutputBundle:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    cfg = load_config(args.config)
    cfg = with_overrides(cfg, seed=args.seed, out=args.out, threads=args.threads, models=args.models, plots=args.plot)
    if args.command == "simulate":
        return cmd_simulate(cfg)
    if args.command == "ensemble":
        return cmd_ensemble(cfg, args.n_runs, args.ratios)
    if args.command == "scatter":
        return cmd_scatter(cfg, args.ratios, args.n_per_ratio)
    if args.command == "histogram":
        return cmd_histogram(cfg)
    if args.diagnostic:
        cfg = replace(cfg, linearize=replace(cfg.linearize, diagnostic=args.diagnostic))
    return cmd_linearize(cfg)


def main(argv=None) -> int:
    try:
        bundle = run(argv)
    except McqError as exc:
        print(f"mcqdisent: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    print(bundle.directory)
    return 0


if __name__ == "__main__":
    sys.exit(main())
