"""Command-line front end: config ingestion, command dispatch, sweep
orchestration, and deterministic result output.

Each run writes fixed-header CSV tables (17 significant digits), rendered
figures, and a JSON result document into the output directory.  Exit codes:
0 success, 1 configuration error, 2 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from . import __version__
from .model import (ConfigError, ModelConfig, detect_mirror_symmetry,
                    parse_config)
from .quadrature import QuadratureError
from .resonance import ResonanceError, find_resonances
from .spectral import dot_eigenstates, isolated_eigenvalues, point_spectrum
from .dynamics import (compare_dynamics, decay_law, evolution_amplitudes,
                       spectral_density, zeno_generator, zeno_product_limit)
from . import plots


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _write_csv(path, header, rows):
    with open(path, "w", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) if isinstance(v, (int, float, np.floating))
                        and not isinstance(v, bool) else v for v in row])


def _config_doc(cfg: ModelConfig) -> dict:
    q = cfg.quadrature
    return {
        "alpha": cfg.alpha,
        "sites": [{"c": s.c, "a": s.a, "beta": s.beta} for s in cfg.sites],
        "quadrature": {"rel_tol": q.rel_tol, "abs_tol": q.abs_tol,
                       "eta": q.eta, "t_cutoff": q.t_cutoff,
                       "max_subdivisions": q.max_subdivisions},
    }


def _write_manifest(out, command, cfg, t0, outputs, results):
    doc = {
        "command": command,
        "version": __version__,
        "config": _config_doc(cfg),
        "wall_clock_s": time.time() - t0,
        "outputs": sorted(outputs),
        "results": results,
    }
    path = os.path.join(out, "result.json")
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _warn_mirror(cfg):
    sym = detect_mirror_symmetry(cfg)
    if sym.symmetric:
        print("warning: mirror-symmetric configuration; antisymmetric levels "
              "remain embedded in the continuum", file=sys.stderr)
    return sym


def _spectrum_pieces(cfg):
    spec = point_spectrum(cfg)
    states = dot_eigenstates(cfg, spec)
    return spec, states


def cmd_spectrum(cfg: ModelConfig, out: str, workers: int) -> dict:
    t0 = time.time()
    _warn_mirror(cfg)
    spec, states = _spectrum_pieces(cfg)
    iso = isolated_eigenvalues(cfg)
    n = cfg.n
    header = (["index", "eigenvalue", "null_residual"]
              + [f"d_{l}" for l in range(n)])
    rows = [[j, e, states.null_residuals[j]] + list(states.d_vectors[j])
            for j, e in enumerate(spec.eigenvalues)]
    spath = os.path.join(out, "spectrum.csv")
    _write_csv(spath, header, rows)
    ipath = os.path.join(out, "isolated.csv")
    _write_csv(ipath, ["index", "eigenvalue"],
               [[k, v] for k, v in enumerate(iso.values)])
    fpath = os.path.join(out, "spectrum.png")
    plots.spectrum_figure(fpath, spec, iso, -cfg.alpha**2 / 4)
    results = {
        "dot_eigenvalues": list(spec.eigenvalues),
        "hypothesis_violations": list(spec.hypothesis_violations),
        "gram_residual": states.gram_residual,
        "isolated_eigenvalues": list(iso.values),
    }
    _write_manifest(out, "spectrum", cfg, t0, [spath, ipath, fpath], results)
    return results


def cmd_resonances(cfg: ModelConfig, out: str, workers: int) -> dict:
    t0 = time.time()
    _warn_mirror(cfg)
    spec, states = _spectrum_pieces(cfg)
    poles = find_resonances(cfg, spec, states)
    header = ["seed", "re_z", "im_z", "gamma", "b", "residual", "embedded"]
    rows = [[p.seed, p.z.real, p.z.imag, p.gamma, p.b, p.residual,
             int(p.embedded)] for p in poles]
    ppath = os.path.join(out, "poles.csv")
    _write_csv(ppath, header, rows)
    fpath = os.path.join(out, "poles.png")
    plots.resonance_figure(fpath, poles)
    results = {
        "poles": [{"re": p.z.real, "im": p.z.imag, "gamma": p.gamma,
                   "seed": p.seed, "embedded": p.embedded} for p in poles],
        "coupling_b": poles[0].b if poles else None,
    }
    _write_manifest(out, "resonances", cfg, t0, [ppath, fpath], results)
    return results


def _density_pieces(cfg, workers):
    spec, states = _spectrum_pieces(cfg)
    poles = find_resonances(cfg, spec, states)
    iso = isolated_eigenvalues(cfg)
    dens = spectral_density(cfg, states, poles, iso, workers=workers)
    return spec, states, poles, iso, dens


def cmd_decay(cfg: ModelConfig, out: str, workers: int) -> dict:
    t0 = time.time()
    _warn_mirror(cfg)
    spec, states, poles, iso, dens = _density_pieces(cfg, workers)
    m = len(states.eigenvalues)
    widths = [p.gamma for p in poles if p.gamma > 0]
    gamma_ref = min(widths) if widths else 1.0
    times = np.linspace(0.0, 3.0 / gamma_ref, 181)
    evo = evolution_amplitudes(dens, times)
    surv = np.column_stack([decay_law(evo, np.eye(m)[j]) for j in range(m)])
    dpath = os.path.join(out, "decay.csv")
    header = (["t"] + [f"P_{j}" for j in range(m)]
              + [f"pole_approx_{j}" for j in range(m)])
    approx = np.column_stack([np.exp(-p.gamma * times) for p in poles])
    _write_csv(dpath, header,
               [[t] + list(surv[k]) + list(approx[k])
                for k, t in enumerate(times)])
    rpath = os.path.join(out, "density.csv")
    rhead = ["lambda"] + [f"rho_re_{i}_{j}" for i in range(m)
                          for j in range(i, m)] \
        + [f"rho_im_{i}_{j}" for i in range(m) for j in range(i, m)]
    rrows = []
    for k, lam in enumerate(dens.grid):
        R = dens.rho[k]
        rrows.append([lam]
                     + [R[i, j].real for i in range(m) for j in range(i, m)]
                     + [R[i, j].imag for i in range(m) for j in range(i, m)])
    _write_csv(rpath, rhead, rrows)
    f1 = os.path.join(out, "density.png")
    plots.density_figure(f1, dens)
    f2 = os.path.join(out, "decay.png")
    overlays = [(rf"$e^{{-\Gamma_{j} t}}$", approx[:, j]) for j in range(m)]
    plots.decay_figure(f2, times, surv, overlays)
    results = {
        "completeness": list(dens.completeness),
        "point_masses": [{"eigenvalue": E, "weight": W.tolist()}
                         for E, W in zip(dens.eigenvalues, dens.weights)],
        "widths": widths,
    }
    _write_manifest(out, "decay", cfg, t0, [dpath, rpath, f1, f2], results)
    return results


def cmd_zeno(cfg: ModelConfig, out: str, workers: int) -> dict:
    t0 = time.time()
    _warn_mirror(cfg)
    spec, states, poles, iso, dens = _density_pieces(cfg, workers)
    gen = zeno_generator(cfg, states)
    widths = [p.gamma for p in poles if p.gamma > 0]
    gamma_ref = max(widths) if widths else 1.0
    t_zeno = 0.2 / gamma_ref
    product = zeno_product_limit(dens, gen, t_zeno)
    comp_times = np.linspace(0.0, 0.5 / max(gen.perturbation_norm, 1e-12), 60)
    comp = compare_dynamics(states, gen, comp_times)
    zpath = os.path.join(out, "zeno.csv")
    _write_csv(zpath, ["n", "E_n", "n_E_n"],
               [[n, e, s] for n, e, s in zip(product.ns, product.errors,
                                             product.scaled)])
    cpath = os.path.join(out, "compare.csv")
    _write_csv(cpath, ["t", "deviation", "linear_bound"],
               [[t, d, b] for t, d, b in zip(comp.times, comp.deviation,
                                             comp.linear_bound)])
    f1 = os.path.join(out, "zeno.png")
    plots.zeno_figure(f1, product)
    f2 = os.path.join(out, "compare.png")
    plots.comparison_figure(f2, comp)
    results = {
        "h_matrix": gen.h_matrix.tolist(),
        "hermiticity_residual": gen.hermiticity_residual,
        "perturbation_norm": gen.perturbation_norm,
        "bound_constant": gen.bound_constant,
        "bound_value": gen.bound_value,
        "zeno_time": t_zeno,
        "E_n": product.errors.tolist(),
    }
    _write_manifest(out, "zeno", cfg, t0, [zpath, cpath, f1, f2], results)
    return results


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "resonances": cmd_resonances,
    "decay": cmd_decay,
    "zeno": cmd_zeno,
}


def _apply_param(cfg: ModelConfig, param: str, value: float) -> ModelConfig:
    if param == "alpha":
        return replace(cfg, alpha=value)
    if param == "a":
        sites = tuple(replace(s, a=np.sign(s.a) * value) for s in cfg.sites)
        return replace(cfg, sites=sites)
    if param == "beta":
        sites = tuple(replace(s, beta=value) for s in cfg.sites)
        return replace(cfg, sites=sites)
    raise ConfigError(f"unsupported sweep parameter {param!r}")


def _sweep_point(args):
    command, cfg, param, value, out = args
    sub = os.path.join(out, f"{param}={value:g}")
    os.makedirs(sub, exist_ok=True)
    point_cfg = _apply_param(cfg, param, value)
    _COMMANDS[command](point_cfg, sub, 1)
    return sub


def cmd_sweep(cfg: ModelConfig, out: str, workers: int, command: str,
              param: str, values: list[float]) -> dict:
    t0 = time.time()
    if command not in _COMMANDS:
        raise ConfigError(f"sweep cannot run command {command!r}")
    jobs = [(command, cfg, param, v, out) for v in values]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            subdirs = list(pool.map(_sweep_point, jobs))
    else:
        subdirs = [_sweep_point(j) for j in jobs]
    # order-normalized summary regardless of completion order
    order = np.argsort(values)
    results = {"param": param, "values": [values[i] for i in order],
               "runs": [subdirs[i] for i in order], "command": command}
    _write_manifest(out, "sweep", cfg, t0, subdirs, results)
    return results


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="zenoleak",
        description="Spectra, resonances, decay laws, and Zeno dynamics of "
                    "a leaky wire with quantum dots.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("spectrum", "resonances", "decay", "zeno", "sweep"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=".")
        p.add_argument("--workers", type=int, default=None)
        if name == "sweep":
            p.add_argument("--run", default="resonances",
                           choices=sorted(_COMMANDS))
            p.add_argument("--param", required=True,
                           choices=("a", "alpha", "beta"))
            p.add_argument("--values", required=True, nargs="+", type=float)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    workers = args.workers
    if workers is None:
        workers = int(os.environ.get("ZENOLEAK_WORKERS", "1"))
    try:
        cfg = parse_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    os.makedirs(args.out, exist_ok=True)
    try:
        if args.command == "sweep":
            cmd_sweep(cfg, args.out, workers, args.run, args.param,
                      args.values)
        else:
            _COMMANDS[args.command](cfg, args.out, workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (QuadratureError, ResonanceError, ValueError) as exc:
        diag = {"error": type(exc).__name__, "message": str(exc),
                "command": args.command, "version": __version__}
        with open(os.path.join(args.out, "error.json"), "w") as fh:
            json.dump(diag, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"numerical non-convergence: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
