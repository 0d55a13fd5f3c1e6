"""Command-line interface.

Subcommands: discretize, lqr, certify, simulate, synthesize, compare.
Every command reads one YAML configuration file; see config.py for the
schema.  Exit codes: 0 success (with a certified design where relevant),
2 when no certified design was found, 1 on configuration errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .bmi_stab import certify_gain
from .config import ConfigError, LoadedConfig, load_config
from .lqr import DareNotConvergedError, solve_dare
from .sim import expected_itae, simulate_once, trace_to_csv
from .synth import (
    NoCertifiedDesignError,
    convergence_to_csv,
    result_to_dict,
    run_statistics,
    statistics_to_csv,
    synthesize,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NOT_CERTIFIED = 2


def _fmt(M) -> str:
    return np.array2string(np.asarray(M), precision=6, suppress_small=False)


def _out_dir(args) -> Path | None:
    if args.out is None:
        return None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _resolve_gain(loaded: LoadedConfig):
    """Gain from the config, or from the configured weights via the DARE."""
    if loaded.gain is not None:
        return loaded.gain
    if loaded.weights is None:
        raise ConfigError(
            "this command needs a 'gain' or a 'weights' section in the config"
        )
    return solve_dare(loaded.synth.plant, loaded.weights).K


def _cmd_discretize(loaded: LoadedConfig, args) -> int:
    d = loaded.synth.plant
    print(f"sample time h = {d.h}")
    print(f"G =\n{_fmt(d.G)}")
    print(f"H =\n{_fmt(d.H)}")
    print(f"C =\n{_fmt(d.C)}")
    out = _out_dir(args)
    if out is not None:
        payload = {"h": d.h, "G": d.G.tolist(), "H": d.H.tolist(),
                   "C": d.C.tolist()}
        (out / "discretized.json").write_text(json.dumps(payload, indent=2))
        print(f"wrote {out / 'discretized.json'}")
    return EXIT_OK


def _cmd_lqr(loaded: LoadedConfig, args) -> int:
    if loaded.weights is None:
        raise ConfigError("the lqr command needs a 'weights' section")
    design = solve_dare(loaded.synth.plant, loaded.weights)
    print(f"Q = diag({', '.join(f'{q:g}' for q in design.weights.q_diag)})")
    print(f"R = {design.weights.r_value:g}")
    print(f"K = {_fmt(design.K)}")
    print(f"P =\n{_fmt(design.P)}")
    print(f"nominal spectral radius = {design.nominal_spectral_radius:.6f}")
    out = _out_dir(args)
    if out is not None:
        payload = {"K": design.K.tolist(), "P": design.P.tolist(),
                   "nominal_spectral_radius": design.nominal_spectral_radius}
        (out / "lqr.json").write_text(json.dumps(payload, indent=2))
        print(f"wrote {out / 'lqr.json'}")
    return EXIT_OK


def _cmd_certify(loaded: LoadedConfig, args) -> int:
    cfg = loaded.synth
    K = _resolve_gain(loaded)
    from .synth import _certification_ga_config

    result = certify_gain(cfg.plant, K, cfg.p_tx,
                          ga_config=_certification_ga_config(cfg),
                          lmi_budget=cfg.certification.lmi_budget,
                          tol_lmi=cfg.certification.tol_lmi)
    print(f"K = {_fmt(K)}")
    print(f"certified: {result.certified} "
          f"({result.evaluations} evaluations, "
          f"{result.generations_used} generations)")
    out = _out_dir(args)
    if result.certified:
        cert = result.certificate
        print(f"a1 = {cert.a1:.6f}, a2 = {cert.a2:.6f}, "
              f"decay product = {cert.decay_product:.6f}")
        print(f"margins: P {cert.margin_p:.3e}, mode1 {cert.margin1:.3e}, "
              f"mode2 {cert.margin2:.3e}")
        if out is not None:
            payload = {
                "certified": True, "a1": cert.a1, "a2": cert.a2,
                "decay_product": cert.decay_product,
                "P": cert.P.tolist(),
                "margins": [cert.margin_p, cert.margin1, cert.margin2],
            }
            (out / "certificate.json").write_text(
                json.dumps(payload, indent=2))
            print(f"wrote {out / 'certificate.json'}")
        return EXIT_OK
    if out is not None:
        (out / "certificate.json").write_text(
            json.dumps({"certified": False}, indent=2))
    return EXIT_NOT_CERTIFIED


def _cmd_simulate(loaded: LoadedConfig, args) -> int:
    cfg = loaded.synth
    K = _resolve_gain(loaded)
    est = expected_itae(cfg.plant, K, cfg.p_tx, cfg.sim.ref_amplitude,
                        cfg.sim.n_steps, cfg.sim.realizations,
                        (cfg.master_seed, 1))
    print(f"K = {_fmt(K)}")
    print(f"expected tracking cost over {est.realizations} realizations: "
          f"{est.mean:.4f} (std {est.std_dev:.4f})")
    out = _out_dir(args)
    if out is not None:
        n_traces = min(cfg.sim.realizations, args.traces)
        for i in range(n_traces):
            trace = simulate_once(cfg.plant, K, cfg.p_tx,
                                  cfg.sim.ref_amplitude, cfg.sim.n_steps,
                                  (cfg.master_seed, 1, i))
            trace_to_csv(trace, out / f"trace_{i}.csv")
        print(f"wrote {n_traces} trace files to {out}")
    return EXIT_OK


def _cmd_synthesize(loaded: LoadedConfig, args) -> int:
    cfg = loaded.synth
    try:
        result = synthesize(cfg)
    except NoCertifiedDesignError as exc:
        print(f"synthesis failed: {exc}", file=sys.stderr)
        return EXIT_NOT_CERTIFIED
    print(f"weights: Q = diag({', '.join(f'{q:.5f}' for q in result.weights.q_diag)}), "
          f"R = {result.weights.r_value:.5f}")
    print(f"gain K = {_fmt(result.gain)}")
    cert = result.certificate
    print(f"certificate: a1 = {cert.a1:.5f}, a2 = {cert.a2:.5f}, "
          f"decay product = {cert.decay_product:.5f}")
    print(f"expected cost = {result.expected_cost.mean:.4f} "
          f"(std {result.expected_cost.std_dev:.4f}, "
          f"{result.expected_cost.realizations} realizations)")
    print(f"{result.evaluations} candidate evaluations, "
          f"{result.wall_time:.1f} s")
    out = _out_dir(args)
    if out is not None:
        (out / "result.json").write_text(
            json.dumps(result_to_dict(result), indent=2))
        convergence_to_csv(result.convergence, out / "convergence.csv")
        for i in range(min(3, cfg.sim.report_realizations)):
            trace = simulate_once(cfg.plant, result.gain, cfg.p_tx,
                                  cfg.sim.ref_amplitude, cfg.sim.n_steps,
                                  (cfg.master_seed, 1, i))
            trace_to_csv(trace, out / f"trace_{i}.csv")
        print(f"wrote result.json, convergence.csv and traces to {out}")
    return EXIT_OK


def _cmd_compare(loaded: LoadedConfig, args) -> int:
    cfg = loaded.synth
    stats = run_statistics(cfg, args.runs)
    print(f"{'arm':>8} {'mean':>12} {'std':>10} {'best':>12} {'worst':>12} "
          f"{'failed':>7}")
    for s in stats:
        print(f"{s.arm:>8} {s.mean:>12.4f} {s.std:>10.4f} {s.best:>12.4f} "
              f"{s.worst:>12.4f} {s.failed_runs:>7}")
    out = _out_dir(args)
    if out is not None:
        statistics_to_csv(stats, out / "stats.csv")
        with open(out / "runs.csv", "w", newline="") as fh:
            import csv as _csv

            writer = _csv.writer(fh)
            writer.writerow(["arm", "run", "cost"])
            for s in stats:
                for i, c in enumerate(s.per_run_costs):
                    writer.writerow([s.arm, i, c])
        print(f"wrote stats.csv and runs.csv to {out}")
    if any(s.failed_runs == s.runs for s in stats):
        return EXIT_NOT_CERTIFIED
    return EXIT_OK


_COMMANDS = {
    "discretize": _cmd_discretize,
    "lqr": _cmd_lqr,
    "certify": _cmd_certify,
    "simulate": _cmd_simulate,
    "synthesize": _cmd_synthesize,
    "compare": _cmd_compare,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncsdesign",
        description="Design and certify state-feedback regulators for "
                    "networked control loops with random packet loss.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("discretize", "zero-order-hold discretization of the plant"),
        ("lqr", "solve the Riccati equation for the configured weights"),
        ("certify", "certify a gain against packet loss"),
        ("simulate", "Monte Carlo simulation and tracking cost"),
        ("synthesize", "full weight optimization with certification"),
        ("compare", "two-arm optimizer comparison statistics"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="YAML config file")
        p.add_argument("--seed", type=int, default=None,
                       help="override the master seed")
        p.add_argument("--out", default=None, help="output directory")
        if name == "synthesize":
            p.add_argument("--arm", choices=("regpso", "ga"), default=None,
                           help="override the configured outer optimizer")
        if name == "compare":
            p.add_argument("--runs", type=int, default=10,
                           help="independent synthesis runs per arm")
        if name == "simulate":
            p.add_argument("--traces", type=int, default=3,
                           help="number of trace CSV files to write")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        loaded = load_config(args.config)
        if args.seed is not None:
            loaded = replace(loaded,
                             synth=replace(loaded.synth,
                                           master_seed=args.seed))
        if getattr(args, "arm", None):
            loaded = replace(loaded,
                             synth=replace(loaded.synth, optimizer=args.arm))
        return _COMMANDS[args.command](loaded, args)
    except (ConfigError, DareNotConvergedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
