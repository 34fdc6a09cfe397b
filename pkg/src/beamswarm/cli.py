"""Command line front end: trial, sweep and convergence subcommands.

Settings come from an optional JSON config file (flat keys mirroring the
scenario fields, powers in dBm) with command line flags taking precedence.
Exits 0 on success; failures print one ``error: ...`` line on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .harness import (
    SWEEP_AXES,
    ExperimentSpec,
    iterations_to_fraction,
    run_convergence,
    run_sweep,
    run_trial,
    emit_convergence_csv,
    summary_path_for,
)
from .pso import PsoConfig, trace_to_csv
from .scenario import make_config

_PSO_KEYS = (
    "n_particles",
    "n_iterations",
    "inertia",
    "learn_global",
    "learn_local",
    "local_best_memory",
)
# flag destinations merged into the settings dict when given
_FLAG_KEYS = (
    "n_users",
    "m_total",
    "n_selected_beams",
    "n_antennas",
    "n_ris",
    "power_dbm",
    "noise_dbm",
    "n_particles",
    "n_iterations",
)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="beamswarm",
        description=(
            "Downlink sum-rate simulator and particle-swarm optimizer for a "
            "lens-array base station serving users through reflecting surfaces."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file of settings (flags win)")
        p.add_argument("--n-users", type=int, help="number of users (K)")
        p.add_argument("--m-total", type=int, help="total unit cells (M)")
        p.add_argument(
            "--n-selected-beams", type=int, help="active beams (N_s)"
        )
        p.add_argument("--n-antennas", type=int, help="lens-array beams (N)")
        p.add_argument("--n-ris", type=int, help="number of surfaces (J)")
        p.add_argument("--power-dbm", type=float, help="transmit power budget")
        p.add_argument("--noise-dbm", type=float, help="noise variance")
        p.add_argument("--seed", type=int, help="top-level seed (default 0)")
        p.add_argument("--trials", type=int, help="trials per point (default 200)")
        p.add_argument(
            "--iterations", type=int, dest="n_iterations", help="swarm iterations (T)"
        )
        p.add_argument(
            "--particles", type=int, dest="n_particles", help="swarm size (A)"
        )
        p.add_argument("--jobs", type=int, default=1, help="parallel workers")
        p.add_argument("--out", help="output CSV path")

    p_trial = sub.add_parser("trial", help="run one seeded trial")
    common(p_trial)
    p_trial.add_argument("--trial-index", type=int, default=0)
    p_trial.set_defaults(func=_cmd_trial)

    p_sweep = sub.add_parser("sweep", help="sweep one parameter over values")
    common(p_sweep)
    p_sweep.add_argument("--param", choices=SWEEP_AXES, default="n_users")
    p_sweep.add_argument(
        "--values", default="4,8,16", help="comma-separated sweep values"
    )
    p_sweep.set_defaults(func=_cmd_sweep)

    p_conv = sub.add_parser(
        "convergence", help="mean best-so-far trace per sweep value"
    )
    common(p_conv)
    p_conv.add_argument("--param", choices=SWEEP_AXES, default="m_total")
    p_conv.add_argument(
        "--values", default="64,128,256", help="comma-separated sweep values"
    )
    p_conv.set_defaults(func=_cmd_convergence)
    return parser


def _assemble(args):
    """Configs from file plus flag overrides."""
    settings = {}
    if args.config:
        text = Path(args.config).read_text(encoding="utf-8")
        loaded = json.loads(text)
        if not isinstance(loaded, dict):
            raise ValueError(f"config file {args.config} must hold one JSON object")
        settings.update(loaded)
    for key in _FLAG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    if args.seed is not None:
        settings["rng_seed"] = args.seed
        settings.pop("pso_seed", None)  # --seed overrides both streams
    seed = settings.pop("rng_seed", 0)
    pso_seed = settings.pop("pso_seed", seed)
    pso_kwargs = {k: settings.pop(k) for k in _PSO_KEYS if k in settings}
    if "uc_per_ris" in settings:
        settings["uc_per_ris"] = tuple(settings["uc_per_ris"])
    scenario = make_config(rng_seed=seed, **settings)
    pso_cfg = PsoConfig(rng_seed=pso_seed, **pso_kwargs)
    return scenario, pso_cfg


def _parse_values(text):
    try:
        return tuple(int(v) for v in str(text).split(",") if v.strip())
    except ValueError:
        raise ValueError(f"--values must be comma-separated integers (got {text!r})")


def _cmd_trial(args):
    scenario, pso_cfg = _assemble(args)
    pso_rate, baseline, trace = run_trial(scenario, pso_cfg, args.trial_index)
    print(
        f"trial={args.trial_index} sum_rate_bps_hz={pso_rate:.9g} "
        f"random_baseline_bps_hz={baseline:.9g} iterations={trace.size - 1}"
    )
    if args.out:
        trace_to_csv(trace, args.out)
        print(f"wrote {args.out}")
    return 0


def _make_spec(args, default_out):
    scenario, pso_cfg = _assemble(args)
    return ExperimentSpec(
        scenario=scenario,
        pso=pso_cfg,
        sweep_param=args.param,
        sweep_values=_parse_values(args.values),
        n_trials=args.trials if args.trials is not None else 200,
        out_path=args.out if args.out else default_out,
    )


def _cmd_sweep(args):
    spec = _make_spec(args, "sweep.csv")
    result = run_sweep(spec, jobs=args.jobs)
    for i, value in enumerate(result.sweep_values):
        print(
            f"{spec.sweep_param}={value} mean_bps_hz={result.means[i]:.9g} "
            f"stderr={result.stderrs[i]:.9g} n_trials={result.n_trials}"
        )
    print(f"wrote {spec.out_path} and {summary_path_for(spec.out_path)}")
    return 0


def _cmd_convergence(args):
    spec = _make_spec(args, "convergence.csv")
    result = run_convergence(spec, jobs=args.jobs)
    for value, trace in zip(result.sweep_values, result.mean_traces):
        reach = iterations_to_fraction(trace)
        print(
            f"{spec.sweep_param}={value} final_bps_hz={trace[-1]:.9g} "
            f"iterations_to_95pct={reach}"
        )
    out = emit_convergence_csv(result, spec.out_path)
    print(f"wrote {out}")
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # single-line, machine-parsable failure
        message = f"{type(exc).__name__}: {exc}".replace("\n", "; ")
        print(f"error: {message}", file=sys.stderr)
        return 2
