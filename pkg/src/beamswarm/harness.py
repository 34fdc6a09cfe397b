"""Monte-Carlo experiment drivers: single trials, sweeps and CSV export.

Every trial owns derived random streams keyed by (top seed, sweep value
index, trial index), so results are independent of execution order and of
the worker count.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .channel import realize_channels
from .pso import PsoConfig, optimize
from .scenario import ScenarioConfig, derive_seed, derive_stream, even_split

SWEEP_AXES = ("n_users", "n_selected_beams", "m_total", "n_iterations")

# disjoint stream tags for the two random consumers inside a trial
_CHANNEL_TAG = 0
_SWARM_TAG = 1


@dataclass(frozen=True)
class ExperimentSpec:
    """A sweep: base configs, the axis to vary, its values, and trial count."""

    scenario: ScenarioConfig
    pso: PsoConfig
    sweep_param: str
    sweep_values: tuple
    n_trials: int
    out_path: object = None

    def __post_init__(self):
        if self.sweep_param not in SWEEP_AXES:
            raise ValueError(
                f"sweep_param must be one of {SWEEP_AXES} (got {self.sweep_param!r})"
            )
        object.__setattr__(self, "sweep_values", tuple(self.sweep_values))
        if not self.sweep_values:
            raise ValueError("sweep_values must be non-empty")
        if self.n_trials < 1:
            raise ValueError(f"n_trials must be >= 1 (got {self.n_trials})")
        for value in self.sweep_values:
            derive_configs(self, value)  # rejects infeasible derived configs


def derive_configs(spec, value):
    """Configs for one sweep value; raises naming the violated constraint."""
    value = int(value)
    scenario, pso_cfg = spec.scenario, spec.pso
    try:
        if value < 1:
            raise ValueError("sweep values must be positive integers")
        if spec.sweep_param == "n_users":
            scenario = dataclasses.replace(scenario, n_users=value)
        elif spec.sweep_param == "n_selected_beams":
            scenario = dataclasses.replace(scenario, n_selected_beams=value)
        elif spec.sweep_param == "m_total":
            scenario = dataclasses.replace(
                scenario, uc_per_ris=even_split(value, scenario.n_ris)
            )
        else:  # n_iterations
            pso_cfg = dataclasses.replace(pso_cfg, n_iterations=value)
    except ValueError as exc:
        raise ValueError(
            f"infeasible sweep value {spec.sweep_param}={value}: {exc}"
        ) from exc
    return scenario, pso_cfg


@dataclass(frozen=True)
class SweepResult:
    """Per-trial sum rates plus per-value mean and standard error."""

    sweep_param: str
    sweep_values: tuple
    rates: np.ndarray  # (n_values, n_trials)
    means: np.ndarray
    stderrs: np.ndarray
    n_trials: int
    metadata: dict


@dataclass(frozen=True)
class ConvergenceResult:
    """Mean best-so-far trace per sweep value."""

    sweep_param: str
    sweep_values: tuple
    mean_traces: tuple  # one (T_v + 1,) array per sweep value
    n_trials: int
    metadata: dict


def run_trial(scenario, pso_cfg, trial_index):
    """One channel realization plus one swarm run on it.

    Returns (optimized sum rate, random-initialization baseline, trace);
    the baseline is trace index 0.
    """
    channel_rng = derive_stream(scenario.rng_seed, _CHANNEL_TAG, trial_index)
    channels = realize_channels(scenario, channel_rng)
    swarm_rng = derive_stream(pso_cfg.rng_seed, _SWARM_TAG, trial_index)
    _, best_rate, trace = optimize(channels, scenario, pso_cfg, swarm_rng)
    return best_rate, float(trace[0]), trace


def _trial_trace(task):
    scenario, pso_cfg, trial_index = task
    return run_trial(scenario, pso_cfg, trial_index)[2]


def _value_tasks(spec):
    """Per-value derived configs, reseeded so trials depend on (top, v, t)."""
    tasks = []
    for v_index, value in enumerate(spec.sweep_values):
        scenario, pso_cfg = derive_configs(spec, value)
        scenario = dataclasses.replace(
            scenario, rng_seed=derive_seed(spec.scenario.rng_seed, v_index)
        )
        pso_cfg = dataclasses.replace(
            pso_cfg, rng_seed=derive_seed(spec.pso.rng_seed, v_index)
        )
        tasks.extend((scenario, pso_cfg, t) for t in range(spec.n_trials))
    return tasks


def _run_tasks(tasks, jobs):
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1 (got {jobs})")
    if jobs == 1:
        return [_trial_trace(task) for task in tasks]
    # map() preserves submission order, so aggregation ignores completion order
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_trial_trace, tasks))


def _metadata(spec, jobs):
    return {
        "scenario_seed": spec.scenario.rng_seed,
        "pso_seed": spec.pso.rng_seed,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "scenario": dataclasses.asdict(spec.scenario),
        "pso": dataclasses.asdict(spec.pso),
        "jobs": jobs,
    }


def run_sweep(spec, jobs=1):
    """All trials for all sweep values; writes CSV when out_path is set."""
    traces = _run_tasks(_value_tasks(spec), jobs)
    rates = np.array([t[-1] for t in traces]).reshape(
        len(spec.sweep_values), spec.n_trials
    )
    if spec.n_trials > 1:
        stderrs = rates.std(axis=1, ddof=1) / np.sqrt(spec.n_trials)
    else:
        stderrs = np.zeros(len(spec.sweep_values))
    result = SweepResult(
        sweep_param=spec.sweep_param,
        sweep_values=spec.sweep_values,
        rates=rates,
        means=rates.mean(axis=1),
        stderrs=stderrs,
        n_trials=spec.n_trials,
        metadata=_metadata(spec, jobs),
    )
    if spec.out_path is not None:
        emit_csv(result, spec.out_path)
    return result


def run_convergence(spec, jobs=1):
    """Mean trace per sweep value (averaged entrywise over trials)."""
    traces = _run_tasks(_value_tasks(spec), jobs)
    n = spec.n_trials
    mean_traces = tuple(
        np.mean(traces[i * n : (i + 1) * n], axis=0)
        for i in range(len(spec.sweep_values))
    )
    return ConvergenceResult(
        sweep_param=spec.sweep_param,
        sweep_values=spec.sweep_values,
        mean_traces=mean_traces,
        n_trials=n,
        metadata=_metadata(spec, jobs),
    )


def iterations_to_fraction(trace, fraction=0.95):
    """First iteration index where the trace reaches fraction * final value."""
    trace = np.asarray(trace)
    return int(np.argmax(trace >= fraction * trace[-1]))


def _fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".9g")


def _write_rows(path, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(rows) + "\n")


def summary_path_for(path):
    """Aggregate-file path derived from the detail-file path."""
    path = Path(path)
    return path.with_name(path.stem + "_summary" + path.suffix)


def emit_csv(result, path):
    """Write the detail and aggregate CSV files; returns both paths.

    Detail rows are one per (sweep value, trial); the aggregate file sits
    next to the detail file with a ``_summary`` stem suffix. Numbers carry
    9 significant digits; files are UTF-8 with LF line endings.
    """
    path = Path(path)
    detail = ["sweep_param,sweep_value,trial,sum_rate_bps_hz"]
    for v_index, value in enumerate(result.sweep_values):
        detail.extend(
            f"{result.sweep_param},{_fmt(value)},{t},{_fmt(result.rates[v_index, t])}"
            for t in range(result.n_trials)
        )
    aggregate = ["sweep_value,mean,stderr,n_trials"]
    aggregate.extend(
        f"{_fmt(value)},{_fmt(result.means[i])},{_fmt(result.stderrs[i])},"
        f"{result.n_trials}"
        for i, value in enumerate(result.sweep_values)
    )
    summary = summary_path_for(path)
    _write_rows(path, detail)
    _write_rows(summary, aggregate)
    return path, summary


def emit_convergence_csv(result, path):
    """Write sweep_value,iteration,mean_best_rate rows for every trace."""
    rows = ["sweep_value,iteration,mean_best_rate"]
    for value, trace in zip(result.sweep_values, result.mean_traces):
        rows.extend(
            f"{_fmt(value)},{i},{_fmt(r)}" for i, r in enumerate(trace)
        )
    path = Path(path)
    _write_rows(path, rows)
    return path
