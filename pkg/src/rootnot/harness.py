"""Experiment orchestration: configs, seeded multi-run execution, aggregation.

A single flat key=value config file describes one experiment; the runner
executes it once per seed with independent random streams, aggregates the
checkpoint merits across seeds and writes two CSV files.  Everything is
bitwise deterministic for a fixed config, including file bytes.

CSV schemas:
  series.csv     header ``trial,seed,k,machine,M,P1,P5,P10`` (merit columns
                 follow the configured orders); one row per (seed,
                 checkpoint); floats printed with 17 significant digits.
  aggregate.csv  header ``trial`` followed by ``P{n}_median,P{n}_mean,
                 P{n}_min,P{n}_max`` per order; one row per checkpoint.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np

from .classical_machine import ClassicalRunConfig, UpdateGains, learn_classical
from .merit import MeritSeries
from .oracle import CountReport, ScanReport
from .qcore import is_power_of_two
from .quantum_learner import (
    QuantumRunConfig,
    TeacherSchedule,
    WalkWidths,
    learn_quantum,
)

__all__ = [
    "AggregateCurve",
    "ComparisonReport",
    "ConfigError",
    "ExperimentConfig",
    "SeriesRow",
    "SeriesTable",
    "aggregate_from_table",
    "aggregate_series",
    "compare_curves",
    "config_to_text",
    "load_config",
    "parse_config_text",
    "parse_series_csv",
    "preset_fig2",
    "preset_fig3",
    "preset_fig4",
    "read_series_csv",
    "render_aggregate_csv",
    "render_count_csv",
    "render_scan_csv",
    "render_series_table",
    "run_experiment",
    "series_table_from_runs",
]

SIGMA_GAMMA_DEFAULT = math.pi / 4
SIGMA_BETA_DEFAULT = math.pi / 8
DEFAULT_SEEDS = tuple(range(20))


class ConfigError(ValueError):
    """Invalid experiment configuration; ``field`` names the offender."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _fmt(x: float) -> str:
    return format(x, ".17g")


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete description of one experiment (all free parameters)."""

    machine: str
    k: int
    trial_budget: int
    log_interval: int = 100
    merit_orders: tuple[int, ...] = (1, 5, 10)
    sigma_gamma: float | None = None
    sigma_beta: float | None = None
    teacher_mode: str = "variable"
    m_initial: int = 1
    m_fixed: int | None = None
    k_s: float | None = None
    k_f: float | None = None
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    out: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "merit_orders", tuple(self.merit_orders))
        object.__setattr__(self, "seeds", tuple(self.seeds))
        if self.machine not in ("quantum", "classical"):
            raise ConfigError("machine", f"must be quantum or classical, got {self.machine!r}")
        if not is_power_of_two(self.k) or self.k < 2:
            raise ConfigError("k", f"must be a power of two >= 2, got {self.k}")
        if self.trial_budget < 0:
            raise ConfigError("trial_budget", f"must be >= 0, got {self.trial_budget}")
        if self.log_interval < 1:
            raise ConfigError("log_interval", f"must be >= 1, got {self.log_interval}")
        if not self.merit_orders or any(n < 1 for n in self.merit_orders):
            raise ConfigError("merit_orders", f"must be positive, got {self.merit_orders}")
        if len(set(self.merit_orders)) != len(self.merit_orders):
            raise ConfigError("merit_orders", f"must be distinct, got {self.merit_orders}")
        if not self.seeds:
            raise ConfigError("seeds", "at least one seed is required")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seeds", f"must be distinct, got {self.seeds}")
        if self.machine == "quantum":
            for name in ("sigma_gamma", "sigma_beta"):
                v = getattr(self, name)
                if v is None:
                    raise ConfigError(name, "required for a quantum experiment")
                if not (math.isfinite(v) and v > 0.0):
                    raise ConfigError(name, f"must be positive and finite, got {v!r}")
            if self.teacher_mode not in ("fixed", "variable"):
                raise ConfigError("teacher_mode", f"must be fixed or variable, got {self.teacher_mode!r}")
            if self.teacher_mode == "fixed":
                if self.m_fixed is None or self.m_fixed < 1:
                    raise ConfigError("m_fixed", f"fixed teacher memory must be >= 1, got {self.m_fixed}")
            elif self.m_initial < 1:
                raise ConfigError("m_initial", f"must be >= 1, got {self.m_initial}")
        else:
            for name in ("k_s", "k_f"):
                v = getattr(self, name)
                if v is None:
                    raise ConfigError(name, "required for a classical experiment")
                if not (math.isfinite(v) and 0.0 <= v <= 1.0):
                    raise ConfigError(name, f"must lie in [0, 1], got {v!r}")

    def schedule(self) -> TeacherSchedule:
        if self.teacher_mode == "fixed":
            return TeacherSchedule.fixed(self.m_fixed)
        return TeacherSchedule.variable(self.m_initial)

    def quantum_config(self) -> QuantumRunConfig:
        return QuantumRunConfig(
            k=self.k,
            trials=self.trial_budget,
            widths=WalkWidths(sigma_gamma=self.sigma_gamma, sigma_beta=self.sigma_beta),
            schedule=self.schedule(),
            merit_orders=self.merit_orders,
            log_interval=self.log_interval,
        )

    def classical_config(self) -> ClassicalRunConfig:
        return ClassicalRunConfig(
            k=self.k,
            trials=self.trial_budget,
            gains=UpdateGains(k_s=self.k_s, k_f=self.k_f),
            merit_orders=self.merit_orders,
            log_interval=self.log_interval,
        )


_INT_KEYS = frozenset({"k", "trial_budget", "log_interval", "m_initial", "m_fixed"})
_FLOAT_KEYS = frozenset({"sigma_gamma", "sigma_beta", "k_s", "k_f"})
_INT_LIST_KEYS = frozenset({"merit_orders", "seeds"})
_STR_KEYS = frozenset({"machine", "teacher_mode", "out"})
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | _INT_LIST_KEYS | _STR_KEYS


def _convert(key: str, raw: str):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _INT_LIST_KEYS:
            return tuple(int(part) for part in raw.split(",") if part != "")
        return raw
    except ValueError as exc:
        raise ConfigError(key, f"cannot parse {raw!r}: {exc}") from None


def parse_config_text(text: str, overrides: tuple[str, ...] = ()) -> ExperimentConfig:
    """Parse a flat key=value config; ``overrides`` are extra KEY=VALUE pairs.

    Lines starting with ``#`` and blank lines are ignored; an unknown key or
    an unparseable value raises :class:`ConfigError` naming the field.
    """
    pairs: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}", f"expected key=value, got {stripped!r}")
        key, _, raw = stripped.partition("=")
        pairs[key.strip()] = raw.strip()
    for item in overrides:
        if "=" not in item:
            raise ConfigError("override", f"expected KEY=VALUE, got {item!r}")
        key, _, raw = item.partition("=")
        pairs[key.strip()] = raw.strip()
    unknown = sorted(set(pairs) - _ALL_KEYS)
    if unknown:
        raise ConfigError(unknown[0], "unknown configuration key")
    kwargs = {key: _convert(key, raw) for key, raw in pairs.items()}
    missing = [name for name in ("machine", "k", "trial_budget") if name not in kwargs]
    if missing:
        raise ConfigError(missing[0], "required key is missing")
    return ExperimentConfig(**kwargs)


def load_config(path: str, overrides: tuple[str, ...] = ()) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read(), overrides)


def config_to_text(config: ExperimentConfig) -> str:
    """Canonical key=value rendering; parses back to an equal config."""
    lines = []
    for f in fields(config):
        value = getattr(config, f.name)
        if value is None:
            continue
        if f.name in _INT_LIST_KEYS:
            value = ",".join(str(v) for v in value)
        elif f.name in _FLOAT_KEYS:
            value = _fmt(value)
        lines.append(f"{f.name}={value}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# running and aggregating


def _run_one(args: tuple[ExperimentConfig, int]) -> MeritSeries:
    config, seed = args
    if config.machine == "quantum":
        return learn_quantum(config.quantum_config(), seed)
    return learn_classical(config.classical_config(), seed)


@dataclass(frozen=True)
class AggregateCurve:
    """Across-seed statistics of every logged merit order."""

    machine: str
    k: int
    merit_orders: tuple[int, ...]
    trials: tuple[int, ...]
    median: dict[int, tuple[float, ...]]
    mean: dict[int, tuple[float, ...]]
    minimum: dict[int, tuple[float, ...]]
    maximum: dict[int, tuple[float, ...]]

    def final_median(self, order: int) -> float:
        return self.median[order][-1]


def aggregate_series(
    series: list[MeritSeries], machine: str, k: int, merit_orders: tuple[int, ...]
) -> AggregateCurve:
    """Per-checkpoint median/mean/min/max across seeds (symmetric in seed order)."""
    if not series:
        raise ValueError("no series to aggregate")
    grid = series[0].trials
    for s in series[1:]:
        if s.trials != grid:
            raise ValueError("all series must share the same checkpoint grid")
    median: dict[int, tuple[float, ...]] = {}
    mean: dict[int, tuple[float, ...]] = {}
    minimum: dict[int, tuple[float, ...]] = {}
    maximum: dict[int, tuple[float, ...]] = {}
    for n in merit_orders:
        columns = np.array([s.column(n) for s in series])
        median[n] = tuple(float(v) for v in np.median(columns, axis=0))
        mean[n] = tuple(float(v) for v in columns.mean(axis=0))
        minimum[n] = tuple(float(v) for v in columns.min(axis=0))
        maximum[n] = tuple(float(v) for v in columns.max(axis=0))
    return AggregateCurve(machine, k, tuple(merit_orders), grid, median, mean, minimum, maximum)


def run_experiment(
    config: ExperimentConfig,
    out_dir: str | None = None,
    workers: int = 1,
) -> tuple[AggregateCurve, list[MeritSeries]]:
    """Execute one experiment: one learner per seed, aggregate, write CSVs.

    Results do not depend on ``workers``; each seed owns an independent
    random stream derived only from the seed value.  Files are written to
    ``out_dir`` (or ``config.out``); with neither set, nothing is written.
    """
    jobs = [(config, seed) for seed in config.seeds]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            series = list(pool.map(_run_one, jobs))
    else:
        series = [_run_one(job) for job in jobs]
    curve = aggregate_series(series, config.machine, config.k, config.merit_orders)
    target = out_dir if out_dir is not None else config.out
    if target:
        os.makedirs(target, exist_ok=True)
        table = series_table_from_runs(config, series)
        _write_text(os.path.join(target, "series.csv"), render_series_table(table))
        _write_text(os.path.join(target, "aggregate.csv"), render_aggregate_csv(curve))
    return curve, series


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# series CSV


@dataclass(frozen=True)
class SeriesRow:
    trial: int
    seed: int
    k: int
    machine: str
    teacher_memory: int
    values: tuple[float, ...]


@dataclass(frozen=True)
class SeriesTable:
    merit_orders: tuple[int, ...]
    rows: tuple[SeriesRow, ...]


def series_table_from_runs(
    config: ExperimentConfig, series: list[MeritSeries]
) -> SeriesTable:
    rows = []
    for run in series:
        for point in run.points:
            rows.append(
                SeriesRow(
                    trial=point.trial_index,
                    seed=run.seed,
                    k=config.k,
                    machine=config.machine,
                    teacher_memory=point.teacher_memory,
                    values=tuple(point.values[n] for n in config.merit_orders),
                )
            )
    return SeriesTable(tuple(config.merit_orders), tuple(rows))


def render_series_table(table: SeriesTable) -> str:
    header = "trial,seed,k,machine,M," + ",".join(f"P{n}" for n in table.merit_orders)
    lines = [header]
    for r in table.rows:
        merits = ",".join(_fmt(v) for v in r.values)
        lines.append(f"{r.trial},{r.seed},{r.k},{r.machine},{r.teacher_memory},{merits}")
    return "\n".join(lines) + "\n"


def parse_series_csv(text: str) -> SeriesTable:
    lines = text.strip().splitlines()
    if not lines:
        raise ValueError("empty series CSV")
    header = lines[0].split(",")
    if header[:5] != ["trial", "seed", "k", "machine", "M"]:
        raise ValueError(f"unexpected series header: {lines[0]!r}")
    orders = tuple(int(col[1:]) for col in header[5:])
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        rows.append(
            SeriesRow(
                trial=int(cells[0]),
                seed=int(cells[1]),
                k=int(cells[2]),
                machine=cells[3],
                teacher_memory=int(cells[4]),
                values=tuple(float(c) for c in cells[5:]),
            )
        )
    return SeriesTable(orders, tuple(rows))


def read_series_csv(path: str) -> SeriesTable:
    with open(path, encoding="utf-8") as fh:
        return parse_series_csv(fh.read())


def aggregate_from_table(table: SeriesTable) -> AggregateCurve:
    """Rebuild the across-seed aggregate from a parsed series file."""
    if not table.rows:
        raise ValueError("series table has no rows")
    machines = {r.machine for r in table.rows}
    ks = {r.k for r in table.rows}
    if len(machines) != 1 or len(ks) != 1:
        raise ValueError("series table mixes machines or k values")
    by_seed: dict[int, list[SeriesRow]] = {}
    for r in table.rows:
        by_seed.setdefault(r.seed, []).append(r)
    grids = {tuple(r.trial for r in rows) for rows in by_seed.values()}
    if len(grids) != 1:
        raise ValueError("seeds disagree on the checkpoint grid")
    trials = next(iter(grids))
    orders = table.merit_orders
    columns = np.array([[r.values for r in rows] for rows in by_seed.values()])
    median, mean, minimum, maximum = {}, {}, {}, {}
    for j, n in enumerate(orders):
        col = columns[:, :, j]
        median[n] = tuple(float(v) for v in np.median(col, axis=0))
        mean[n] = tuple(float(v) for v in col.mean(axis=0))
        minimum[n] = tuple(float(v) for v in col.min(axis=0))
        maximum[n] = tuple(float(v) for v in col.max(axis=0))
    return AggregateCurve(
        machines.pop(), ks.pop(), orders, trials, median, mean, minimum, maximum
    )


def render_aggregate_csv(curve: AggregateCurve) -> str:
    header = ["trial"]
    for n in curve.merit_orders:
        header += [f"P{n}_median", f"P{n}_mean", f"P{n}_min", f"P{n}_max"]
    lines = [",".join(header)]
    for i, trial in enumerate(curve.trials):
        cells = [str(trial)]
        for n in curve.merit_orders:
            cells += [
                _fmt(curve.median[n][i]),
                _fmt(curve.mean[n][i]),
                _fmt(curve.minimum[n][i]),
                _fmt(curve.maximum[n][i]),
            ]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# curve comparison


@dataclass(frozen=True)
class ComparisonReport:
    """Median-curve comparison between a quantum and a classical run."""

    threshold: float
    orders: tuple[int, ...]
    trials: tuple[int, ...]
    median_difference: dict[int, tuple[float, ...]]
    quantum_crossing: dict[int, int | None]
    classical_crossing: dict[int, int | None]
    quantum_final: dict[int, float]
    classical_final: dict[int, float]

    def to_text(self) -> str:
        def when(trial: int | None) -> str:
            return f"trial {trial}" if trial is not None else "not reached"

        lines = [f"threshold {self.threshold:g}"]
        for n in self.orders:
            lines.append(
                f"P{n} threshold crossing: quantum {when(self.quantum_crossing[n])},"
                f" classical {when(self.classical_crossing[n])}"
            )
            lines.append(
                f"P{n} final medians: quantum {_fmt(self.quantum_final[n])},"
                f" classical {_fmt(self.classical_final[n])},"
                f" difference {_fmt(self.quantum_final[n] - self.classical_final[n])}"
            )
        return "\n".join(lines) + "\n"


def _resample(trials: tuple[int, ...], values: tuple[float, ...], grid: tuple[int, ...]):
    """Step-function resampling: value at the latest checkpoint <= t."""
    out = []
    j = 0
    for t in grid:
        while j + 1 < len(trials) and trials[j + 1] <= t:
            j += 1
        out.append(values[min(j, len(values) - 1)])
    return tuple(out)


def compare_curves(
    quantum: AggregateCurve,
    classical: AggregateCurve,
    threshold: float = 0.9,
) -> ComparisonReport:
    """Per-checkpoint median difference and first threshold crossings."""
    if not quantum.trials or not classical.trials:
        raise ValueError("cannot compare empty curves")
    orders = tuple(sorted(set(quantum.merit_orders) & set(classical.merit_orders)))
    if not orders:
        raise ValueError("curves share no merit orders")
    if quantum.trials == classical.trials:
        grid = quantum.trials
    else:
        grid = tuple(sorted(set(quantum.trials) | set(classical.trials)))
    difference, q_cross, c_cross, q_final, c_final = {}, {}, {}, {}, {}
    for n in orders:
        q = _resample(quantum.trials, quantum.median[n], grid)
        c = _resample(classical.trials, classical.median[n], grid)
        difference[n] = tuple(a - b for a, b in zip(q, c))
        q_cross[n] = next((t for t, v in zip(grid, q) if v >= threshold), None)
        c_cross[n] = next((t for t, v in zip(grid, c) if v >= threshold), None)
        q_final[n] = q[-1]
        c_final[n] = c[-1]
    return ComparisonReport(
        threshold, orders, grid, difference, q_cross, c_cross, q_final, c_final
    )


# ---------------------------------------------------------------------------
# oracle report CSV


def render_scan_csv(reports: list[ScanReport]) -> str:
    lines = ["k,n_states,perfect_count,combinations"]
    for r in reports:
        lines.append(f"{r.k},{r.n_states},{r.perfect_count},{r.combinations}")
    return "\n".join(lines) + "\n"


def render_count_csv(report: CountReport) -> str:
    header = "k,n_states,perfect_count,total_count,formula_numerator,formula_denominator,agrees"
    frac = report.formula_value
    line = (
        f"{report.k},{report.n_states},{report.perfect_count},{report.total_count},"
        f"{frac.numerator},{frac.denominator},{str(report.agrees).lower()}"
    )
    return header + "\n" + line + "\n"


# ---------------------------------------------------------------------------
# figure presets


def preset_fig2() -> list[ExperimentConfig]:
    """Quantum learner, k=4, growing teacher memory, merits P1/P5/P10."""
    return [
        ExperimentConfig(
            machine="quantum",
            k=4,
            trial_budget=100_000,
            merit_orders=(1, 5, 10),
            sigma_gamma=SIGMA_GAMMA_DEFAULT,
            sigma_beta=SIGMA_BETA_DEFAULT,
            teacher_mode="variable",
            out="fig2",
        )
    ]


def preset_fig3() -> list[ExperimentConfig]:
    """Quantum learner, k=4, fixed teacher memories 50/100/300, merit P10."""
    configs = []
    for m in (50, 100, 300):
        configs.append(
            ExperimentConfig(
                machine="quantum",
                k=4,
                trial_budget=500_000,
                merit_orders=(10,),
                sigma_gamma=SIGMA_GAMMA_DEFAULT,
                sigma_beta=SIGMA_BETA_DEFAULT,
                teacher_mode="fixed",
                m_fixed=m,
                out=f"fig3/m{m:03d}",
            )
        )
    return configs


def preset_fig4() -> list[ExperimentConfig]:
    """Quantum vs classical at k=2,4,8 on merit P10, matched trial budgets."""
    configs = []
    for k in (2, 4, 8):
        configs.append(
            ExperimentConfig(
                machine="quantum",
                k=k,
                trial_budget=100_000,
                merit_orders=(10,),
                sigma_gamma=SIGMA_GAMMA_DEFAULT,
                sigma_beta=SIGMA_BETA_DEFAULT,
                teacher_mode="variable",
                out=f"fig4/quantum_k{k}",
            )
        )
    gains = {2: (0.25, 0.25), 4: (0.75, 0.75), 8: (0.75, 0.25)}
    for k, (k_s, k_f) in gains.items():
        configs.append(
            ExperimentConfig(
                machine="classical",
                k=k,
                trial_budget=100_000,
                merit_orders=(10,),
                k_s=k_s,
                k_f=k_f,
                out=f"fig4/classical_k{k}",
            )
        )
    return configs


def with_output_base(config: ExperimentConfig, base: str) -> ExperimentConfig:
    """Re-root a preset's relative output directory under ``base``."""
    if config.out is None:
        return config
    return replace(config, out=os.path.join(base, config.out))
