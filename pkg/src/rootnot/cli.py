"""Command-line entry points.

Subcommands: learn-quantum, learn-classical, compare, oracle-lemma,
oracle-count, and the figure presets fig2/fig3/fig4.  Every run writes
deterministic CSV files plus an SVG plot and exits 0 on success; any
failure prints a one-line diagnostic and exits nonzero.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import harness, oracle
from .harness import (
    AggregateCurve,
    ExperimentConfig,
    aggregate_from_table,
    compare_curves,
    load_config,
    read_series_csv,
    render_count_csv,
    render_scan_csv,
    run_experiment,
    with_output_base,
)
from .plot import PlotCurve, emit_plot

__all__ = ["main"]


def _common_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--seeds", help="comma-separated seed list")
    parser.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config key (repeatable)",
    )
    parser.add_argument("--workers", type=int, default=1, help="parallel workers")


def _apply_cli(config: ExperimentConfig, args) -> ExperimentConfig:
    text = harness.config_to_text(config)
    overrides = list(args.override)
    if args.seeds:
        overrides.append(f"seeds={args.seeds}")
    if args.out:
        overrides.append(f"out={args.out}")
    return harness.parse_config_text(text, tuple(overrides))


def _curves_from_aggregate(curve: AggregateCurve) -> list[PlotCurve]:
    return [
        PlotCurve(f"P{n}", tuple(float(t) for t in curve.trials), curve.median[n])
        for n in curve.merit_orders
    ]


def _run_and_report(config: ExperimentConfig, workers: int) -> AggregateCurve:
    curve, _ = run_experiment(config, workers=workers)
    if config.out:
        title = f"{config.machine} learner, k={config.k}"
        emit_plot(
            _curves_from_aggregate(curve),
            os.path.join(config.out, "plot.svg"),
            title=title,
            y_label="median merit",
        )
    finals = ", ".join(
        f"P{n}={curve.final_median(n):.4f}" for n in config.merit_orders
    )
    where = config.out or "(not written)"
    print(f"{config.machine} k={config.k}: final medians {finals} -> {where}")
    return curve


def _cmd_learn(args, machine: str) -> int:
    config = load_config(args.config, tuple(args.override))
    if config.machine != machine:
        raise harness.ConfigError(
            "machine", f"config says {config.machine!r}, subcommand wants {machine!r}"
        )
    config = _apply_cli(config, args)
    _run_and_report(config, args.workers)
    return 0


def _cmd_compare(args) -> int:
    quantum = aggregate_from_table(read_series_csv(args.quantum))
    classical = aggregate_from_table(read_series_csv(args.classical))
    report = compare_curves(quantum, classical, threshold=args.threshold)
    text = report.to_text()
    print(text, end="")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "comparison.txt")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return 0


def _cmd_oracle_lemma(args) -> int:
    budget = args.max_work if args.max_work else oracle.DEFAULT_WORK_BUDGET
    reports = oracle.minimum_state_scan(
        args.k, args.n_max, workers=args.workers, max_work=budget
    )
    for r in reports:
        verdict = "perfect machines exist" if r.any_perfect else "no perfect machine"
        print(
            f"k={r.k} N={r.n_states}: {verdict}"
            f" ({r.perfect_count} of {r.combinations} combinations)"
        )
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, f"scan_k{args.k}.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(render_scan_csv(reports))
    return 0


def _cmd_oracle_count(args) -> int:
    budget = args.max_work if args.max_work else oracle.DEFAULT_WORK_BUDGET
    report = oracle.count_target_functions(args.k, workers=args.workers, max_work=budget)
    frac = report.formula_value
    print(
        f"k={report.k}: {report.perfect_count} perfect tables out of"
        f" {report.total_count} ({report.enumerated_fraction});"
        f" formula gives {frac.numerator}/{frac.denominator};"
        f" {'agreement' if report.agrees else 'DISAGREEMENT'}"
    )
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, f"count_k{args.k}.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(render_count_csv(report))
    return 0


def _cmd_fig(args, preset) -> int:
    base = args.out or "results"
    configs = [with_output_base(c, base) for c in preset()]
    configs = [_apply_cli_keep_out(c, args) for c in configs]
    curves = {}
    for config in configs:
        curves[(config.machine, config.k)] = _run_and_report(config, args.workers)
    quantum_ks = sorted(k for m, k in curves if m == "quantum")
    for k in quantum_ks:
        if ("classical", k) not in curves:
            continue
        report = compare_curves(curves[("quantum", k)], curves[("classical", k)])
        print(f"-- k={k} --")
        print(report.to_text(), end="")
        path = os.path.join(base, f"fig4/comparison_k{k}.txt")
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(report.to_text())
    return 0


def _apply_cli_keep_out(config: ExperimentConfig, args) -> ExperimentConfig:
    text = harness.config_to_text(config)
    overrides = list(args.override)
    if args.seeds:
        overrides.append(f"seeds={args.seeds}")
    return harness.parse_config_text(text, tuple(overrides))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rootnot",
        description="Train and verify machines that extract the k-th root of NOT.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, machine in (("learn-quantum", "quantum"), ("learn-classical", "classical")):
        p = sub.add_parser(name, help=f"run a {machine} learning experiment")
        p.add_argument("--config", required=True, help="path to key=value config file")
        _common_options(p)
        p.set_defaults(func=lambda a, m=machine: _cmd_learn(a, m))

    p = sub.add_parser("compare", help="compare two series.csv files")
    p.add_argument("--quantum", required=True, help="quantum series.csv")
    p.add_argument("--classical", required=True, help="classical series.csv")
    p.add_argument("--threshold", type=float, default=0.9)
    p.add_argument("--out", help="directory for comparison.txt")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("oracle-lemma", help="scan machine sizes for perfect machines")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n-max", type=int, default=6, help="largest state count to scan")
    p.add_argument("--max-work", type=int, default=0, help="raise the work budget")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="directory for the scan CSV")
    p.set_defaults(func=_cmd_oracle_lemma)

    p = sub.add_parser("oracle-count", help="count perfect tables exhaustively")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--max-work", type=int, default=0, help="raise the work budget")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="directory for the count CSV")
    p.set_defaults(func=_cmd_oracle_count)

    for name, preset in (
        ("fig2", harness.preset_fig2),
        ("fig3", harness.preset_fig3),
        ("fig4", harness.preset_fig4),
    ):
        p = sub.add_parser(name, help=f"run the {name} preset experiments")
        _common_options(p)
        p.set_defaults(func=lambda a, pr=preset: _cmd_fig(a, pr))

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # one-line diagnostic, nonzero exit
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
