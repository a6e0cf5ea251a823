"""Command-line harness.

Subcommands:

    synthesize   write a seeded synthetic dataset as CSV
    compare      train all configured methods per crop and write the full
                 report set (comparison.csv/.txt, attributes.csv,
                 fig2_data.csv, manifest.txt)
    attributes   write only the attribute-effect report
    plot-data    re-emit per-crop correlation data from an existing
                 comparison.csv

Every run prints one machine-parsable RESULT line.  Exit codes: 0 success,
1 configuration or training failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .data import export_csv, synthesize
from .errors import ConfigError
from .experiments import (
    CellResult,
    ComparisonReport,
    ExperimentConfig,
    attribute_effects,
    config_from_toml,
    emit_plot_data,
    load_dataset,
    run_comparison,
    train_models,
    write_attributes_csv,
    write_manifest,
)
from .metrics import MetricsRow


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybridyield",
        description="Hybrid metaheuristic ANN trainers for crop-yield regression",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_syn = sub.add_parser("synthesize", help="write a seeded synthetic dataset")
    p_syn.add_argument("--seed", type=int, default=0)
    p_syn.add_argument("--out", required=True, help="output CSV path")
    p_syn.add_argument("--n-per-crop", type=int, default=12)
    p_syn.add_argument("--noise-sd", type=float, default=0.2)

    for name, help_text in (
        ("compare", "train every method per crop and write all reports"),
        ("attributes", "write the attribute-effect report"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="TOML experiment config")
        p.add_argument("--seed", type=int, action="append", help="override seeds (repeatable)")
        p.add_argument("--out", help="override output directory")
        p.add_argument("--crops", nargs="+", help="restrict to these crops")
        p.add_argument("--method", action="append", help="restrict to these method names")

    p_plot = sub.add_parser("plot-data", help="emit fig2 data from a comparison.csv")
    p_plot.add_argument("--in", dest="input", required=True, help="existing comparison.csv")
    p_plot.add_argument("--out", required=True, help="output data file")

    return parser


def _apply_overrides(config: ExperimentConfig, args) -> ExperimentConfig:
    if args.seed:
        config.seeds = list(args.seed)
    if args.out:
        config.out_dir = args.out
    if args.crops:
        config.crops = list(args.crops)
    if args.method:
        known = {m.name for m in config.methods}
        unknown = [m for m in args.method if m not in known]
        if unknown:
            raise ConfigError(f"method: {unknown} not in configured methods {sorted(known)}")
        config.methods = [m for m in config.methods if m.name in args.method]
    if not config.out_dir:
        raise ConfigError("out_dir: set it in the config file or pass --out")
    return config


def _read_comparison_csv(path) -> ComparisonReport:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("crop,method,"):
        raise ConfigError(f"{path}: not a comparison.csv file")
    crops: list[str] = []
    methods: list[str] = []
    cells: dict[tuple[str, str], CellResult] = {}
    for line in lines[1:]:
        fields = line.split(",")
        crop, method, status = fields[0], fields[1], fields[6]
        if crop == "average":
            continue
        if crop not in crops:
            crops.append(crop)
        if method not in methods:
            methods.append(method)
        if status == "failed":
            cells[(crop, method)] = CellResult(crop, method, None, "failed")
        else:
            row = MetricsRow(
                r=float(fields[2]),
                mae_pct=float(fields[3]),
                rmse=float(fields[4]),
                n=int(fields[5]),
            )
            cells[(crop, method)] = CellResult(crop, method, row)
    return ComparisonReport(crops, methods, cells, averages={}, best={})


def _cmd_synthesize(args) -> int:
    ds = synthesize(args.seed, args.n_per_crop, args.noise_sd)
    export_csv(ds, args.out)
    print(
        f"RESULT command=synthesize rows={len(ds)} seed={args.seed} "
        f"n_per_crop={args.n_per_crop} noise_sd={args.noise_sd} out={args.out}"
    )
    return 0


def _cmd_compare(args) -> int:
    config = _apply_overrides(config_from_toml(args.config), args)
    config.validate()
    os.makedirs(config.out_dir, exist_ok=True)
    ds = load_dataset(config)
    models = train_models(config, ds)
    report = run_comparison(config, models=models)
    attr_report = attribute_effects(config, models=models)
    write_attributes_csv(attr_report, os.path.join(config.out_dir, "attributes.csv"))
    emit_plot_data(report, os.path.join(config.out_dir, "fig2_data.csv"))
    write_manifest(config, os.path.join(config.out_dir, "manifest.txt"), "compare")
    failed = sum(1 for cell in report.cells.values() if cell.row is None)
    status = "ok" if failed == 0 else f"failed_rows={failed}"
    print(
        f"RESULT command=compare status={status} crops={len(report.crops)} "
        f"methods={len(report.methods)} seeds={len(config.seeds)} out={config.out_dir}"
    )
    return 0 if failed == 0 else 1


def _cmd_attributes(args) -> int:
    config = _apply_overrides(config_from_toml(args.config), args)
    config.validate()
    os.makedirs(config.out_dir, exist_ok=True)
    report = attribute_effects(config)
    write_attributes_csv(report, os.path.join(config.out_dir, "attributes.csv"))
    write_manifest(config, os.path.join(config.out_dir, "manifest.txt"), "attributes")
    print(
        f"RESULT command=attributes crops={len(report.crops)} "
        f"methods={len(report.methods)} out={config.out_dir}"
    )
    return 0


def _cmd_plot_data(args) -> int:
    report = _read_comparison_csv(args.input)
    emit_plot_data(report, args.out)
    n_lines = sum(1 for c in report.cells.values() if c.row is not None)
    print(f"RESULT command=plot-data lines={n_lines} out={args.out}")
    return 0


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    handlers = {
        "synthesize": _cmd_synthesize,
        "compare": _cmd_compare,
        "attributes": _cmd_attributes,
        "plot-data": _cmd_plot_data,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
