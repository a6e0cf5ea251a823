"""Experiment harness: per-crop method comparison and attribute effects.

Given a dataset (file or synthesized), a year split, and a list of method
configurations, the harness trains each method per crop per seed, reports
per-crop medians of (r, MAE %, RMSE) with method averages and best-per-crop
flags, grades the seven attributes by permutation importance, and emits
plot-ready per-crop correlation data.  All outputs are deterministic
functions of the configuration, so repeated runs produce byte-identical
files.
"""

from __future__ import annotations

import hashlib
import os
import platform
import sys
import warnings
from dataclasses import dataclass, field, fields as dataclass_fields

import numpy as np

from . import __version__
from .data import (
    ATTRIBUTE_NAMES,
    Dataset,
    SplitSpec,
    load_csv,
    split_by_year,
    synthesize,
    temporal_holdout,
)
from .errors import ConfigError
from .gwo import GwoConfig
from .hybrid import (
    HybridConfig,
    TrainedModel,
    train_ann_gwo,
    train_ann_ica,
    train_ica_weights,
    train_plain_backprop,
)
from .ica import IcaConfig
from .metrics import MetricsRow, evaluate, predict_in_yield_units, rmse
from .network import NetworkTopology

METHOD_KINDS = ("ann-ica", "ann-gwo", "ica-weights", "backprop")
_TAG_SHUFFLE = 201


@dataclass
class MethodConfig:
    """One trainer column of the comparison table."""

    name: str
    kind: str
    # topology for the weight-space kinds and the baseline
    n_hidden: int = 8
    hidden_activation: int = 3
    output_activation: int = 1
    # wolf-pack knobs
    pop_size: int = 20
    num_iter: int = 30
    # imperialist knobs
    n_countries: int = 24
    n_imperialists: int = 4
    assimilation_coeff: float = 2.0
    revolution_rate: float = 0.1
    revolution_damp: float = 0.93
    colony_weight: float = 0.1
    max_decades: int = 20
    hyper_lower: list[float] | None = None
    hyper_upper: list[float] | None = None
    # training budgets
    inner_epochs: int = 150
    inner_patience: int = 15
    final_epochs: int = 500
    final_patience: int = 40
    val_fraction: float = 0.2
    weight_bound: float = 5.0
    learning_rate: float = 0.5
    init_scale: float = 0.5

    def validate(self) -> None:
        if self.kind not in METHOD_KINDS:
            raise ConfigError(f"method.kind: {self.kind!r} is not one of {METHOD_KINDS}")
        if not self.name:
            raise ConfigError("method.name: must be non-empty")

    def hybrid_config(self, seed: int) -> HybridConfig:
        if self.kind == "ann-gwo":
            optimizer = GwoConfig(pop_size=self.pop_size, num_iter=self.num_iter)
        else:
            optimizer = IcaConfig(
                n_countries=self.n_countries,
                n_imperialists=self.n_imperialists,
                assimilation_coeff=self.assimilation_coeff,
                revolution_rate=self.revolution_rate,
                revolution_damp=self.revolution_damp,
                colony_weight=self.colony_weight,
                max_decades=self.max_decades,
                lower_bounds=(
                    np.asarray(self.hyper_lower, dtype=np.float64)
                    if self.kind == "ann-ica" and self.hyper_lower is not None
                    else None
                ),
                upper_bounds=(
                    np.asarray(self.hyper_upper, dtype=np.float64)
                    if self.kind == "ann-ica" and self.hyper_upper is not None
                    else None
                ),
            )
        return HybridConfig(
            optimizer=optimizer,
            inner_epochs=self.inner_epochs,
            inner_patience=self.inner_patience,
            final_epochs=self.final_epochs,
            final_patience=self.final_patience,
            val_fraction=self.val_fraction,
            weight_bound=self.weight_bound,
            learning_rate=self.learning_rate,
            init_scale=self.init_scale,
            seed=seed,
        )

    def train(self, train_ds: Dataset, seed: int) -> TrainedModel:
        cfg = self.hybrid_config(seed)
        if self.kind == "ann-ica":
            return train_ann_ica(train_ds, cfg)
        topology = NetworkTopology(
            len(train_ds.selected_attributes),
            self.n_hidden,
            self.hidden_activation,
            self.output_activation,
        )
        if self.kind == "ann-gwo":
            return train_ann_gwo(train_ds, topology, cfg)
        if self.kind == "ica-weights":
            return train_ica_weights(train_ds, topology, cfg)
        return train_plain_backprop(train_ds, topology, cfg)


@dataclass
class SynthesizeSpec:
    seed: int = 0
    n_per_crop: int = 12
    noise_sd: float = 0.2


@dataclass
class ExperimentConfig:
    methods: list[MethodConfig]
    split: SplitSpec = field(default_factory=SplitSpec)
    dataset_path: str | None = None
    synthesize_spec: SynthesizeSpec | None = None
    crops: list[str] | None = None
    attributes: tuple[str, ...] = ATTRIBUTE_NAMES
    attribute_policy: str = "fixed"
    seeds: list[int] = field(default_factory=lambda: [0])
    permutation_repeats: int = 5
    out_dir: str | None = None

    def validate(self) -> None:
        if (self.dataset_path is None) == (self.synthesize_spec is None):
            raise ConfigError("dataset: provide exactly one of `path` or `synthesize`")
        if self.dataset_path is not None and not os.path.exists(self.dataset_path):
            raise ConfigError(f"dataset.path: {self.dataset_path} does not exist")
        if not self.methods:
            raise ConfigError("method: at least one [[method]] table is required")
        names = [m.name for m in self.methods]
        if len(set(names)) != len(names):
            raise ConfigError(f"method.name: duplicate names in {names}")
        for m in self.methods:
            m.validate()
        if not self.seeds:
            raise ConfigError("seeds: must list at least one seed")
        if self.crops is not None and not self.crops:
            raise ConfigError("crops: must list at least one crop when given")
        if self.attribute_policy not in ("fixed", "search"):
            raise ConfigError(
                f"attribute_policy: {self.attribute_policy!r} is not 'fixed' or 'search'"
            )
        for a in self.attributes:
            if a not in ATTRIBUTE_NAMES:
                raise ConfigError(f"attributes: unknown attribute {a!r}")
        if not self.attributes:
            raise ConfigError("attributes: must be non-empty")
        if self.permutation_repeats < 1:
            raise ConfigError(
                f"permutation_repeats: must be >= 1, got {self.permutation_repeats}"
            )

    def digest(self) -> str:
        return hashlib.sha256(repr(self).encode()).hexdigest()[:16]


def _coerce_section(section: dict, cls, prefix: str):
    known = {f.name for f in dataclass_fields(cls)}
    unknown = set(section) - known
    if unknown:
        raise ConfigError(f"{prefix}: unknown keys {sorted(unknown)}")
    return cls(**section)


def config_from_toml(path) -> ExperimentConfig:
    """Parse the documented TOML experiment schema."""
    try:
        import tomllib
    except ModuleNotFoundError:  # Python 3.10
        import tomli as tomllib
    with open(path, "rb") as fh:
        raw = dict(tomllib.load(fh))

    dataset = raw.pop("dataset", {})
    dataset_path = dataset.pop("path", None)
    synth_raw = dataset.pop("synthesize", None)
    if dataset:
        raise ConfigError(f"dataset: unknown keys {sorted(dataset)}")
    synth = (
        _coerce_section(dict(synth_raw), SynthesizeSpec, "dataset.synthesize")
        if synth_raw is not None
        else None
    )

    split_raw = raw.pop("split", {})
    split = SplitSpec(
        train_years=tuple(split_raw.pop("train_years", (1999, 2004))),
        test_years=tuple(split_raw.pop("test_years", (2005, 2006))),
    )
    if split_raw:
        raise ConfigError(f"split: unknown keys {sorted(split_raw)}")

    methods = [
        _coerce_section(dict(m), MethodConfig, f"method[{i}]")
        for i, m in enumerate(raw.pop("method", []))
    ]

    config = ExperimentConfig(
        methods=methods,
        split=split,
        dataset_path=dataset_path,
        synthesize_spec=synth,
        crops=list(raw.pop("crops")) if "crops" in raw else None,
        attributes=tuple(raw.pop("attributes", ATTRIBUTE_NAMES)),
        attribute_policy=raw.pop("attribute_policy", "fixed"),
        seeds=list(raw.pop("seeds", [0])),
        permutation_repeats=int(raw.pop("permutation_repeats", 5)),
        out_dir=raw.pop("out_dir", None),
    )
    if raw:
        raise ConfigError(f"config: unknown top-level keys {sorted(raw)}")
    return config


def load_dataset(config: ExperimentConfig) -> Dataset:
    if config.dataset_path is not None:
        ds = load_csv(config.dataset_path)
    else:
        spec = config.synthesize_spec
        ds = synthesize(spec.seed, spec.n_per_crop, spec.noise_sd)
    return ds.with_attributes(config.attributes)


@dataclass
class CellResult:
    crop: str
    method: str
    row: MetricsRow | None
    error: str | None = None


@dataclass
class ComparisonReport:
    crops: list[str]
    methods: list[str]
    cells: dict[tuple[str, str], CellResult]
    averages: dict[str, dict[str, float]]
    best: dict[tuple[str, str], str]


@dataclass
class AttributeReport:
    crops: list[str]
    methods: list[str]
    importance: dict[tuple[str, str, str], float]
    grades: dict[tuple[str, str, str], int]


class _TrainingFailure(Exception):
    pass


def _resolve_crops(config: ExperimentConfig, ds: Dataset) -> list[str]:
    present = ds.crops()
    if config.crops is None:
        return present
    missing = [c for c in config.crops if c not in present]
    if missing:
        raise ConfigError(f"crops: {missing} not found in dataset (has {present})")
    return list(config.crops)


def _permutation_deltas(
    model: TrainedModel, eval_ds: Dataset, seed: int, repeats: int
) -> dict[str, list[float]]:
    """RMSE increase per shuffled attribute column, one value per repeat."""
    attrs = (
        model.normalization.attribute_names
        if model.normalization is not None
        else eval_ds.selected_attributes
    )
    x_raw = eval_ds.raw_matrix(attrs)
    y_raw = eval_ds.raw_targets()
    base = rmse(y_raw, predict_in_yield_units(model, x_raw))
    deltas: dict[str, list[float]] = {name: [] for name in ATTRIBUTE_NAMES}
    for j, name in enumerate(attrs):
        attr_index = ATTRIBUTE_NAMES.index(name)
        for rep in range(repeats):
            rng = np.random.default_rng(
                np.random.SeedSequence([seed, _TAG_SHUFFLE, attr_index, rep])
            )
            shuffled = x_raw.copy()
            shuffled[:, j] = shuffled[rng.permutation(x_raw.shape[0]), j]
            deltas[name].append(
                rmse(y_raw, predict_in_yield_units(model, shuffled)) - base
            )
    return deltas


def _select_attributes(
    crop_train: Dataset, method: MethodConfig, config: ExperimentConfig
) -> tuple[str, ...]:
    """Attribute subset for the 'search' policy.

    Trains once with the first seed, measures permutation importance on the
    chronological validation holdout, and keeps attributes whose median
    importance is positive (at least the single best one).
    """
    model = method.train(crop_train, config.seeds[0])
    _, val = temporal_holdout(crop_train, method.val_fraction)
    deltas = _permutation_deltas(model, val, config.seeds[0], config.permutation_repeats)
    medians = {
        a: float(np.median(deltas[a])) if deltas[a] else 0.0
        for a in crop_train.selected_attributes
    }
    kept = tuple(a for a in crop_train.selected_attributes if medians[a] > 0.0)
    if not kept:
        kept = (max(medians, key=lambda a: medians[a]),)
    return kept


def train_models(
    config: ExperimentConfig, ds: Dataset
) -> dict[tuple[str, str, int], TrainedModel | _TrainingFailure]:
    """Train every (crop, method, seed) cell; failures are recorded, not raised."""
    crops = _resolve_crops(config, ds)
    out: dict[tuple[str, str, int], TrainedModel | _TrainingFailure] = {}
    for crop in crops:
        crop_ds = ds.filter_crop(crop)
        train_ds, _ = split_by_year(crop_ds, config.split)
        for method in config.methods:
            method_train = train_ds
            if config.attribute_policy == "search":
                try:
                    attrs = _select_attributes(train_ds, method, config)
                    method_train = train_ds.with_attributes(attrs)
                except Exception as exc:  # selection failure fails the cells
                    for seed in config.seeds:
                        out[(crop, method.name, seed)] = _TrainingFailure(str(exc))
                    continue
            for seed in config.seeds:
                try:
                    out[(crop, method.name, seed)] = method.train(method_train, seed)
                except Exception as exc:
                    out[(crop, method.name, seed)] = _TrainingFailure(str(exc))
    return out


def run_comparison(config: ExperimentConfig, models=None) -> ComparisonReport:
    """Train, evaluate, and assemble the per-crop comparison table.

    Per (crop, method) the reported row is the per-metric median across
    seeds.  A cell with any failed seed is marked failed and the run
    continues.  When `config.out_dir` is set the report is written in CSV
    and aligned-text form.
    """
    config.validate()
    ds = load_dataset(config)
    crops = _resolve_crops(config, ds)
    if models is None:
        models = train_models(config, ds)

    cells: dict[tuple[str, str], CellResult] = {}
    for crop in crops:
        crop_ds = ds.filter_crop(crop)
        _, test_ds = split_by_year(crop_ds, config.split)
        for method in config.methods:
            rows, errors = [], []
            for seed in config.seeds:
                item = models[(crop, method.name, seed)]
                if isinstance(item, _TrainingFailure):
                    errors.append(str(item))
                    continue
                rows.append(evaluate(item, test_ds))
            if errors:
                cells[(crop, method.name)] = CellResult(
                    crop, method.name, None, "; ".join(errors)
                )
            else:
                cells[(crop, method.name)] = CellResult(
                    crop,
                    method.name,
                    MetricsRow(
                        r=float(np.median([r.r for r in rows])),
                        mae_pct=float(np.median([r.mae_pct for r in rows])),
                        rmse=float(np.median([r.rmse for r in rows])),
                        n=rows[0].n,
                    ),
                )

    method_names = [m.name for m in config.methods]
    averages: dict[str, dict[str, float]] = {}
    for name in method_names:
        ok = [cells[(c, name)].row for c in crops if cells[(c, name)].row is not None]
        if ok:
            averages[name] = {
                "r": float(np.mean([r.r for r in ok])),
                "mae_pct": float(np.mean([r.mae_pct for r in ok])),
                "rmse": float(np.mean([r.rmse for r in ok])),
            }

    best: dict[tuple[str, str], str] = {}
    for crop in crops:
        candidates = [n for n in method_names if cells[(crop, n)].row is not None]
        if not candidates:
            continue
        rows = {n: cells[(crop, n)].row for n in candidates}
        best[(crop, "r")] = max(candidates, key=lambda n: (rows[n].r, -candidates.index(n)))
        best[(crop, "mae_pct")] = min(candidates, key=lambda n: (rows[n].mae_pct, candidates.index(n)))
        best[(crop, "rmse")] = min(candidates, key=lambda n: (rows[n].rmse, candidates.index(n)))

    report = ComparisonReport(crops, method_names, cells, averages, best)
    if config.out_dir:
        os.makedirs(config.out_dir, exist_ok=True)
        write_comparison_csv(report, os.path.join(config.out_dir, "comparison.csv"))
        write_comparison_text(report, os.path.join(config.out_dir, "comparison.txt"))
    return report


def attribute_effects(config: ExperimentConfig, models=None) -> AttributeReport:
    """Grade each attribute's effect per (crop, method) on the test split.

    Importance is the median over seeds and repetitions of the test-RMSE
    increase when that attribute's column is shuffled.  The seven
    importances are binned into rank quartiles: grade 0 for the lowest
    quartile up to grade 3 for the top; ties keep attribute order.
    """
    config.validate()
    ds = load_dataset(config)
    crops = _resolve_crops(config, ds)
    if models is None:
        models = train_models(config, ds)

    importance: dict[tuple[str, str, str], float] = {}
    grades: dict[tuple[str, str, str], int] = {}
    for crop in crops:
        crop_ds = ds.filter_crop(crop)
        _, test_ds = split_by_year(crop_ds, config.split)
        for method in config.methods:
            per_attr: dict[str, list[float]] = {a: [] for a in ATTRIBUTE_NAMES}
            degenerate = False
            for seed in config.seeds:
                item = models[(crop, method.name, seed)]
                if isinstance(item, _TrainingFailure):
                    continue
                model_attrs = (
                    item.normalization.attribute_names
                    if item.normalization is not None
                    else test_ds.selected_attributes
                )
                if len(model_attrs) < 2:
                    degenerate = True
                    continue
                for a, values in _permutation_deltas(
                    item, test_ds, seed, config.permutation_repeats
                ).items():
                    per_attr[a].extend(values)
            if degenerate or all(not v for v in per_attr.values()):
                if degenerate:
                    warnings.warn(
                        f"{crop}/{method.name}: single-attribute model, "
                        "emitting all-zero attribute grades"
                    )
                for a in ATTRIBUTE_NAMES:
                    importance[(crop, method.name, a)] = 0.0
                    grades[(crop, method.name, a)] = 0
                continue
            values = np.array(
                [float(np.median(per_attr[a])) if per_attr[a] else 0.0 for a in ATTRIBUTE_NAMES]
            )
            order = np.argsort(values, kind="stable")
            for rank, idx in enumerate(order):
                name = ATTRIBUTE_NAMES[idx]
                importance[(crop, method.name, name)] = float(values[idx])
                grades[(crop, method.name, name)] = rank * 4 // len(ATTRIBUTE_NAMES)

    return AttributeReport(crops, [m.name for m in config.methods], importance, grades)


def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def write_comparison_csv(report: ComparisonReport, path) -> None:
    lines = ["crop,method,r,mae_pct,rmse,n,status,best_r,best_mae,best_rmse"]
    for crop in report.crops:
        for name in report.methods:
            cell = report.cells[(crop, name)]
            if cell.row is None:
                lines.append(f"{crop},{name},,,,,failed,,,")
                continue
            flags = [
                "1" if report.best.get((crop, metric)) == name else "0"
                for metric in ("r", "mae_pct", "rmse")
            ]
            lines.append(
                f"{crop},{name},{_fmt(cell.row.r)},{_fmt(cell.row.mae_pct)},"
                f"{_fmt(cell.row.rmse)},{cell.row.n},ok,{flags[0]},{flags[1]},{flags[2]}"
            )
    for name in report.methods:
        avg = report.averages.get(name)
        if avg is not None:
            lines.append(
                f"average,{name},{_fmt(avg['r'])},{_fmt(avg['mae_pct'])},"
                f"{_fmt(avg['rmse'])},,ok,,,"
            )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_comparison_text(report: ComparisonReport, path) -> None:
    """Aligned table: crops as rows, (metric x method) as columns."""
    metrics = (("r", "R"), ("mae_pct", "MAE (%)"), ("rmse", "RMSE"))
    col_w = max(12, max((len(n) for n in report.methods), default=12) + 3)
    header1 = f"{'crop':<14}"
    header2 = f"{'':<14}"
    for _, label in metrics:
        for name in report.methods:
            header1 += f"{label:>{col_w}}"
            header2 += f"{name:>{col_w}}"
    lines = [header1, header2, "-" * len(header2)]

    def row_line(label: str, getter, flag_crop: str | None) -> str:
        line = f"{label:<14}"
        for metric, _ in metrics:
            for name in report.methods:
                value = getter(metric, name)
                if value is None:
                    cell = "failed"
                else:
                    cell = f"{value:.4f}"
                    if flag_crop is not None and report.best.get((flag_crop, metric)) == name:
                        cell += "*"
                line += f"{cell:>{col_w}}"
        return line

    for crop in report.crops:
        def cell_value(metric, name, crop=crop):
            row = report.cells[(crop, name)].row
            return None if row is None else getattr(row, metric)

        lines.append(row_line(crop, cell_value, crop))

    def avg_value(metric, name):
        avg = report.averages.get(name)
        return None if avg is None else avg[metric]

    lines.append(row_line("average", avg_value, None))
    lines.append("")
    lines.append("* best per crop per metric; ties go to the first configured method")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_attributes_csv(report: AttributeReport, path) -> None:
    lines = ["crop,method,attribute,importance,grade"]
    for crop in report.crops:
        for name in report.methods:
            for a in ATTRIBUTE_NAMES:
                imp = report.importance[(crop, name, a)]
                grade = report.grades[(crop, name, a)]
                lines.append(f"{crop},{name},{a},{_fmt(imp)},{grade}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def emit_plot_data(report: ComparisonReport, path) -> None:
    """Per-crop correlation-index data for an external plotter.

    One line per (crop, method); values are copied from the report rows.
    Failed cells are omitted.
    """
    lines = [
        "# per-crop correlation index by method; columns: crop,method,r",
        "crop,method,r",
    ]
    for crop in report.crops:
        for name in report.methods:
            cell = report.cells[(crop, name)]
            if cell.row is not None:
                lines.append(f"{crop},{name},{_fmt(cell.row.r)}")
    if len(lines) == 2:
        warnings.warn("plot data is empty: no successful comparison rows")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_manifest(config: ExperimentConfig, path, command: str) -> None:
    """Record everything needed to re-run this invocation exactly."""
    lines = [
        f"command={command}",
        f"config_digest={config.digest()}",
        f"seeds={','.join(str(s) for s in config.seeds)}",
        f"package_version={__version__}",
        f"numpy_version={np.__version__}",
        f"python_version={platform.python_version()}",
        f"platform={sys.platform}",
        f"config={config!r}",
    ]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
