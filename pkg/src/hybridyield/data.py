"""Crop-yield dataset schema, CSV ingestion, splits, scaling, synthesis.

The single ingestion format is a UTF-8 CSV with the exact header

    crop,year,at1,at2,at3,at4,at5,at6,at7,yield

one record per line, `.` decimal separator.  Attribute columns:

    at1  planting area (ha)
    at2  irrigation water depth (mm)
    at3  rainfall during growth stages (mm)
    at4  global solar radiation (kWh m^-2)
    at5  maximum temperature (C)
    at6  average temperature (C)
    at7  minimum temperature (C)

and the target is yield in t/ha.  Records are validated on construction:
positive planting area, nonnegative water/radiation amounts, temperature
ordering at7 <= at6 <= at5, nonnegative yield.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    ConfigError,
    ConstantColumnError,
    EmptyInputError,
    RowError,
    SchemaError,
    SplitError,
)

ATTRIBUTE_NAMES = ("at1", "at2", "at3", "at4", "at5", "at6", "at7")
CSV_HEADER = ("crop", "year") + ATTRIBUTE_NAMES + ("yield",)
CANONICAL_CROPS = ("wheat", "barley", "potato", "sugar_beet")


@dataclass(frozen=True)
class CropRecord:
    """One observation: crop species, year, attributes AT1..AT7, yield."""

    crop: str
    year: int
    at1: float
    at2: float
    at3: float
    at4: float
    at5: float
    at6: float
    at7: float
    yield_t_ha: float

    def __post_init__(self):
        object.__setattr__(self, "crop", str(self.crop).strip())
        object.__setattr__(self, "year", int(self.year))
        for name in ATTRIBUTE_NAMES + ("yield_t_ha",):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not self.crop:
            raise RowError("crop label is empty")
        if self.at1 <= 0:
            raise RowError(f"planting area at1 must be > 0, got {self.at1}")
        for name in ("at2", "at3", "at4"):
            if getattr(self, name) < 0:
                raise RowError(f"{name} must be >= 0, got {getattr(self, name)}")
        if not self.at7 <= self.at6 <= self.at5:
            raise RowError(
                "temperature ordering violated: requires at7 <= at6 <= at5, "
                f"got ({self.at7}, {self.at6}, {self.at5})"
            )
        if self.yield_t_ha < 0:
            raise RowError(f"yield must be >= 0, got {self.yield_t_ha}")


@dataclass(frozen=True)
class NormalizationStats:
    """Min-max ranges fitted on a training split, for scaling to [0, 1]."""

    attribute_names: tuple[str, ...]
    feature_min: np.ndarray
    feature_max: np.ndarray
    target_min: float
    target_max: float

    def normalize_features(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=np.float64) - self.feature_min) / (
            self.feature_max - self.feature_min
        )

    def normalize_target(self, y: np.ndarray) -> np.ndarray:
        return (np.asarray(y, dtype=np.float64) - self.target_min) / (
            self.target_max - self.target_min
        )

    def denormalize_target(self, y: np.ndarray) -> np.ndarray:
        return np.asarray(y, dtype=np.float64) * (self.target_max - self.target_min) + (
            self.target_min
        )


def denormalize(value, stats: NormalizationStats):
    """Map a normalized target value back to yield units (t/ha)."""
    return stats.denormalize_target(value)


@dataclass(frozen=True)
class SplitSpec:
    """Inclusive year ranges for the training and testing periods."""

    train_years: tuple[int, int] = (1999, 2004)
    test_years: tuple[int, int] = (2005, 2006)

    def __post_init__(self):
        for name, (lo, hi) in (("train_years", self.train_years), ("test_years", self.test_years)):
            if lo > hi:
                raise ConfigError(f"{name} range ({lo}, {hi}) is empty")
        t_lo, t_hi = self.train_years
        s_lo, s_hi = self.test_years
        if max(t_lo, s_lo) <= min(t_hi, s_hi):
            raise ConfigError(
                f"train years {self.train_years} overlap test years {self.test_years}"
            )


@dataclass(frozen=True)
class Dataset:
    """Ordered records plus the attribute subset and scaling state in use.

    Records always hold raw values; when `normalization` is set, the matrix
    accessors return min-max scaled features and targets instead.
    """

    records: tuple[CropRecord, ...]
    selected_attributes: tuple[str, ...] = ATTRIBUTE_NAMES
    normalization: NormalizationStats | None = None

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        attrs = tuple(self.selected_attributes)
        if not attrs:
            raise ConfigError("selected_attributes must not be empty")
        for a in attrs:
            if a not in ATTRIBUTE_NAMES:
                raise ConfigError(f"unknown attribute {a!r}; expected one of {ATTRIBUTE_NAMES}")
        object.__setattr__(self, "selected_attributes", attrs)

    def __len__(self) -> int:
        return len(self.records)

    def crops(self) -> list[str]:
        """Crop labels in order of first appearance."""
        seen: dict[str, None] = {}
        for r in self.records:
            seen.setdefault(r.crop, None)
        return list(seen)

    def filter_crop(self, crop: str) -> "Dataset":
        kept = tuple(r for r in self.records if r.crop == crop)
        return replace(self, records=kept)

    def with_attributes(self, attributes) -> "Dataset":
        return replace(self, selected_attributes=tuple(attributes), normalization=None)

    def years(self) -> np.ndarray:
        return np.array([r.year for r in self.records], dtype=int)

    def raw_matrix(self, attributes=None) -> np.ndarray:
        attrs = tuple(attributes) if attributes is not None else self.selected_attributes
        if not self.records:
            raise EmptyInputError("dataset has no records")
        return np.array(
            [[getattr(r, a) for a in attrs] for r in self.records], dtype=np.float64
        )

    def raw_targets(self) -> np.ndarray:
        if not self.records:
            raise EmptyInputError("dataset has no records")
        return np.array([r.yield_t_ha for r in self.records], dtype=np.float64)

    def feature_matrix(self) -> np.ndarray:
        x = self.raw_matrix()
        if self.normalization is not None:
            x = self.normalization.normalize_features(x)
        return x

    def targets(self) -> np.ndarray:
        y = self.raw_targets()
        if self.normalization is not None:
            y = self.normalization.normalize_target(y)
        return y


def load_csv(path, on_invalid: str = "fail") -> Dataset:
    """Parse a CSV file into a Dataset.

    Rows that fail to parse or violate record invariants are reported with
    their line number; `on_invalid` selects between failing the load and
    skipping the row with a warning.
    """
    if on_invalid not in ("fail", "skip"):
        raise ConfigError(f"on_invalid must be 'fail' or 'skip', got {on_invalid!r}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: file is empty") from None
        if tuple(h.strip() for h in header) != CSV_HEADER:
            raise SchemaError(
                f"{path}: header {header!r} does not match {','.join(CSV_HEADER)}"
            )
        records = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                if len(row) != len(CSV_HEADER):
                    raise RowError(f"expected {len(CSV_HEADER)} fields, got {len(row)}")
                records.append(
                    CropRecord(
                        crop=row[0],
                        year=int(row[1]),
                        **{name: float(row[2 + i]) for i, name in enumerate(ATTRIBUTE_NAMES)},
                        yield_t_ha=float(row[9]),
                    )
                )
            except (RowError, ValueError) as exc:
                message = f"{path}:{line_no}: {exc}"
                if on_invalid == "fail":
                    raise RowError(message) from None
                warnings.warn(f"skipping row: {message}")
    return Dataset(tuple(records))


def export_csv(ds: Dataset, path) -> None:
    """Write a Dataset in the documented CSV format.

    Float fields are written with `repr`, so the file round-trips through
    `load_csv` bit-exactly and re-exports are byte-identical.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(CSV_HEADER) + "\n")
        for r in ds.records:
            fields = [r.crop, str(r.year)]
            fields += [repr(float(getattr(r, a))) for a in ATTRIBUTE_NAMES]
            fields.append(repr(float(r.yield_t_ha)))
            fh.write(",".join(fields) + "\n")


def split_by_year(ds: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Partition records into train and test by the spec's year ranges.

    Records outside both ranges are dropped from both sides; the tally is
    `len(ds) - len(train) - len(test)`.
    """
    t_lo, t_hi = spec.train_years
    s_lo, s_hi = spec.test_years
    train = tuple(r for r in ds.records if t_lo <= r.year <= t_hi)
    test = tuple(r for r in ds.records if s_lo <= r.year <= s_hi)
    if not train:
        raise SplitError(f"no records in training years {spec.train_years}")
    if not test:
        raise SplitError(f"no records in testing years {spec.test_years}")
    return replace(ds, records=train), replace(ds, records=test)


def temporal_holdout(ds: Dataset, fraction: float) -> tuple[Dataset, Dataset]:
    """Carve the chronologically last `fraction` of rows off as a holdout.

    Rows are stably ordered by year, so ties keep their stored order.  Both
    sides are guaranteed at least one row.
    """
    if not 0.0 < fraction < 1.0:
        raise ConfigError(f"holdout fraction must lie in (0, 1), got {fraction}")
    if len(ds) < 2:
        raise EmptyInputError("need at least 2 records to carve a holdout")
    order = sorted(range(len(ds.records)), key=lambda i: ds.records[i].year)
    n_val = min(max(1, round(fraction * len(ds))), len(ds) - 1)
    fit_idx = order[: len(ds) - n_val]
    val_idx = order[len(ds) - n_val :]
    fit = tuple(ds.records[i] for i in fit_idx)
    val = tuple(ds.records[i] for i in val_idx)
    return replace(ds, records=fit), replace(ds, records=val)


def normalize(ds: Dataset) -> tuple[Dataset, NormalizationStats]:
    """Fit min-max stats on `ds` and return the scaled view plus the stats.

    Stats must be fitted on training data only; apply them to other splits
    with `apply_normalization` (values outside the fitted range simply map
    outside [0, 1]).
    """
    x = ds.raw_matrix()
    y = ds.raw_targets()
    f_min = x.min(axis=0)
    f_max = x.max(axis=0)
    for i, name in enumerate(ds.selected_attributes):
        if not f_min[i] < f_max[i]:
            raise ConstantColumnError(f"attribute {name} is constant (value {f_min[i]})")
    t_min, t_max = float(y.min()), float(y.max())
    if not t_min < t_max:
        raise ConstantColumnError(f"yield column is constant (value {t_min})")
    stats = NormalizationStats(ds.selected_attributes, f_min, f_max, t_min, t_max)
    return replace(ds, normalization=stats), stats


def apply_normalization(ds: Dataset, stats: NormalizationStats) -> Dataset:
    if tuple(stats.attribute_names) != ds.selected_attributes:
        raise ConfigError(
            f"stats were fitted on {stats.attribute_names}, "
            f"dataset selects {ds.selected_attributes}"
        )
    return replace(ds, normalization=stats)


# Ground truth of the synthetic generator.  Yield responds to irrigation
# (dominant), rainfall, radiation, and maximum temperature; planting area and
# the two remaining temperatures never enter.  The three temperatures are
# drawn from disjoint independent bands so the ordering invariant holds
# without making the columns collinear (collinear inputs let a network build
# cancelling weights, which wrecks permutation-importance diagnostics).
_BASE_YIELD = {"wheat": 4.5, "barley": 3.5, "potato": 28.0, "sugar_beet": 38.0}
_SYNTH_YEARS = tuple(range(1999, 2007))


def true_yield(crop: str, at2: float, at3: float, at4: float, at5: float) -> float:
    """Noiseless yield surface used by `synthesize` (t/ha)."""
    u2 = (at2 - 200.0) / 700.0
    u3 = at3 / 350.0
    u4 = (at4 - 1200.0) / 1200.0
    u5 = (at5 - 25.0) / 17.0
    effect = (
        1.00 * math.tanh(3.0 * u2 - 1.5)
        + 0.25 * math.sin(math.pi * u3)
        + 0.20 * u4 * u4
        + 0.20 * math.cos(2.0 * u5)
    )
    return _BASE_YIELD[crop] * math.exp(effect)


def synthesize(seed: int, n_per_crop: int = 12, noise_sd: float = 0.2) -> Dataset:
    """Generate a stand-in dataset over the years 1999-2006.

    Every (crop, year) cell receives exactly `n_per_crop` records.  Yields
    follow `true_yield` plus additive Gaussian noise (clipped at zero), so
    noise_sd 0 reproduces the generator surface exactly.
    """
    if n_per_crop < 1:
        raise ConfigError(f"n_per_crop must be >= 1, got {n_per_crop}")
    if noise_sd < 0:
        raise ConfigError(f"noise_sd must be >= 0, got {noise_sd}")
    rng = np.random.default_rng(seed)
    records = []
    for crop in CANONICAL_CROPS:
        for year in _SYNTH_YEARS:
            for _ in range(n_per_crop):
                at1 = float(rng.uniform(5.0, 400.0))
                at2 = float(rng.uniform(200.0, 900.0))
                at3 = float(rng.uniform(0.0, 350.0))
                at4 = float(rng.uniform(1200.0, 2400.0))
                at5 = float(rng.uniform(33.0, 42.0))
                at6 = float(rng.uniform(26.0, 32.0))
                at7 = float(rng.uniform(18.0, 25.0))
                y = true_yield(crop, at2, at3, at4, at5)
                if noise_sd > 0:
                    y += float(rng.normal(0.0, noise_sd))
                records.append(
                    CropRecord(crop, year, at1, at2, at3, at4, at5, at6, at7, max(0.0, y))
                )
    return Dataset(tuple(records))


@dataclass(frozen=True)
class SummaryRow:
    crop: str
    total: int
    n_train: int
    n_test: int
    test_pct: float


@dataclass(frozen=True)
class SummaryTable:
    rows: tuple[SummaryRow, ...]
    total: int
    total_train: int
    total_test: int
    dropped: int

    def render_text(self) -> str:
        header = f"{'crop':<12}{'total':>8}{'train':>8}{'test':>8}{'test %':>9}"
        lines = [header, "-" * len(header)]
        for r in self.rows:
            lines.append(
                f"{r.crop:<12}{r.total:>8}{r.n_train:>8}{r.n_test:>8}{r.test_pct:>9.2f}"
            )
        lines.append(f"{'total':<12}{self.total:>8}{self.total_train:>8}{self.total_test:>8}")
        return "\n".join(lines)


def summarize(ds: Dataset, spec: SplitSpec) -> SummaryTable:
    """Per-crop sample counts and testing percentages for a year split."""
    t_lo, t_hi = spec.train_years
    s_lo, s_hi = spec.test_years
    rows = []
    for crop in ds.crops():
        n_train = sum(1 for r in ds.records if r.crop == crop and t_lo <= r.year <= t_hi)
        n_test = sum(1 for r in ds.records if r.crop == crop and s_lo <= r.year <= s_hi)
        total = n_train + n_test
        if total == 0:
            continue
        pct = 100.0 * n_test / total
        rows.append(SummaryRow(crop, total, n_train, n_test, pct))
    total = sum(r.total for r in rows)
    return SummaryTable(
        rows=tuple(rows),
        total=total,
        total_train=sum(r.n_train for r in rows),
        total_test=sum(r.n_test for r in rows),
        dropped=len(ds) - total,
    )
