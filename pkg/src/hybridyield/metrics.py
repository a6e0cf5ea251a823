"""Accuracy measures for yield predictions.

Three headline metrics: root mean square error, the uncentered correlation
index r = (1 - sum((A-P)^2) / sum(A^2))^(1/2), and mean absolute error, plus
the relative form of the latter (percent of the mean target) used in
comparison tables.  The correlation index is not Pearson correlation; a
conventional Pearson coefficient is available separately as a diagnostic and
is never substituted into reports.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import EmptyInputError, ShapeError, UndefinedDenominatorError
from .network import predict


class CorrelationClampWarning(UserWarning):
    """The correlation-index radicand was negative and clamped to zero."""


def _pair(targets, predictions) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(targets, dtype=np.float64)
    p = np.asarray(predictions, dtype=np.float64)
    if a.ndim != 1 or p.ndim != 1:
        raise ShapeError(f"expected 1-D vectors, got shapes {a.shape} and {p.shape}")
    if a.size == 0:
        raise EmptyInputError("metric inputs are empty")
    if a.shape != p.shape:
        raise ShapeError(f"targets length {a.size} != predictions length {p.size}")
    return a, p


def rmse(targets, predictions) -> float:
    """Root mean square error sqrt(mean((A - P)^2))."""
    a, p = _pair(targets, predictions)
    d = a - p
    return math.sqrt(float(np.mean(d * d)))


def r_index(targets, predictions) -> float:
    """Uncentered correlation index (1 - sum((A-P)^2)/sum(A^2))^(1/2).

    A negative radicand (predictions worse than predicting zero) clamps to 0
    and emits a CorrelationClampWarning.
    """
    a, p = _pair(targets, predictions)
    denom = float(np.sum(a * a))
    if denom == 0.0:
        raise UndefinedDenominatorError("all targets are zero; sum(A^2) = 0")
    radicand = 1.0 - float(np.sum((a - p) ** 2)) / denom
    if radicand < 0.0:
        warnings.warn(
            f"correlation-index radicand {radicand:.6g} clamped to 0",
            CorrelationClampWarning,
            stacklevel=2,
        )
        return 0.0
    return math.sqrt(radicand)


def mae(targets, predictions) -> float:
    """Mean absolute error mean(|A - P|)."""
    a, p = _pair(targets, predictions)
    return float(np.mean(np.abs(a - p)))


def mae_percent(targets, predictions) -> float:
    """Mean absolute error relative to the mean target, in percent."""
    a, p = _pair(targets, predictions)
    mean_target = float(np.mean(a))
    if mean_target == 0.0:
        raise UndefinedDenominatorError("mean target is zero")
    return 100.0 * mae(a, p) / mean_target


def pearson_r(targets, predictions) -> float:
    """Conventional mean-centered Pearson correlation; diagnostic only."""
    a, p = _pair(targets, predictions)
    a_c = a - a.mean()
    p_c = p - p.mean()
    denom = math.sqrt(float(np.sum(a_c * a_c)) * float(np.sum(p_c * p_c)))
    if denom == 0.0:
        raise UndefinedDenominatorError("a constant vector has no Pearson correlation")
    return float(np.sum(a_c * p_c)) / denom


@dataclass(frozen=True)
class MetricsRow:
    """One comparison-table cell: (r, MAE %, RMSE) over n test rows."""

    r: float
    mae_pct: float
    rmse: float
    n: int


def predict_in_yield_units(model, features_raw: np.ndarray) -> np.ndarray:
    """Model predictions for raw feature rows, mapped back to t/ha."""
    x = np.asarray(features_raw, dtype=np.float64)
    if model.normalization is not None:
        x = model.normalization.normalize_features(x)
    pred = predict(model.params, x)
    if model.normalization is not None:
        pred = model.normalization.denormalize_target(pred)
    return pred


def evaluate(model, test: Dataset) -> MetricsRow:
    """Score a trained model on a raw test split, in yield units."""
    if len(test) == 0:
        raise EmptyInputError("test dataset is empty")
    attrs = (
        model.normalization.attribute_names
        if model.normalization is not None
        else test.selected_attributes
    )
    x_raw = test.raw_matrix(attrs)
    y_raw = test.raw_targets()
    pred = predict_in_yield_units(model, x_raw)
    return MetricsRow(
        r=r_index(y_raw, pred),
        mae_pct=mae_percent(y_raw, pred),
        rmse=rmse(y_raw, pred),
        n=len(test),
    )
