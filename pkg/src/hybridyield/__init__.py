"""Hybrid metaheuristic-trained neural networks for crop-yield regression."""

__version__ = "0.1.0"

from .data import (
    ATTRIBUTE_NAMES,
    CropRecord,
    Dataset,
    NormalizationStats,
    SplitSpec,
    load_csv,
    export_csv,
    normalize,
    split_by_year,
    summarize,
    synthesize,
)
from .gwo import GwoConfig
from .hybrid import (
    HybridConfig,
    HyperParams,
    TrainedModel,
    decode_country,
    train_ann_gwo,
    train_ann_ica,
    train_ica_weights,
    train_plain_backprop,
)
from .ica import IcaConfig
from .metrics import MetricsRow, evaluate, mae, mae_percent, r_index, rmse
from .network import (
    Activation,
    NetworkParams,
    NetworkTopology,
    forward,
    gradient,
    init_params,
    predict,
    train_backprop,
)

__all__ = [
    "ATTRIBUTE_NAMES",
    "Activation",
    "CropRecord",
    "Dataset",
    "GwoConfig",
    "HybridConfig",
    "HyperParams",
    "IcaConfig",
    "MetricsRow",
    "NetworkParams",
    "NetworkTopology",
    "NormalizationStats",
    "SplitSpec",
    "TrainedModel",
    "decode_country",
    "evaluate",
    "export_csv",
    "forward",
    "gradient",
    "init_params",
    "load_csv",
    "mae",
    "mae_percent",
    "normalize",
    "predict",
    "r_index",
    "rmse",
    "split_by_year",
    "summarize",
    "synthesize",
    "train_ann_gwo",
    "train_ann_ica",
    "train_backprop",
    "train_ica_weights",
    "train_plain_backprop",
]
