"""Hybrid trainers: metaheuristic-assisted neural-network fitting.

Two pipelines are provided.  `train_ann_gwo` lets the wolf-pack optimizer
search the flat weight/bias box for a good starting point and then fine-tunes
it with backpropagation.  `train_ann_ica` runs the imperialist-competition
optimizer over the 4-dimensional meta-parameter box (hidden width, hidden and
output activation codes, learning rate), scoring each candidate by the
validation error of a short inner training run; the winner is re-trained with
the full budget.  `train_ica_weights` mirrors the weight-space pipeline with
the imperialist optimizer in phase 1, for completeness.

Every pipeline carves a chronological validation holdout from the training
data, fits min-max scaling on the training data only, and is fully
reproducible from `HybridConfig.seed`.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, replace

import numpy as np

from . import gwo as gwo_mod
from . import ica as ica_mod
from .data import Dataset, NormalizationStats, apply_normalization, normalize, temporal_holdout
from .errors import ConfigError, DivergenceError
from .gwo import GwoConfig
from .ica import IcaConfig
from .metrics import rmse
from .network import (
    Activation,
    NetworkParams,
    NetworkTopology,
    TrainHistory,
    init_params,
    mse_loss,
    predict,
    train_backprop,
)

# Search box for the meta-parameter country: hidden neurons in (1, 100),
# activation codes 1..5, learning rate in (0, 5].
HYPER_LOWER = np.array([2.0, 1.0, 1.0, 1e-4])
HYPER_UPPER = np.array([99.0, 5.0, 5.0, 5.0])

_TAG_OPTIMIZER = 101
_TAG_INIT = 102


def derive_seed(seed: int, tag: int) -> int:
    """Deterministic sub-stream seed for one pipeline stage."""
    return int(np.random.SeedSequence([seed, tag]).generate_state(1)[0])


@dataclass(frozen=True)
class HyperParams:
    """Decoded meta-parameters of one trainable network."""

    n_hidden: int
    hidden_activation: Activation
    output_activation: Activation
    learning_rate: float

    def __post_init__(self):
        if not 1 < self.n_hidden < 100:
            raise ConfigError(f"n_hidden must satisfy 1 < n < 100, got {self.n_hidden}")
        object.__setattr__(self, "hidden_activation", Activation(self.hidden_activation))
        object.__setattr__(self, "output_activation", Activation(self.output_activation))
        if not 0.0 < self.learning_rate <= 5.0:
            raise ConfigError(f"learning rate must lie in (0, 5], got {self.learning_rate}")

    def encode(self) -> np.ndarray:
        return np.array(
            [
                float(self.n_hidden),
                float(int(self.hidden_activation)),
                float(int(self.output_activation)),
                self.learning_rate,
            ]
        )

    def topology(self, n_inputs: int) -> NetworkTopology:
        return NetworkTopology(
            n_inputs, self.n_hidden, self.hidden_activation, self.output_activation
        )


def decode_country(position) -> HyperParams:
    """Map a continuous 4-vector onto valid meta-parameters.

    Counts and activation codes round half-up and clamp into range; the
    learning rate clamps into (0, 5] with floor 1e-4.  Already-integral
    in-range vectors are fixed points.
    """
    position = np.asarray(position, dtype=np.float64)
    if position.shape != (4,):
        raise ConfigError(f"expected a 4-vector, got shape {position.shape}")
    n_hidden = int(min(99, max(2, math.floor(position[0] + 0.5))))
    hidden_act = int(min(5, max(1, math.floor(position[1] + 0.5))))
    output_act = int(min(5, max(1, math.floor(position[2] + 0.5))))
    lr = float(min(5.0, max(1e-4, position[3])))
    return HyperParams(n_hidden, Activation(hidden_act), Activation(output_act), lr)


@dataclass(frozen=True)
class Provenance:
    method: str
    seed: int
    config_digest: str


@dataclass(frozen=True)
class TrainedModel:
    """A fitted network plus everything needed to score and reproduce it."""

    params: NetworkParams
    hyper: HyperParams
    normalization: NormalizationStats | None
    provenance: Provenance
    initial_params: np.ndarray
    phase1_cost: float | None
    history: TrainHistory

    def __post_init__(self):
        topo = self.params.topology
        if (
            topo.n_hidden != self.hyper.n_hidden
            or topo.hidden_activation != self.hyper.hidden_activation
            or topo.output_activation != self.hyper.output_activation
        ):
            raise ConfigError(
                f"params topology {topo} does not match hyper-parameters {self.hyper}"
            )


@dataclass
class HybridConfig:
    """Budgets and knobs shared by the hybrid pipelines."""

    optimizer: GwoConfig | IcaConfig
    inner_epochs: int = 200
    inner_patience: int = 20
    final_epochs: int = 1000
    final_patience: int = 50
    val_fraction: float = 0.2
    weight_bound: float = 5.0
    learning_rate: float = 0.5
    init_scale: float = 0.5
    seed: int = 0

    def validate(self) -> None:
        if not 0.0 < self.val_fraction < 1.0:
            raise ConfigError(f"val_fraction must lie in (0, 1), got {self.val_fraction}")
        if self.weight_bound <= 0:
            raise ConfigError(f"weight_bound must be > 0, got {self.weight_bound}")
        if not 0.0 < self.learning_rate <= 5.0:
            raise ConfigError(f"learning_rate must lie in (0, 5], got {self.learning_rate}")
        if self.init_scale <= 0:
            raise ConfigError(f"init_scale must be > 0, got {self.init_scale}")
        if self.inner_epochs < 0:
            raise ConfigError(f"inner_epochs must be >= 0, got {self.inner_epochs}")
        if self.final_epochs < 1:
            raise ConfigError(f"final_epochs must be >= 1, got {self.final_epochs}")

    def digest(self) -> str:
        return hashlib.sha256(repr(self).encode()).hexdigest()[:12]


def _prepare(train: Dataset, config: HybridConfig):
    """Holdout split and scaling shared by every pipeline."""
    fit, val = temporal_holdout(train, config.val_fraction)
    _, stats = normalize(train)
    fit_n = apply_normalization(fit, stats)
    val_n = apply_normalization(val, stats)
    return fit_n, val_n, stats


def ann_ica_fitness(
    position,
    train: Dataset,
    val: Dataset,
    *,
    epochs: int,
    patience: int,
    init_scale: float = 0.5,
    seed: int = 0,
) -> float:
    """Validation RMSE of a candidate meta-parameter vector.

    Decodes the candidate, trains a freshly seeded network by backprop under
    the given budget, and scores it on the validation split.  Zero epochs
    score the untrained network.  Divergent runs are penalized with +inf.
    Deterministic given (position, datasets, budget, seed).
    """
    hyper = decode_country(position)
    topo = hyper.topology(len(train.selected_attributes))
    params = init_params(topo, derive_seed(seed, _TAG_INIT), init_scale)
    x_train, y_train = train.feature_matrix(), train.targets()
    x_val, y_val = val.feature_matrix(), val.targets()
    if epochs > 0:
        try:
            params, _ = train_backprop(
                params,
                (x_train, y_train),
                (x_val, y_val),
                lr=hyper.learning_rate,
                max_epochs=epochs,
                patience=patience,
            )
        except DivergenceError:
            return float("inf")
    value = rmse(y_val, predict(params, x_val))
    return value if np.isfinite(value) else float("inf")


def train_ann_ica(train: Dataset, config: HybridConfig) -> TrainedModel:
    """Meta-parameter search with the imperialist optimizer, then re-train.

    The optimizer walks the 4-D meta-parameter box scoring candidates via
    `ann_ica_fitness`; the best decoded candidate is re-trained on the
    training split with the final budget.
    """
    config.validate()
    if not isinstance(config.optimizer, IcaConfig):
        raise ConfigError("train_ann_ica requires an IcaConfig optimizer")
    fit_n, val_n, stats = _prepare(train, config)

    opt = replace(
        config.optimizer,
        lower_bounds=(
            config.optimizer.lower_bounds
            if config.optimizer.lower_bounds is not None
            else HYPER_LOWER.copy()
        ),
        upper_bounds=(
            config.optimizer.upper_bounds
            if config.optimizer.upper_bounds is not None
            else HYPER_UPPER.copy()
        ),
        seed=derive_seed(config.seed, _TAG_OPTIMIZER),
    )

    def fitness(position):
        return ann_ica_fitness(
            position,
            fit_n,
            val_n,
            epochs=config.inner_epochs,
            patience=config.inner_patience,
            init_scale=config.init_scale,
            seed=config.seed,
        )

    best, _ = ica_mod.optimize(fitness, opt)
    hyper = decode_country(best.position)
    topo = hyper.topology(len(train.selected_attributes))
    start = init_params(topo, derive_seed(config.seed, _TAG_INIT), config.init_scale)
    params, history = train_backprop(
        start,
        (fit_n.feature_matrix(), fit_n.targets()),
        (val_n.feature_matrix(), val_n.targets()),
        lr=hyper.learning_rate,
        max_epochs=config.final_epochs,
        patience=config.final_patience,
    )
    return TrainedModel(
        params=params,
        hyper=hyper,
        normalization=stats,
        provenance=Provenance("ANN-ICA", config.seed, config.digest()),
        initial_params=start.values.copy(),
        phase1_cost=best.cost,
        history=history,
    )


def _finish_weight_pipeline(
    method: str,
    train_mse_start: float | None,
    start_values: np.ndarray,
    topology: NetworkTopology,
    fit_n: Dataset,
    val_n: Dataset,
    stats: NormalizationStats,
    config: HybridConfig,
) -> TrainedModel:
    """Phase 2 shared by the weight-space pipelines: backprop fine-tuning."""
    start = NetworkParams(topology, start_values.copy())
    params, history = train_backprop(
        start,
        (fit_n.feature_matrix(), fit_n.targets()),
        (val_n.feature_matrix(), val_n.targets()),
        lr=config.learning_rate,
        max_epochs=config.final_epochs,
        patience=config.final_patience,
    )
    hyper = HyperParams(
        topology.n_hidden,
        topology.hidden_activation,
        topology.output_activation,
        config.learning_rate,
    )
    return TrainedModel(
        params=params,
        hyper=hyper,
        normalization=stats,
        provenance=Provenance(method, config.seed, config.digest()),
        initial_params=start_values.copy(),
        phase1_cost=train_mse_start,
        history=history,
    )


def _weight_space_loss(topology: NetworkTopology, x: np.ndarray, y: np.ndarray):
    def loss(values):
        return mse_loss(NetworkParams(topology, values), x, y)

    return loss


def train_ann_gwo(
    train: Dataset, topology: NetworkTopology, config: HybridConfig
) -> TrainedModel:
    """Wolf-pack search over the weight box, then backprop fine-tuning.

    Phase 1 minimizes training MSE over [-w, +w]^P; phase 2 starts backprop
    from the incumbent vector (bit-for-bit) with validation early stopping.
    """
    config.validate()
    if not isinstance(config.optimizer, GwoConfig):
        raise ConfigError("train_ann_gwo requires a GwoConfig optimizer")
    fit_n, val_n, stats = _prepare(train, config)
    x_fit, y_fit = fit_n.feature_matrix(), fit_n.targets()

    w = config.weight_bound
    box = np.full(topology.param_count, w)
    opt = replace(
        config.optimizer,
        lower_bounds=-box,
        upper_bounds=box,
        seed=derive_seed(config.seed, _TAG_OPTIMIZER),
    )
    best, _ = gwo_mod.optimize(_weight_space_loss(topology, x_fit, y_fit), opt)
    return _finish_weight_pipeline(
        "ANN-GWO", best.fitness, best.position, topology, fit_n, val_n, stats, config
    )


def train_ica_weights(
    train: Dataset, topology: NetworkTopology, config: HybridConfig
) -> TrainedModel:
    """Weight-space variant with the imperialist optimizer in phase 1."""
    config.validate()
    if not isinstance(config.optimizer, IcaConfig):
        raise ConfigError("train_ica_weights requires an IcaConfig optimizer")
    fit_n, val_n, stats = _prepare(train, config)
    x_fit, y_fit = fit_n.feature_matrix(), fit_n.targets()

    w = config.weight_bound
    box = np.full(topology.param_count, w)
    opt = replace(
        config.optimizer,
        lower_bounds=-box,
        upper_bounds=box,
        seed=derive_seed(config.seed, _TAG_OPTIMIZER),
    )
    best, _ = ica_mod.optimize(_weight_space_loss(topology, x_fit, y_fit), opt)
    return _finish_weight_pipeline(
        "ANN-ICA-W", best.cost, best.position, topology, fit_n, val_n, stats, config
    )


def train_plain_backprop(
    train: Dataset, topology: NetworkTopology, config: HybridConfig
) -> TrainedModel:
    """Baseline: backprop from a seeded random initialization, no phase 1."""
    config.validate()
    fit_n, val_n, stats = _prepare(train, config)
    start = init_params(topology, derive_seed(config.seed, _TAG_INIT), config.init_scale)
    return _finish_weight_pipeline(
        "BACKPROP", None, start.values, topology, fit_n, val_n, stats, config
    )
