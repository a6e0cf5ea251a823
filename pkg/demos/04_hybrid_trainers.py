"""Train both hybrid pipelines on synthetic wheat data and compare them.

ANN-GWO: the wolf pack searches the flat weight/bias box for a good starting
point, then backpropagation fine-tunes it.  ANN-ICA: the imperialist
competition searches the meta-parameter box (hidden width, activation codes,
learning rate), scoring candidates by the validation error of short inner
training runs.
"""

import numpy as np

from hybridyield.data import SplitSpec, split_by_year, synthesize
from hybridyield.gwo import GwoConfig
from hybridyield.hybrid import HybridConfig, train_ann_gwo, train_ann_ica
from hybridyield.ica import IcaConfig
from hybridyield.metrics import evaluate
from hybridyield.network import Activation, NetworkTopology

dataset = synthesize(seed=11, n_per_crop=10, noise_sd=0.15)
wheat = dataset.filter_crop("wheat")
train, test = split_by_year(wheat, SplitSpec())
print(f"wheat rows: {len(train)} train (1999-2004), {len(test)} test (2005-2006)")

topology = NetworkTopology(7, 8, Activation.TANH, Activation.IDENTITY)
gwo_model = train_ann_gwo(
    train,
    topology,
    HybridConfig(
        optimizer=GwoConfig(pop_size=15, num_iter=30),
        weight_bound=2.0,
        learning_rate=0.2,
        final_epochs=600,
        final_patience=80,
        seed=0,
    ),
)
print(f"ANN-GWO: weight-search MSE {gwo_model.phase1_cost:.4f}, "
      f"fine-tuned over {gwo_model.history.stopped_epoch} epochs")

ica_model = train_ann_ica(
    train,
    HybridConfig(
        optimizer=IcaConfig(
            n_countries=14,
            n_imperialists=3,
            max_decades=6,
            lower_bounds=np.array([2.0, 1.0, 1.0, 1e-4]),
            upper_bounds=np.array([20.0, 5.0, 5.0, 1.5]),
        ),
        inner_epochs=60,
        inner_patience=10,
        final_epochs=600,
        final_patience=80,
        seed=0,
    ),
)
h = ica_model.hyper
print(f"ANN-ICA selected: {h.n_hidden} hidden neurons, "
      f"{h.hidden_activation.name.lower()} / {h.output_activation.name.lower()}, "
      f"learning rate {h.learning_rate:.3f}")

print(f"\n{'method':<10}{'R':>8}{'MAE (%)':>10}{'RMSE':>8}")
for name, model in (("ANN-GWO", gwo_model), ("ANN-ICA", ica_model)):
    row = evaluate(model, test)
    print(f"{name:<10}{row.r:>8.3f}{row.mae_pct:>10.2f}{row.rmse:>8.3f}")
