"""Run the whole experiment pipeline end to end through the CLI.

Writes a config, synthesizes a dataset, trains both methods per crop, and
emits the full report set.  Running it twice with the same seed produces
byte-identical report files.
"""

import pathlib
import tempfile

from hybridyield.cli import cli_main

CONFIG = """
out_dir = "{out_dir}"
seeds = [0, 1]
crops = ["wheat", "potato"]
permutation_repeats = 3

[dataset.synthesize]
seed = 11
n_per_crop = 6
noise_sd = 0.15

[split]
train_years = [1999, 2004]
test_years = [2005, 2006]

[[method]]
name = "ann-ica"
kind = "ann-ica"
n_countries = 10
n_imperialists = 3
max_decades = 3
inner_epochs = 40
inner_patience = 8
final_epochs = 200
final_patience = 30
hyper_lower = [2.0, 1.0, 1.0, 1e-4]
hyper_upper = [16.0, 5.0, 5.0, 1.5]

[[method]]
name = "ann-gwo"
kind = "ann-gwo"
n_hidden = 8
pop_size = 12
num_iter = 20
weight_bound = 2.0
learning_rate = 0.2
final_epochs = 200
final_patience = 30
"""

workdir = pathlib.Path(tempfile.mkdtemp(prefix="hybridyield-demo-"))
out_dir = workdir / "results"
config_path = workdir / "experiment.toml"
config_path.write_text(CONFIG.format(out_dir=out_dir), encoding="utf-8")

code = cli_main(["compare", "--config", str(config_path)])
print(f"\nexit code {code}; reports under {out_dir}:")
for name in sorted(p.name for p in out_dir.iterdir()):
    print(f"  {name}")

print("\n--- comparison.txt ---")
print((out_dir / "comparison.txt").read_text())
print("--- fig2_data.csv ---")
print((out_dir / "fig2_data.csv").read_text())
