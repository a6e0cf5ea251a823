
import numpy as np
import pytest

from hybridyield.cli import cli_main
from hybridyield.data import SplitSpec, load_csv
from hybridyield.errors import ConfigError
from hybridyield.experiments import (
    AttributeReport,
    ExperimentConfig,
    MethodConfig,
    SynthesizeSpec,
    attribute_effects,
    config_from_toml,
    emit_plot_data,
    load_dataset,
    run_comparison,
    write_attributes_csv,
)

GWO_METHOD = dict(
    name="ann-gwo",
    kind="ann-gwo",
    n_hidden=6,
    pop_size=8,
    num_iter=6,
    final_epochs=80,
    final_patience=15,
    learning_rate=0.5,
)
ICA_METHOD = dict(
    name="ann-ica",
    kind="ann-ica",
    n_countries=8,
    n_imperialists=2,
    max_decades=2,
    inner_epochs=25,
    inner_patience=5,
    final_epochs=80,
    final_patience=15,
    hyper_lower=[2.0, 1.0, 1.0, 1e-4],
    hyper_upper=[10.0, 5.0, 5.0, 1.0],
)


def tiny_config(**kw):
    base = dict(
        methods=[MethodConfig(**GWO_METHOD), MethodConfig(**ICA_METHOD)],
        split=SplitSpec(),
        synthesize_spec=SynthesizeSpec(seed=3, n_per_crop=3, noise_sd=0.1),
        crops=["wheat"],
        seeds=[0],
        permutation_repeats=2,
    )
    base.update(kw)
    return ExperimentConfig(**base)


def test_comparison_shape_one_crop_two_methods():
    report = run_comparison(tiny_config())
    assert len(report.cells) == 2
    assert set(report.averages) == {"ann-gwo", "ann-ica"}
    for cell in report.cells.values():
        assert cell.row is not None
        assert cell.row.n > 0


def test_comparison_tie_break_flags_first_method():
    twin_a = MethodConfig(**{**GWO_METHOD, "name": "m1"})
    twin_b = MethodConfig(**{**GWO_METHOD, "name": "m2"})
    report = run_comparison(tiny_config(methods=[twin_a, twin_b]))
    row_a = report.cells[("wheat", "m1")].row
    row_b = report.cells[("wheat", "m2")].row
    assert row_a == row_b
    for metric in ("r", "mae_pct", "rmse"):
        assert report.best[("wheat", metric)] == "m1"


def test_comparison_averages_are_means_of_crop_rows():
    config = tiny_config(crops=["wheat", "barley"])
    report = run_comparison(config)
    for name in report.methods:
        rows = [report.cells[(crop, name)].row for crop in report.crops]
        assert report.averages[name]["r"] == pytest.approx(
            np.mean([r.r for r in rows]), abs=1e-9
        )
        assert report.averages[name]["rmse"] == pytest.approx(
            np.mean([r.rmse for r in rows]), abs=1e-9
        )


def test_comparison_exactly_one_best_flag_per_crop_metric():
    report = run_comparison(tiny_config(crops=["wheat", "potato"]))
    for crop in report.crops:
        for metric in ("r", "mae_pct", "rmse"):
            assert report.best[(crop, metric)] in report.methods


def test_comparison_learns_noiseless_generator():
    config = tiny_config(
        synthesize_spec=SynthesizeSpec(seed=9, n_per_crop=6, noise_sd=0.0),
        seeds=[0, 1, 2, 3, 4],
    )
    report = run_comparison(config)
    best_r = max(cell.row.r for cell in report.cells.values())
    assert best_r > 0.9


def test_comparison_marks_failed_rows_and_continues():
    # an identity-activation net fine-tuned at lr 5 from a +-500 weight box
    # overflows within a few epochs
    bad = MethodConfig(
        **{
            **GWO_METHOD,
            "name": "bad",
            "learning_rate": 5.0,
            "weight_bound": 500.0,
            "hidden_activation": 1,
            "output_activation": 1,
        }
    )
    good = MethodConfig(**{**GWO_METHOD, "name": "good"})
    report = run_comparison(tiny_config(methods=[bad, good]))
    assert report.cells[("wheat", "bad")].row is None
    assert report.cells[("wheat", "bad")].error
    assert report.cells[("wheat", "good")].row is not None
    assert "bad" not in report.averages


def test_attribute_report_complete_and_graded():
    report = attribute_effects(tiny_config())
    grades = [report.grades[("wheat", "ann-gwo", a)] for a in
              ("at1", "at2", "at3", "at4", "at5", "at6", "at7")]
    assert len(grades) == 7
    assert all(0 <= g <= 3 for g in grades)
    assert sorted(grades) == [0, 0, 1, 1, 2, 2, 3]  # rank quartiles of 7 values


def test_attribute_report_deterministic():
    a = attribute_effects(tiny_config())
    b = attribute_effects(tiny_config())
    assert a.grades == b.grades
    assert a.importance == b.importance


def test_attribute_report_single_attribute_degenerates_with_warning():
    config = tiny_config(attributes=("at2",))
    with pytest.warns(UserWarning, match="single-attribute"):
        report = attribute_effects(config)
    assert all(g == 0 for g in report.grades.values())


def test_attribute_grades_insensitive_to_target_rescaling():
    report = attribute_effects(tiny_config())
    ordering = sorted(
        ("wheat", "ann-gwo", a) for a in ("at1", "at2", "at3", "at4", "at5", "at6", "at7")
    )
    # grades are a pure function of the importance ordering
    values = [report.importance[k] for k in ordering]
    grades = [report.grades[k] for k in ordering]
    rank = np.argsort(np.argsort(values, kind="stable"), kind="stable")
    assert grades == [int(r) * 4 // 7 for r in rank]


def test_emit_plot_data_shape_and_values(tmp_path):
    config = tiny_config(crops=["wheat", "barley", "potato", "sugar_beet"])
    report = run_comparison(config)
    out = tmp_path / "fig2.csv"
    emit_plot_data(report, out)
    lines = out.read_text().strip().split("\n")
    assert lines[0].startswith("#")
    assert lines[1] == "crop,method,r"
    assert len(lines) == 2 + 4 * 2
    for line in lines[2:]:
        crop, method, r = line.split(",")
        assert float(r) == float(format(report.cells[(crop, method)].row.r, ".9g"))


def test_emit_plot_data_empty_report_warns(tmp_path):
    from hybridyield.experiments import ComparisonReport

    empty = ComparisonReport([], [], {}, {}, {})
    out = tmp_path / "fig2.csv"
    with pytest.warns(UserWarning, match="empty"):
        emit_plot_data(empty, out)
    assert len(out.read_text().strip().split("\n")) == 2


def test_attribute_policy_search_reduces_attributes():
    config = tiny_config(attribute_policy="search")
    report = run_comparison(config)
    assert all(cell.row is not None for cell in report.cells.values())


TOML = """
out_dir = "{out_dir}"
seeds = [0]
crops = ["wheat", "barley"]

[dataset.synthesize]
seed = 3
n_per_crop = 3
noise_sd = 0.1

[split]
train_years = [1999, 2004]
test_years = [2005, 2006]

[[method]]
name = "ann-gwo"
kind = "ann-gwo"
n_hidden = 6
pop_size = 8
num_iter = 6
final_epochs = 80
final_patience = 15
learning_rate = 0.5

[[method]]
name = "ann-ica"
kind = "ann-ica"
n_countries = 8
n_imperialists = 2
max_decades = 2
inner_epochs = 25
inner_patience = 5
final_epochs = 80
final_patience = 15
hyper_lower = [2.0, 1.0, 1.0, 1e-4]
hyper_upper = [10.0, 5.0, 5.0, 1.0]
"""


@pytest.fixture()
def toml_config(tmp_path):
    out_dir = tmp_path / "results"
    path = tmp_path / "experiment.toml"
    path.write_text(TOML.format(out_dir=out_dir), encoding="utf-8")
    return path, out_dir


def test_config_from_toml_round_trip(toml_config):
    path, out_dir = toml_config
    config = config_from_toml(path)
    config.validate()
    assert [m.name for m in config.methods] == ["ann-gwo", "ann-ica"]
    assert config.crops == ["wheat", "barley"]
    assert config.split.train_years == (1999, 2004)
    assert config.out_dir == str(out_dir)


def test_config_from_toml_rejects_unknown_keys(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("out_dir = 'x'\nbogus_key = 1\n[[method]]\nname='m'\nkind='backprop'\n")
    with pytest.raises(ConfigError, match="bogus_key"):
        config_from_toml(path)


def test_cli_synthesize_round_trip(tmp_path, capsys):
    out = tmp_path / "d.csv"
    code = cli_main(["synthesize", "--seed", "7", "--out", str(out)])
    assert code == 0
    assert "RESULT command=synthesize" in capsys.readouterr().out
    ds = load_csv(out)  # zero rejects under the fail policy
    assert len(ds) == 4 * 8 * 12


def test_cli_unknown_flag_exits_2(capsys):
    assert cli_main(["synthesize", "--bogus", "x"]) == 2


def test_cli_unknown_command_exits_2(capsys):
    assert cli_main(["frobnicate"]) == 2


def test_cli_compare_writes_all_reports(toml_config, capsys):
    path, out_dir = toml_config
    code = cli_main(["compare", "--config", str(path)])
    assert code == 0
    for name in (
        "comparison.csv",
        "comparison.txt",
        "attributes.csv",
        "fig2_data.csv",
        "manifest.txt",
    ):
        assert (out_dir / name).exists(), name
    out = capsys.readouterr().out
    assert "RESULT command=compare status=ok" in out
    manifest = (out_dir / "manifest.txt").read_text()
    assert "config_digest=" in manifest and "seeds=0" in manifest


def test_cli_compare_crop_filter(toml_config, capsys):
    path, out_dir = toml_config
    code = cli_main(["compare", "--config", str(path), "--crops", "wheat"])
    assert code == 0
    rows = (out_dir / "comparison.csv").read_text().strip().split("\n")[1:]
    data_rows = [r for r in rows if not r.startswith("average")]
    assert all(r.startswith("wheat,") for r in data_rows)


def test_cli_compare_method_filter(toml_config):
    path, out_dir = toml_config
    code = cli_main(
        ["compare", "--config", str(path), "--method", "ann-gwo", "--crops", "wheat"]
    )
    assert code == 0
    rows = (out_dir / "comparison.csv").read_text().strip().split("\n")[1:]
    assert all(",ann-gwo," in r for r in rows)


def test_cli_compare_bad_config_exits_1(tmp_path, capsys):
    path = tmp_path / "bad.toml"
    path.write_text("out_dir = 'x'\nseeds = []\n[[method]]\nname='m'\nkind='backprop'\n")
    assert cli_main(["compare", "--config", str(path)]) == 1
    assert "config error" in capsys.readouterr().err


def test_cli_plot_data_from_comparison(toml_config, capsys):
    path, out_dir = toml_config
    assert cli_main(["compare", "--config", str(path), "--crops", "wheat"]) == 0
    fig2 = out_dir / "fig2_again.csv"
    code = cli_main(
        ["plot-data", "--in", str(out_dir / "comparison.csv"), "--out", str(fig2)]
    )
    assert code == 0
    assert fig2.read_text() == (out_dir / "fig2_data.csv").read_text()


def test_cli_attributes_subcommand(toml_config):
    path, out_dir = toml_config
    code = cli_main(["attributes", "--config", str(path), "--crops", "wheat"])
    assert code == 0
    lines = (out_dir / "attributes.csv").read_text().strip().split("\n")
    assert lines[0] == "crop,method,attribute,importance,grade"
    assert len(lines) == 1 + 2 * 7  # two methods, seven attributes


def test_attributes_csv_writer(tmp_path):
    report = AttributeReport(
        crops=["wheat"],
        methods=["m"],
        importance={("wheat", "m", a): float(i) for i, a in enumerate(
            ("at1", "at2", "at3", "at4", "at5", "at6", "at7"))},
        grades={("wheat", "m", a): i * 4 // 7 for i, a in enumerate(
            ("at1", "at2", "at3", "at4", "at5", "at6", "at7"))},
    )
    path = tmp_path / "attrs.csv"
    write_attributes_csv(report, path)
    lines = path.read_text().strip().split("\n")
    assert len(lines) == 8
    assert lines[1] == "wheat,m,at1,0,0"


def test_load_dataset_applies_attribute_selection():
    config = tiny_config(attributes=("at2", "at3"))
    ds = load_dataset(config)
    assert ds.selected_attributes == ("at2", "at3")
