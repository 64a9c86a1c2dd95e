import subprocess
import sys

import pytest

import saberpro_cart as sc
from saberpro_cart.cli import main


def run_cli(capsys, *argv):
    capsys.readouterr()  # drop anything printed by fixtures
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture()
def trained_model_path(tmp_path, sample_csv_path):
    out = tmp_path / "sample.model"
    code = main(
        [
            "train",
            "--data",
            sample_csv_path,
            "--label-column",
            "punt_global",
            "--max-depth",
            "4",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    return out


# ----------------------------------------------------------------- subcommands


def test_train_writes_model(capsys, tmp_path, sample_csv_path):
    out = tmp_path / "m.model"
    code, stdout, _ = run_cli(
        capsys,
        "train",
        "--data",
        sample_csv_path,
        "--label-column",
        "punt_global",
        "--out",
        str(out),
    )
    assert code == 0
    assert "trained on 240 rows" in stdout
    model = sc.load_model(out)
    assert model.trained_rows == 240
    assert model.max_depth == sc.DEFAULT_MAX_DEPTH


def test_predict_output_format(capsys, tmp_path, sample_csv_path, trained_model_path):
    out = tmp_path / "pred.csv"
    code, stdout, _ = run_cli(
        capsys,
        "predict",
        "--model",
        str(trained_model_path),
        "--data",
        sample_csv_path,
        "--out",
        str(out),
    )
    assert code == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "row_index,p_success,predicted_label"
    assert len(lines) == 241
    idx, p, lab = lines[1].split(",")
    assert idx == "0"
    assert len(p.split(".")[1]) == 6  # six decimals, always
    assert lab in (sc.SUCCESSFUL, sc.UNSUCCESSFUL)


def test_predict_agrees_with_library(tmp_path, sample_csv_path, trained_model_path):
    out = tmp_path / "pred.csv"
    main(
        [
            "predict",
            "--model",
            str(trained_model_path),
            "--data",
            sample_csv_path,
            "--out",
            str(out),
        ]
    )
    model = sc.load_model(trained_model_path)
    ps = sc.classify_dataset(model, sc.load_csv(sample_csv_path))
    for line in out.read_text().strip().split("\n")[1:]:
        i, p, lab = line.split(",")
        assert p == f"{ps[int(i)]:.6f}"
        assert lab == sc.predict(ps[int(i)])


def test_evaluate_prints_report(capsys, sample_csv_path):
    code, stdout, _ = run_cli(
        capsys,
        "evaluate",
        "--data",
        sample_csv_path,
        "--label-column",
        "punt_global",
        "--max-depth",
        "4",
    )
    assert code == 0
    assert "rows: 240  train: 168  test: 72" in stdout
    assert "accuracy: 0." in stdout
    assert "confusion: tp=" in stdout


def test_print_renders_tree(capsys, trained_model_path):
    code, stdout, _ = run_cli(capsys, "print", "--model", str(trained_model_path))
    assert code == 0
    assert "?" in stdout and "Leaf p=" in stdout
    assert "\x1b" not in stdout


def test_print_color_flag(capsys, trained_model_path):
    code, stdout, _ = run_cli(
        capsys, "print", "--model", str(trained_model_path), "--color"
    )
    assert code == 0
    assert "\x1b[32m" in stdout or "\x1b[31m" in stdout


def test_importance_descending(capsys, trained_model_path):
    code, stdout, _ = run_cli(capsys, "importance", "--model", str(trained_model_path))
    assert code == 0
    weights = []
    for line in stdout.strip().split("\n"):
        name, w = line.rsplit(" ", 1)
        weights.append(float(w))
    assert weights == sorted(weights, reverse=True)
    assert abs(sum(weights) - 1.0) < 1e-5  # printed at 6 decimals


def test_bench_writes_csv(capsys, tmp_path, sample_csv_path):
    out = tmp_path / "bench.csv"
    code, stdout, _ = run_cli(
        capsys,
        "bench",
        "--data",
        sample_csv_path,
        "--label-column",
        "punt_global",
        "--depths",
        "2,4",
        "--out",
        str(out),
    )
    assert code == 0
    assert "depth" in stdout and "train_seconds" in stdout
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "depth,train_seconds,test_seconds,model_bytes"
    assert len(lines) == 3


def test_bench_compare_backends(capsys, tmp_path, sample_csv_path):
    out = tmp_path / "bench.csv"
    code, stdout, _ = run_cli(
        capsys,
        "bench",
        "--data",
        sample_csv_path,
        "--label-column",
        "punt_global",
        "--depths",
        "2",
        "--out",
        str(out),
        "--compare-backends",
    )
    assert code == 0
    for name in sc.available_backends():
        assert f"backend: {name}" in stdout


def test_synth_subcommand(capsys, tmp_path):
    out = tmp_path / "synth.csv"
    code, stdout, _ = run_cli(
        capsys,
        "synth",
        "--rows",
        "60",
        "--planted-depth",
        "2",
        "--noise",
        "0.1",
        "--seed",
        "3",
        "--out",
        str(out),
    )
    assert code == 0
    assert "wrote 60 rows" in stdout
    d = sc.load_csv(out)
    assert (d.n_rows, d.n_cols) == (60, 10)


def test_train_with_ignore_flag(capsys, tmp_path, sample_csv_path):
    out = tmp_path / "m.model"
    code, _, _ = run_cli(
        capsys,
        "train",
        "--data",
        sample_csv_path,
        "--label-column",
        "punt_global",
        "--ignore",
        "estu_genero,fami_estrato",
        "--out",
        str(out),
    )
    assert code == 0
    names = {c.name for c in sc.load_model(out).schema.columns}
    assert "estu_genero" not in names and "fami_estrato" not in names


# ------------------------------------------------------------------ exit codes


def test_unknown_subcommand_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "frobnicate")
    assert code == 1
    assert "usage error" in err


def test_no_arguments_is_usage_error(capsys):
    code, _, err = run_cli(capsys)
    assert code == 1


def test_unknown_flag_is_usage_error(capsys, sample_csv_path):
    code, _, err = run_cli(
        capsys, "train", "--data", sample_csv_path, "--wat", "x"
    )
    assert code == 1
    assert "usage error" in err


def test_bad_test_fraction_is_usage_error(capsys, sample_csv_path):
    code, _, err = run_cli(
        capsys,
        "evaluate",
        "--data",
        sample_csv_path,
        "--label-column",
        "punt_global",
        "--test-fraction",
        "1.5",
    )
    assert code == 1


def test_bad_depths_list_is_usage_error(capsys, sample_csv_path):
    code, _, err = run_cli(
        capsys,
        "bench",
        "--data",
        sample_csv_path,
        "--label-column",
        "punt_global",
        "--depths",
        "3,x",
    )
    assert code == 1


def test_missing_data_file_is_data_error(capsys, tmp_path):
    code, _, err = run_cli(
        capsys,
        "train",
        "--data",
        str(tmp_path / "nope.csv"),
        "--label-column",
        "x",
        "--out",
        str(tmp_path / "m.model"),
    )
    assert code == 2
    assert "error:" in err


def test_bad_label_column_is_data_error(capsys, sample_csv_path, tmp_path):
    code, _, err = run_cli(
        capsys,
        "train",
        "--data",
        sample_csv_path,
        "--label-column",
        "no_such_col",
        "--out",
        str(tmp_path / "m.model"),
    )
    assert code == 2


def test_predict_schema_mismatch_is_data_error(
    capsys, tmp_path, trained_model_path
):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    code, _, err = run_cli(
        capsys,
        "predict",
        "--model",
        str(trained_model_path),
        "--data",
        str(bad),
        "--out",
        str(tmp_path / "p.csv"),
    )
    assert code == 2
    assert "error:" in err


def test_corrupt_model_is_data_error(capsys, tmp_path, sample_csv_path):
    bad = tmp_path / "bad.model"
    bad.write_text("saberpro-cart v1\nmeta nonsense\n")
    code, _, err = run_cli(capsys, "print", "--model", str(bad))
    assert code == 2


def test_synth_bad_noise_is_usage_error(capsys, tmp_path):
    code, _, err = run_cli(
        capsys,
        "synth",
        "--rows",
        "50",
        "--noise",
        "0.7",
        "--out",
        str(tmp_path / "s.csv"),
    )
    assert code == 1


# --------------------------------------------------------------- end to end


def test_train_predict_deterministic(tmp_path, sample_csv_path):
    outs = []
    for tag in ("a", "b"):
        model_p = tmp_path / f"{tag}.model"
        pred_p = tmp_path / f"{tag}.csv"
        assert (
            main(
                [
                    "train",
                    "--data",
                    sample_csv_path,
                    "--label-column",
                    "punt_global",
                    "--max-depth",
                    "5",
                    "--out",
                    str(model_p),
                ]
            )
            == 0
        )
        assert (
            main(
                [
                    "predict",
                    "--model",
                    str(model_p),
                    "--data",
                    sample_csv_path,
                    "--out",
                    str(pred_p),
                ]
            )
            == 0
        )
        outs.append((model_p.read_bytes(), pred_p.read_bytes()))
    assert outs[0] == outs[1]


def test_module_entry_point_subprocess(tmp_path, sample_csv_path):
    out = tmp_path / "m.model"
    r = subprocess.run(
        [
            sys.executable,
            "-m",
            "saberpro_cart",
            "train",
            "--data",
            sample_csv_path,
            "--label-column",
            "punt_global",
            "--out",
            str(out),
        ],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 0, r.stderr
    assert out.exists()
    r2 = subprocess.run(
        [sys.executable, "-m", "saberpro_cart", "print", "--model", str(out)],
        capture_output=True,
        text=True,
    )
    assert r2.returncode == 0
    assert "Leaf p=" in r2.stdout
