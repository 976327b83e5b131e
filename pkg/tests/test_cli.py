import csv
import json
import numpy as np
import pytest
import yaml
from main import EXIT_INPUT_ERROR, EXIT_OK, QuboAlign
from quantum.hamiltonians import load_ising


def _run(*argv: str) -> int:
    return QuboAlign().run(list(argv))


def _read_csv(file) -> list[list[str]]:
    with open(file, "r", encoding="UTF-8") as stream:
        return list(csv.reader(stream))


def test_basis_dump(capsys):
    assert _run("basis", "--dump") == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 20
    first = json.loads(lines[0])
    assert first["label"] == "0.5*I"
    assert first["family"] == "I"
    assert first["matrix"] == [[0.5, 0.0], [0.0, 0.5]]


def test_basis_summary_3d(capsys):
    assert _run("basis", "--dim", "3") == EXIT_OK
    assert capsys.readouterr().out.startswith("3D basis, 80 elements")


@pytest.mark.parametrize("fmt, filename", [("coo", "P.coo"), ("csv", "P.csv")])
def test_build_writes_p_and_metadata(tmp_path, fmt, filename):
    ising = tmp_path / "ising" / "problem.ising"
    assert _run("build", "--out", str(tmp_path), "--format", fmt, "--ising", str(ising)) == EXIT_OK
    assert (tmp_path / filename).is_file()
    metadata = json.loads((tmp_path / "P.json").read_text(encoding="UTF-8"))
    assert metadata == {"dim": 2, "basisSize": 20, "N": 91, "M": 91, "linkDegree": 1, "clampedBit": 0}
    assert load_ising(str(ising)).size == 20
    if fmt == "coo":
        assert len((tmp_path / filename).read_text(encoding="UTF-8").splitlines()) == 21 * 22 // 2
    else:
        rows = _read_csv(tmp_path / filename)
        assert len(rows) == 22
        assert rows[0][0] == "q0"


def test_solve_prints_decoded_json(capsys):
    assert _run("solve", "--theta", "0") == EXIT_OK
    content = json.loads(capsys.readouterr().out)
    assert content["bits"] == "188888"
    assert content["degenerate"] is False
    assert content["metrics"]["e2d"] == pytest.approx(0.05)
    np.testing.assert_allclose(content["R_affine"], [[0.95, 0.0], [0.0, 0.95]], atol=1e-12)
    np.testing.assert_allclose(content["R_projected"], [[1.0, 0.0], [0.0, 1.0]], atol=1e-12)


def test_solve_with_annealing_trace(tmp_path, capsys):
    trace = tmp_path / "trace.csv"
    assert (
        _run(
            "solve",
            "--theta", "0.5",
            "--sampler", "sa",
            "--sweeps", "200",
            "--restarts", "4",
            "--trace", str(trace),
        )
        == EXIT_OK
    )
    content = json.loads(capsys.readouterr().out)
    rows = _read_csv(trace)
    assert rows[0] == ["step", "energy", "bits"]
    assert float(rows[-1][1]) == pytest.approx(content["energy"], rel=1e-9, abs=1e-9)


def test_spectrum_lists_degenerate_ground(capsys):
    assert _run("spectrum", "--theta", "0", "--levels", "3") == EXIT_OK
    rows = list(csv.reader(capsys.readouterr().out.splitlines()))
    assert rows[0] == ["energy", "multiplicity", "bits"]
    assert len(rows) == 4
    assert rows[1][1:] == ["56", "188888"]


def test_missing_dataset_is_an_input_error(tmp_path, capsys):
    assert _run("solve", "--dataset", str(tmp_path / "missing.txt")) == EXIT_INPUT_ERROR
    assert "missing.txt" in capsys.readouterr().err


def test_malformed_template_is_an_input_error(tmp_path):
    template = tmp_path / "template.txt"
    template.write_text("1 2\n3\n", encoding="UTF-8")
    assert _run("build", "--out", str(tmp_path), "--template", str(template)) == EXIT_INPUT_ERROR


def test_invalid_link_degree_is_an_input_error():
    assert _run("spectrum", "--mode", "psr", "--k", "0") == EXIT_INPUT_ERROR


def test_invalid_experiment_config_is_an_input_error(tmp_path):
    config = tmp_path / "config.yaml"
    config.write_text(yaml.safe_dump({"experiment": {"trials": 0}}), encoding="UTF-8")
    assert _run("bench", "misalign", "--config", str(config), "--out", str(tmp_path)) == EXIT_INPUT_ERROR


def test_bench_writes_rows(tmp_path):
    config = tmp_path / "config.yaml"
    config.write_text(yaml.safe_dump({"experiment": {"trials": 2, "link_degrees": [1]}}), encoding="UTF-8")
    assert _run("bench", "misalign", "--config", str(config), "--out", str(tmp_path)) == EXIT_OK
    rows = _read_csv(tmp_path / "bench_misalign.csv")
    assert rows[0][:3] == ["k", "theta", "noise_ratio"]
    assert len(rows) == 2
    assert rows[1][-1] == "2"


def test_p_export(tmp_path):
    assert _run("p-export", "--out", str(tmp_path)) == EXIT_OK
    matrix = _read_csv(tmp_path / "p_matrix.csv")
    assert len(matrix) == 22
    assert matrix[0][:2] == ["label", "clamp"]
    blocks = {(row[0], row[1]): row[3] for row in _read_csv(tmp_path / "p_zero_blocks.csv")[1:]}
    assert blocks[("I", "M")] == "true"


def test_shrinkage(tmp_path):
    assert _run("shrinkage", "--out", str(tmp_path)) == EXIT_OK
    rows = _read_csv(tmp_path / "shrinkage.csv")
    assert rows[0] == ["theta", "k", "sigma_max", "degenerate"]
    assert rows[2][1:] == ["91", "0", "true"]


def test_anneal_sim_writes_curve_and_overlap(tmp_path):
    assert _run("anneal-sim", "--n", "2", "--grid", "21", "--steps", "200", "--out", str(tmp_path)) == EXIT_OK
    assert len(_read_csv(tmp_path / "gap_curve.csv")) == 22
    overlap = _read_csv(tmp_path / "anneal_overlap.csv")
    assert overlap[0][-1] == "ground_overlap"
    assert 0.0 <= float(overlap[1][-1]) <= 1.0 + 1e-9


def test_anneal_sim_rejects_degenerate_ground_state(tmp_path):
    ising = tmp_path / "flat.ising"
    ising.write_text("h 0 0\n", encoding="UTF-8")
    assert _run("anneal-sim", "--ising", str(ising), "--out", str(tmp_path)) == EXIT_INPUT_ERROR


@pytest.mark.parametrize("mode, scored", [("te", True), ("psr", False)])
def test_template_e2d_only_with_index_correspondences(tmp_path, capsys, mode, scored):
    reference = tmp_path / "reference.txt"
    reference.write_text("1 0\n0 2\n-1 0\n0 -2\n", encoding="UTF-8")
    template = tmp_path / "template.txt"
    template.write_text("0 -1\n2 0\n0 1\n-2 0\n", encoding="UTF-8")
    argv = ["solve", "--dataset", str(reference), "--template", str(template), "--mode", mode]
    assert _run(*argv) == EXIT_OK
    e2d = json.loads(capsys.readouterr().out)["metrics"]["e2d"]
    assert (e2d is not None) == scored


@pytest.mark.parametrize(
    "argv",
    [
        ("solve", "--bogus"),
        ("solve", "--theta", "abc"),
        ("bench", "sideways"),
        ("transmogrify",),
        (),
    ],
)
def test_usage_errors_are_input_errors(argv, capsys):
    assert _run(*argv) == EXIT_INPUT_ERROR
    assert "error:" in capsys.readouterr().err


def test_help_exits_cleanly(capsys):
    assert _run("--help") == EXIT_OK
    assert "qubo-align" in capsys.readouterr().out
