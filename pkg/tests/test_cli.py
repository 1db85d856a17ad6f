import json

import pytest

from patchclust.cli import load_config, main
from patchclust.io import read_dataset_csv, read_merges_csv


def run(argv, capsys):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


def test_gen_writes_csv_and_metadata(tmp_path, capsys):
    out = tmp_path / "m.csv"
    code, _ = run(["gen", "two-cluster", "-p", "lambda2=10", "--seed", 3, "--out", out], capsys)
    assert code == 0
    ds = read_dataset_csv(out)
    assert ds.names == ("x",)
    meta = json.loads((tmp_path / "m.csv.json").read_text())
    assert meta["seed"] == 3 and meta["params"] == {"lambda2": 10}
    assert meta["truth"]["interstice"] == [0.4, 0.6]
    assert meta["n_rows"] == ds.n_rows


@pytest.mark.parametrize("model", ["poisson-uniform", "normal", "shapes", "elongated-2d", "blob-2d"])
def test_gen_every_model(tmp_path, capsys, model):
    out = tmp_path / "d.csv"
    code, _ = run(["gen", model, "-p", "count=40", "--out", out, "--meta", tmp_path / "meta.json"], capsys)
    assert code == 0
    assert read_dataset_csv(out).n_rows > 0
    assert json.loads((tmp_path / "meta.json").read_text())["model"] == model


def test_gen_is_reproducible(tmp_path, capsys):
    for name in ("a.csv", "b.csv"):
        run(["gen", "shapes", "-p", "count=50", "--seed", 7, "--out", tmp_path / name], capsys)
    assert (tmp_path / "a.csv").read_text() == (tmp_path / "b.csv").read_text()


def test_gen_bad_parameter_exit_code(tmp_path, capsys):
    code, io = run(["gen", "shapes", "-p", "count=5", "--out", tmp_path / "x.csv"], capsys)
    assert code == 2 and "error" in io.err


@pytest.fixture
def triples_csv(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("x\n" + "\n".join(str(v) for v in [0, 0.01, 0.02, 0.5, 0.51, 0.52]) + "\n")
    return p


def test_dendro_json_merges_svg(tmp_path, capsys, triples_csv):
    merges, svg = tmp_path / "m.csv", tmp_path / "d.svg"
    code, io = run(["dendro", triples_csv, "--column", "x", "--json",
                    "--merges", merges, "--svg", svg], capsys)
    assert code == 0
    doc = json.loads(io.out)
    assert doc["occurred"] and doc["rho"] == pytest.approx(0.47 / 0.48)
    assert doc["interstices"][0]["xa"] == 0.02 and doc["interstices"][0]["xb"] == 0.5
    tree = read_merges_csv(merges, [0, 0.01, 0.02, 0.5, 0.51, 0.52])
    assert tree.root_height == pytest.approx(0.48)
    assert svg.read_text().lstrip().startswith("<svg")


def test_dendro_text_output(capsys, triples_csv):
    code, io = run(["dendro", triples_csv], capsys)
    assert code == 0 and "occurred=True" in io.out


def test_dendro_missing_column(capsys, triples_csv):
    code, _ = run(["dendro", triples_csv, "--column", "nope"], capsys)
    assert code == 2


@pytest.fixture(scope="module")
def shapes_csv(tmp_path_factory):
    p = tmp_path_factory.mktemp("shapes") / "s.csv"
    assert main(["gen", "shapes", "-p", "count=400", "--seed", "1", "--out", str(p)]) == 0
    return p


def test_select_features_json_config(tmp_path, capsys, shapes_csv):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"gridValues": [-1, 0, 1], "minSlicePoints": 20}))
    out = tmp_path / "r.json"
    assert run(["select-features", shapes_csv, "--config", cfg, "--out", out], capsys)[0] == 0
    doc = json.loads(out.read_text())
    assert doc["config"]["grid_values"] == [-1, 0, 1]
    names = [f["name"] for f in doc["features"]]
    assert sorted(names) == sorted(["gamma", "perimeter", "area", "rel_perimeter", "circularity"])
    prods = [f["product"] for f in doc["features"]]
    assert prods == sorted(prods, reverse=True)


def test_slice_hist_toml_config(tmp_path, capsys, shapes_csv):
    cfg = tmp_path / "c.toml"
    cfg.write_text('gridValues = [0.0]\nr = 100.0\nminSlicePoints = 0\n')
    code, io = run(["slice-hist", shapes_csv, "--config", cfg, "--bins", 3], capsys)
    assert code == 0
    hist = json.loads(io.out)["histogram"]
    assert hist["n_slices"] == 5 and hist["mean"] == 400
    assert len(hist["counts"]) == 3


def test_detect_interstices(tmp_path, capsys):
    data = tmp_path / "e.csv"
    run(["gen", "elongated-2d", "--out", data], capsys)
    cfg = tmp_path / "d.toml"
    cfg.write_text("free_index = 0\nanchor_values = [0.3, 0.5, 0.7]\nr = 0.1\nminSlicePoints = 50\n")
    out = tmp_path / "p.json"
    assert run(["detect-interstices", data, "--config", cfg, "--out", out], capsys)[0] == 0
    doc = json.loads(out.read_text())
    assert doc["params"]["radius"] == 0.1
    for p in doc["patches"]:
        assert p["xa"] < p["xb"]
        assert len(p["anchor"]) == 1
    assert doc["intervals"]
    assert any(a <= 0.5 <= b for a, b in doc["intervals"])


def test_load_config_snake_cases(tmp_path):
    p = tmp_path / "c.json"
    p.write_text('{"minSlicePoints": 3, "alpha": 2}')
    assert load_config(p) == {"min_slice_points": 3, "alpha": 2}
