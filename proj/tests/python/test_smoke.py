import json
import math
import os
from pathlib import Path

import pytest

import costar

DATA = Path(os.environ.get("COSTAR_TEST_DATA_DIR", Path(__file__).resolve().parents[1] / "data"))
FIXTURE = DATA / "fixture500"


@pytest.fixture(scope="module")
def dataset():
    return costar.load_dataset(FIXTURE / "stars.csv", FIXTURE / "works.csv", FIXTURE / "cast.csv")


def test_load_and_project(dataset):
    assert dataset.star_count == 500
    period = costar.make_schedule(1990, 2009, 4)[0]
    assert period.label == "1990-1993"
    g = costar.project(dataset, period, ["Mainland", "HongKong"])
    assert g.node_count == len(g.keys) > 0
    assert set(g.regions) <= {"Mainland", "HongKong"}
    assert sum(g.degree_sequence()) == 2 * g.edge_count
    assert g.average_degree() == pytest.approx(2 * g.edge_count / g.node_count)
    assert 0.0 <= g.average_clustering() <= 1.0


def test_index_is_seeded(dataset):
    g = costar.project(dataset, costar.Period("1995", 1995, 1995), ["Mainland", "HongKong"])
    a = costar.cross_region_index(g, "Mainland", "HongKong", replicates=20, seed=3)
    b = costar.cross_region_index(g, "Mainland", "HongKong", replicates=20, seed=3)
    assert a == b
    assert a["ratio"] == pytest.approx(a["observed"] / a["expected"])
    assert a["ci_low"] <= a["ci_high"]


def test_fit_and_information_criteria(dataset):
    g = costar.project(dataset, costar.Period("2000-2003", 2000, 2003), ["Mainland", "HongKong"])
    terms = json.dumps([{"type": "edges"}, {"type": "nodematch", "attribute": "region"}])
    fit = costar.fit_ergm(g, terms)
    assert fit["terms"] == ["edges", "nodematch.region"]
    assert fit["converged"]
    assert fit["aic"] == fit["residual_deviance"] + 2 * fit["k"]
    assert fit["bic"] == pytest.approx(fit["residual_deviance"] + fit["k"] * math.log(fit["n_dyads"]))


def test_errors_are_typed(tmp_path):
    with pytest.raises(costar.DataError):
        costar.load_dataset(tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv")
    assert issubclass(costar.ConfigError, costar.Error)


def test_cli_round_trip(tmp_path):
    args = ["describe", "--stars", str(FIXTURE / "stars.csv"), "--works", str(FIXTURE / "works.csv"),
            "--cast", str(FIXTURE / "cast.csv"), "--out", str(tmp_path)]
    code, _, err = costar.run_cli(args)
    assert code == 0, err
    lines = (tmp_path / "describe.csv").read_text().splitlines()
    assert len(lines) == 6
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "describe"
    code, _, err = costar.run_cli(["index", "--stars", "missing.csv"])
    assert code == 2
