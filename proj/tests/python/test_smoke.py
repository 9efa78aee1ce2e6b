import json
import os
from pathlib import Path

import numpy as np
import pytest

import gmmltree

DATA_DIR = Path(os.environ.get("GMMLTREE_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))


def blobs(n=120, d=4, seed=0):
    rng = np.random.default_rng(seed)
    y = np.where(np.arange(n) % 2 == 0, -1, 1)
    X = rng.normal(size=(n, d))
    X[:, 0] += 2.0 * y
    return X, y


def test_dataset_round_trip():
    X, y = blobs()
    ds = gmmltree.Dataset(X, y, name="blobs")
    assert (ds.n, ds.d) == X.shape
    np.testing.assert_array_equal(ds.X, X)
    np.testing.assert_array_equal(ds.y, y)


def test_weights_pick_planted_feature():
    X, y = blobs()
    w = gmmltree.gmml_weights(gmmltree.Dataset(X, y))
    assert w["best"] == 0
    assert len(w["weights"]) == 4
    assert all(v >= 0 for v in w["weights"])


def test_split_point():
    assert gmmltree.split_point([1.0, 2.0, 3.0], [10.0, 11.0, 12.0]) == pytest.approx(6.5)
    assert gmmltree.split_point([0.0, 2.0], [10.0]) == pytest.approx(5.5)
    assert gmmltree.split_point([1.0, 2.0], [3.0, 4.0], strategy="median") == pytest.approx(2.5)


def test_tree_and_forest_fit_separable_data():
    X, y = blobs()
    ds = gmmltree.Dataset(X, y)
    tree = gmmltree.train_tree(ds)
    assert (tree.predict(X) == y).all()
    forest = gmmltree.train_forest(ds, n_trees=5, seed=3)
    assert forest.n_trees == 5
    assert (forest.predict(X) == y).mean() > 0.95
    pos, neg = forest.votes(X[0])
    assert pos + neg == 5


def test_model_json_round_trip():
    X, y = blobs()
    tree = gmmltree.train_tree(gmmltree.Dataset(X, y), oblique=True, max_depth=2)
    text = tree.to_json()
    assert json.loads(text)["format"] == "gmmltree-tree"
    back = gmmltree.load_model(text)
    np.testing.assert_array_equal(back.predict(X), tree.predict(X))


def test_cross_validate_and_ranking():
    X, y = blobs(seed=1)
    ds = gmmltree.Dataset(X, y)
    r = gmmltree.cross_validate(ds, k=5, seed=2)
    assert len(r["fold_accuracies"]) == 5
    assert 0.9 <= r["mean_accuracy"] <= 1.0
    rows = gmmltree.weight_vs_impurity(ds)
    assert rows[0]["feature"] == 0
    assert [row["rank"] for row in rows] == [1, 2, 3, 4]


def test_errors_are_python_exceptions():
    with pytest.raises(gmmltree.DataError):
        gmmltree.parse_csv("a,y\n1,p\nx,q\n")
    with pytest.raises(gmmltree.ConfigError):
        gmmltree.train_tree(gmmltree.Dataset(*blobs()), criterion="gini", oblique=True)
    tree = gmmltree.train_tree(gmmltree.Dataset(*blobs()))
    with pytest.raises(gmmltree.DimensionError):
        tree.predict(np.zeros((2, 3)))


def test_cli_in_process():
    code, out, err = gmmltree.cli(["--help"])
    assert code == 0
    path = DATA_DIR / "haberman.csv"
    if not path.exists():
        pytest.skip("haberman.csv not bundled")
    code, out, err = gmmltree.cli(["cv", "--k", "5", "--timing", "off", str(path)])
    assert code == 0
    assert "haberman,dgmml-dt,5," in out
