import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cavmerge import (
    DataError,
    InvalidArgumentError,
    LabeledDataset,
    adjusted_rand_index,
    gen_bullseye,
    gen_gaussian_blobs,
    gen_two_moons,
    load_csv,
    multi_start_fit,
    save_csv,
)
from cavmerge.datasets import spherical7_centers

DATA_DIR = os.environ.get("CAVMERGE_DATA_DIR")


def write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestLoadCsv:
    def test_first_appearance_encoding(self, tmp_path):
        ds = load_csv(write(tmp_path, "1,2,a\n3,4,b\n5,6,a"))
        assert (ds.n, ds.p) == (3, 2)
        assert ds.true_labels.tolist() == [0, 1, 0]
        assert ds.data.tolist() == [[1, 2], [3, 4], [5, 6]]
        assert ds.name == "d" and ds.feature_names is None

    def test_header_detected(self, tmp_path):
        ds = load_csv(write(tmp_path, "u,v,cls\n1,2,x\n3,4,y\n"))
        assert ds.n == 2 and ds.feature_names == ["u", "v"]

    def test_numeric_labels_are_not_a_header(self, tmp_path):
        ds = load_csv(write(tmp_path, "1.5,2,7\n3,4,3\n"))
        assert ds.n == 2 and ds.true_labels.tolist() == [0, 1]

    def test_label_column_by_name_and_index(self, tmp_path):
        p = write(tmp_path, "cls,u,v\nb,1,2\na,3,4\nb,5,6\n")
        by_name = load_csv(p, label_column="cls")
        by_index = load_csv(p, label_column=0)
        assert by_name.true_labels.tolist() == by_index.true_labels.tolist() == [0, 1, 0]
        assert np.array_equal(by_name.data, by_index.data)

    def test_unlabelled(self, tmp_path):
        ds = load_csv(write(tmp_path, "1,2\n3,4\n"), label_column=None)
        assert ds.true_labels is None and ds.p == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="no such file"):
            load_csv(tmp_path / "nope.csv")

    def test_ragged_row(self, tmp_path):
        with pytest.raises(DataError, match="line 2 has 2 fields"):
            load_csv(write(tmp_path, "1,2,a\n3,b\n"))

    def test_non_numeric_feature(self, tmp_path):
        with pytest.raises(DataError, match="line 3, column 2"):
            load_csv(write(tmp_path, "x,y,c\n1,2,a\n3,zz,b\n"))

    def test_non_finite_feature(self, tmp_path):
        with pytest.raises(DataError, match="line 2"):
            load_csv(write(tmp_path, "1,2,a\n1,inf,b\n"))

    @pytest.mark.parametrize("text", ["", "\n\n", "x,y,c\n"])
    def test_empty(self, tmp_path, text):
        with pytest.raises(DataError, match="no data rows"):
            load_csv(write(tmp_path, text))

    def test_label_name_not_found(self, tmp_path):
        with pytest.raises(DataError, match="not found"):
            load_csv(write(tmp_path, "a,b\n1,2\n"), label_column="c")

    def test_label_index_out_of_range(self, tmp_path):
        with pytest.raises(DataError, match="out of range"):
            load_csv(write(tmp_path, "1,2\n"), label_column=5)

    def test_iris(self, tmp_path):
        from sklearn.datasets import load_iris

        iris = load_iris()
        names = np.array(iris.target_names)[iris.target]
        lines = ["sl,sw,pl,pw,species"] + [
            ",".join([*(repr(float(v)) for v in row), s]) for row, s in zip(iris.data, names)]
        ds = load_csv(write(tmp_path, "\n".join(lines) + "\n", "iris.csv"))
        assert (ds.n, ds.p) == (150, 4)
        assert np.bincount(ds.true_labels).tolist() == [50, 50, 50]

    @pytest.mark.skipif(not DATA_DIR or not (Path(DATA_DIR or ".") / "seeds.csv").exists(),
                        reason="set CAVMERGE_DATA_DIR to a directory containing seeds.csv")
    def test_seeds(self):
        ds = load_csv(Path(DATA_DIR) / "seeds.csv")
        assert (ds.n, ds.p) == (210, 7)
        assert np.bincount(ds.true_labels).tolist() == [70, 70, 70]


class TestRoundTrip:
    def test_labelled(self, tmp_path):
        ds = gen_two_moons(50, 0.3, seed=4)
        save_csv(ds, tmp_path / "m.csv")
        back = load_csv(tmp_path / "m.csv")
        assert np.array_equal(back.data, ds.data)
        assert np.array_equal(back.true_labels, ds.true_labels)
        assert back.feature_names == ["x0", "x1"]

    def test_unlabelled_keeps_names(self, tmp_path):
        ds = LabeledDataset(np.array([[1e-300, -2.5], [np.pi, 7.0]]), None, "u", ["a", "b"])
        save_csv(ds, tmp_path / "u.csv")
        back = load_csv(tmp_path / "u.csv", label_column=None)
        assert np.array_equal(back.data, ds.data) and back.feature_names == ["a", "b"]

    @settings(max_examples=30, deadline=None)
    @given(values=st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=2, max_size=40))
    def test_any_finite_floats(self, tmp_path_factory, values):
        X = np.array(values[: len(values) // 2 * 2]).reshape(-1, 2)
        ds = LabeledDataset(X, np.arange(X.shape[0]) % 3, "f")
        path = tmp_path_factory.mktemp("rt") / "f.csv"
        save_csv(ds, path)
        back = load_csv(path)
        assert np.array_equal(back.data, X)
        assert np.array_equal(back.true_labels, ds.true_labels)


class TestBlobs:
    def test_mean_near_center(self):
        ds = gen_gaussian_blobs(10000, [[0.0, 0.0]], 1.0, seed=7)
        assert np.all(np.abs(ds.data.mean(axis=0)) < 0.05)

    def test_seven_recoverable(self):
        C = spherical7_centers(10.0)
        d = np.sqrt(((C[:, None] - C[None]) ** 2).sum(-1))
        assert d[np.triu_indices(7, 1)].min() >= 10.0 - 1e-9
        ds = gen_gaussian_blobs(100, C, 1.0, seed=3)
        m = multi_start_fit(ds.data, 7, seed=0)
        assert adjusted_rand_index(ds.true_labels, m.labels) == 1.0

    def test_shape_and_labels(self):
        ds = gen_gaussian_blobs(5, [[0, 0, 0], [1, 1, 1]], 0.5, seed=1)
        assert ds.data.shape == (10, 3) and ds.true_labels.tolist() == [0] * 5 + [1] * 5

    def test_deterministic(self):
        a = gen_gaussian_blobs(30, [[0, 0], [4, 4]], seed=9)
        b = gen_gaussian_blobs(30, [[0, 0], [4, 4]], seed=9)
        c = gen_gaussian_blobs(30, [[0, 0], [4, 4]], seed=10)
        assert a.data.tobytes() == b.data.tobytes()
        assert not np.array_equal(a.data, c.data)

    @pytest.mark.parametrize("kw", [dict(centers=[]), dict(sigma=0.0), dict(n_per=0)])
    def test_invalid(self, kw):
        args = dict(n_per=3, centers=[[0, 0]], sigma=1.0) | kw
        with pytest.raises(InvalidArgumentError):
            gen_gaussian_blobs(**args)


class TestBullseye:
    def test_radial_bands(self):
        ds = gen_bullseye(seed=5)
        r = np.hypot(*ds.data.T)
        inner, ring = r[ds.true_labels == 0], r[ds.true_labels == 1]
        assert len(inner) == 1000 and len(ring) == 2000
        assert np.all(inner < 1.0)
        assert np.all((ring >= 2.5) & (ring < 3.5))
        assert ring.min() - inner.max() > 1.5 - 0.05

    def test_area_uniform(self):
        # half the annulus area lies below sqrt((lo^2 + hi^2) / 2)
        ds = gen_bullseye(1, 20000, seed=2)
        r = np.hypot(*ds.data[ds.true_labels == 1].T)
        frac = np.mean(r < np.sqrt((2.5 ** 2 + 3.5 ** 2) / 2))
        assert abs(frac - 0.5) < 3 * 0.5 / np.sqrt(20000)

    def test_deterministic(self):
        assert gen_bullseye(seed=1).data.tobytes() == gen_bullseye(seed=1).data.tobytes()

    @pytest.mark.parametrize("kw", [dict(r_inner=3.0), dict(r_ring=(3.0, 2.0)), dict(r_inner=0.0), dict(n_ring=0)])
    def test_invalid(self, kw):
        with pytest.raises(InvalidArgumentError):
            gen_bullseye(**kw)


class TestMoons:
    def test_zero_noise_on_circle(self):
        ds = gen_two_moons(300, 0.0, seed=1)
        up = ds.data[ds.true_labels == 0]
        assert np.allclose(np.hypot(*up.T), 1.0, atol=1e-12) and np.all(up[:, 1] >= 0)
        low = ds.data[ds.true_labels == 1]
        assert np.allclose(np.hypot(low[:, 0] - 1.0, low[:, 1] - 0.5), 1.0, atol=1e-12)

    def test_balanced(self):
        assert np.bincount(gen_two_moons(123, seed=0).true_labels).tolist() == [123, 123]

    def test_deterministic(self):
        assert gen_two_moons(seed=8).data.tobytes() == gen_two_moons(seed=8).data.tobytes()

    def test_invalid(self):
        with pytest.raises(InvalidArgumentError):
            gen_two_moons(0)
        with pytest.raises(InvalidArgumentError):
            gen_two_moons(5, -0.1)
