import numpy as np
import pytest

import oracles
from hdadetect.core import Dataset
from hdadetect.secoda import EQUIDEPTH, EQUIWIDTH, default_b_max, discretize, secoda


def test_discretize_examples():
    assert discretize([0, 1, 2, 3], 2, EQUIWIDTH).tolist() == [1, 1, 2, 2]
    assert discretize([0, 1, 2, 100], 2, EQUIDEPTH).tolist() == [1, 1, 2, 2]
    assert discretize([0, 1, 2, 100], 2, EQUIWIDTH).tolist() == [1, 1, 1, 2]


def test_equidepth_masks_outlier_with_rank_neighbour():
    bins = discretize([0, 1, 2, 100], 2, EQUIDEPTH)
    assert bins[3] == bins[2]


@pytest.mark.parametrize("b", [1, 3, 7, 10])
def test_equidepth_occupancy_balanced(b):
    x = np.random.default_rng(b).normal(size=53)
    occ = np.bincount(discretize(x, b, EQUIDEPTH))[1:]
    assert occ.max() - occ.min() <= 1


def test_discretize_rejects_bad_input():
    with pytest.raises(ValueError):
        discretize([1, 2], 0)
    with pytest.raises(ValueError):
        discretize([1, 2], 2, "quantile")
    assert discretize([3, 3, 3], 4).tolist() == [1, 1, 1]


def test_categorical_only_uses_class_frequency():
    ds = Dataset.from_arrays(categorical={"c": ["A", "A", "B"]})
    res = secoda(ds)
    assert res.scores.values.tolist() == [2, 2, 1]
    assert res.scores.ranking()[0] == 2


def test_unique_constellation_gets_minimum():
    x = np.r_[np.zeros(10), 1.0]
    ds = Dataset.from_arrays({"x": x}, {"c": ["a"] * 10 + ["b"]})
    v = secoda(ds).scores.values
    assert np.argmin(v) == 10 and v[10] == 1.0


@pytest.mark.parametrize("mode", [EQUIWIDTH, EQUIDEPTH])
def test_matches_straight_line_oracle(mode):
    rng = np.random.default_rng(12)
    x1, x2 = rng.random(12), rng.random(12)
    ds = Dataset.from_arrays({"x1": x1, "x2": x2})
    res = secoda(ds, mode)
    want, arity = oracles.secoda_scores([x1.tolist(), x2.tolist()], [], mode)
    np.testing.assert_allclose(res.scores.values, want, rtol=0, atol=1e-12)
    assert res.ultimate_arity == arity


def test_scores_bounded():
    rng = np.random.default_rng(3)
    ds = Dataset.from_arrays({"x": rng.random(50)}, {"c": rng.choice(list("ab"), 50)})
    v = secoda(ds).scores.values
    assert v.min() > 0 and v.max() <= 50


def test_b_max_cap():
    assert default_b_max(1000, 3) == 40
    assert default_b_max(1001, 3) == 44
    ds = Dataset.from_arrays({"x": np.arange(20.0) ** 2})
    assert secoda(ds, b_max=3).ultimate_arity == 3
