import os
import subprocess
import sys

import numpy as np
import pytest

from hdadetect import kernels

BACKENDS = ["python"] + (["compiled"] if kernels.BACKEND == "compiled" else [])


def _brute(Q, R, k, exclude_self):
    D = np.sqrt(((Q[:, None, :] - R[None, :, :]) ** 2).sum(axis=2))
    if exclude_self:
        np.fill_diagonal(D, np.inf)
    idx = np.lexsort((np.broadcast_to(np.arange(len(R)), D.shape), D), axis=1)[:, :k]
    return np.take_along_axis(D, idx, axis=1), idx


@pytest.mark.parametrize("backend", BACKENDS)
def test_matches_brute_force(backend):
    rng = np.random.default_rng(1)
    X = rng.random((60, 4))
    dist, idx = kernels.knn_search(X, X, 7, backend=backend)
    bd, bi = _brute(X, X, 7, True)
    np.testing.assert_array_equal(idx, bi)
    np.testing.assert_allclose(dist, bd, rtol=0, atol=1e-12)


@pytest.mark.parametrize("backend", BACKENDS)
def test_ties_ordered_by_reference_index(backend):
    X = np.array([[0.0], [1.0], [-1.0], [2.0], [-2.0]])
    _, idx = kernels.knn_search(X, X, 4, backend=backend)
    assert idx[0].tolist() == [1, 2, 3, 4]


@pytest.mark.parametrize("backend", BACKENDS)
def test_explicit_ids_exclude_only_matching_rows(backend):
    X = np.array([[0.0], [1.0], [3.0]])
    R = X[[0, 2]]
    dist, idx = kernels.knn_search(X, R, 1, np.arange(3), np.array([0, 2]), backend=backend)
    assert idx[:, 0].tolist() == [1, 0, 0]
    np.testing.assert_array_equal(dist[:, 0], [3.0, 1.0, 3.0])


def test_backends_bit_identical():
    if kernels.BACKEND != "compiled":
        pytest.skip("compiled kernel not built")
    X = np.random.default_rng(2).normal(size=(300, 5))
    a = kernels.knn_search(X, X, 10, backend="python")
    b = kernels.knn_search(X, X, 10, backend="compiled")
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])


def test_bad_arguments():
    X = np.zeros((3, 2))
    with pytest.raises(ValueError):
        kernels.knn_search(X, X, 3)
    with pytest.raises(ValueError):
        kernels.knn_search(X, np.zeros((3, 1)), 1)
    with pytest.raises(ValueError):
        kernels.knn_search(X, X, 1, backend="gpu")


def test_fallback_selected_at_import_when_forced():
    code = (
        "import numpy as np; from hdadetect import kernels, detectors;"
        "X = np.random.default_rng(0).random((50, 3));"
        "print(kernels.BACKEND, detectors.knn_agg_raw(X, 1, 5).sum().hex())"
    )
    env = dict(os.environ, HDADETECT_FORCE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout.split()
    assert out[0] == "python"
    from hdadetect.detectors import knn_agg_raw

    X = np.random.default_rng(0).random((50, 3))
    assert out[1] == knn_agg_raw(X, 1, 5).sum().hex()
