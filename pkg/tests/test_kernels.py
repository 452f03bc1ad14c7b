"""Both kernel backends must agree: identical routing and neighbor indices,
floating-point agreement on eigenpairs up to summation-order noise."""

import numpy as np
import pytest

from vpcme._kernels import HAVE_NUMBA, available_backends, backend_impls

pytestmark = pytest.mark.skipif(not HAVE_NUMBA, reason="only one backend available")


@pytest.fixture(scope="module")
def numba_impls():
    return backend_impls("numba")


@pytest.fixture(scope="module")
def numpy_impls():
    return backend_impls("numpy")


def test_backend_listing():
    names = available_backends()
    assert "numpy" in names
    assert names[0] == "numba"


def test_unknown_backend_rejected():
    with pytest.raises(ImportError):
        backend_impls("cython")


def test_jacobi_agreement(numba_impls, numpy_impls):
    rng = np.random.Generator(np.random.PCG64(1))
    for k in (2, 3, 6, 12):
        base = rng.normal(size=(k, k))
        a = (base + base.T) / 2.0
        diag_nb, v_nb = numba_impls["jacobi_eigh"](a)
        diag_np, v_np = numpy_impls["jacobi_eigh"](a)
        assert np.allclose(np.sort(diag_nb), np.sort(diag_np), atol=1e-9)
        for v, diag in ((v_nb, diag_nb), (v_np, diag_np)):
            assert np.max(np.abs(v @ np.diag(diag) @ v.T - a)) < 1e-8


def test_knn_agreement(numba_impls, numpy_impls):
    rng = np.random.Generator(np.random.PCG64(2))
    train = rng.normal(size=(60, 5))
    queries = rng.normal(size=(25, 5))
    for k in (1, 4, 9):
        self_nb = numba_impls["knn_exclude_self"](train, k)
        self_np = numpy_impls["knn_exclude_self"](train, k)
        assert np.array_equal(self_nb, self_np)
        q_nb = numba_impls["knn_query"](train, queries, k)
        q_np = numpy_impls["knn_query"](train, queries, k)
        assert np.array_equal(q_nb, q_np)


def test_knn_agreement_with_duplicate_points(numba_impls, numpy_impls):
    # exact distance ties: both backends must break toward lower indices
    train = np.array([[0.0, 0.0]] * 4 + [[5.0, 5.0]] * 3)
    for k in (1, 2, 3):
        a = numba_impls["knn_exclude_self"](train, k)
        b = numpy_impls["knn_exclude_self"](train, k)
        assert np.array_equal(a, b)
    # row 0 has neighbors 1, 2, 3 at distance zero, in index order
    assert numba_impls["knn_exclude_self"](train, 3)[0].tolist() == [1, 2, 3]


def test_route_pairs_agreement(numba_impls, numpy_impls):
    rng = np.random.Generator(np.random.PCG64(3))
    n = 25
    labels = (rng.random((n, 4)) < 0.5).astype(np.uint8)
    sizes = labels.sum(axis=1).astype(np.int64)
    weights = rng.random(n)
    weights /= weights.sum()
    cumw = np.cumsum(weights)
    for theta in (0.0, 0.4, 0.8, 1.0):
        uniforms = rng.random(4000)
        args = (cumw, uniforms, labels, sizes, theta, 30, 30)
        must_nb, cannot_nb = numba_impls["route_pairs"](*args)
        must_np, cannot_np = numpy_impls["route_pairs"](*args)
        assert np.array_equal(must_nb, must_np)
        assert np.array_equal(cannot_nb, cannot_np)


def test_route_pairs_zero_targets(numba_impls, numpy_impls):
    labels = np.array([[1, 0], [0, 1]], dtype=np.uint8)
    sizes = labels.sum(axis=1).astype(np.int64)
    cumw = np.array([0.5, 1.0])
    uniforms = np.array([0.1, 0.9, 0.2, 0.8])
    for impls in (numba_impls, numpy_impls):
        must, cannot = impls["route_pairs"](cumw, uniforms, labels, sizes, 0.5, 0, 0)
        assert must.shape == (0, 2)
        assert cannot.shape == (0, 2)
