import numpy as np
import pytest

from corpus_lens import _kernels

pytestmark = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not importable")


def _sym(rng, n):
    a = rng.normal(size=(n, n))
    return (a + a.T) / 2


@pytest.mark.parametrize("n", [2, 5, 20])
def test_jacobi_backends_agree(n):
    rng = np.random.default_rng(n)
    a = _sym(rng, n)
    va, _, sa, _ = _kernels.jacobi_eigh_numpy(a)
    vb, _, sb, _ = _kernels.jacobi_eigh_numba(a)
    assert sa >= 0 and sb >= 0
    assert np.allclose(np.sort(va), np.sort(vb), atol=1e-10)
    assert np.allclose(np.sort(va), np.linalg.eigvalsh(a), atol=1e-10)


def test_jacobi_eigenvectors_orthonormal():
    a = _sym(np.random.default_rng(0), 15)
    for fn in (_kernels.jacobi_eigh_numpy, _kernels.jacobi_eigh_numba):
        vals, vecs, _, _ = fn(a)
        assert np.allclose(vecs.T @ vecs, np.eye(15), atol=1e-10)
        assert np.allclose(a @ vecs, vecs * vals, atol=1e-10)


def test_jacobi_does_not_modify_input():
    a = _sym(np.random.default_rng(1), 4)
    before = a.copy()
    _kernels.jacobi_eigh_numba(a)
    _kernels.jacobi_eigh_numpy(a)
    assert np.array_equal(a, before)


def test_guttman_and_stress_agree():
    rng = np.random.default_rng(4)
    x = rng.normal(size=(9, 2))
    x[3] = x[4]  # coincident pair exercises the zero-distance branch
    y = rng.normal(size=(9, 3))
    d = np.sqrt(((y[:, None] - y[None]) ** 2).sum(-1))
    assert np.allclose(_kernels.guttman_transform_numpy(d, x), _kernels.guttman_transform_numba(d, x), atol=1e-12)
    assert _kernels.raw_stress_numpy(d, x) == pytest.approx(_kernels.raw_stress_numba(d, x), rel=1e-12)
