"""Backend parity: compiled Jacobi kernel vs the NumPy fallback."""

import numpy as np
import pytest

import l1rankone as lr
from l1rankone import kernels

from conftest import random_hermitian


@pytest.fixture
def restore_backend():
    yield
    kernels.set_backend("auto")


def test_fallback_always_available():
    assert "py" in kernels.available_backends()


@pytest.mark.parametrize("backend", kernels.available_backends())
@pytest.mark.parametrize("n", [2, 3, 5, 9, 16])
def test_backend_matches_lapack(backend, n, rng, restore_backend):
    kernels.set_backend(backend)
    for _ in range(10):
        a = random_hermitian(rng, n)
        es = lr.eigh(a)
        ref = np.linalg.eigvalsh(a.entries)
        scale = max(1.0, float(np.abs(ref).max()))
        assert np.abs(es.eigenvalues - ref).max() <= 1e-10 * scale
        resid = a.entries @ es.eigenvectors - es.eigenvectors * es.eigenvalues
        assert np.abs(resid).max() <= 1e-10 * scale
        gram = es.eigenvectors.conj().T @ es.eigenvectors
        assert np.abs(gram - np.eye(n)).max() <= 1e-12


@pytest.mark.skipif(len(kernels.available_backends()) < 2,
                    reason="compiled kernel not built")
def test_backends_agree(rng, restore_backend):
    for n in (2, 4, 7, 12):
        a = random_hermitian(rng, n)
        results = {}
        for backend in kernels.available_backends():
            kernels.set_backend(backend)
            results[backend] = lr.eigh(a).eigenvalues
        scale = max(1.0, float(np.abs(results["py"]).max()))
        assert np.abs(results["cy"] - results["py"]).max() <= 1e-12 * scale


def test_single_rotation_zeroes_pivot(rng):
    # one cyclic pass on a 2x2 must zero the off-diagonal entry exactly
    for _ in range(20):
        a = random_hermitian(rng, 2)
        work = np.array(a.entries, order="C")
        v = np.eye(2, dtype=np.complex128)
        sweeps = kernels.cyclic_jacobi(work, v, 1e-300, 1)
        if sweeps == -1:  # one sweep was not enough for the tiny tolerance
            assert abs(work[0, 1]) <= 1e-15 * max(1.0, abs(work[0, 0]))
        rec = v @ np.diag(np.diagonal(work)) @ v.conj().T
        assert np.abs(rec - a.entries).max() <= 1e-12 * max(1.0, np.abs(a.entries).max())
