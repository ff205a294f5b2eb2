import numpy as np
import pytest

from l1rankone.hermitian import HermitianMatrix, ingest_matrix


def hermitian(entries) -> HermitianMatrix:
    return ingest_matrix(np.array(entries, dtype=np.complex128))


def random_hermitian(rng, n, complex_entries=True) -> HermitianMatrix:
    g = rng.standard_normal((n, n))
    if complex_entries:
        g = g + 1j * rng.standard_normal((n, n))
    return ingest_matrix((g + g.conj().T) / 2.0)


def random_psd(rng, n, rank=None, complex_entries=True) -> HermitianMatrix:
    r = rank if rank is not None else n
    g = rng.standard_normal((n, r))
    if complex_entries:
        g = g + 1j * rng.standard_normal((n, r))
    a = g @ g.conj().T
    return ingest_matrix((a + a.conj().T) / 2.0)


def random_dd(rng, n, complex_off=True, tight_rows=0) -> HermitianMatrix:
    """Random diagonally dominant Hermitian PSD matrix.

    tight_rows rows get zero dominance margin (boundary case).
    """
    off = rng.standard_normal((n, n))
    if complex_off:
        off = off + 1j * rng.standard_normal((n, n))
    a = np.triu(off, 1)
    a = a + a.conj().T
    slack = rng.uniform(0.0, 2.0, size=n)
    if tight_rows:
        idx = rng.choice(n, size=min(tight_rows, n), replace=False)
        slack[idx] = 0.0
    diag = np.abs(a).sum(axis=1) + slack
    a[np.arange(n), np.arange(n)] = diag
    return ingest_matrix(a)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
