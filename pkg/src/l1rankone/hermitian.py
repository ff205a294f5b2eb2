"""Complex dense Hermitian matrices: ingestion, norms, eigensolver, LDL.

Everything downstream (decomposition strategies, gamma bounds, experiments)
consumes this module. All values are immutable after construction and all
functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    DimensionMismatchError,
    EigenFailureError,
    NotHermitianError,
    NotPSDError,
    NotSquareError,
)

# Defaults; each operation takes the tolerance it uses as a parameter.
HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
PIVOT_TOL = 1e-12
RECON_TOL = 1e-9
EIG_SWEEP_CAP = 100
EIG_OFF_TOL = 1e-12  # times ||A||_Fr


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class HermitianMatrix:
    """Dense n x n complex Hermitian matrix (entries array is read-only)."""

    entries: np.ndarray

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def scale(self) -> float:
        """max(1, largest entry magnitude); reference for relative tolerances."""
        if self.n == 0:
            return 1.0
        return max(1.0, float(np.abs(self.entries).max()))


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues with orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # column k pairs with eigenvalues[k]


def ingest_matrix(raw, hermitian_tol: float = HERMITIAN_TOL) -> HermitianMatrix:
    """Validate and symmetrize a raw square array into a HermitianMatrix.

    Accepts anything np.asarray handles; the stored matrix is
    (raw + raw*)/2 provided max |raw - raw*| <= hermitian_tol.
    """
    arr = np.asarray(raw, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise NotSquareError(f"expected a square matrix, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise NotSquareError("matrix must have dimension >= 1")
    dev = np.abs(arr - arr.conj().T)
    worst = float(dev.max())
    if not worst <= hermitian_tol:  # NaN-safe: NaN comparisons are False
        i, j = np.unravel_index(int(np.argmax(np.nan_to_num(dev, nan=np.inf))), dev.shape)
        raise NotHermitianError(
            f"entry ({i},{j}) deviates from conj transpose by {worst:.3e} "
            f"(tol {hermitian_tol:.3e})",
            index=(int(i), int(j)),
            deviation=worst,
        )
    sym = (arr + arr.conj().T) / 2.0
    return HermitianMatrix(_readonly(sym))


def norm_l11(a: HermitianMatrix) -> float:
    """Entrywise l1 norm: sum of |A_ij| over all entries."""
    return float(np.abs(a.entries).sum())


def frobenius_norm(a: HermitianMatrix) -> float:
    return float(np.sqrt((np.abs(a.entries) ** 2).sum()))


def eigh(a: HermitianMatrix, sweep_cap: int = EIG_SWEEP_CAP) -> EigenSystem:
    """Full eigendecomposition by cyclic Jacobi with a deterministic sign fix.

    Eigenvalues ascend; each eigenvector's first non-negligible coordinate is
    made real positive so downstream costs are reproducible.
    """
    n = a.n
    work = np.array(a.entries, dtype=np.complex128, order="C", copy=True)
    vecs = np.eye(n, dtype=np.complex128, order="C")
    off_tol = EIG_OFF_TOL * max(frobenius_norm(a), np.finfo(float).tiny)
    sweeps = kernels.cyclic_jacobi(work, vecs, off_tol, sweep_cap)
    if sweeps < 0:
        raise EigenFailureError(
            f"Jacobi did not converge within {sweep_cap} sweeps (n={n})"
        )
    vals = np.diagonal(work).real.copy()
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]
    for k in range(n):
        col = vecs[:, k]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        j = int(nz[0]) if nz.size else 0
        piv = col[j]
        if abs(piv) > 0.0:
            vecs[:, k] = col * (piv.conjugate() / abs(piv))
    return EigenSystem(_readonly(vals), _readonly(vecs))


def trace_norm(a: HermitianMatrix) -> float:
    """Sum of absolute eigenvalues (nuclear norm for Hermitian input)."""
    return float(np.abs(eigh(a).eigenvalues).sum())


def operator_norm(a: HermitianMatrix) -> float:
    return float(np.abs(eigh(a).eigenvalues).max())


def is_psd(a: HermitianMatrix, psd_tol: float = PSD_TOL) -> bool:
    """True iff lambda_min >= -psd_tol * max(1, ||A||_op)."""
    vals = eigh(a).eigenvalues
    lam_min = float(vals[0])
    lam_max_abs = float(np.abs(vals).max())
    return lam_min >= -psd_tol * max(1.0, lam_max_abs)


def ldl_factor(a: HermitianMatrix, pivot_tol: float = PIVOT_TOL,
               psd_tol: float = PSD_TOL) -> list[np.ndarray]:
    """Lagrangian (LDL-style) rank-one elimination in natural pivot order.

    Returns vectors v_k, each zero on positions before its pivot, with
    sum_k v_k v_k* = A. A pivot that PSD-ness forces to vanish is skipped
    and emits no vector; a skipped pivot with a non-negligible row, or a
    Schur complement gone negative beyond tolerance, raises NotPSD.
    """
    n = a.n
    w = np.array(a.entries, dtype=np.complex128, copy=True)
    diag0 = np.diagonal(a.entries).real
    scale = max(1.0, float(diag0.max(initial=0.0)))
    tol_p = pivot_tol * scale
    neg_tol = psd_tol * scale
    vectors: list[np.ndarray] = []
    for k in range(n):
        d = float(w[k, k].real)
        if d < -neg_tol:
            raise NotPSDError(
                f"Schur complement pivot {k} is {d:.3e} < -{neg_tol:.3e}"
            )
        if d <= tol_p:
            # A matrix PSD within neg_tol obeys |W_kj|^2 <= (W_kk+slack)(W_jj+slack),
            # so a vanished pivot forces its whole row under this cap.
            rest = np.abs(w[k, k + 1:])
            if rest.size:
                slack = tol_p + neg_tol
                diag_rest = np.abs(np.diagonal(w)[k + 1:].real)
                cap = np.sqrt((max(d, 0.0) + slack) * (diag_rest.max(initial=0.0) + slack))
                if float(rest.max()) > cap + slack:
                    raise NotPSDError(
                        f"pivot {k} vanished but its row has magnitude "
                        f"{float(rest.max()):.3e}"
                    )
            w[k, :] = 0.0
            w[:, k] = 0.0
            continue
        v = np.zeros(n, dtype=np.complex128)
        v[k:] = w[k:, k] / np.sqrt(d)
        vectors.append(_readonly(v))
        w[k:, k:] -= np.outer(v[k:], v[k:].conj())
        w[k, :] = 0.0
        w[:, k] = 0.0
    return vectors


def reconstruct(vectors) -> HermitianMatrix:
    """Sum of outer products g_k g_k* for a family of same-length vectors."""
    vecs = [np.asarray(v, dtype=np.complex128) for v in vectors]
    if not vecs:
        raise DimensionMismatchError("cannot reconstruct from zero vectors")
    n = vecs[0].shape[0]
    for v in vecs:
        if v.ndim != 1 or v.shape[0] != n:
            raise DimensionMismatchError(
                f"vector of length {v.shape} does not match dimension {n}"
            )
    stack = np.vstack(vecs)
    out = stack.T @ stack.conj()
    out = (out + out.conj().T) / 2.0
    return HermitianMatrix(_readonly(out))


@dataclass(frozen=True)
class ReconstructionReport:
    max_residual: float
    tol: float
    ok: bool


def verify_reconstruction(a: HermitianMatrix, vectors,
                          recon_tol: float = RECON_TOL) -> ReconstructionReport:
    """Max-entry residual of |A - sum g g*| against recon_tol * scale."""
    if vectors:
        rec = reconstruct(vectors)
        if rec.n != a.n:
            raise DimensionMismatchError(
                f"decomposition dimension {rec.n} != matrix dimension {a.n}"
            )
        resid = float(np.abs(a.entries - rec.entries).max())
    else:
        resid = float(np.abs(a.entries).max()) if a.n else 0.0
    tol = recon_tol * a.scale()
    return ReconstructionReport(resid, tol, resid <= tol)
