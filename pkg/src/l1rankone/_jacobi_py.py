"""Pure-NumPy cyclic Jacobi sweep for complex Hermitian matrices.

Fallback used when the compiled extension is unavailable. Same rotation
formulas and sweep order as the compiled kernel; row/column updates are
vectorized instead of element loops.
"""

from __future__ import annotations

import math

import numpy as np


def cyclic_jacobi(a: np.ndarray, v: np.ndarray, off_tol: float, max_sweeps: int) -> int:
    """Diagonalize Hermitian ``a`` in place, accumulating eigenvectors into ``v``.

    ``a`` and ``v`` are (n, n) complex128 arrays; ``v`` should enter as the
    identity and leaves with eigenvector columns (a_in = v @ diag @ v*).
    Returns the number of sweeps used, or -1 if ``max_sweeps`` was not enough
    to push the off-diagonal Frobenius mass below ``off_tol``.
    """
    n = a.shape[0]
    if n < 2:
        return 0
    skip_tol = off_tol / (2.0 * n)
    for sweep in range(max_sweeps):
        off = a - np.diag(np.diagonal(a))
        if math.sqrt(float((np.abs(off) ** 2).sum())) <= off_tol:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                absb = abs(apq)
                if absb <= skip_tol:
                    continue
                theta = (a[q, q].real - a[p, p].real) / (2.0 * absb)
                sgn = 1.0 if theta >= 0.0 else -1.0
                t = -sgn / (abs(theta) + math.sqrt(1.0 + theta * theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                phase = apq / absb
                # A <- U* A U with U touching coordinates p, q.
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p + (s * np.conj(phase)) * col_q
                a[:, q] = (-s * phase) * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p + (s * phase) * row_q
                a[q, :] = (-s * np.conj(phase)) * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vcol_p = v[:, p].copy()
                vcol_q = v[:, q].copy()
                v[:, p] = c * vcol_p + (s * np.conj(phase)) * vcol_q
                v[:, q] = (-s * phase) * vcol_p + c * vcol_q
    off = a - np.diag(np.diagonal(a))
    if math.sqrt(float((np.abs(off) ** 2).sum())) <= off_tol:
        return max_sweeps
    return -1
