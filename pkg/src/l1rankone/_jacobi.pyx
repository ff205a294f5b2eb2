# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled cyclic Jacobi sweep for complex Hermitian matrices.

Hot kernel behind ``eigh``: same rotation formulas and sweep order as the
pure-NumPy fallback in ``_jacobi_py``.
"""

from libc.math cimport sqrt, fabs


def cyclic_jacobi(double complex[:, ::1] a, double complex[:, ::1] v,
                  double off_tol, int max_sweeps):
    """Diagonalize Hermitian ``a`` in place, accumulating eigenvectors into ``v``.

    Returns the number of sweeps used, or -1 if the off-diagonal Frobenius
    mass is still above ``off_tol`` after ``max_sweeps`` sweeps.
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, j, sweep
    cdef double absb, theta, sgn, t, c, s, off2, re, im
    cdef double complex apq, phase, cphase, xp, xq
    if n < 2:
        return 0
    cdef double skip_tol = off_tol / (2.0 * n)
    for sweep in range(max_sweeps):
        off2 = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                re = a[p, q].real
                im = a[p, q].imag
                off2 += re * re + im * im
        if sqrt(2.0 * off2) <= off_tol:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                absb = sqrt(apq.real * apq.real + apq.imag * apq.imag)
                if absb <= skip_tol:
                    continue
                theta = (a[q, q].real - a[p, p].real) / (2.0 * absb)
                sgn = 1.0 if theta >= 0.0 else -1.0
                t = -sgn / (fabs(theta) + sqrt(1.0 + theta * theta))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                phase = apq / absb
                cphase = phase.conjugate()
                # A <- U* A U with U touching coordinates p, q.
                for j in range(n):
                    xp = a[j, p]
                    xq = a[j, q]
                    a[j, p] = c * xp + s * cphase * xq
                    a[j, q] = -s * phase * xp + c * xq
                for j in range(n):
                    xp = a[p, j]
                    xq = a[q, j]
                    a[p, j] = c * xp + s * phase * xq
                    a[q, j] = -s * cphase * xp + c * xq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for j in range(n):
                    xp = v[j, p]
                    xq = v[j, q]
                    v[j, p] = c * xp + s * cphase * xq
                    v[j, q] = -s * phase * xp + c * xq
    off2 = 0.0
    for p in range(n - 1):
        for q in range(p + 1, n):
            re = a[p, q].real
            im = a[p, q].imag
            off2 += re * re + im * im
    if sqrt(2.0 * off2) <= off_tol:
        return max_sweeps
    return -1
