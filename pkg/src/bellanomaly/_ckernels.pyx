# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see ``_pykernels`` for semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, atan2, cos, sin, hypot

cnp.import_array()

cdef double OFF_REL = 1e-15
cdef double SKIP_REL = 1e-18


cdef inline double cabs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline double complex conj(double complex z) nogil:
    return z.real - 1j * z.imag


def jacobi_eigh(h, int max_sweeps=64):
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] arr = np.array(h, dtype=np.complex128, copy=True)
    cdef Py_ssize_t n = arr.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] varr = np.eye(n, dtype=np.complex128)
    cdef double complex[:, ::1] a = arr
    cdef double complex[:, ::1] v = varr
    cdef Py_ssize_t p, q, k, sweep
    cdef double scale = 0.0, off, b, tau, t, c, s
    cdef double complex apq, ph, gpq, gqp, xp, xq
    for p in range(n):
        for q in range(n):
            scale += cabs2(a[p, q])
    scale = sqrt(scale)
    if scale == 0.0:
        scale = 1.0
    with nogil:
        for sweep in range(max_sweeps):
            off = 0.0
            for p in range(n):
                for q in range(p + 1, n):
                    off += cabs2(a[p, q])
            if sqrt(2.0 * off) <= OFF_REL * scale:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    b = sqrt(cabs2(apq))
                    if b <= SKIP_REL * scale:
                        continue
                    ph = apq / b
                    tau = (a[q, q].real - a[p, p].real) / (2.0 * b)
                    if tau >= 0:
                        t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                    else:
                        t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                    c = 1.0 / sqrt(1.0 + t * t)
                    s = t * c
                    gpq = s * ph
                    gqp = -s * conj(ph)
                    for k in range(n):
                        xp = a[k, p]
                        xq = a[k, q]
                        a[k, p] = c * xp + gqp * xq
                        a[k, q] = gpq * xp + c * xq
                    for k in range(n):
                        xp = a[p, k]
                        xq = a[q, k]
                        a[p, k] = c * xp + conj(gqp) * xq
                        a[q, k] = conj(gpq) * xp + c * xq
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    for k in range(n):
                        xp = v[k, p]
                        xq = v[k, q]
                        v[k, p] = c * xp + gqp * xq
                        v[k, q] = gpq * xp + c * xq
    w = np.real(np.diag(arr)).copy()
    order = np.argsort(w, kind="stable")
    return w[order], varr[:, order]


cdef double quad(double complex[:, :, ::1] K, Py_ssize_t a, double complex[:, ::1] U,
                 Py_ssize_t i, Py_ssize_t j) nogil:
    """Re <u_i| K[a] |u_j>."""
    cdef Py_ssize_t r, col, n = U.shape[0]
    cdef double complex acc = 0.0, row
    for r in range(n):
        row = 0.0
        for col in range(n):
            row = row + K[a, r, col] * U[col, j]
        acc = acc + conj(U[r, i]) * row
    return acc.real


cdef double complex cquad(double complex[:, :, ::1] K, Py_ssize_t a, double complex[:, ::1] U,
                          Py_ssize_t i, Py_ssize_t j) nogil:
    cdef Py_ssize_t r, col, n = U.shape[0]
    cdef double complex acc = 0.0, row
    for r in range(n):
        row = 0.0
        for col in range(n):
            row = row + K[a, r, col] * U[col, j]
        acc = acc + conj(U[r, i]) * row
    return acc


def givens_ascent(K, U, assign, int max_sweeps=50, double tol=1e-13):
    cdef cnp.ndarray[cnp.complex128_t, ndim=3] Karr = np.ascontiguousarray(K, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] Uarr = np.array(U, dtype=np.complex128, copy=True, order="C")
    cdef cnp.ndarray[cnp.int64_t, ndim=1] Aarr = np.array(assign, dtype=np.int64, copy=True)
    cdef double complex[:, :, ::1] k = Karr
    cdef double complex[:, ::1] u = Uarr
    cdef cnp.int64_t[::1] asg = Aarr
    cdef Py_ssize_t n = Uarr.shape[1], dim = Uarr.shape[0], nout = Karr.shape[0]
    cdef Py_ssize_t i, j, r, a, ai, aj, best
    cdef int sweeps = 0, sw
    cdef double gain_total, x, y, w, z, bcoef, ccoef, rr, gain, theta, c, s, val, bestval, cur
    cdef double complex g, ph, ui, uj
    with nogil:
        for sw in range(1, max_sweeps + 1):
            sweeps = sw
            gain_total = 0.0
            for i in range(n - 1):
                for j in range(i + 1, n):
                    ai = asg[i]
                    aj = asg[j]
                    if ai == aj:
                        continue
                    x = quad(k, ai, u, i, i)
                    y = quad(k, ai, u, j, j)
                    w = quad(k, aj, u, i, i)
                    z = quad(k, aj, u, j, j)
                    g = cquad(k, ai, u, i, j) - cquad(k, aj, u, i, j)
                    bcoef = 0.5 * (x + z - y - w)
                    ccoef = sqrt(cabs2(g))
                    rr = hypot(bcoef, ccoef)
                    gain = rr - bcoef
                    if gain <= tol:
                        continue
                    theta = 0.5 * atan2(ccoef, bcoef)
                    c = cos(theta)
                    s = sin(theta)
                    ph = conj(g) / ccoef
                    for r in range(dim):
                        ui = u[r, i]
                        uj = u[r, j]
                        u[r, i] = c * ui + s * ph * uj
                        u[r, j] = -s * conj(ph) * ui + c * uj
                    gain_total += gain
            for i in range(n):
                cur = quad(k, asg[i], u, i, i)
                best = asg[i]
                bestval = cur
                for a in range(nout):
                    val = quad(k, a, u, i, i)
                    if val > bestval:
                        bestval = val
                        best = a
                if bestval > cur + tol:
                    gain_total += bestval - cur
                    asg[i] = best
            if gain_total <= tol:
                break
    value = 0.0
    for i in range(n):
        value += quad(k, asg[i], u, i, i)
    return Uarr, Aarr, value, sweeps
