"""Pure-Python (numpy) versions of the hot kernels.

These mirror ``_ckernels.pyx`` step for step and are used when the
compiled extension is unavailable or ``BELLANOMALY_PURE=1`` is set.
"""

import math

import numpy as np

_OFF_REL = 1e-15
_SKIP_REL = 1e-18


def jacobi_eigh(h, max_sweeps=64):
    """Cyclic Jacobi eigendecomposition of a Hermitian matrix.

    Returns ``(w, V)`` with ``w`` ascending and ``h = V diag(w) V^H``.
    No Hermiticity check here; callers validate.
    """
    a = np.array(h, dtype=np.complex128, copy=True)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = math.sqrt(float(np.sum(np.abs(a) ** 2))) or 1.0
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += abs(a[p, q]) ** 2
        if math.sqrt(2.0 * off) <= _OFF_REL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                b = abs(apq)
                if b <= _SKIP_REL * scale:
                    continue
                ph = apq / b
                tau = (a[q, q].real - a[p, p].real) / (2.0 * b)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                gpq = s * ph
                gqp = -s * ph.conjugate()
                # columns: A <- A G
                colp = a[:, p].copy()
                colq = a[:, q]
                a[:, p] = c * colp + gqp * colq
                a[:, q] = gpq * colp + c * colq
                # rows: A <- G^H A
                rowp = a[p, :].copy()
                rowq = a[q, :]
                a[p, :] = c * rowp + gqp.conjugate() * rowq
                a[q, :] = gpq.conjugate() * rowp + c * rowq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp + gqp * vq
                v[:, q] = gpq * vp + c * vq
    w = np.real(np.diag(a)).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def _column_value(k, u):
    return float(np.real(np.vdot(u, k @ u)))


def givens_ascent(K, U, assign, max_sweeps=50, tol=1e-13):
    """Maximise ``sum_i <u_i| K[assign[i]] |u_i>`` over orthonormal bases.

    Each pair of columns is rotated by the exact maximiser of the objective
    restricted to that pair (a sinusoid in the rotation angle, with the
    optimal relative phase). After every sweep each column is reassigned
    to its best outcome. The objective never decreases.

    Returns ``(U, assign, value, sweeps)``; inputs are not modified.
    """
    K = np.asarray(K, dtype=np.complex128)
    U = np.array(U, dtype=np.complex128, copy=True)
    assign = np.array(assign, dtype=np.int64, copy=True)
    n = U.shape[1]
    nout = K.shape[0]
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        gain_total = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                ai = assign[i]
                aj = assign[j]
                if ai == aj:
                    continue
                ui = U[:, i]
                uj = U[:, j]
                kiu_i = K[ai] @ ui
                kiu_j = K[ai] @ uj
                kju_i = K[aj] @ ui
                kju_j = K[aj] @ uj
                x = np.vdot(ui, kiu_i).real
                y = np.vdot(uj, kiu_j).real
                w = np.vdot(ui, kju_i).real
                z = np.vdot(uj, kju_j).real
                g = np.vdot(ui, kiu_j) - np.vdot(ui, kju_j)
                bcoef = 0.5 * (x + z - y - w)
                ccoef = abs(g)
                r = math.hypot(bcoef, ccoef)
                gain = r - bcoef
                if gain <= tol:
                    continue
                theta = 0.5 * math.atan2(ccoef, bcoef)
                c = math.cos(theta)
                s = math.sin(theta)
                ph = g.conjugate() / ccoef
                new_i = c * ui + s * ph * uj
                new_j = -s * ph.conjugate() * ui + c * uj
                U[:, i] = new_i
                U[:, j] = new_j
                gain_total += gain
        for i in range(n):
            vals = [_column_value(K[a], U[:, i]) for a in range(nout)]
            best = int(np.argmax(vals))
            if vals[best] > vals[assign[i]] + tol:
                gain_total += vals[best] - vals[assign[i]]
                assign[i] = best
        if gain_total <= tol:
            break
    value = sum(_column_value(K[assign[i]], U[:, i]) for i in range(n))
    return U, assign, value, sweeps
