"""Pure-Python (numpy) fallback for the compiled batch kernels.

Each routine is vectorised across the batch axis but performs, per matrix, the
same floating-point operations in the same order as ``_kernels.pyx``.
"""
import numpy as np


def jacobi_eigh_batch(a_in, rel_tol, max_sweeps):
    a = np.array(a_in, dtype=np.float64, order="C", copy=True)
    m, n, _ = a.shape
    # exact power-of-two rescaling keeps the squared norms clear of underflow and overflow
    amax = np.max(np.abs(a), axis=(1, 2)) if n else np.zeros(m)
    e = np.where((amax > 0.0) & np.isfinite(amax), np.frexp(amax)[1], 0)
    a = np.ldexp(a, -e[:, None, None])
    v = np.broadcast_to(np.eye(n), (m, n, n)).copy()
    sweeps = np.full(m, -1, dtype=np.intc)

    fro2 = np.zeros(m)
    for i in range(n):
        for j in range(n):
            fro2 = fro2 + a[:, i, j] * a[:, i, j]
    thresh = rel_tol * np.sqrt(fro2)

    active = np.ones(m, dtype=bool)
    for sweep in range(max_sweeps + 1):
        off2 = np.zeros(m)
        for p in range(n - 1):
            for q in range(p + 1, n):
                off2 = off2 + a[:, p, q] * a[:, p, q]
        off2 = 2.0 * off2
        done = active & ((off2 == 0.0) | (np.sqrt(off2) < thresh))
        sweeps[done] = sweep
        active &= ~done
        if not active.any() or sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                rot = active & (a[:, p, q] != 0.0)
                if not rot.any():
                    continue
                sub = a[rot]
                vs = v[rot]
                apq = sub[:, p, q]
                # tiny apq sends theta to inf and t to 0, the correct limit (as in C)
                with np.errstate(over="ignore"):
                    theta = (sub[:, q, q] - sub[:, p, p]) / (2.0 * apq)
                    t = 1.0 / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
                t = np.where(theta < 0.0, -t, t)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                c_ = c[:, None]
                s_ = s[:, None]
                x = sub[:, :, p].copy()
                y = sub[:, :, q].copy()
                sub[:, :, p] = c_ * x - s_ * y
                sub[:, :, q] = s_ * x + c_ * y
                x = sub[:, p, :].copy()
                y = sub[:, q, :].copy()
                sub[:, p, :] = c_ * x - s_ * y
                sub[:, q, :] = s_ * x + c_ * y
                sub[:, p, q] = 0.0
                sub[:, q, p] = 0.0
                x = vs[:, :, p].copy()
                y = vs[:, :, q].copy()
                vs[:, :, p] = c_ * x - s_ * y
                vs[:, :, q] = s_ * x + c_ * y
                a[rot] = sub
                v[rot] = vs

    w = np.ldexp(np.ascontiguousarray(np.diagonal(a, axis1=1, axis2=2)), e[:, None])
    return w, v, sweeps


def cholesky_batch(a_in):
    a = np.ascontiguousarray(a_in, dtype=np.float64)
    m, n, _ = a.shape
    l = np.zeros((m, n, n))
    info = np.full(m, -1, dtype=np.intc)
    for i in range(n):
        for j in range(i + 1):
            s = a[:, i, j].copy()
            for k in range(j):
                s = s - l[:, i, k] * l[:, j, k]
            if i == j:
                bad = (info < 0) & (s <= 0.0)
                info[bad] = i
                l[:, i, i] = np.sqrt(np.where(s > 0.0, s, 1.0))
            else:
                l[:, i, j] = s / l[:, j, j]
    return l, info


def tril_inv_batch(l_in):
    l = np.ascontiguousarray(l_in, dtype=np.float64)
    m, n, _ = l.shape
    x = np.zeros((m, n, n))
    for i in range(n):
        x[:, i, i] = 1.0 / l[:, i, i]
        for j in range(i):
            s = np.zeros(m)
            for k in range(j, i):
                s = s + l[:, i, k] * x[:, k, j]
            x[:, i, j] = -s / l[:, i, i]
    return x
