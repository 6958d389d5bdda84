# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled backend: implicit-shift QL eigensolver and the Bloch-flow
Dormand-Prince 5(4) integrator.  Mirrors py_kernels exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, hypot, copysign, sqrt, fmax, fmin

cnp.import_array()

BACKEND_NAME = "compiled"

DEF MAXN_STACK = 0  # all work arrays come from numpy; no alloca tricks


cdef int _tqli(double* d, double* e, double* z, Py_ssize_t n,
               int max_sweeps) noexcept nogil:
    cdef Py_ssize_t l, m, i, k
    cdef int iters
    cdef double dd, g, r, s, c, p, f, b, fk
    cdef double eps = 2.220446049250313e-16
    cdef bint underflow
    if n == 0:
        return 0
    for l in range(n):
        iters = 0
        while True:
            m = n - 1
            for i in range(l, n - 1):
                dd = fabs(d[i]) + fabs(d[i + 1])
                if fabs(e[i]) <= eps * dd:
                    m = i
                    break
            if m == l:
                break
            iters += 1
            if iters > max_sweeps:
                return 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for k in range(n):
                    fk = z[k * n + i + 1]
                    z[k * n + i + 1] = s * z[k * n + i] + c * fk
                    z[k * n + i] = c * z[k * n + i] - s * fk
                i -= 1
            if underflow and i >= l:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


def tridiag_ql(cnp.ndarray[double, ndim=1] d not None,
               cnp.ndarray[double, ndim=1] e not None,
               cnp.ndarray[double, ndim=2] z not None,
               int max_sweeps=50):
    """See py_kernels.tridiag_ql; identical contract."""
    cdef Py_ssize_t n = d.shape[0]
    if e.shape[0] != n or z.shape[0] != n or z.shape[1] != n:
        raise ValueError("inconsistent workspace shapes")
    if not (d.flags.c_contiguous and e.flags.c_contiguous and z.flags.c_contiguous):
        raise ValueError("arrays must be C-contiguous")
    cdef int status
    with nogil:
        status = _tqli(<double*> d.data, <double*> e.data, <double*> z.data,
                       n, max_sweeps)
    return status


# ----------------------------------------------------------------------
# Dormand-Prince 5(4) for the Bloch flow.

cdef inline void _rhs(double lx, double ly, double lz,
                      double c1, double c2, double g2, double* out) noexcept nogil:
    out[0] = -c1 * ly * lz - c2 * ly
    out[1] = c1 * lx * lz + c2 * lx - g2 * lz
    out[2] = g2 * ly


cdef int _dopri5(double* y, double c1, double c2, double g2,
                 double t0, double t1,
                 double* teval, Py_ssize_t neval, double* out,
                 double rtol, double atol, long max_steps,
                 long* steps_out) noexcept nogil:
    cdef double A21 = 1.0 / 5.0
    cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
    cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
    cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
    cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
    cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0
    cdef double A63 = 46732.0 / 5247.0, A64 = 49.0 / 176.0
    cdef double A65 = -5103.0 / 18656.0
    cdef double A71 = 35.0 / 384.0, A73 = 500.0 / 1113.0, A74 = 125.0 / 192.0
    cdef double A75 = -2187.0 / 6784.0, A76 = 11.0 / 84.0
    cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
    cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0
    cdef double D1 = -12715105075.0 / 11282082432.0
    cdef double D3 = 87487479700.0 / 32700410799.0
    cdef double D4 = -10690763975.0 / 1880347072.0
    cdef double D5 = 701980252875.0 / 199316789632.0
    cdef double D6 = -1453857185.0 / 822651844.0
    cdef double D7 = 69997945.0 / 29380423.0
    cdef double eps = 2.220446049250313e-16

    cdef double k1[3], k2[3], k3[3], k4[3], k5[3], k6[3], k7[3]
    cdef double ynew[3], yt[3], errv, sc, err2, err
    cdef double ydiff[3], bspl[3], c4v[3], c5v[3]
    cdef double t = t0, h, hmin, span, direction, scale, th, fac
    cdef Py_ssize_t ieval = 0, j
    cdef long nsteps = 0

    direction = 1.0 if t1 >= t0 else -1.0
    span = fabs(t1 - t0)
    if span == 0.0:
        for ieval in range(neval):
            for j in range(3):
                out[ieval * 3 + j] = y[j]
        steps_out[0] = 0
        return 0

    _rhs(y[0], y[1], y[2], c1, c2, g2, k1)
    scale = fmax(fmax(fabs(k1[0]), fabs(k1[1])), fabs(k1[2])) + 1e-30
    h = direction * fmin(span, 1e-2 * (fmax(fmax(fabs(y[0]), fabs(y[1])),
                                            fabs(y[2])) + atol) / scale
                         + 1e-12 * span)
    if h == 0.0:
        h = direction * 1e-6 * span
    hmin = 16.0 * eps * fmax(fabs(t0), fabs(t1))

    while ieval < neval and teval[ieval] * direction <= t * direction:
        for j in range(3):
            out[ieval * 3 + j] = y[j]
        ieval += 1

    while direction * (t1 - t) > 0.0:
        if nsteps >= max_steps:
            steps_out[0] = nsteps
            return 2
        if fabs(h) < hmin:
            steps_out[0] = nsteps
            return 1
        if direction * (t + h - t1) > 0.0:
            h = t1 - t

        for j in range(3):
            yt[j] = y[j] + h * A21 * k1[j]
        _rhs(yt[0], yt[1], yt[2], c1, c2, g2, k2)
        for j in range(3):
            yt[j] = y[j] + h * (A31 * k1[j] + A32 * k2[j])
        _rhs(yt[0], yt[1], yt[2], c1, c2, g2, k3)
        for j in range(3):
            yt[j] = y[j] + h * (A41 * k1[j] + A42 * k2[j] + A43 * k3[j])
        _rhs(yt[0], yt[1], yt[2], c1, c2, g2, k4)
        for j in range(3):
            yt[j] = y[j] + h * (A51 * k1[j] + A52 * k2[j] + A53 * k3[j]
                                + A54 * k4[j])
        _rhs(yt[0], yt[1], yt[2], c1, c2, g2, k5)
        for j in range(3):
            yt[j] = y[j] + h * (A61 * k1[j] + A62 * k2[j] + A63 * k3[j]
                                + A64 * k4[j] + A65 * k5[j])
        _rhs(yt[0], yt[1], yt[2], c1, c2, g2, k6)
        for j in range(3):
            ynew[j] = y[j] + h * (A71 * k1[j] + A73 * k3[j] + A74 * k4[j]
                                  + A75 * k5[j] + A76 * k6[j])
        _rhs(ynew[0], ynew[1], ynew[2], c1, c2, g2, k7)

        err2 = 0.0
        for j in range(3):
            errv = h * (E1 * k1[j] + E3 * k3[j] + E4 * k4[j] + E5 * k5[j]
                        + E6 * k6[j] + E7 * k7[j])
            sc = atol + rtol * fmax(fabs(y[j]), fabs(ynew[j]))
            err2 += (errv / sc) * (errv / sc)
        err = sqrt(err2 / 3.0)

        nsteps += 1
        if err <= 1.0:
            if ieval < neval and direction * (teval[ieval] - (t + h)) <= 0.0:
                for j in range(3):
                    ydiff[j] = ynew[j] - y[j]
                    bspl[j] = h * k1[j] - ydiff[j]
                    c4v[j] = ydiff[j] - h * k7[j] - bspl[j]
                    c5v[j] = h * (D1 * k1[j] + D3 * k3[j] + D4 * k4[j]
                                  + D5 * k5[j] + D6 * k6[j] + D7 * k7[j])
                while ieval < neval and direction * (teval[ieval] - (t + h)) <= 0.0:
                    th = (teval[ieval] - t) / h
                    for j in range(3):
                        out[ieval * 3 + j] = y[j] + th * (
                            ydiff[j] + (1.0 - th) * (bspl[j] + th * (
                                c4v[j] + (1.0 - th) * c5v[j])))
                    ieval += 1
            t = t + h
            for j in range(3):
                y[j] = ynew[j]
                k1[j] = k7[j]
            fac = 5.0 if err == 0.0 else 0.9 * err ** -0.2
            h = h * fmin(5.0, fmax(0.2, fac))
        else:
            h = h * fmax(0.2, 0.9 * err ** -0.2)

    while ieval < neval:
        for j in range(3):
            out[ieval * 3 + j] = y[j]
        ieval += 1
    steps_out[0] = nsteps
    return 0


def integrate_bloch(y0, double c1, double c2, double g2,
                    double t0, double t1, t_eval,
                    double rtol, double atol, long max_steps=20_000_000):
    """See py_kernels.integrate_bloch; identical contract."""
    cdef cnp.ndarray[double, ndim=1] y = np.array(y0, dtype=np.float64).copy()
    cdef cnp.ndarray[double, ndim=1] te = np.ascontiguousarray(t_eval, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] out = np.empty((te.shape[0], 3))
    cdef long nsteps = 0
    cdef int status
    if y.shape[0] != 3:
        raise ValueError("state must have three components")
    with nogil:
        status = _dopri5(<double*> y.data, c1, c2, g2, t0, t1,
                         <double*> te.data, te.shape[0], <double*> out.data,
                         rtol, atol, max_steps, &nsteps)
    return out, nsteps, status
