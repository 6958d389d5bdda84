"""Pure-Python backend for the numerical kernels.

Algorithmically identical to the compiled extension: an implicit-shift QL
sweep for symmetric tridiagonal eigenproblems and an adaptive
Dormand-Prince 5(4) integrator specialized to the Bloch-sphere flow.
Selected automatically when the extension is missing, or forced with
KERRPAIR_PURE_PYTHON=1.
"""

import math

import numpy as np

_EPS = np.finfo(float).eps

BACKEND_NAME = "python"


def tridiag_ql(d, e, z, max_sweeps=50):
    """Implicit-shift QL on a symmetric tridiagonal matrix, in place.

    d: diagonal (length n), overwritten with eigenvalues.
    e: subdiagonal in e[0..n-2], e[n-1] scratch; destroyed.
    z: (n, n) array, usually the identity; accumulates rotations so that
       column k ends up as the eigenvector of d[k].

    Returns 0 on success, 1 if any eigenvalue needed more than
    ``max_sweeps`` QL sweeps.
    """
    n = d.shape[0]
    if n == 0:
        return 0
    e = e  # length n, e[n-1] is scratch
    for l in range(n):
        iters = 0
        while True:
            for m in range(l, n - 1):
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _EPS * dd:
                    break
            else:
                m = n - 1
            if m == l:
                break
            iters += 1
            if iters > max_sweeps:
                return 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
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
                # plane rotation of eigenvector columns i, i+1
                fcol = z[:, i + 1].copy()
                z[:, i + 1] = s * z[:, i] + c * fcol
                z[:, i] = c * z[:, i] - s * fcol
            if underflow and i >= l:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


# ----------------------------------------------------------------------
# Dormand-Prince 5(4) with PI-free standard step control and the usual
# quartic dense-output interpolant.  State is the 3-vector (Lx, Ly, Lz);
# the right-hand side is the quadratic Bloch-sphere flow
#   dLx = -c1*Ly*Lz - c2*Ly
#   dLy =  c1*Lx*Lz + c2*Lx - g2*Lz
#   dLz =  g2*Ly
# with c1 = alpha1 + alpha2, c2 = (alpha1*N - alpha2*N - 2*Delta)/2,
# g2 = 2*g.

_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (19372.0 / 6561.0, -25360.0 / 2187.0,
                          64448.0 / 6561.0, -212.0 / 729.0)
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0,
                                46732.0 / 5247.0, 49.0 / 176.0,
                                -5103.0 / 18656.0)
_A71, _A73, _A74, _A75, _A76 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                                -2187.0 / 6784.0, 11.0 / 84.0)
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0,
                                71.0 / 1920.0, -17253.0 / 339200.0,
                                22.0 / 525.0, -1.0 / 40.0)
_D1 = -12715105075.0 / 11282082432.0
_D3 = 87487479700.0 / 32700410799.0
_D4 = -10690763975.0 / 1880347072.0
_D5 = 701980252875.0 / 199316789632.0
_D6 = -1453857185.0 / 822651844.0
_D7 = 69997945.0 / 29380423.0


def _rhs(y, c1, c2, g2):
    lx, ly, lz = y
    return np.array([
        -c1 * ly * lz - c2 * ly,
        c1 * lx * lz + c2 * lx - g2 * lz,
        g2 * ly,
    ])


def integrate_bloch(y0, c1, c2, g2, t0, t1, t_eval, rtol, atol,
                    max_steps=20_000_000):
    """Integrate the Bloch flow from t0 to t1, sampling at t_eval.

    t_eval must be sorted in the direction of integration and lie within
    [t0, t1] (inclusive).  Returns (states, nsteps, status) with status
    0 = ok, 1 = step-size underflow, 2 = step budget exhausted.
    """
    y = np.asarray(y0, dtype=float).copy()
    t_eval = np.asarray(t_eval, dtype=float)
    out = np.empty((len(t_eval), 3))
    direction = 1.0 if t1 >= t0 else -1.0
    span = abs(t1 - t0)
    if span == 0.0:
        out[:] = y
        return out, 0, 0

    t = t0
    k1 = _rhs(y, c1, c2, g2)
    # initial step: conservative fraction of the span scaled by |y'|
    scale = np.max(np.abs(k1)) + 1e-30
    h = direction * min(span, 1e-2 * (np.max(np.abs(y)) + atol) / scale + 1e-12 * span)
    if h == 0.0:
        h = direction * 1e-6 * span
    hmin = 16.0 * _EPS * max(abs(t0), abs(t1))

    ieval = 0
    nsteps = 0
    while ieval < len(t_eval) and t_eval[ieval] * direction <= t * direction:
        out[ieval] = y
        ieval += 1

    while direction * (t1 - t) > 0.0:
        if nsteps >= max_steps:
            return out, nsteps, 2
        if abs(h) < hmin:
            return out, nsteps, 1
        if direction * (t + h - t1) > 0.0:
            h = t1 - t

        k2 = _rhs(y + h * _A21 * k1, c1, c2, g2)
        k3 = _rhs(y + h * (_A31 * k1 + _A32 * k2), c1, c2, g2)
        k4 = _rhs(y + h * (_A41 * k1 + _A42 * k2 + _A43 * k3), c1, c2, g2)
        k5 = _rhs(y + h * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4),
                  c1, c2, g2)
        k6 = _rhs(y + h * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4
                           + _A65 * k5), c1, c2, g2)
        ynew = y + h * (_A71 * k1 + _A73 * k3 + _A74 * k4 + _A75 * k5
                        + _A76 * k6)
        k7 = _rhs(ynew, c1, c2, g2)

        errv = h * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6
                    + _E7 * k7)
        sc = atol + rtol * np.maximum(np.abs(y), np.abs(ynew))
        err = math.sqrt(float(np.mean((errv / sc) ** 2)))

        nsteps += 1
        if err <= 1.0:
            # dense output for any t_eval inside (t, t+h]
            if ieval < len(t_eval) and direction * (t_eval[ieval] - (t + h)) <= 0.0:
                ydiff = ynew - y
                bspl = h * k1 - ydiff
                c4v = ydiff - h * k7 - bspl
                c5v = h * (_D1 * k1 + _D3 * k3 + _D4 * k4 + _D5 * k5
                           + _D6 * k6 + _D7 * k7)
                while ieval < len(t_eval) and direction * (t_eval[ieval] - (t + h)) <= 0.0:
                    th = (t_eval[ieval] - t) / h
                    out[ieval] = y + th * (ydiff + (1.0 - th)
                                           * (bspl + th * (c4v + (1.0 - th) * c5v)))
                    ieval += 1
            t = t + h
            y = ynew
            k1 = k7
            fac = 0.9 * err ** -0.2 if err > 0.0 else 5.0
            h = h * min(5.0, max(0.2, fac))
        else:
            h = h * max(0.2, 0.9 * err ** -0.2)

    while ieval < len(t_eval):
        out[ieval] = y
        ieval += 1
    return out, nsteps, 0
