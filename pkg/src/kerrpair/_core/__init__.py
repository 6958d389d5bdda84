"""Numerical kernel backend selection.

The compiled extension is preferred; the pure-Python twin is used when the
extension is unavailable or when KERRPAIR_PURE_PYTHON=1 is set.  Both expose
``tridiag_ql`` and ``integrate_bloch`` with the same contracts, plus the
shared support routines below (Sturm bisection and inverse iteration, used
as the eigensolver's fallback for pathological inputs).
"""

import math
import os

import numpy as np

from . import py_kernels

if os.environ.get("KERRPAIR_PURE_PYTHON", "") == "1":
    _impl = py_kernels
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = py_kernels

tridiag_ql = _impl.tridiag_ql
integrate_bloch = _impl.integrate_bloch
BACKEND = _impl.BACKEND_NAME

_EPS = np.finfo(float).eps


def sturm_count(d, e, x):
    """Number of eigenvalues of the tridiagonal (d, e) strictly below x."""
    n = len(d)
    count = 0
    q = 1.0
    tiny = _EPS * (np.max(np.abs(d)) + np.max(np.abs(e), initial=0.0) + 1.0)
    for i in range(n):
        if i == 0:
            q = d[0] - x
        else:
            if q == 0.0:
                q = tiny
            q = d[i] - x - e[i - 1] * e[i - 1] / q
        if q < 0.0:
            count += 1
    return count


def bisect_eigenvalues(d, e, tol_factor=4.0):
    """All eigenvalues of the tridiagonal (d, e) by Sturm-sequence bisection.

    Robust but slow; serves as the fallback path when QL stalls and as an
    independent cross-check in tests.
    """
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    n = len(d)
    if n == 0:
        return np.empty(0)
    radius = np.zeros(n)
    if n > 1:
        radius[0] = abs(e[0])
        radius[-1] = abs(e[-1])
        if n > 2:
            radius[1:-1] = np.abs(e[:-1]) + np.abs(e[1:])
    lo = float(np.min(d - radius))
    hi = float(np.max(d + radius))
    norm = max(abs(lo), abs(hi), 1e-300)
    tol = tol_factor * _EPS * norm
    eigs = np.empty(n)
    for k in range(n):
        a, b = lo, hi
        # eigenvalue k (0-based, ascending): smallest x with count(x) > k
        while b - a > tol:
            mid = 0.5 * (a + b)
            if sturm_count(d, e, mid) > k:
                b = mid
            else:
                a = mid
        eigs[k] = 0.5 * (a + b)
    return eigs


def _solve_shifted_tridiag(d, e, lam, b):
    """Solve (T - lam*I) x = b with partial pivoting (fill-in band kept)."""
    n = len(d)
    x = b.astype(float).copy()
    diag = d - lam
    sup = np.zeros(n)
    sub = np.zeros(n)
    sup2 = np.zeros(n)
    if n > 1:
        sup[: n - 1] = e
        sub[: n - 1] = e
    tiny = _EPS * (np.max(np.abs(d)) + np.max(np.abs(e), initial=0.0) + abs(lam) + 1.0)
    for i in range(n - 1):
        if abs(sub[i]) > abs(diag[i]):
            # swap rows i, i+1
            diag[i], sub[i] = sub[i], diag[i]
            sup[i], diag[i + 1] = diag[i + 1], sup[i]
            if i + 1 < n - 1:
                sup2[i], sup[i + 1] = sup[i + 1], sup2[i]
            x[i], x[i + 1] = x[i + 1], x[i]
        piv = diag[i]
        if piv == 0.0:
            piv = tiny
            diag[i] = piv
        m = sub[i] / piv
        diag[i + 1] -= m * sup[i]
        if i + 1 < n - 1:
            sup[i + 1] -= m * sup2[i]
        x[i + 1] -= m * x[i]
    if diag[n - 1] == 0.0:
        diag[n - 1] = tiny
    # back substitution
    for i in range(n - 1, -1, -1):
        acc = x[i]
        if i + 1 < n:
            acc -= sup[i] * x[i + 1]
        if i + 2 < n:
            acc -= sup2[i] * x[i + 2]
        x[i] = acc / diag[i]
    return x


def inverse_iteration(d, e, eigenvalues, n_iter=4):
    """Eigenvectors for precomputed eigenvalues of a tridiagonal matrix.

    Vectors in a near-degenerate cluster are reorthogonalized against each
    other, which is the standard cure for inverse iteration's tendency to
    reproduce one cluster member.
    """
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    n = len(d)
    norm = np.max(np.abs(d)) + np.max(np.abs(e), initial=0.0) + 1.0
    cluster_tol = 1e-8 * norm
    z = np.empty((n, n))
    rng = np.random.default_rng(1234567)
    cluster_start = 0
    for k in range(n):
        if k > 0 and abs(eigenvalues[k] - eigenvalues[k - 1]) > cluster_tol:
            cluster_start = k
        lam = eigenvalues[k]
        v = rng.standard_normal(n)
        v /= np.linalg.norm(v)
        for _ in range(n_iter):
            v = _solve_shifted_tridiag(d, e, lam, v)
            for j in range(cluster_start, k):
                v -= np.dot(z[:, j], v) * z[:, j]
            nv = np.linalg.norm(v)
            if nv == 0.0:
                v = rng.standard_normal(n)
                nv = np.linalg.norm(v)
            v /= nv
        z[:, k] = v
    return z
