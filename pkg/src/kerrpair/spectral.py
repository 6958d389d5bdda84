"""Spectra of the fixed-N blocks: diagonalization, parameter sweeps,
anticrossing detection, and resonant-pair splittings.

The eigensolver is an implicit-shift QL sweep (compiled kernel when
available) with a Sturm-bisection + inverse-iteration fallback.  Splittings
of resonant pairs close at high order in g and routinely drop below the
float64 eigenvalue resolution eps*||H||; pair_splitting transparently
escalates to multiprecision arithmetic in that regime.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _core
from .errors import ConvergenceError, IdentificationError, PoleError
from .model import (ModelParams, SubspaceHamiltonian,
                    build_subspace_hamiltonian, derived_mu)

_EPS = np.finfo(float).eps

# validation tolerances for a decomposition (scaled by dimension / norm)
_ORTHO_TOL = 1e-10
_RESID_TOL = 1e-10


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with orthonormal eigenvectors.

    eigenvectors[:, k] holds the Fock-basis expansion coefficients of the
    k-th eigenstate; the largest-magnitude component of each column is
    made positive so repeated runs are bit-identical.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n_dim(self) -> int:
        return len(self.eigenvalues)


@dataclass(frozen=True)
class AnticrossingRecord:
    level_pair: tuple
    mu_star: float
    gap_min: float
    fock_pair: tuple


@dataclass(frozen=True)
class SweepResult:
    kind: str                      # "mu" or "g"
    grid: np.ndarray
    eigenvalues: np.ndarray        # (n_points, n_dim)
    dimensionless: np.ndarray      # (n_points, n_dim)
    params: ModelParams
    eigenvectors: Optional[np.ndarray] = None   # (n_points, n_dim, n_dim)

    @property
    def n_dim(self) -> int:
        return self.eigenvalues.shape[1]


def _fix_signs(z):
    for k in range(z.shape[1]):
        col = z[:, k]
        i = int(np.argmax(np.abs(col)))
        if col[i] < 0.0:
            col *= -1.0
    return z


def _validate(h: SubspaceHamiltonian, w, z):
    n = h.n_dim
    ortho = np.max(np.abs(z.T @ z - np.eye(n)))
    if ortho > _ORTHO_TOL * n:
        raise ConvergenceError(f"eigenvector orthonormality defect {ortho:.3e}")
    hz = h.diag[:, None] * z
    if n > 1:
        hz[:-1] += h.offdiag[:, None] * z[1:]
        hz[1:] += h.offdiag[:, None] * z[:-1]
    resid = np.max(np.linalg.norm(hz - z * w[None, :], axis=0))
    norm = h.norm_estimate()
    if resid > _RESID_TOL * max(norm, _EPS):
        raise ConvergenceError(f"eigenpair residual {resid:.3e} exceeds "
                               f"tolerance for ||H|| ~ {norm:.3e}")


def eigendecompose(h: SubspaceHamiltonian, max_sweeps: int = 50) -> Spectrum:
    """Full spectrum of a tridiagonal block.

    Raises ConvergenceError instead of returning partial results: if the QL
    sweep stalls the Sturm/inverse-iteration path is tried, and its output
    is subject to the same orthonormality/residual checks.
    """
    n = h.n_dim
    d = np.array(h.diag, dtype=float)
    e = np.zeros(n)
    if n > 1:
        e[: n - 1] = h.offdiag
    z = np.eye(n)
    status = _core.tridiag_ql(d, e, z, max_sweeps)
    if status != 0:
        w = _core.bisect_eigenvalues(h.diag, h.offdiag)
        z = _core.inverse_iteration(h.diag, h.offdiag, w)
        d = w
    order = np.argsort(d, kind="stable")
    w = d[order]
    z = z[:, order]
    z = _fix_signs(np.ascontiguousarray(z))
    _validate(h, w, z)
    w.setflags(write=False)
    z.setflags(write=False)
    return Spectrum(eigenvalues=w, eigenvectors=z)


def dimensionless_energies(s: Spectrum, p: ModelParams) -> np.ndarray:
    """Map eigenvalues to (alpha1+alpha2)*eps/(delta+alpha2*N)^2."""
    denom = p.delta + p.alpha2 * p.big_n
    if denom == 0.0:
        raise PoleError("dimensionless energies undefined at mu = 0")
    return s.eigenvalues * (p.alpha_sum / denom ** 2)


def _dimensionless_factor(p: ModelParams) -> float:
    denom = p.delta + p.alpha2 * p.big_n
    if denom == 0.0:
        raise PoleError("dimensionless energies undefined at mu = 0")
    return p.alpha_sum / denom ** 2


def _sweep(kind, p, grid, keep_vectors, threads):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0:
        raise ValueError("grid must be a non-empty 1-d array")
    if len(grid) > 1 and not np.all(np.diff(grid) > 0):
        raise ValueError("grid must be strictly increasing")
    n_dim = p.big_n + 1
    evals = np.empty((len(grid), n_dim))
    dimless = np.empty((len(grid), n_dim))
    evecs = np.empty((len(grid), n_dim, n_dim)) if keep_vectors else None

    def point(i):
        v = grid[i]
        pi = p.with_mu(v) if kind == "mu" else p.with_g(v)
        try:
            s = eigendecompose(build_subspace_hamiltonian(pi))
        except ConvergenceError as exc:
            raise ConvergenceError(
                f"decomposition failed at {kind} grid point {i} "
                f"(value {v!r}): {exc}") from exc
        evals[i] = s.eigenvalues
        dimless[i] = s.eigenvalues * _dimensionless_factor(pi)
        if evecs is not None:
            evecs[i] = s.eigenvectors

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(point, range(len(grid))))
    else:
        for i in range(len(grid)):
            point(i)
    return SweepResult(kind=kind, grid=grid, eigenvalues=evals,
                       dimensionless=dimless, params=p, eigenvectors=evecs)


def sweep_mu(p: ModelParams, mu_grid, keep_vectors=False, threads=1) -> SweepResult:
    """Spectra over a grid of the resonance parameter (detuning re-derived
    at every point); grid points are independent work items."""
    return _sweep("mu", p, mu_grid, keep_vectors, threads)


def sweep_g(p: ModelParams, g_grid, keep_vectors=False, threads=1) -> SweepResult:
    """Spectra over a coupling grid at fixed detuning."""
    return _sweep("g", p, g_grid, keep_vectors, threads)


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_min(f, a, b, xtol):
    """Golden-section minimum of f on [a, b]; returns best (x, f(x))."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    best = (c, fc) if fc <= fd else (d, fd)
    while abs(b - a) > xtol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
        cand = (c, fc) if fc <= fd else (d, fd)
        if cand[1] < best[1]:
            best = cand
    return best


def detect_anticrossings(sweep: SweepResult, mu_tol: float = 1e-6):
    """Refine every interior local minimum of every adjacent-level gap.

    Re-diagonalizes at golden-section probe points rather than
    interpolating eigenvalues (near-degenerate interpolation is
    ill-conditioned).  Returns records sorted by mu_star; empty list when
    no interior local minimum exists.
    """
    if sweep.kind != "mu":
        raise ValueError("anticrossing detection requires a mu sweep")
    grid = sweep.grid
    if len(grid) < 3:
        raise ValueError("need at least 3 sweep points")
    p = sweep.params
    evals = sweep.eigenvalues
    records = []

    def gap_at(mu, lvl):
        s = eigendecompose(build_subspace_hamiltonian(p.with_mu(mu)))
        return s.eigenvalues[lvl + 1] - s.eigenvalues[lvl]

    for lvl in range(sweep.n_dim - 1):
        gaps = evals[:, lvl + 1] - evals[:, lvl]
        for i in range(1, len(grid) - 1):
            if not (gaps[i] < gaps[i - 1] and gaps[i] <= gaps[i + 1]):
                continue
            mu_star, gap_min = _golden_min(
                lambda mu: gap_at(mu, lvl), grid[i - 1], grid[i + 1], mu_tol)
            s = eigendecompose(build_subspace_hamiltonian(p.with_mu(mu_star)))
            weight = s.eigenvectors[:, lvl] ** 2 + s.eigenvectors[:, lvl + 1] ** 2
            top = np.argsort(weight, kind="stable")[-2:]
            fock_pair = (int(min(top)), int(max(top)))
            records.append(AnticrossingRecord(
                level_pair=(lvl, lvl + 1), mu_star=float(mu_star),
                gap_min=float(gap_min), fock_pair=fock_pair))
    records.sort(key=lambda r: (r.mu_star, r.level_pair))
    return records


def overlap_assignment(v_prev: np.ndarray, v_next: np.ndarray):
    """Greedy maximal matching of eigenvector columns by |overlap|.

    Returns perm with perm[k] = column of v_next continuing column k of
    v_prev.  Ties break toward the lower (row, column) pair, so the result
    is deterministic.
    """
    n = v_prev.shape[1]
    ov = np.abs(v_prev.T @ v_next)
    perm = np.full(n, -1, dtype=int)
    used_r = np.zeros(n, dtype=bool)
    used_c = np.zeros(n, dtype=bool)
    for _ in range(n):
        masked = np.where(used_r[:, None] | used_c[None, :], -1.0, ov)
        r, c = np.unravel_index(int(np.argmax(masked)), masked.shape)
        perm[r] = c
        used_r[r] = True
        used_c[c] = True
    return perm


def _mp_pair_splitting(h: SubspaceHamiltonian, n: int, partner: int, dps: int):
    """Multiprecision splitting of the pair dominated by |n> +/- |partner>."""
    from mpmath import mp

    with mp.workdps(dps):
        dim = h.n_dim
        a = mp.matrix(dim)
        for i in range(dim):
            a[i, i] = mp.mpf(float(h.diag[i]))
        for i in range(dim - 1):
            a[i, i + 1] = a[i + 1, i] = mp.mpf(float(h.offdiag[i]))
        w, q = mp.eigsy(a)
        s = mp.sqrt(2) / 2
        best = {}
        for sign, key in ((1, "+"), (-1, "-")):
            ovs = [abs(s * (q[n, k] + sign * q[partner, k])) for k in range(dim)]
            k = max(range(dim), key=lambda j: ovs[j])
            best[key] = (k, ovs[k])
        if best["+"][0] == best["-"][0]:
            raise IdentificationError("pair states map to the same eigenvector")
        ov_min = min(best["+"][1], best["-"][1])
        split = abs(w[best["+"][0]] - w[best["-"][0]])
        return float(split), float(ov_min)


def pair_splitting(p: ModelParams, n: int, m: int,
                   overlap_floor: float = 0.5) -> float:
    """Energy splitting of the resonant pair (n, m-n) at integer mu = m.

    The two eigenstates are identified by maximal overlap with
    (|n,N-n> +/- |m-n,N-m+n>)/sqrt(2).  Splittings scale like g^(m-2n)
    and fall below eps*||H|| already at modest g; when that happens the
    pair is re-resolved in multiprecision arithmetic so the returned value
    stays meaningful.
    """
    mu = derived_mu(p)
    if abs(mu - m) > 1e-9:
        raise ValueError(f"params have mu={mu!r}, expected integer m={m}; "
                         "set the detuning with delta_for_mu first")
    partner = m - n
    if not (0 <= n < partner <= p.big_n):
        raise ValueError("need 0 <= n < m-n <= N")
    h = build_subspace_hamiltonian(p)
    s = eigendecompose(h)
    dim = h.n_dim
    plus = np.zeros(dim)
    minus = np.zeros(dim)
    plus[n] = plus[partner] = 1.0 / math.sqrt(2.0)
    minus[n] = 1.0 / math.sqrt(2.0)
    minus[partner] = -1.0 / math.sqrt(2.0)
    ov_plus = np.abs(s.eigenvectors.T @ plus)
    ov_minus = np.abs(s.eigenvectors.T @ minus)
    k_plus = int(np.argmax(ov_plus))
    k_minus = int(np.argmax(ov_minus))
    best = min(ov_plus[k_plus], ov_minus[k_minus])
    if best < overlap_floor:
        raise IdentificationError(
            f"pair ({n},{partner}) no longer dominates its eigenstates "
            f"(best overlap {best:.3f} < {overlap_floor})")
    if k_plus == k_minus:
        raise IdentificationError("pair states map to the same eigenvector")
    split = float(abs(s.eigenvalues[k_plus] - s.eigenvalues[k_minus]))

    floor = 1e5 * _EPS * max(h.norm_estimate(), 1.0)
    if split >= floor:
        return split
    # below the float64 resolution: escalate precision until the value is
    # clearly resolved or provably zero at 120 digits
    norm = max(h.norm_estimate(), 1.0)
    for dps in (50, 80, 120):
        split_mp, ov_mp = _mp_pair_splitting(h, n, partner, dps)
        if ov_mp < overlap_floor:
            raise IdentificationError(
                f"pair ({n},{partner}) ambiguous in multiprecision pass")
        if split_mp > norm * 10.0 ** (-(dps - 15)):
            return split_mp
    return split_mp


def trace_sum(s: Spectrum) -> float:
    return float(np.sum(s.eigenvalues))


def sweep_to_csv_rows(sweep: SweepResult):
    """Rows (grid_value, level_index, eigenvalue, dimensionless) in grid
    order; the CSV schema used by the sweep subcommands."""
    rows = []
    for i, v in enumerate(sweep.grid):
        for lvl in range(sweep.n_dim):
            rows.append((v, lvl, sweep.eigenvalues[i, lvl],
                         sweep.dimensionless[i, lvl]))
    return rows
