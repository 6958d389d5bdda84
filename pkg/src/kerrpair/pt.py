"""Closed-form second- and fourth-order level-shift coefficients of the
coupling expansion, a numerical series-coefficient extractor, and the
n -> mu - n symmetry check.

Coefficient conventions: eps_n(g) = eps_n(0) + sum_k eps_n^(k) g^k, with
the g^k factor stripped from the reported coefficients.  Odd orders vanish
identically (each coupling vertex changes n by one), so the extractor fits
an even polynomial.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BranchTrackingError, PoleError
from .model import ModelParams, build_subspace_hamiltonian, derived_mu, unperturbed_energy
from .spectral import eigendecompose

_POLE_TOL = 1e-12


@dataclass(frozen=True)
class PTCorrection:
    order: int
    level: int
    value: float
    fit_error: Optional[float] = None


def _y(n: float, mu: float) -> float:
    return (2.0 * n - mu) ** 2


def epsilon2_closed(n: float, mu: float, big_n: int, alpha_sum: float) -> float:
    """Second-order coefficient; rational in (n, mu) with poles at
    (2n-mu)^2 = 1.  Even in (2n-mu), hence exactly symmetric under
    n -> mu - n."""
    y = _y(n, mu)
    den = y - 1.0
    if abs(den) <= _POLE_TOL * max(y, 1.0):
        raise PoleError("second-order coefficient pole: (2n-mu)^2 = 1")
    return (y - mu * mu + 2.0 * big_n * (mu + 1.0)) / den / alpha_sum


def epsilon4_closed(n: float, mu: float, big_n: int, alpha_sum: float) -> float:
    """Fourth-order coefficient; poles at (2n-mu)^2 in {1, 4}."""
    y = _y(n, mu)
    d1 = y - 1.0
    d4 = y - 4.0
    if abs(d1) <= _POLE_TOL * max(y, 1.0) or abs(d4) <= _POLE_TOL * max(y, 4.0):
        raise PoleError("fourth-order coefficient pole: (2n-mu)^2 in {1, 4}")
    mu2 = mu * mu
    a = (-12.0 * y * y + 4.0 * y * (5.0 * mu2 + 10.0 * mu + 11.0)
         + 4.0 * (7.0 * mu2 + 14.0 * mu + 4.0))
    b = (12.0 * y * y * (mu - 1.0)
         - 4.0 * y * (5.0 * mu2 * mu + 5.0 * mu2 + mu - 11.0)
         - 4.0 * (7.0 * mu2 * mu + 7.0 * mu2 - 10.0 * mu - 4.0))
    c = (y ** 3 - 3.0 * y * y * (2.0 * mu2 + 3.0)
         + y * (5.0 * mu2 * mu2 + 2.0 * mu2 + 20.0)
         + 7.0 * mu2 * mu2 - 20.0 * mu2)
    num = big_n * big_n * a + big_n * b + c
    return num / (d1 ** 3 * d4) / alpha_sum ** 3


def epsilon2_sum(n: int, p: ModelParams) -> float:
    """Second-order coefficient as the explicit two-neighbor sum
    (coupling matrix element)^2 / energy gap, boundary terms dropped.
    The g^2 factor is stripped."""
    nn = p.big_n
    if not 0 <= n <= nn:
        raise ValueError("level index out of range")
    e_n = unperturbed_energy(n, nn - n, p)
    total = 0.0
    if n > 0:
        gap = e_n - unperturbed_energy(n - 1, nn - n + 1, p)
        if gap == 0.0:
            raise PoleError(f"vanishing gap to level {n - 1}")
        total += n * (nn - n + 1) / gap
    if n < nn:
        gap = e_n - unperturbed_energy(n + 1, nn - n - 1, p)
        if gap == 0.0:
            raise PoleError(f"vanishing gap to level {n + 1}")
        total += (n + 1) * (nn - n) / gap
    return total


def check_pt_symmetry(k: int, n: float, mu: float, big_n: int,
                      alpha_sum: float = 1.0) -> float:
    """|eps_n^(k) - eps_(mu-n)^(k)| from the closed forms; exactly zero
    away from the poles."""
    if k == 2:
        f = epsilon2_closed
    elif k == 4:
        f = epsilon4_closed
    else:
        raise ValueError("closed forms exist for k in {2, 4} only")
    return abs(f(n, mu, big_n, alpha_sum) - f(mu - n, mu, big_n, alpha_sum))


def _default_g0(p: ModelParams, n: int) -> float:
    """Largest grid coupling: keeps the local expansion parameter
    (matrix element / gap) * g at about 0.03 so the guard term absorbs
    the first neglected order without starving the fit of signal."""
    nn = p.big_n
    mu = derived_mu(p)
    half = abs(p.alpha_sum) / 2.0
    kappa = 0.0
    if n > 0:
        kappa = max(kappa, math.sqrt(n * (nn - n + 1))
                    / (half * abs(mu - 2.0 * n + 1.0)))
    if n < nn:
        kappa = max(kappa, math.sqrt((n + 1) * (nn - n))
                    / (half * abs(mu - 2.0 * n - 1.0)))
    if kappa == 0.0:
        return 0.03
    return 0.03 / kappa


def extract_series_coefficients(p: ModelParams, n: int, max_order: int = 4,
                                g0: Optional[float] = None,
                                n_points: int = 12):
    """Even-polynomial least-squares fit of the eigenvalue branch through
    level n over the geometric coupling grid g_j = g0 * 2^-j.

    Requires non-integer mu at least 0.05 from the nearest integer (the
    non-degenerate regime); max_order must be even and <= 8.  The branch is
    tracked from the smallest coupling upward by eigenvector overlap.  One
    guard term beyond max_order is fitted and discarded, which keeps the
    truncation bias out of the reported coefficients.
    """
    if max_order % 2 != 0 or not 0 < max_order <= 8:
        raise ValueError("max_order must be even and in (0, 8]")
    mu = derived_mu(p)
    if abs(mu - round(mu)) < 0.05:
        raise ValueError(f"mu={mu!r} too close to an integer for "
                         "non-degenerate tracking")
    nn = p.big_n
    if not 0 <= n <= nn:
        raise ValueError("level index out of range")
    if g0 is None:
        g0 = _default_g0(p, n)
    gs = g0 * 0.5 ** np.arange(n_points)

    e0 = unperturbed_energy(n, nn - n, p)
    energies = np.empty(n_points)
    ref = np.zeros(nn + 1)
    ref[n] = 1.0
    for j in range(n_points - 1, -1, -1):
        s = eigendecompose(build_subspace_hamiltonian(p.with_g(gs[j])))
        ov = np.abs(s.eigenvectors.T @ ref)
        k = int(np.argmax(ov))
        if ov[k] < 0.5:
            raise BranchTrackingError(
                f"branch through level {n} lost at g={gs[j]!r} "
                f"(best overlap {ov[k]:.3f})")
        energies[j] = s.eigenvalues[k]
        ref = s.eigenvectors[:, k]

    offset = p.omega2 * nn + p.alpha2 * nn * nn / 2.0
    # eigendecompose works on the offset-free block; re-express around the
    # full unperturbed level so order 0 lands on e0
    shifted = energies - (e0 - offset)
    u = (gs / g0) ** 2
    n_terms = max_order // 2 + 2          # constant + orders + one guard
    design = np.vander(u, n_terms, increasing=True)
    coef, _, _, _ = np.linalg.lstsq(design, shifted, rcond=None)
    resid = shifted - design @ coef
    dof = max(n_points - n_terms, 1)
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(design.T @ design)
    errs = np.sqrt(np.diag(cov))

    out = [PTCorrection(order=0, level=n, value=float(coef[0] + e0),
                        fit_error=float(errs[0]))]
    for t in range(1, max_order // 2 + 1):
        scale = g0 ** (2 * t)
        out.append(PTCorrection(order=2 * t, level=n,
                                value=float(coef[t] / scale),
                                fit_error=float(errs[t] / scale)))
    return out
