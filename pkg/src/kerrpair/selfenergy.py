"""Resolvent machinery for a resonant pair: the leading off-diagonal
self-energy, the two-level anticrossing energies, and the closed-form
multi-photon Rabi frequency.

Factorial ratios are evaluated in log-gamma space and exponentiated once,
so N in the hundreds stays finite.
"""

import math
from dataclasses import dataclass

from .errors import PoleError
from .model import ModelParams, unperturbed_energy

__all__ = ["ResonantPair", "leading_sigma", "rabi_frequency",
           "anticrossing_energies", "splitting"]


@dataclass(frozen=True)
class ResonantPair:
    """States |n, N-n> and |m-n, N-m+n> degenerate at integer mu = m."""

    n: int
    m: int
    big_n: int

    def __post_init__(self):
        if not (0 <= self.n < self.m - self.n <= self.big_n):
            raise ValueError("need 0 <= n < m-n <= N")

    @property
    def partner(self) -> int:
        return self.m - self.n

    @property
    def order(self) -> int:
        return self.m - 2 * self.n


def _log_factorial_ratio(pair: ResonantPair) -> float:
    """log sqrt((m-n)!/n! * (N-n)!/(N-(m-n))!)."""
    n, mn, nn = pair.n, pair.partner, pair.big_n
    return 0.5 * (math.lgamma(mn + 1) - math.lgamma(n + 1)
                  + math.lgamma(nn - n + 1) - math.lgamma(nn - mn + 1))


def leading_sigma(pair: ResonantPair, p: ModelParams, omega: float) -> float:
    """Leading term of the off-diagonal self-energy at frequency omega.

    Equals the chain product of the m-2n coupling matrix elements divided
    by the intermediate-level energy denominators; for order 1 the product
    of denominators is empty and the result is the bare matrix element.
    """
    if p.big_n != pair.big_n:
        raise ValueError("pair and params disagree on N")
    if p.g == 0.0:
        return 0.0
    log_mag = pair.order * math.log(p.g) + _log_factorial_ratio(pair)
    denom = 1.0
    for k in range(pair.n + 1, pair.partner):
        dk = omega - unperturbed_energy(k, pair.big_n - k, p)
        if dk == 0.0:
            raise PoleError(f"omega hits the intermediate level k={k}")
        denom *= dk
    return math.copysign(math.exp(log_mag), denom) / abs(denom)


def rabi_frequency(pair: ResonantPair, p: ModelParams) -> float:
    """Closed-form multi-photon Rabi frequency of the pair.

    (alpha_sum/2) * (2g/alpha_sum)^(m-2n) * sqrt(factorial ratio)
    / ((m-2n-1)!)^2, evaluated in log space.
    """
    if p.big_n != pair.big_n:
        raise ValueError("pair and params disagree on N")
    if p.g == 0.0:
        return 0.0
    k = pair.order
    log_mag = (math.log(p.alpha_sum / 2.0)
               + k * math.log(2.0 * p.g / p.alpha_sum)
               + _log_factorial_ratio(pair)
               - 2.0 * math.lgamma(k))
    return math.exp(log_mag)


def anticrossing_energies(eps1: float, eps2: float, sigma: float):
    """Two-level energies (mean +/- sqrt(detuning^2 + sigma^2))."""
    mean = 0.5 * (eps1 + eps2)
    r = math.hypot(0.5 * (eps1 - eps2), sigma)
    return mean + r, mean - r


def splitting(eps1: float, eps2: float, sigma: float) -> float:
    """Gap 2*sqrt(((eps1-eps2)/2)^2 + sigma^2); minimal at eps1 = eps2."""
    return 2.0 * math.hypot(0.5 * (eps1 - eps2), sigma)
