"""Physical parameter set and the exact fixed-N Hamiltonian block.

Conventions: hbar = 1 throughout; the CLI works in units of alpha1 but the
library itself is unit-agnostic.  The canonical internal parametrization is
(delta, N, alpha1, alpha2, g) with omega1 = 0, since only the detuning
delta = omega2 - omega1 enters the fixed-N block.
"""

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, DegenerateNonlinearityError

# largest magnitude a diagonal entry may reach before we refuse to build
_OVERFLOW_LIMIT = 1e300


@dataclass(frozen=True)
class ModelParams:
    """Oscillator-pair parameters for one total-quanta sector.

    alpha1, alpha2: Kerr shifts per quantum (alpha1 + alpha2 must not vanish).
    g: exchange coupling, g >= 0.
    big_n: total number of quanta N >= 0.
    delta: detuning omega2 - omega1.
    omega1: absolute frequency of mode a; only shifts the energy offset.
    """

    alpha1: float
    alpha2: float
    g: float
    big_n: int
    delta: float
    omega1: float = 0.0

    def __post_init__(self):
        if self.alpha1 + self.alpha2 == 0.0:
            raise DegenerateNonlinearityError(
                "alpha1 + alpha2 = 0: resonance parameter undefined")
        if self.big_n < 0:
            raise ValueError("big_n must be >= 0")
        if self.g < 0:
            raise ValueError("g must be >= 0")

    @property
    def omega2(self) -> float:
        return self.omega1 + self.delta

    @property
    def alpha_sum(self) -> float:
        return self.alpha1 + self.alpha2

    @property
    def mu(self) -> float:
        return derived_mu(self)

    @classmethod
    def from_mu(cls, mu, *, alpha1, alpha2, g, big_n, omega1=0.0):
        """Construct from the resonance parameter instead of the detuning."""
        delta = mu * (alpha1 + alpha2) / 2.0 - alpha2 * big_n
        return cls(alpha1=alpha1, alpha2=alpha2, g=g, big_n=big_n,
                   delta=delta, omega1=omega1)

    @classmethod
    def from_omegas(cls, omega1, omega2, *, alpha1, alpha2, g, big_n):
        return cls(alpha1=alpha1, alpha2=alpha2, g=g, big_n=big_n,
                   delta=omega2 - omega1, omega1=omega1)

    def with_g(self, g) -> "ModelParams":
        return replace(self, g=g)

    def with_mu(self, mu) -> "ModelParams":
        return replace(self, delta=delta_for_mu(mu, self))

    # -- JSON wire format ------------------------------------------------
    # {"alpha1","alpha2","delta","g","N"} with optional "mu" replacing
    # "delta" (supplying both is an error).

    @classmethod
    def from_json_dict(cls, obj) -> "ModelParams":
        required = {"alpha1", "alpha2", "g", "N"}
        missing = required - obj.keys()
        if missing:
            raise ConfigError(f"missing parameter keys: {sorted(missing)}")
        unknown = obj.keys() - (required | {"delta", "mu"})
        if unknown:
            raise ConfigError(f"unknown parameter keys: {sorted(unknown)}")
        has_delta = "delta" in obj
        has_mu = "mu" in obj
        if has_delta and has_mu:
            raise ConfigError('"delta" and "mu" are mutually exclusive')
        if not has_delta and not has_mu:
            raise ConfigError('one of "delta" or "mu" is required')
        common = dict(alpha1=float(obj["alpha1"]), alpha2=float(obj["alpha2"]),
                      g=float(obj["g"]), big_n=int(obj["N"]))
        if has_mu:
            return cls.from_mu(float(obj["mu"]), **common)
        return cls(delta=float(obj["delta"]), **common)

    def to_json_dict(self) -> dict:
        return {"alpha1": self.alpha1, "alpha2": self.alpha2,
                "delta": self.delta, "g": self.g, "N": self.big_n}

    @classmethod
    def from_json(cls, text: str) -> "ModelParams":
        return cls.from_json_dict(json.loads(text))

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


@dataclass(frozen=True)
class SubspaceHamiltonian:
    """Real symmetric tridiagonal block of the N-quanta sector.

    diag[n] = (alpha1+alpha2)/2 * n*(n - mu_N) (+ energy_offset if included),
    offdiag[n] = g*sqrt((n+1)*(N-n)) couples n and n+1.
    energy_offset records the constant omega2*N + alpha2*N^2/2 term; it is
    zero unless the block was built with include_offset=True.
    """

    diag: np.ndarray
    offdiag: np.ndarray
    energy_offset: float

    @property
    def n_dim(self) -> int:
        return len(self.diag)

    def dense(self) -> np.ndarray:
        h = np.diag(self.diag)
        n = self.n_dim
        for i in range(n - 1):
            h[i, i + 1] = h[i + 1, i] = self.offdiag[i]
        return h

    def norm_estimate(self) -> float:
        """Infinity-norm bound, used to scale residual tolerances."""
        n = self.n_dim
        r = np.abs(self.diag).copy()
        if n > 1:
            r[:-1] += np.abs(self.offdiag)
            r[1:] += np.abs(self.offdiag)
        return float(np.max(r)) if n else 0.0


def derived_mu(p: ModelParams) -> float:
    """Resonance parameter 2*(delta + alpha2*N)/(alpha1 + alpha2)."""
    if p.alpha_sum == 0.0:
        raise DegenerateNonlinearityError("alpha1 + alpha2 = 0")
    return 2.0 * (p.delta + p.alpha2 * p.big_n) / p.alpha_sum


def delta_for_mu(mu: float, p: ModelParams) -> float:
    """Detuning that realizes the requested resonance parameter."""
    return mu * p.alpha_sum / 2.0 - p.alpha2 * p.big_n


def unperturbed_energy(n_a: int, n_b: int, p: ModelParams) -> float:
    """Energy of the decoupled Fock state |n_a, n_b> at g = 0."""
    if n_a < 0 or n_b < 0:
        raise ValueError("occupation numbers must be >= 0")
    return (p.alpha1 * n_a * n_a / 2.0 + p.alpha2 * n_b * n_b / 2.0
            + p.omega1 * n_a + p.omega2 * n_b)


def build_subspace_hamiltonian(p: ModelParams,
                               include_offset: bool = False) -> SubspaceHamiltonian:
    """Tridiagonal N-quanta block.

    The constant offset omega2*N + alpha2*N^2/2 is excluded by default
    (spectra are then relative energies); include_offset=True adds it to the
    diagonal and records it in energy_offset.
    """
    nn = p.big_n
    mu = derived_mu(p)
    half = p.alpha_sum / 2.0
    worst = abs(half) * nn * (nn + abs(mu)) + abs(p.omega2) * nn + abs(p.alpha2) * nn * nn
    if not math.isfinite(worst) or worst > _OVERFLOW_LIMIT:
        raise OverflowError(f"diagonal entries exceed representable range for N={nn}")
    n_arr = np.arange(nn + 1, dtype=float)
    diag = half * n_arr * (n_arr - mu)
    offdiag = p.g * np.sqrt((n_arr[:-1] + 1.0) * (nn - n_arr[:-1]))
    offset = 0.0
    if include_offset:
        offset = p.omega2 * nn + p.alpha2 * nn * nn / 2.0
        diag = diag + offset
    diag.setflags(write=False)
    offdiag.setflags(write=False)
    return SubspaceHamiltonian(diag=diag, offdiag=offdiag, energy_offset=offset)


def degenerate_pair_count(m: int, big_n: int) -> int:
    """Number of distinct degenerate pairs in the g = 0 spectrum at mu = m."""
    eff = min(m, 2 * big_n - m)
    if eff < 0:
        return 0
    return (eff + 1) // 2


def resonant_pairs(m: int, big_n: int):
    """All (n, m-n) with n < m-n and both occupation indices in [0, N]."""
    lo = max(0, m - big_n)
    return [(n, m - n) for n in range(lo, (m + 1) // 2)]
