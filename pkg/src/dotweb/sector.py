"""Closed-form dynamics of N equivalent-neighbor qubits in the symmetric sector.

Dots ``0 .. M-1`` start spin up, dots ``M .. N-1`` start spin down. Under the
uniform flip-flop Hamiltonian the state stays in the span of

    |Phi_{M-m, m}> |Phi_{m, N-M-m}>,   m = 0 .. M'

(``m`` of the initially-up dots flipped down and ``m`` of the initially-down
dots flipped up), so it is fully described by ``M' + 1`` complex amplitudes
``gamma_m``. The basis states are the unnormalized symmetric sums, hence the
Schmidt weight of branch ``m`` is ``C(M, m) C(N-M, m) |gamma_m|^2``.

Time is the dimensionless ``theta = kappa * t`` (hbar = 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DegenerateDivision

#: Normalization drift tolerated before :func:`evolve` renormalizes.
RENORM_TOL = 1e-8


def binom(x: int, y: int) -> int:
    """Binomial coefficient with ``C(x, y) = 0`` outside ``0 <= y <= x``."""
    if x < 0 or y < 0 or y > x:
        return 0
    return math.comb(x, y)


@dataclass(frozen=True)
class SystemConfig:
    """N dots, the first M of them initially spin up."""

    n_dots: int
    m_up: int

    def __post_init__(self):
        if int(self.n_dots) != self.n_dots or self.n_dots < 1:
            raise ValueError(f"n_dots must be a positive integer, got {self.n_dots!r}")
        if int(self.m_up) != self.m_up or not 0 <= self.m_up <= self.n_dots:
            raise ValueError(f"m_up must satisfy 0 <= M <= N, got M={self.m_up!r}, N={self.n_dots}")
        object.__setattr__(self, "n_dots", int(self.n_dots))
        object.__setattr__(self, "m_up", int(self.m_up))

    @property
    def m_prime(self) -> int:
        return min(self.m_up, self.n_dots - self.m_up)

    @property
    def n_down(self) -> int:
        return self.n_dots - self.m_up

    def multiplicities(self) -> np.ndarray:
        """``C(M, m) C(N-M, m)`` for ``m = 0 .. M'`` (squared norms of the basis states)."""
        return np.array(
            [binom(self.m_up, m) * binom(self.n_down, m) for m in range(self.m_prime + 1)],
            dtype=float,
        )


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SectorState:
    config: SystemConfig
    theta: float
    gamma: np.ndarray
    renormalized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "gamma", _readonly(np.asarray(self.gamma, dtype=complex)))

    def norm(self) -> float:
        return float(np.sum(self.config.multiplicities() * np.abs(self.gamma) ** 2))


@dataclass(frozen=True)
class SchmidtSpectrum:
    probs: np.ndarray = field()

    def __post_init__(self):
        object.__setattr__(self, "probs", _readonly(np.asarray(self.probs, dtype=float)))


def b_coeff(config: SystemConfig, n: int, m: int) -> float:
    """Weight of eigenphase ``n`` in the amplitude of branch ``m``.

    Summands are formed from exact integer binomials and divided once.
    Raises :class:`DegenerateDivision` if a denominator ``C(N-2k, M-k)``
    reached by the sum is zero.
    """
    if n < 0 or m < 0:
        raise ValueError(f"indices must be non-negative, got n={n}, m={m}")
    N, M = config.n_dots, config.m_up
    total = 0.0
    for k in range(m + 1):
        denom = binom(N - 2 * k, M - k)
        if denom == 0:
            raise DegenerateDivision(f"C({N - 2 * k}, {M - k}) = 0 at k={k} (N={N}, M={M}, m={m})")
        numer = binom(m, k) * (binom(N + 1 - 2 * k, n - k) - 2 * binom(N - 2 * k, n - k - 1))
        total += (-1) ** k * numer / denom
    return total


def phase_rates(config: SystemConfig) -> np.ndarray:
    """Integer angular frequencies ``n(N+1-n) - M(N-M)``, ``n = 0 .. M'``."""
    N, M = config.n_dots, config.m_up
    return np.array([n * (N + 1 - n) - M * (N - M) for n in range(config.m_prime + 1)], dtype=float)


@lru_cache(maxsize=256)
def _b_matrix_cached(config: SystemConfig) -> np.ndarray:
    k = config.m_prime + 1
    b = np.array([[b_coeff(config, n, m) for m in range(k)] for n in range(k)])
    b.setflags(write=False)
    return b


def b_matrix(config: SystemConfig) -> np.ndarray:
    """All ``b_coeff`` values as a read-only array indexed ``[n, m]``."""
    return _b_matrix_cached(config)


def gamma(config: SystemConfig, m: int, theta: float) -> complex:
    if not 0 <= m <= config.m_prime:
        raise ValueError(f"branch index m={m} outside 0..{config.m_prime}")
    rates = phase_rates(config)
    coeffs = np.array([b_coeff(config, n, m) for n in range(config.m_prime + 1)])
    return complex(np.sum(coeffs * np.exp(1j * rates * theta)))


def gamma_grid(config: SystemConfig, thetas) -> np.ndarray:
    """Amplitudes on a grid of times, shape ``(len(thetas), M' + 1)``.

    Rows are renormalized when the printed coefficients drift by more than
    :data:`RENORM_TOL`; see :func:`evolve`.
    """
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    phases = np.exp(1j * np.outer(thetas, phase_rates(config)))
    g = phases @ b_matrix(config)
    norms = (np.abs(g) ** 2) @ config.multiplicities()
    bad = np.abs(norms - 1.0) > RENORM_TOL
    if np.any(bad):
        g[bad] /= np.sqrt(norms[bad])[:, None]
    return g


def evolve(config: SystemConfig, theta: float) -> SectorState:
    """State at time ``theta`` in the symmetric-sector parameterization.

    If the closed-form amplitudes miss normalization by more than
    ``RENORM_TOL`` they are rescaled and ``renormalized`` is set.
    """
    theta = float(theta)
    rates = phase_rates(config)
    g = np.exp(1j * rates * theta) @ b_matrix(config)
    norm = float((np.abs(g) ** 2) @ config.multiplicities())
    renormalized = abs(norm - 1.0) > RENORM_TOL
    if renormalized:
        g = g / math.sqrt(norm)
    return SectorState(config, theta, g, renormalized)


def schmidt_probs(config: SystemConfig, g: np.ndarray) -> np.ndarray:
    """Schmidt weights for amplitude rows ``g`` (any leading shape)."""
    p = config.multiplicities() * np.abs(g) ** 2
    return np.where(p < 0.0, 0.0, p)


def schmidt(state: SectorState) -> SchmidtSpectrum:
    """Schmidt coefficients of the up-group / down-group bipartition."""
    return SchmidtSpectrum(schmidt_probs(state.config, state.gamma))
