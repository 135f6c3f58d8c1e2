"""Entanglement measures assembled directly from the sector amplitudes.

Two-qubit reduced states use the basis order ``|dd>, |du>, |ud>, |uu>``
(``d`` = spin down, ``u`` = spin up); for an up-down pair the first qubit is
the dot that started spin up.

Every function here has a batched twin working on amplitude grids of shape
``(T, M'+1)``; the single-state API is the ``T = 1`` case, so scans and
one-off reports share one code path.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from . import sector
from .errors import InvalidPair, InvalidSpin
from .sector import SchmidtSpectrum, SectorState, SystemConfig, binom

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = 1e-10

_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SIGMA_YY = np.kron(_SY, _SY)


class PairKind(enum.Enum):
    UP_UP = "uu"
    UP_DOWN = "ud"
    DOWN_DOWN = "dd"


class SpinKind(enum.Enum):
    UP = "u"
    DOWN = "d"


@dataclass(frozen=True)
class TwoQubitDensity:
    matrix: np.ndarray

    def __post_init__(self):
        rho = np.array(self.matrix, dtype=complex)
        if rho.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace {np.trace(rho).real!r} != 1")
        if np.linalg.eigvalsh(rho)[0] < -PSD_TOL:
            raise ValueError("density matrix has a negative eigenvalue")
        rho.setflags(write=False)
        object.__setattr__(self, "matrix", rho)


@dataclass(frozen=True)
class EntanglementReport:
    """All measures at one time. ``None`` marks a measure with no pair/dot to evaluate."""

    theta: float
    entropy: float
    concurrence_upup: Optional[float]
    concurrence_updown: Optional[float]
    concurrence_downdown: Optional[float]
    tangle_up: Optional[float]
    tangle_down: Optional[float]
    residual_up: Optional[float]
    residual_down: Optional[float]

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def measure(self, name: str) -> Optional[float]:
        return getattr(self, MEASURE_FIELDS[name])


#: Short measure identifiers used by scans and the CLI, mapped to report fields.
MEASURE_FIELDS = {
    "entropy": "entropy",
    "c_uu": "concurrence_upup",
    "c_ud": "concurrence_updown",
    "c_dd": "concurrence_downdown",
    "tau_u": "tangle_up",
    "tau_d": "tangle_down",
    "delta_u": "residual_up",
    "delta_d": "residual_down",
}
MEASURES = tuple(MEASURE_FIELDS)


# -- pure-number helpers ---------------------------------------------------

def _entropy_bits(p: np.ndarray) -> np.ndarray:
    p = np.clip(p, 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0.0, -p * np.log2(np.where(p > 0.0, p, 1.0)), 0.0)
    return terms.sum(axis=-1)


def von_neumann_entropy(spectrum: SchmidtSpectrum) -> float:
    """Base-2 Shannon entropy of the Schmidt weights (``0 log 0 = 0``)."""
    return float(_entropy_bits(np.asarray(spectrum.probs)))


def binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def entanglement_of_formation(c: float) -> float:
    if not -1e-12 <= c <= 1.0 + 1e-12:
        raise ValueError(f"concurrence must lie in [0, 1], got {c!r}")
    c = min(max(c, 0.0), 1.0)
    return binary_entropy(0.5 * (1.0 + math.sqrt(1.0 - c * c)))


def concurrence_batch(rhos: np.ndarray) -> np.ndarray:
    """Wootters concurrence of a stack of 4x4 density matrices.

    The lambdas (square roots of the eigenvalues of ``rho Y rho* Y``) are
    obtained as the singular values of ``V^T Y V`` with ``rho = V V^dagger``.
    This avoids square roots of near-zero eigenvalues, which would turn
    1e-17 rounding into 1e-9 errors for rank-deficient states.
    """
    rhos = np.asarray(rhos, dtype=complex)
    rhos = 0.5 * (rhos + np.conj(np.swapaxes(rhos, -1, -2)))
    w, u = np.linalg.eigh(rhos)
    v = u * np.sqrt(np.clip(w, 0.0, None))[..., None, :]
    tau = np.swapaxes(v, -1, -2) @ SIGMA_YY @ v
    lam = np.linalg.svd(tau, compute_uv=False)  # descending
    c = lam[..., 0] - lam[..., 1:].sum(axis=-1)
    return np.clip(c, 0.0, 1.0)


def concurrence(rho: TwoQubitDensity) -> float:
    m = rho.matrix if isinstance(rho, TwoQubitDensity) else np.asarray(rho)
    return float(concurrence_batch(m[None])[0])


# -- reduced states from amplitudes ----------------------------------------

def _weights(values) -> np.ndarray:
    return np.array(values, dtype=float)


def _updown_batch(config: SystemConfig, g: np.ndarray) -> np.ndarray:
    N, M, K = config.n_dots, config.m_up, config.m_prime + 1
    p = np.abs(g) ** 2
    a0 = p @ _weights([binom(M - 1, m - 1) * binom(N - M - 1, m) for m in range(K)])
    a1 = p @ _weights([binom(M - 1, m) * binom(N - M - 1, m - 1) for m in range(K)])
    rho = np.zeros(g.shape[:-1] + (4, 4), dtype=complex)
    rho[..., 0, 0] = a0
    rho[..., 3, 3] = a1
    for m in range(K - 1):
        w = binom(M - 1, m) * binom(N - M - 1, m)
        if w == 0:
            continue
        gu, gd = g[..., m], g[..., m + 1]
        # |beta_m> = gamma_m |ud> + gamma_{m+1} |du>
        rho[..., 2, 2] += w * np.abs(gu) ** 2
        rho[..., 1, 1] += w * np.abs(gd) ** 2
        rho[..., 2, 1] += w * gu * np.conj(gd)
        rho[..., 1, 2] += w * gd * np.conj(gu)
    return rho


def _same_alphas(config: SystemConfig, g: np.ndarray, kind: PairKind) -> tuple:
    N, M, K = config.n_dots, config.m_up, config.m_prime + 1
    p = np.abs(g) ** 2
    if kind is PairKind.UP_UP:
        w = [[binom(N - M, m) * binom(M - 2, m - 2 + j) for m in range(K)] for j in range(3)]
    else:
        w = [[binom(M, m) * binom(N - M - 2, m - j) for m in range(K)] for j in range(3)]
    return tuple(p @ _weights(row) for row in w)


def _same_batch(config: SystemConfig, g: np.ndarray, kind: PairKind) -> np.ndarray:
    a0, a1, a2 = _same_alphas(config, g, kind)
    rho = np.zeros(g.shape[:-1] + (4, 4), dtype=complex)
    rho[..., 0, 0] = a0
    rho[..., 3, 3] = a2
    # 2 a1 |B><B| with |B> = (|ud> + |du>)/sqrt(2)
    for i in (1, 2):
        for j in (1, 2):
            rho[..., i, j] = a1
    return rho


def _check_pair(config: SystemConfig, kind: PairKind):
    M, D = config.m_up, config.n_down
    if kind is PairKind.UP_DOWN and (M < 1 or D < 1):
        raise InvalidPair(f"no up-down pair with N={config.n_dots}, M={M}")
    if kind is PairKind.UP_UP and M < 2:
        raise InvalidPair(f"no pair of initially-up dots with M={M}")
    if kind is PairKind.DOWN_DOWN and D < 2:
        raise InvalidPair(f"no pair of initially-down dots with N-M={D}")


def _check_spin(config: SystemConfig, kind: SpinKind):
    if kind is SpinKind.UP and config.m_up < 1:
        raise InvalidSpin("no initially-up dot (M = 0)")
    if kind is SpinKind.DOWN and config.n_down < 1:
        raise InvalidSpin("no initially-down dot (M = N)")


def pair_density_batch(config: SystemConfig, g: np.ndarray, kind: PairKind) -> np.ndarray:
    _check_pair(config, kind)
    if kind is PairKind.UP_DOWN:
        return _updown_batch(config, g)
    return _same_batch(config, g, kind)


def reduced_updown(state: SectorState) -> TwoQubitDensity:
    return TwoQubitDensity(pair_density_batch(state.config, state.gamma[None], PairKind.UP_DOWN)[0])


def reduced_same(state: SectorState, kind: PairKind) -> TwoQubitDensity:
    if kind is PairKind.UP_DOWN:
        raise ValueError("reduced_same takes UP_UP or DOWN_DOWN; use reduced_updown")
    return TwoQubitDensity(pair_density_batch(state.config, state.gamma[None], kind)[0])


def down_probability(config: SystemConfig, g: np.ndarray, kind: SpinKind) -> np.ndarray:
    """Probability that a single dot of the given initial spin is found down.

    Equal to ``alpha_k0 + alpha_k1`` of the same-kind pair weights, summed
    over the partner dot; written in marginal form so it also covers M = 1
    and N - M = 1, where no same-kind pair exists.
    """
    _check_spin(config, kind)
    N, M, K = config.n_dots, config.m_up, config.m_prime + 1
    if kind is SpinKind.UP:
        w = [binom(M - 1, m - 1) * binom(N - M, m) for m in range(K)]
    else:
        w = [binom(M, m) * binom(N - M - 1, m) for m in range(K)]
    return (np.abs(g) ** 2) @ _weights(w)


def tangle_batch(config: SystemConfig, g: np.ndarray, kind: SpinKind) -> np.ndarray:
    a = down_probability(config, g, kind)
    return 4.0 * a * (1.0 - a)


def tangle(state: SectorState, kind: SpinKind) -> float:
    """One-dot-versus-rest tangle, ``4 alpha (1 - alpha)``."""
    return float(tangle_batch(state.config, state.gamma[None], kind)[0])


def _pair_conc(config: SystemConfig, g: np.ndarray, kind: PairKind) -> Optional[np.ndarray]:
    try:
        return concurrence_batch(pair_density_batch(config, g, kind))
    except InvalidPair:
        return None


def residual_batch(config: SystemConfig, g: np.ndarray, kind: SpinKind, conc: Optional[dict] = None) -> np.ndarray:
    """Tangle minus the squared pairwise concurrences with every other dot.

    ``conc`` may carry precomputed concurrence arrays keyed by PairKind.
    """
    N, M = config.n_dots, config.m_up
    tau = tangle_batch(config, g, kind)
    conc = dict(conc or {})

    def c2(pk):
        if pk not in conc:
            conc[pk] = _pair_conc(config, g, pk)
        return 0.0 if conc[pk] is None else conc[pk] ** 2

    if kind is SpinKind.UP:
        same, same_mult, cross_mult = PairKind.UP_UP, M - 1, N - M
    else:
        same, same_mult, cross_mult = PairKind.DOWN_DOWN, N - M - 1, M
    out = tau
    if same_mult > 0:
        out = out - same_mult * c2(same)
    if cross_mult > 0:
        out = out - cross_mult * c2(PairKind.UP_DOWN)
    return out


def residual_tangle(state: SectorState, kind: SpinKind) -> float:
    return float(residual_batch(state.config, state.gamma[None], kind)[0])


# -- curves and reports ----------------------------------------------------

def measure_curves(config: SystemConfig, thetas, measures=MEASURES) -> dict:
    """Evaluate the requested measures on a time grid.

    Returns ``{name: array or None}``; ``None`` when the measure does not
    apply to this configuration.
    """
    unknown = set(measures) - set(MEASURE_FIELDS)
    if unknown:
        raise KeyError(f"unknown measure(s): {sorted(unknown)}")
    g = sector.gamma_grid(config, thetas)
    conc: dict = {}
    out = {}

    def get_conc(pk):
        if pk not in conc:
            conc[pk] = _pair_conc(config, g, pk)
        return conc[pk]

    for name in measures:
        if name == "entropy":
            out[name] = _entropy_bits(sector.schmidt_probs(config, g))
        elif name in ("c_uu", "c_ud", "c_dd"):
            out[name] = get_conc({"c_uu": PairKind.UP_UP, "c_ud": PairKind.UP_DOWN,
                                  "c_dd": PairKind.DOWN_DOWN}[name])
        else:
            spin = SpinKind.UP if name.endswith("_u") else SpinKind.DOWN
            try:
                _check_spin(config, spin)
            except InvalidSpin:
                out[name] = None
                continue
            if name.startswith("tau"):
                out[name] = tangle_batch(config, g, spin)
            else:
                for pk in PairKind:
                    get_conc(pk)
                out[name] = residual_batch(config, g, spin, conc)
    return out


def report(config: SystemConfig, theta: float) -> EntanglementReport:
    curves = measure_curves(config, [float(theta)])
    vals = {MEASURE_FIELDS[k]: (None if v is None else float(v[0])) for k, v in curves.items()}
    return EntanglementReport(theta=float(theta), **vals)
