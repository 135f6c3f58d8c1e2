"""Brute-force reference: the flip-flop Hamiltonian on the full 2^N space.

Basis convention: bit ``n`` of a basis index is 1 when dot ``n`` is spin up
(dot 0 is the least significant bit). Nothing here uses the sector closed
forms; the only shared routine is :func:`dotweb.measures.concurrence_batch`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .errors import ShapeError, SizeLimit
from .measures import EntanglementReport, concurrence_batch

MAX_DOTS = 14
MAX_DOTS_FULL = 12


@dataclass(frozen=True)
class CouplingMatrix:
    entries: np.ndarray

    def __post_init__(self):
        k = np.array(self.entries, dtype=float)
        if k.ndim != 2 or k.shape[0] != k.shape[1]:
            raise ShapeError(f"couplings must be square, got shape {k.shape}")
        if not np.allclose(k, k.T, rtol=0, atol=1e-14):
            raise ValueError("couplings must be symmetric")
        if np.any(np.diag(k) != 0):
            raise ValueError("couplings must have a zero diagonal")
        k.setflags(write=False)
        object.__setattr__(self, "entries", k)

    @classmethod
    def uniform(cls, n_dots: int, kappa: float = 1.0) -> "CouplingMatrix":
        return cls(kappa * (np.ones((n_dots, n_dots)) - np.eye(n_dots)))

    @property
    def n_dots(self) -> int:
        return self.entries.shape[0]

    def __hash__(self):
        return hash(self.entries.tobytes())

    def __eq__(self, other):
        return isinstance(other, CouplingMatrix) and np.array_equal(self.entries, other.entries)


@dataclass(frozen=True)
class FullState:
    n_dots: int
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex)
        if a.shape != (2 ** self.n_dots,):
            raise ShapeError(f"expected {2 ** self.n_dots} amplitudes, got shape {a.shape}")
        if abs(np.linalg.norm(a) - 1.0) > 1e-12:
            raise ValueError(f"state is not normalized (norm {np.linalg.norm(a)!r})")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def product(cls, n_dots: int, up_dots) -> "FullState":
        a = np.zeros(2 ** n_dots, dtype=complex)
        a[sum(1 << d for d in up_dots)] = 1.0
        return cls(n_dots, a)


def _guard(n_dots: int, limit: int = MAX_DOTS):
    if n_dots > limit:
        raise SizeLimit(f"N={n_dots} exceeds the oracle limit of {limit} dots")


def _hops(couplings: CouplingMatrix, states: np.ndarray):
    """Yield (sources, targets, kappa_nm / 2) for each ``sigma+_n sigma-_m`` term."""
    k = couplings.entries
    N = couplings.n_dots
    for n in range(N):
        for m in range(N):
            if n == m or k[n, m] == 0.0:
                continue
            # sigma+_n sigma-_m: dot m up -> down, dot n down -> up
            mask = ((states >> m) & 1 == 1) & ((states >> n) & 1 == 0)
            src = states[mask]
            yield src, src ^ ((1 << n) | (1 << m)), 0.5 * k[n, m]


def build_hamiltonian(couplings: CouplingMatrix) -> sp.csr_matrix:
    """Sparse real-symmetric Hamiltonian on the full ``2^N`` space."""
    N = couplings.n_dots
    _guard(N)
    states = np.arange(2 ** N)
    rows, cols, vals = [], [], []
    # sigma+_n sigma-_m + sigma-_n sigma+_m over ordered pairs: the h.c. term
    # of (n, m) is the direct term of (m, n), so count each hop from both sides.
    for src, dst, amp in _hops(couplings, states):
        rows.append(dst)
        cols.append(src)
        vals.append(np.full(src.shape, 2.0 * amp))
    if not rows:
        return sp.csr_matrix((2 ** N, 2 ** N))
    h = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(2 ** N, 2 ** N),
    )
    return h.tocsr()


def weight_basis(n_dots: int, n_up: int) -> np.ndarray:
    """Basis indices with exactly ``n_up`` bits set, ascending."""
    states = np.arange(2 ** n_dots)
    counts = np.array([bin(s).count("1") for s in states])
    return states[counts == n_up]


@lru_cache(maxsize=64)
def _block_eigh(couplings: CouplingMatrix, n_up: int):
    basis = weight_basis(couplings.n_dots, n_up)
    h = build_hamiltonian(couplings)[basis][:, basis].toarray()
    w, v = np.linalg.eigh(h)
    for a in (basis, w, v):
        a.setflags(write=False)
    return basis, w, v


def evolve_full(initial: FullState, couplings: CouplingMatrix, theta: float, method: str = "block") -> FullState:
    """``exp(-i H theta) |initial>`` by exact diagonalization.

    ``method="block"`` diagonalizes each Hamming-weight block the state
    occupies; ``method="full"`` diagonalizes the whole ``2^N`` matrix
    (capped at ``MAX_DOTS_FULL`` dots) and serves as a cross-check.
    """
    N = initial.n_dots
    if couplings.n_dots != N:
        raise ShapeError(f"couplings are for {couplings.n_dots} dots, state has {N}")
    _guard(N)
    psi0 = initial.amplitudes
    if method == "full":
        _guard(N, MAX_DOTS_FULL)
        w, v = np.linalg.eigh(build_hamiltonian(couplings).toarray())
        out = v @ (np.exp(-1j * w * theta) * (v.T @ psi0))
    elif method == "block":
        out = np.zeros_like(psi0)
        occupied = {bin(int(s)).count("1") for s in np.flatnonzero(psi0)}
        for n_up in sorted(occupied):
            basis, w, v = _block_eigh(couplings, n_up)
            out[basis] = v @ (np.exp(-1j * w * theta) * (v.T @ psi0[basis]))
    else:
        raise ValueError(f"unknown method {method!r}")
    out /= np.linalg.norm(out)
    return FullState(N, out)


def partial_trace(state: FullState, keep) -> np.ndarray:
    """Reduced density matrix of the dots in ``keep``.

    The reduced basis index is ``sum(bit(keep[i]) << (len(keep)-1-i))``:
    ``keep[0]`` is the most significant qubit, so for two dots the order is
    ``|dd>, |du>, |ud>, |uu>`` with the first letter for ``keep[0]``.
    """
    N = state.n_dots
    keep = [int(k) for k in keep]
    if len(set(keep)) != len(keep):
        raise IndexError(f"duplicate dot indices in {keep}")
    for k in keep:
        if not 0 <= k < N:
            raise IndexError(f"dot index {k} out of range for N={N}")
    # reshape gives axis j <-> bit N-1-j
    t = state.amplitudes.reshape((2,) * N)
    axes = [N - 1 - k for k in keep]
    rest = [a for a in range(N) if a not in axes]
    t = np.transpose(t, axes + rest).reshape(2 ** len(keep), -1)
    return t @ t.conj().T


def linear_entropy(rho: np.ndarray) -> float:
    """``2 (1 - tr rho^2)`` of a single-qubit state (checked against ``4 det rho``)."""
    rho = np.asarray(rho)
    if rho.shape != (2, 2):
        raise ShapeError(f"linear entropy needs a 2x2 matrix, got shape {rho.shape}")
    s = 2.0 * (1.0 - np.trace(rho @ rho).real)
    d = 4.0 * np.linalg.det(rho).real
    if abs(s - d) > 1e-10:
        raise ValueError(f"2(1 - tr rho^2) = {s} disagrees with 4 det rho = {d}")
    return float(s)


def bipartite_entropy(state: FullState, group) -> float:
    """Von Neumann entropy (bits) between ``group`` and the remaining dots."""
    N = state.n_dots
    group = list(group)
    t = state.amplitudes.reshape((2,) * N)
    axes = [N - 1 - k for k in group]
    rest = [a for a in range(N) if a not in axes]
    mat = np.transpose(t, axes + rest).reshape(2 ** len(group), -1)
    s = np.linalg.svd(mat, compute_uv=False)
    p = s[s > 0] ** 2
    return max(0.0, float(-(p * np.log2(p)).sum()))


def oracle_report(n_dots: int, m_up: int, theta: float, couplings: CouplingMatrix = None) -> EntanglementReport:
    """Every entanglement measure from the full state vector.

    Dots ``0 .. M-1`` start up. Pairs used: (0, 1) up-up, (0, M) up-down,
    (M, M+1) down-down; tangles use dot 0 and dot M.
    """
    _guard(n_dots)
    if not 0 <= m_up <= n_dots:
        raise ValueError(f"m_up must satisfy 0 <= M <= N, got M={m_up}, N={n_dots}")
    couplings = couplings or CouplingMatrix.uniform(n_dots)
    psi = evolve_full(FullState.product(n_dots, range(m_up)), couplings, theta)
    N, M = n_dots, m_up

    def conc(a, b):
        return float(concurrence_batch(partial_trace(psi, [a, b])[None])[0])

    c_uu = conc(0, 1) if M >= 2 else None
    c_ud = conc(0, M) if 1 <= M < N else None
    c_dd = conc(M, M + 1) if N - M >= 2 else None
    tau_u = linear_entropy(partial_trace(psi, [0])) if M >= 1 else None
    tau_d = linear_entropy(partial_trace(psi, [M])) if M < N else None

    def sq(c):
        return 0.0 if c is None else c * c

    res_u = None if tau_u is None else tau_u - (M - 1) * sq(c_uu) - (N - M) * sq(c_ud)
    res_d = None if tau_d is None else tau_d - (N - M - 1) * sq(c_dd) - M * sq(c_ud)
    entropy = bipartite_entropy(psi, range(M)) if 0 < M < N else 0.0
    return EntanglementReport(
        theta=float(theta),
        entropy=entropy,
        concurrence_upup=c_uu,
        concurrence_updown=c_ud,
        concurrence_downdown=c_dd,
        tangle_up=tau_u,
        tangle_down=tau_d,
        residual_up=res_u,
        residual_down=res_d,
    )
