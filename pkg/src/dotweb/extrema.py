"""Maxima of entanglement measures over time.

All eigenphase rates are integers, so every measure is 2*pi periodic in
theta; with a single up spin the period shrinks to 2*pi/N. A scan samples
one period on a uniform grid and polishes the best grid peaks with a
golden-section search.
"""
from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import NamedTuple, Optional

import numpy as np

from .errors import InvalidPair, InvalidSpin
from .measures import MEASURES, measure_curves
from .sector import SystemConfig

INV_PHI = (math.sqrt(5) - 1) / 2
TABLE_TOL = 1.5e-3
STRUCTURAL_ZERO = 1e-12
N_CANDIDATES = 8

TABLE_MEASURES = ("c_uu", "c_ud", "c_dd", "tau_d", "delta_u", "delta_d", "tau_u")


def worker_count() -> int:
    """Thread budget from ``DOTWEB_THREADS`` (default: CPU count)."""
    raw = os.environ.get("DOTWEB_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def default_window(config: SystemConfig) -> float:
    if config.m_prime == 1:
        return 2 * math.pi / config.n_dots
    return 2 * math.pi


@dataclass(frozen=True)
class ScanSpec:
    config: SystemConfig
    measure: str
    theta_max: Optional[float] = None
    grid_points: int = 4096
    refine_tol: float = 1e-10

    def __post_init__(self):
        if self.measure not in MEASURES:
            raise KeyError(f"unknown measure {self.measure!r}")
        if self.theta_max is None:
            object.__setattr__(self, "theta_max", default_window(self.config))
        if not self.theta_max > 0:
            raise ValueError("theta_max must be positive")
        if self.grid_points < 16:
            raise ValueError("grid_points must be at least 16")


@dataclass(frozen=True)
class ExtremumResult:
    theta_star: float
    value: float
    measure: str
    refined: bool
    coarse_value: float = field(default=float("nan"), compare=False)


def _curve(config: SystemConfig, measure: str, thetas) -> np.ndarray:
    vals = measure_curves(config, thetas, (measure,))[measure]
    if vals is None:
        err = InvalidPair if measure.startswith("c_") else InvalidSpin
        raise err(f"{measure} undefined for N={config.n_dots}, M={config.m_up}")
    return vals


def _golden_max(f, lo: np.ndarray, hi: np.ndarray, tol: float):
    """Vectorized golden-section maximization over independent brackets.

    Returns the best (theta, value) seen for each bracket.
    """
    a, b = lo.copy(), hi.copy()
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    best_t = np.where(fc >= fd, c, d)
    best_v = np.maximum(fc, fd)
    width = float(np.max(b - a))
    n_iter = 0 if width <= tol else int(math.ceil(math.log(tol / width) / math.log(INV_PHI)))
    for _ in range(n_iter):
        left = fc >= fd  # keep [a, d]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - INV_PHI * (b - a)
        new_d = a + INV_PHI * (b - a)
        # reuse the surviving interior point, evaluate the other
        probe = np.where(left, new_c, new_d)
        fp = f(probe)
        c, d, fc, fd = (
            np.where(left, new_c, d),
            np.where(left, c, new_d),
            np.where(left, fp, fd),
            np.where(left, fc, fp),
        )
        better = fp > best_v
        best_t = np.where(better, probe, best_t)
        best_v = np.where(better, fp, best_v)
    return best_t, best_v


def scan(spec: ScanSpec) -> ExtremumResult:
    """Global maximum of one measure over ``[0, theta_max)``.

    Deterministic; ties go to the smallest theta.
    """
    config, measure = spec.config, spec.measure
    thetas = np.linspace(0.0, spec.theta_max, spec.grid_points, endpoint=False)
    vals = _curve(config, measure, thetas)
    i0 = int(np.argmax(vals))
    coarse_t, coarse_v = float(thetas[i0]), float(vals[i0])

    # circular local maxima, best first; stable order keeps ties at smallest theta
    peaks = np.flatnonzero((vals >= np.roll(vals, 1)) & (vals >= np.roll(vals, -1)))
    peaks = peaks[np.argsort(-vals[peaks], kind="stable")][:N_CANDIDATES]
    step = spec.theta_max / spec.grid_points
    t, v = _golden_max(
        lambda x: _curve(config, measure, x),
        thetas[peaks] - step,
        thetas[peaks] + step,
        spec.refine_tol,
    )
    best_t, best_v = coarse_t, coarse_v
    for ti, vi in sorted(zip(t % spec.theta_max, v)):
        if vi > best_v:
            best_t, best_v = float(ti), float(vi)
    return ExtremumResult(best_t, best_v, measure, True, coarse_v)


class M1Times(NamedTuple):
    """Entropy-maximizing times within one period for a single up spin.

    ``epr`` holds the (possibly empty) times where the entropy reaches one
    ebit; ``peak`` is pi/N, the time of maximal spin-flip probability.
    """

    epr: list
    peak: float
    period: float


def analytic_times_m1(n_dots: int) -> M1Times:
    if n_dots < 2:
        raise ValueError("need at least two dots")
    N = n_dots
    period = 2 * math.pi / N
    arg = (2 / N) * math.sqrt(2 * (N - 1))
    epr = []
    if abs(arg) >= 1:
        t = (2 / N) * math.asin(1 / arg)  # arccsc
        epr = sorted({t % period, (-t) % period})
    return M1Times(epr, math.pi / N, period)


def epr_reachable(n_dots: int, tol: float = 1e-9) -> bool:
    """Whether a single flipped spin among N ever shares exactly one ebit."""
    res = scan(ScanSpec(SystemConfig(n_dots, 1), "entropy"))
    return abs(res.value - 1.0) <= tol


DEFAULT_ROWS = (
    (4, 2), (5, 2), (6, 2), (7, 2), (8, 2), (9, 2), (10, 2),
    (6, 3), (7, 3), (8, 3), (9, 3), (10, 3),
    (8, 4), (9, 4), (10, 4), (11, 4),
)


@dataclass(frozen=True)
class Table1Row:
    n: int
    m: int
    maxima: dict

    def value(self, measure: str) -> float:
        return self.maxima[measure].value


def _row(nm, measures, grid_points) -> Table1Row:
    n, m = nm
    config = SystemConfig(n, m)
    maxima = {}
    for name in measures:
        r = scan(ScanSpec(config, name, grid_points=grid_points))
        if abs(r.value) < STRUCTURAL_ZERO:
            r = ExtremumResult(r.theta_star, 0.0, name, r.refined, r.coarse_value)
        maxima[name] = r
    return Table1Row(n, m, maxima)


def table1(rows=DEFAULT_ROWS, measures=TABLE_MEASURES, grid_points: int = 4096) -> list:
    """Maxima of each measure for every (N, M) row, in input order."""
    rows = [tuple(r) for r in rows]
    with ThreadPoolExecutor(max_workers=min(worker_count(), max(1, len(rows)))) as pool:
        return list(pool.map(lambda nm: _row(nm, measures, grid_points), rows))


def load_reference() -> dict:
    """Reference maxima keyed by ``(n, m)``, each a ``{measure: value}`` dict."""
    text = resources.files("dotweb").joinpath("data/table1_reference.csv").read_text()
    reader = csv.DictReader(line for line in text.splitlines() if not line.startswith("#"))
    out = {}
    for rec in reader:
        key = (int(rec.pop("n")), int(rec.pop("m")))
        out[key] = {k: float(v) for k, v in rec.items()}
    return out


def compare_row(row: Table1Row, reference: dict, tol: float = TABLE_TOL) -> dict:
    """``{measure: (computed, expected, ok)}`` for measures present in both."""
    ref = reference.get((row.n, row.m), {})
    out = {}
    for name, res in row.maxima.items():
        if name in ref:
            out[name] = (res.value, ref[name], abs(res.value - ref[name]) <= tol)
    return out
