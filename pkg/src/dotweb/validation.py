"""Invariant suite behind ``dotweb validate``."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import sector
from .extrema import epr_reachable, worker_count
from .measures import MEASURE_FIELDS, measure_curves, report
from .oracle import oracle_report
from .sector import SystemConfig


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    violations: int
    detail: str


def _configs(n_max, n_min=1):
    for n in range(n_min, n_max + 1):
        for m in range(n + 1):
            yield SystemConfig(n, m)


def _thetas(rng, k):
    return rng.uniform(0.0, 2 * math.pi, k)


def check_normalization(seed=0, n_max=12, samples=100) -> Check:
    rng = np.random.default_rng(seed)
    bad, worst = 0, 0.0
    for cfg in _configs(n_max):
        p = sector.schmidt_probs(cfg, sector.gamma_grid(cfg, _thetas(rng, samples)))
        err = np.abs(p.sum(axis=1) - 1.0)
        bad += int(np.sum(err > 1e-10))
        worst = max(worst, float(err.max()))
    return Check("normalization", bad == 0, bad, f"max |sum P - 1| = {worst:.3g}")


def check_schmidt_symmetry(seed=1, n_max=12, samples=100) -> Check:
    rng = np.random.default_rng(seed)
    bad, worst = 0, 0.0
    for cfg in _configs(n_max):
        th = _thetas(rng, samples)
        mirror = SystemConfig(cfg.n_dots, cfg.n_down)
        p = sector.schmidt_probs(cfg, sector.gamma_grid(cfg, th))
        q = sector.schmidt_probs(mirror, sector.gamma_grid(mirror, th))
        err = np.abs(p - q).max(axis=1)
        bad += int(np.sum(err > 1e-10))
        worst = max(worst, float(err.max()))
    return Check("schmidt M<->N-M symmetry", bad == 0, bad, f"max diff = {worst:.3g}")


def check_periodicity_m1(seed=2, n_max=12, samples=100) -> Check:
    rng = np.random.default_rng(seed)
    bad, worst = 0, 0.0
    for n in range(2, n_max + 1):
        cfg = SystemConfig(n, 1)
        th = _thetas(rng, samples)
        p = sector.schmidt_probs(cfg, sector.gamma_grid(cfg, th))
        q = sector.schmidt_probs(cfg, sector.gamma_grid(cfg, th + 2 * math.pi / n))
        err = np.abs(p - q).max(axis=1)
        bad += int(np.sum(err > 1e-10))
        worst = max(worst, float(err.max()))
    return Check("period 2pi/N for M=1", bad == 0, bad, f"max diff = {worst:.3g}")


def check_monogamy(seed=3, n_max=11, samples=64) -> Check:
    rng = np.random.default_rng(seed)
    bad, worst = 0, 0.0
    for cfg in _configs(n_max, 2):
        c = measure_curves(cfg, _thetas(rng, samples), ("delta_u", "delta_d"))
        for v in c.values():
            if v is not None:
                bad += int(np.sum(v < -1e-9))
                worst = min(worst, float(v.min()))
    return Check("monogamy", bad == 0, bad, f"monogamy violations: {bad} (min residual {worst:.3g})")


def check_m1_residual(seed=4, n_max=10, samples=200) -> Check:
    rng = np.random.default_rng(seed)
    bad, worst = 0, 0.0
    for n in range(2, n_max + 1):
        c = measure_curves(SystemConfig(n, 1), _thetas(rng, samples), ("delta_u", "delta_d"))
        for v in c.values():
            bad += int(np.sum(np.abs(v) > 1e-10))
            worst = max(worst, float(np.abs(v).max()))
    status = "PASS" if bad == 0 else "FAIL"
    return Check("residual tangle zero for M=1", bad == 0, bad, f"Delta^(N1) == 0: {status} (max |Delta| {worst:.3g})")


def check_half_filling(seed=5, m_max=5, samples=100) -> Check:
    rng = np.random.default_rng(seed)
    bad = 0
    for m in range(1, m_max + 1):
        c = measure_curves(SystemConfig(2 * m, m), _thetas(rng, samples), ("delta_u", "delta_d", "c_uu", "c_dd"))
        bad += int(np.sum(np.abs(c["delta_u"] - c["delta_d"]) > 1e-10))
        for k in ("c_uu", "c_dd"):
            if c[k] is not None:
                bad += int(np.sum(c[k] > 1e-10))
    return Check("half-filling symmetry", bad == 0, bad, f"violations: {bad}")


def check_entropy_bound(seed=6, n_max=12, samples=100) -> Check:
    rng = np.random.default_rng(seed)
    bad = 0
    for cfg in _configs(n_max):
        e = measure_curves(cfg, _thetas(rng, samples), ("entropy",))["entropy"]
        bad += int(np.sum(e > math.log2(cfg.m_prime + 1) + 1e-9))
    return Check("entropy <= log2(M'+1)", bad == 0, bad, f"violations: {bad}")


def check_concurrence_range(seed=7, n_max=11, samples=64) -> Check:
    rng = np.random.default_rng(seed)
    bad = 0
    for cfg in _configs(n_max, 2):
        c = measure_curves(cfg, _thetas(rng, samples), ("c_uu", "c_ud", "c_dd"))
        for v in c.values():
            if v is not None:
                bad += int(np.sum((v < 0.0) | (v > 1.0)))
    return Check("concurrence in [0, 1]", bad == 0, bad, f"violations: {bad}")


def check_oracle(seed=8, n_max=10, samples=5, tol=1e-9) -> Check:
    rng = np.random.default_rng(seed)
    bad, worst = 0, 0.0
    for cfg in _configs(n_max):
        for th in _thetas(rng, samples):
            a = report(cfg, th)
            b = oracle_report(cfg.n_dots, cfg.m_up, th)
            for f in MEASURE_FIELDS.values():
                x, y = getattr(a, f), getattr(b, f)
                if (x is None) != (y is None):
                    bad += 1
                elif x is not None:
                    d = abs(x - y)
                    worst = max(worst, d)
                    bad += d > tol
    return Check("oracle equivalence", bad == 0, int(bad), f"max |closed form - oracle| = {worst:.3g}")


def check_epr(n_values=range(2, 11)) -> Check:
    got = {n: epr_reachable(n) for n in n_values}
    expected = {n: n <= 6 for n in n_values}
    bad = sum(got[n] != expected[n] for n in got)
    yes = [n for n in got if got[n]]
    no = [n for n in got if not got[n]]

    def span(ns):
        if not ns:
            return "none"
        if ns == list(range(ns[0], ns[-1] + 1)):
            return f"N={ns[0]}..{ns[-1]}" if len(ns) > 1 else f"N={ns[0]}"
        return "N=" + ",".join(map(str, ns))

    return Check("EPR reachability", bad == 0, bad, f"EPR reachable: {span(yes)} yes, {span(no)} no")


ALL_CHECKS = (
    check_normalization,
    check_schmidt_symmetry,
    check_periodicity_m1,
    check_monogamy,
    check_m1_residual,
    check_half_filling,
    check_entropy_bound,
    check_concurrence_range,
    check_oracle,
    check_epr,
)


def run_all(checks=ALL_CHECKS) -> list:
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        return list(pool.map(lambda fn: fn(), checks))
