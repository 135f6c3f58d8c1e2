import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dotweb.errors import InvalidPair, InvalidSpin
from dotweb.measures import (
    MEASURES,
    PairKind,
    SchmidtSpectrum,
    SpinKind,
    TwoQubitDensity,
    _same_alphas,
    concurrence,
    concurrence_batch,
    down_probability,
    entanglement_of_formation,
    measure_curves,
    reduced_same,
    reduced_updown,
    report,
    residual_tangle,
    tangle,
    von_neumann_entropy,
)
from dotweb.oracle import oracle_report
from dotweb.sector import SystemConfig, evolve, schmidt

W_TIME = 2 * math.pi / 9
SY = np.array([[0, -1j], [1j, 0]])
YY = np.kron(SY, SY)


def textbook_concurrence(rho):
    """Eigenvalues of rho (Y x Y) rho* (Y x Y), square-rooted."""
    r = rho @ YY @ rho.conj() @ YY
    lam = np.sqrt(np.clip(np.sort(np.linalg.eigvals(r).real)[::-1], 0, None))
    return max(0.0, lam[0] - lam[1:].sum())


def random_density(rng, rank):
    a = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def bell():
    v = np.array([0, 1, 1, 0]) / math.sqrt(2)
    return np.outer(v, v.conj())


class TestEntropy:
    def test_one_ebit(self):
        assert von_neumann_entropy(SchmidtSpectrum([0.5, 0.5])) == pytest.approx(1.0)

    def test_product(self):
        assert von_neumann_entropy(SchmidtSpectrum([1.0, 0.0])) == 0.0

    def test_seven_dots_below_one(self):
        cfg = SystemConfig(7, 1)
        grid = np.linspace(0, 2 * math.pi / 7, 20001)
        e = measure_curves(cfg, grid, ("entropy",))["entropy"]
        assert e.max() < 1.0
        peak = von_neumann_entropy(schmidt(evolve(cfg, math.pi / 7)))
        assert peak == pytest.approx(e.max(), abs=1e-7)


class TestConcurrence:
    def test_bell(self):
        assert concurrence(TwoQubitDensity(bell())) == pytest.approx(1.0, abs=1e-14)

    def test_maximally_mixed(self):
        assert concurrence(TwoQubitDensity(np.eye(4) / 4)) == 0.0

    def test_w_pair(self):
        # two-qubit reduction of (|100> + |010> + |001>)/sqrt(3)
        rho = np.zeros((4, 4))
        rho[0, 0] = 1 / 3
        rho[1:3, 1:3] = 1 / 3
        assert concurrence(TwoQubitDensity(rho)) == pytest.approx(2 / 3, abs=1e-14)

    @pytest.mark.parametrize("rank", [1, 2, 3, 4])
    def test_against_textbook(self, rank):
        rng = np.random.default_rng(rank)
        for _ in range(50):
            rho = random_density(rng, rank)
            assert concurrence(TwoQubitDensity(rho)) == pytest.approx(textbook_concurrence(rho), abs=1e-7)

    def test_batch(self):
        rng = np.random.default_rng(9)
        stack = np.array([random_density(rng, 2) for _ in range(10)])
        single = [concurrence(TwoQubitDensity(r)) for r in stack]
        assert np.allclose(concurrence_batch(stack), single, atol=1e-15)

    def test_rejects_invalid(self):
        with pytest.raises(ValueError):
            TwoQubitDensity(np.eye(4))
        with pytest.raises(ValueError):
            TwoQubitDensity(np.diag([1.5, -0.5, 0, 0]))


class TestFormation:
    def test_endpoints(self):
        assert entanglement_of_formation(0.0) == 0.0
        assert entanglement_of_formation(1.0) == pytest.approx(1.0)

    def test_two_thirds(self):
        x = 0.5 * (1 + math.sqrt(5 / 9))
        expected = -x * math.log2(x) - (1 - x) * math.log2(1 - x)
        assert entanglement_of_formation(2 / 3) == pytest.approx(expected, abs=1e-15)
        assert entanglement_of_formation(0.5) < entanglement_of_formation(2 / 3) < entanglement_of_formation(0.9)

    def test_monotone(self):
        cs = np.linspace(0, 1, 201)
        ef = [entanglement_of_formation(c) for c in cs]
        assert np.all(np.diff(ef) > 0)

    def test_range(self):
        with pytest.raises(ValueError):
            entanglement_of_formation(1.2)


class TestReduced:
    def test_two_dots_bell(self):
        rho = reduced_updown(evolve(SystemConfig(2, 1), math.pi / 4))
        assert concurrence(rho) == pytest.approx(1.0, abs=1e-12)
        assert np.trace(rho.matrix @ rho.matrix).real == pytest.approx(1.0)

    def test_w_state(self):
        st_ = evolve(SystemConfig(3, 1), W_TIME)
        assert concurrence(reduced_updown(st_)) == pytest.approx(2 / 3, abs=1e-12)
        assert concurrence(reduced_same(st_, PairKind.DOWN_DOWN)) == pytest.approx(2 / 3, abs=1e-12)

    @pytest.mark.parametrize("n,m_up", [(2, 1), (5, 2), (9, 7)])
    def test_initial_product(self, n, m_up):
        rho = reduced_updown(evolve(SystemConfig(n, m_up), 0.0)).matrix
        expected = np.zeros((4, 4))
        expected[2, 2] = 1.0  # |ud>
        assert np.allclose(rho, expected, atol=1e-14)
        assert concurrence(TwoQubitDensity(rho)) < 1e-14

    @pytest.mark.parametrize("theta", [0.0, 0.4, 1.9, math.pi / 2])
    def test_half_filling_same_kind_separable(self, theta):
        st_ = evolve(SystemConfig(4, 2), theta)
        assert concurrence(reduced_same(st_, PairKind.UP_UP)) == 0.0
        assert concurrence(reduced_same(st_, PairKind.DOWN_DOWN)) == 0.0

    def test_invalid_pairs(self):
        with pytest.raises(InvalidPair):
            reduced_updown(evolve(SystemConfig(4, 0), 0.2))
        with pytest.raises(InvalidPair):
            reduced_updown(evolve(SystemConfig(4, 4), 0.2))
        with pytest.raises(InvalidPair):
            reduced_same(evolve(SystemConfig(4, 1), 0.2), PairKind.UP_UP)
        with pytest.raises(InvalidPair):
            reduced_same(evolve(SystemConfig(4, 3), 0.2), PairKind.DOWN_DOWN)
        with pytest.raises(ValueError):
            reduced_same(evolve(SystemConfig(4, 2), 0.2), PairKind.UP_DOWN)

    def test_marginal_matches_pair_weights(self):
        # alpha_k = alpha_k0 + alpha_k1 where a same-kind pair exists
        cfg = SystemConfig(9, 4)
        st_ = evolve(cfg, 0.83)
        g = st_.gamma[None]
        a0, a1, _ = _same_alphas(cfg, g, PairKind.UP_UP)
        assert down_probability(cfg, g, SpinKind.UP)[0] == pytest.approx(a0[0] + a1[0], abs=1e-14)
        a0, a1, _ = _same_alphas(cfg, g, PairKind.DOWN_DOWN)
        assert down_probability(cfg, g, SpinKind.DOWN)[0] == pytest.approx(a0[0] + a1[0], abs=1e-14)


class TestTangles:
    def test_w_state(self):
        st_ = evolve(SystemConfig(3, 1), W_TIME)
        assert tangle(st_, SpinKind.UP) == pytest.approx(8 / 9, abs=1e-12)
        assert tangle(st_, SpinKind.DOWN) == pytest.approx(8 / 9, abs=1e-12)

    def test_product(self):
        st_ = evolve(SystemConfig(6, 2), 0.0)
        assert tangle(st_, SpinKind.UP) < 1e-14
        assert tangle(st_, SpinKind.DOWN) < 1e-14

    def test_four_one(self):
        st_ = evolve(SystemConfig(4, 1), math.pi / 4)
        assert tangle(st_, SpinKind.UP) == pytest.approx(0.75, abs=1e-12)
        assert tangle(st_, SpinKind.DOWN) == pytest.approx(0.75, abs=1e-12)
        assert concurrence(reduced_updown(st_)) == pytest.approx(0.5, abs=1e-12)
        assert concurrence(reduced_same(st_, PairKind.DOWN_DOWN)) == pytest.approx(0.5, abs=1e-12)

    def test_invalid(self):
        with pytest.raises(InvalidSpin):
            tangle(evolve(SystemConfig(3, 0), 0.1), SpinKind.UP)
        with pytest.raises(InvalidSpin):
            residual_tangle(evolve(SystemConfig(3, 3), 0.1), SpinKind.DOWN)

    @pytest.mark.parametrize("theta", [0.1, 0.7, 2.5, 5.0])
    def test_three_one_residual_zero(self, theta):
        st_ = evolve(SystemConfig(3, 1), theta)
        assert abs(residual_tangle(st_, SpinKind.UP)) < 1e-10
        assert abs(residual_tangle(st_, SpinKind.DOWN)) < 1e-10

    def test_four_two_genuine(self):
        st_ = evolve(SystemConfig(4, 2), math.pi / 2)
        assert residual_tangle(st_, SpinKind.UP) == pytest.approx(8 / 9, abs=1e-12)
        assert residual_tangle(st_, SpinKind.DOWN) == pytest.approx(8 / 9, abs=1e-12)


def closed_three_one(th):
    tp = 16 / 81 * np.sin(1.5 * th) ** 2
    return tp * (7 + 2 * np.cos(3 * th)), 2 * tp * (5 + 4 * np.cos(3 * th))


def closed_four_one(th):
    tp = np.sin(2 * th) ** 2 / 8
    return tp * (7 + np.cos(4 * th)), 3 * tp * (5 + 3 * np.cos(4 * th))


@pytest.mark.parametrize("n,closed,dd_mult", [(3, closed_three_one, 1), (4, closed_four_one, 2)])
def test_single_flip_tangle_closed_forms(n, closed, dd_mult):
    th = np.random.default_rng(n).uniform(0, 2 * np.pi, 100)
    c = measure_curves(SystemConfig(n, 1), th)
    tau_d, tau_u = closed(th)
    assert np.max(np.abs(c["tau_d"] - tau_d)) < 1e-10
    assert np.max(np.abs(c["tau_u"] - tau_u)) < 1e-10
    assert np.max(np.abs(c["tau_d"] - c["c_ud"] ** 2 - dd_mult * c["c_dd"] ** 2)) < 1e-10
    assert np.max(np.abs(c["tau_u"] - (n - 1) * c["c_ud"] ** 2)) < 1e-10


class TestReport:
    def test_bell(self):
        r = report(SystemConfig(2, 1), math.pi / 4)
        assert r.entropy == pytest.approx(1.0, abs=1e-12)
        assert r.concurrence_updown == pytest.approx(1.0, abs=1e-12)
        assert r.concurrence_upup is None and r.concurrence_downdown is None

    def test_zero_time(self):
        r = report(SystemConfig(7, 3), 0.0)
        for name in MEASURES:
            assert r.measure(name) == pytest.approx(0.0, abs=1e-14)

    def test_no_up_spins(self):
        r = report(SystemConfig(5, 0), 1.0)
        assert r.entropy == 0.0
        assert r.tangle_up is None and r.residual_up is None
        assert r.concurrence_updown is None
        assert r.concurrence_downdown == 0.0 and r.tangle_down == 0.0 and r.residual_down == 0.0

    def test_single_dot(self):
        r = report(SystemConfig(1, 1), 2.0)
        assert r.entropy == 0.0 and r.tangle_up == 0.0 and r.tangle_down is None

    def test_unknown_measure(self):
        with pytest.raises(KeyError):
            measure_curves(SystemConfig(4, 2), [0.1], ("bogus",))


configs = st.integers(2, 11).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n)))


@settings(max_examples=300, deadline=None)
@given(configs, st.floats(0.0, 2 * math.pi))
def test_report_invariants(nm, theta):
    cfg = SystemConfig(*nm)
    r = report(cfg, theta)
    assert r.entropy <= math.log2(cfg.m_prime + 1) + 1e-9
    for v in (r.residual_up, r.residual_down):
        assert v is None or v >= -1e-9
    for v in (r.concurrence_upup, r.concurrence_updown, r.concurrence_downdown):
        assert v is None or 0.0 <= v <= 1.0


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 10), st.floats(0.0, 2 * math.pi))
def test_single_flip_no_residual(n, theta):
    r = report(SystemConfig(n, 1), theta)
    assert abs(r.residual_up) < 1e-10 and abs(r.residual_down) < 1e-10


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5), st.floats(0.0, 2 * math.pi))
def test_half_filling(m, theta):
    r = report(SystemConfig(2 * m, m), theta)
    assert abs(r.residual_up - r.residual_down) < 1e-10
    for v in (r.concurrence_upup, r.concurrence_downdown):
        assert v is None or v < 1e-10


def test_w_pair_bound():
    # where the two single-flip concurrences coincide, they cannot beat 2/N
    for n in range(3, 9):
        th = np.linspace(0, 2 * np.pi / n, 20001)
        c = measure_curves(SystemConfig(n, 1), th, ("c_ud", "c_dd"))
        close = np.abs(c["c_ud"] - c["c_dd"]) < 1e-6
        assert np.all(c["c_ud"][close] <= 2 / n + 1e-6)


@pytest.mark.parametrize("n", range(1, 11))
def test_oracle_equivalence(n):
    rng = np.random.default_rng(n)
    for m_up in range(n + 1):
        cfg = SystemConfig(n, m_up)
        for theta in rng.uniform(0, 2 * np.pi, 25):
            a, b = report(cfg, theta), oracle_report(n, m_up, theta)
            for name in MEASURES:
                x, y = a.measure(name), b.measure(name)
                assert (x is None) == (y is None), name
                if x is not None:
                    assert abs(x - y) < 1e-9, (n, m_up, theta, name)
