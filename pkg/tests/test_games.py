"""Newcomb breakers, Zeno/anti-Zeno testers and the supply-demand switch."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgamelab.core import SingleQubitGate, equal_up_to_phase, gate
from qgamelab.games import (DAMAGED, WORKING, BombState, BreakerKind,
                            bomb_tester_zeno_exact, estimate_tester, ev_breaker_exact,
                            in_exp_not_class, newcomb_exact, run_bomb_tester_antizeno,
                            run_bomb_tester_zeno, run_ev_breaker, run_newcomb, run_supply_demand,
                            supply_demand_exact, supply_demand_survival, zeno_survival)
from qgamelab.games import TesterResult as Outcome
from qgamelab.rng import RngStream


def within_3sigma(freq, p, trials):
    return abs(freq - p) <= 3 * math.sqrt(p * (1 - p) / trials) + 1e-12


def probe_oracle(n, stage, working, final):
    """Independent branch calculation for a single probe qubit.

    The working bomb projects the probe onto |0> after every stage; the
    surviving weight is the product of the |0> probabilities.
    """
    psi = np.array([1, 0], dtype=complex)
    survive = 1.0
    for _ in range(n):
        psi = stage @ psi
        if working:
            survive *= abs(psi[0]) ** 2
            psi = np.array([1, 0], dtype=complex)
    psi = final @ psi
    p1 = abs(psi[1]) ** 2 / np.vdot(psi, psi).real
    return 1 - survive, survive * (1 - p1), survive * p1


class TestNewcomb:
    def test_qutrojan_tactic_one(self):
        d = newcomb_exact([0, 1], BreakerKind.qutrojan())
        assert d[(1, 0)] == pytest.approx(1, abs=1e-12)

    def test_qutrojan_superposition(self):
        a, b = 0.6, 0.8j
        res = run_newcomb([a, b], BreakerKind.qutrojan(), 20_000, RngStream(1))
        up = res.upper_marginal()
        assert up == pytest.approx((0.36, 0.64), abs=1e-12)
        assert res.lower_marginal() == pytest.approx((1, 0), abs=1e-12)
        assert res.counts[(0, 1)] == res.counts[(1, 1)] == 0
        assert within_3sigma(res.upper_marginal(exact=False)[1], 0.64, 20_000)

    def test_switch_never_fires(self):
        res = run_newcomb([1, 0], BreakerKind.classical_switch(0.0), 5000, RngStream(2))
        assert res.counts[(0, 0)] == 5000

    def test_switch_half_mixes_lower(self):
        res = run_newcomb([1, 0], BreakerKind.classical_switch(), 40_000, RngStream(3))
        assert res.exact[(0, 1)] == pytest.approx(0.5)
        assert within_3sigma(res.empirical[(0, 1)], 0.5, 40_000)

    def test_switch_copies_tactic_when_idle(self):
        d = newcomb_exact([1, 1], BreakerKind.classical_switch(0.0))
        assert d[(0, 0)] == pytest.approx(0.5) and d[(1, 1)] == pytest.approx(0.5)

    @pytest.mark.parametrize("tactic", [[1, 0], [0, 1], [1 / math.sqrt(2), 1 / math.sqrt(2)]])
    def test_qutrojan_invisibility(self, tactic):
        d = newcomb_exact(tactic, BreakerKind.qutrojan())
        assert d[(0, 1)] + d[(1, 1)] < 1e-12
        born = np.abs(np.asarray(tactic)) ** 2
        assert abs(d[(0, 0)] - born[0]) < 1e-12
        assert abs(d[(1, 0)] - born[1]) < 1e-12

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0, math.pi), st.floats(0, 2 * math.pi))
    def test_qutrojan_invisibility_any_tactic(self, theta, phi):
        v = [math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)]
        d = newcomb_exact(v, BreakerKind.qutrojan())
        assert d[(0, 1)] + d[(1, 1)] < 1e-12

    def test_bad_breaker(self):
        with pytest.raises(ValueError):
            BreakerKind.classical_switch(1.5)
        with pytest.raises(ValueError):
            BreakerKind("tap")


class TestClosedForms:
    def test_zeno_values(self):
        assert zeno_survival(1) == pytest.approx(0, abs=1e-30)
        assert zeno_survival(2) == pytest.approx(0.25, abs=1e-15)

    def test_zeno_expansion_at_1024(self):
        n = 1024
        assert abs(zeno_survival(n) - (1 - math.pi ** 2 / (4 * n) + math.pi ** 4 / (32 * n * n))) < 2e-8

    @pytest.mark.parametrize("n", [8 * 2 ** j for j in range(8)])
    def test_zeno_remainder_is_cubic(self, n):
        rem = zeno_survival(n) - (1 - math.pi ** 2 / (4 * n) + math.pi ** 4 / (32 * n * n))
        assert abs(rem) * n ** 3 <= 30

    def test_zeno_against_mpmath(self):
        mpmath = pytest.importorskip("mpmath")
        mpmath.mp.dps = 40
        for n in (3, 17, 500):
            ref = mpmath.cos(mpmath.pi / (2 * n)) ** (2 * n)
            assert abs(zeno_survival(n) - float(ref)) < 4e-16
            ref_sd = (1 - mpmath.sin(mpmath.pi / (2 * n)) ** 2 / 2) ** n
            assert abs(supply_demand_survival(n) - float(ref_sd)) < 4e-16

    def test_supply_demand_values(self):
        assert supply_demand_survival(1) == pytest.approx(0.5, abs=1e-15)
        assert supply_demand_survival(2) == pytest.approx(0.5625, abs=1e-15)

    def test_dominance(self):
        for n in range(1, 129):
            assert supply_demand_survival(n) > zeno_survival(n)

    @pytest.mark.parametrize("f", [zeno_survival, supply_demand_survival])
    @pytest.mark.parametrize("bad", [0, -3, 1.5])
    def test_bad_n(self, f, bad):
        with pytest.raises(ValueError):
            f(bad)


class TestEvBreaker:
    @pytest.mark.parametrize("n", [1, 3, 10])
    def test_zero_never_explodes(self, n):
        d = ev_breaker_exact(n, 0)
        assert d.exploded == pytest.approx(0, abs=1e-12)
        assert d.verdict0 == pytest.approx(1, abs=1e-12)
        for seed in range(5):
            r = run_ev_breaker(n, 0, RngStream(seed))
            assert r.verdict == 0 and r.rounds_completed == n

    def test_one_round_always_explodes(self):
        d = ev_breaker_exact(1, 1)
        assert d.exploded == pytest.approx(1, abs=1e-12)
        r = run_ev_breaker(1, 1, RngStream(0))
        assert r.exploded_at == 1

    def test_ten_rounds_mc(self):
        est = estimate_tester("ev_breaker", 10, 100_000, RngStream(10), first_qubit=1)
        assert within_3sigma(est.survival, zeno_survival(10), 100_000)
        assert est.verdict0 == 0

    @pytest.mark.parametrize("n", [2, 5, 10])
    def test_exact_matches_oracle(self, n):
        d = ev_breaker_exact(n, 1)
        exploded, v0, v1 = probe_oracle(n, gate("root_not", n).matrix, True, gate("not").matrix)
        assert d.exploded == pytest.approx(exploded, abs=1e-12)
        assert d.verdict1 == pytest.approx(v1, abs=1e-12)

    def test_result_invariants(self):
        for seed in range(30):
            r = run_ev_breaker(6, 1, RngStream(seed))
            assert r.rounds_completed <= 6
            if r.exploded:
                assert 1 <= r.exploded_at <= 6
            else:
                assert r.verdict == 1

    def test_bad_first_qubit(self):
        with pytest.raises(ValueError):
            run_ev_breaker(3, 2, RngStream(0))


class TestZenoTester:
    def test_damaged_is_deterministic(self):
        d = bomb_tester_zeno_exact(4, DAMAGED)
        assert d.verdict0 == pytest.approx(1, abs=1e-12)

    def test_working_four_rounds(self):
        d = bomb_tester_zeno_exact(4, WORKING)
        assert d.exploded == pytest.approx(1 - math.cos(math.pi / 8) ** 8, abs=1e-12)
        assert d.exploded == pytest.approx(0.46921, abs=1e-5)
        assert d.verdict0 == pytest.approx(0, abs=1e-12)

    def test_large_n_rarely_explodes(self):
        assert bomb_tester_zeno_exact(4096, WORKING).exploded < 7e-4

    @pytest.mark.parametrize("n", [1, 2, 4, 10, 32])
    def test_breaker_equivalence(self, n):
        est = estimate_tester("zeno", n, 100_000, RngStream(100, n), bomb=WORKING)
        p = 1 - zeno_survival(n)
        assert within_3sigma(est.exploded / est.trials, p, 100_000)
        assert est.verdict0 == 0

    @pytest.mark.parametrize("n", [1, 3, 7])
    @pytest.mark.parametrize("bomb", [WORKING, DAMAGED])
    def test_exact_matches_oracle(self, n, bomb):
        d = bomb_tester_zeno_exact(n, bomb)
        ref = probe_oracle(n, gate("root_not", n).matrix, bomb.working, gate("not").matrix)
        assert (d.exploded, d.verdict0, d.verdict1) == pytest.approx(ref, abs=1e-12)

    def test_single_run_types(self):
        r = run_bomb_tester_zeno(4, "working", RngStream(3))
        assert isinstance(r, Outcome)
        with pytest.raises(ValueError):
            Outcome(None, None, 0)
        with pytest.raises(ValueError):
            BombState.parse("broken")


class TestAntiZeno:
    def test_damaged(self):
        d = run_bomb_tester_antizeno(4, 0.0, DAMAGED)
        assert d.verdict1 == pytest.approx(1, abs=1e-12)

    def test_working(self):
        d = run_bomb_tester_antizeno(4, 0.0, WORKING)
        assert d.verdict0 == pytest.approx(1, abs=1e-12)
        assert d.exploded == 0.0

    def test_para_zeno_damaged(self):
        d = run_bomb_tester_antizeno(4, math.pi / 3, DAMAGED)
        assert d.verdict1 == pytest.approx(1, abs=1e-12)

    @pytest.mark.parametrize("n", range(1, 17))
    def test_determinism_and_complementarity(self, n):
        w = run_bomb_tester_antizeno(n, 0.0, WORKING)
        d = run_bomb_tester_antizeno(n, 0.0, DAMAGED)
        assert min(w.verdict0, w.verdict1) < 1e-12
        assert min(d.verdict0, d.verdict1) < 1e-12
        assert abs(w.verdict1 - d.verdict0) < 1e-12

    def test_matches_matrix_product(self):
        # straight matrix product of the stage sequence as an oracle
        n, alpha = 5, 0.4
        stage = gate("v", alpha, math.pi / (2 * n)).matrix
        kick = gate("exp_not", math.pi / (2 * n)).matrix
        not_m = gate("not").matrix
        u = np.eye(2)
        for s in range(n):
            u = kick @ stage @ u
            if s < n - 1:
                u = np.linalg.matrix_power(not_m, 3) @ u
        psi = not_m @ u @ np.array([1, 0])
        d = run_bomb_tester_antizeno(n, alpha, WORKING)
        assert d.verdict1 == pytest.approx(abs(psi[1]) ** 2, abs=1e-12)


class TestGateClass:
    @settings(max_examples=50, deadline=None)
    @given(st.floats(-10, 10))
    def test_v0_any_beta(self, beta):
        assert in_exp_not_class(gate("v", 0.0, beta), 1e-10)

    def test_v_half_pi(self):
        assert not in_exp_not_class(gate("v", math.pi / 2, math.pi / 4), 1e-10)

    def test_not_cubed(self):
        assert in_exp_not_class(gate("not") ** 3, 1e-10)

    @pytest.mark.parametrize("j", range(24))
    def test_boundary_scan(self, j):
        alpha = j * math.pi / 12
        inside = in_exp_not_class(gate("v", alpha, math.pi / 10), 1e-10)
        assert inside == (j % 12 == 0)

    @pytest.mark.parametrize("j", range(24))
    def test_scan_against_phase_search(self, j):
        # oracle: fit the best exp_not angle and compare up to phase
        g = gate("v", j * math.pi / 12, math.pi / 10)
        m = g.matrix / np.sqrt(np.linalg.det(g.matrix))
        phi = math.atan2(float(np.imag(m[0, 1])), float(np.real(m[0, 0])))
        fits = equal_up_to_phase(g, gate("exp_not", phi), 1e-9)
        assert fits == in_exp_not_class(g, 1e-10)

    def test_hadamard_not_in_class(self):
        assert not in_exp_not_class(gate("hadamard"))
        assert in_exp_not_class(SingleQubitGate(-np.eye(2)))


class TestSupplyDemand:
    def test_one_stage(self):
        d = supply_demand_exact(1, WORKING)
        assert d.survival == pytest.approx(0.5, abs=1e-12)
        assert d.survival > zeno_survival(1)

    def test_two_stages(self):
        d = supply_demand_exact(2, WORKING)
        assert d.survival == pytest.approx(0.5625, abs=1e-12)
        assert d.verdict0 == pytest.approx(d.verdict1, abs=1e-12)

    def test_damaged_two_stages(self):
        d = supply_demand_exact(2, DAMAGED)
        assert d.verdict0 == pytest.approx(1, abs=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3, 8, 20])
    @pytest.mark.parametrize("bomb", [WORKING, DAMAGED])
    def test_exact_matches_oracle(self, n, bomb):
        d = supply_demand_exact(n, bomb)
        ref = probe_oracle(n, gate("exp_h", math.pi / (2 * n)).matrix, bomb.working,
                           gate("hadamard").matrix)
        assert (d.exploded, d.verdict0, d.verdict1) == pytest.approx(ref, abs=1e-12)
        if bomb.working:
            assert d.survival == pytest.approx(supply_demand_survival(n), abs=1e-12)

    def test_monte_carlo(self):
        est = estimate_tester("supply_demand", 6, 50_000, RngStream(6), bomb=WORKING)
        assert within_3sigma(est.survival, supply_demand_survival(6), 50_000)
        r = run_supply_demand(6, WORKING, RngStream(1))
        assert r.rounds_completed <= 6

    def test_unknown_tester(self):
        with pytest.raises(ValueError):
            estimate_tester("bogus", 3, 10, RngStream(0))
