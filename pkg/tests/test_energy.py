import math

import pytest

from iirsim.energy import (EnergyLedger, EnergyState, RadioParams, debit,
                           rx_cost, tx_cost)

RADIO = RadioParams()


class TestCosts:
    def test_tx_zero_bits(self):
        assert tx_cost(RADIO, 0, 50.0) == 0.0

    def test_tx_zero_distance(self):
        assert tx_cost(RADIO, 1000, 0.0) == pytest.approx(5.0e-5, rel=1e-12)

    def test_tx_with_amplifier_term(self):
        assert tx_cost(RADIO, 1000, 10.0) == pytest.approx(6.0e-5, rel=1e-12)

    def test_rx(self):
        assert rx_cost(RADIO, 0) == 0.0
        assert rx_cost(RADIO, 1000) == pytest.approx(5.0e-5, rel=1e-12)
        assert rx_cost(RADIO, 128) == pytest.approx(6.4e-6, rel=1e-12)

    def test_negative_distance_rejected(self):
        with pytest.raises(ValueError):
            tx_cost(RADIO, 1, -1.0)


class TestDebit:
    def test_identity(self):
        s = debit(EnergyState(initial=1.0, remaining=1.0), 0.0)
        assert s.remaining == 1.0 and s.alive

    def test_exact_drain_kills(self):
        s = debit(EnergyState(initial=1.0, remaining=1.0), 1.0)
        assert s.remaining == 0.0 and not s.alive

    def test_overdraw_clamps(self):
        s = debit(EnergyState(initial=1.0, remaining=0.5), 0.7)
        assert s.remaining == 0.0 and not s.alive

    def test_never_negative(self):
        s = EnergyState(initial=1.0, remaining=1.0)
        for amount in (0.3, 0.9, 0.01, 2.0):
            s = debit(s, amount)
            assert 0.0 <= s.remaining <= s.initial


class TestLedger:
    def test_conservation(self):
        ledger = EnergyLedger({0: 1.0, 1: 1.0})
        applied = []
        for i in range(1000):
            applied.append(ledger.debit(i % 2, 1e-4, round_no=i))
        assert ledger.total_consumed() == pytest.approx(math.fsum(applied),
                                                        rel=1e-12)

    def test_infinite_node_never_billed(self):
        ledger = EnergyLedger({0: math.inf})
        assert ledger.debit(0, 5.0, round_no=0) == 0.0
        assert ledger.alive(0)
        assert ledger.finite_nodes() == []

    def test_death_round_recorded(self):
        ledger = EnergyLedger({0: 1.0})
        ledger.debit(0, 0.6, round_no=3)
        assert ledger.first_death_round is None
        applied = ledger.debit(0, 0.6, round_no=7)
        assert applied == pytest.approx(0.4, rel=1e-12)
        assert ledger.first_death_round == 7
        assert not ledger.alive(0)
        assert ledger.remaining(0) == 0.0

    def test_dead_node_billed_nothing(self):
        ledger = EnergyLedger({0: 0.1})
        ledger.debit(0, 1.0, round_no=0)
        assert ledger.debit(0, 1.0, round_no=1) == 0.0
