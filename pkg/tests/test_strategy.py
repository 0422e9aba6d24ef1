import itertools

import numpy as np
import pytest

from mhsim.errors import (
    BaselineError,
    EnumerationTooLargeError,
    ParameterError,
    UndefinedGainError,
)
from mhsim.routing import build_path_table
from mhsim.strategy import (
    enumerate_strategies,
    optimal_strategy,
    performance_gain,
    strategy_from_letters,
    strategy_to_letters,
)
from mhsim.topology import MultihomeSetup

from conftest import make_topology, random_instance, unbounded


class TestEnumeration:
    def test_count_three_to_the_five(self):
        ks = enumerate_strategies(3, 5)
        assert len(ks) == 243
        assert len(set(ks)) == 243

    def test_single_client_base_case(self):
        assert enumerate_strategies(3, 1) == [(0,), (1,), (2,)]

    def test_odometer_order(self):
        ks = enumerate_strategies(3, 5)
        assert ks[0] == (0, 0, 0, 0, 0)
        assert ks[1] == (0, 0, 0, 0, 1)  # last client varies fastest
        assert ks[-1] == (2, 2, 2, 2, 2)

    def test_cap(self):
        with pytest.raises(EnumerationTooLargeError):
            enumerate_strategies(10, 7)
        with pytest.raises(ParameterError):
            enumerate_strategies(0, 3)


class TestLetters:
    def test_round_trip(self):
        assert strategy_to_letters((0, 0, 1, 1, 2)) == "AABBC"
        assert strategy_from_letters("AABBC") == (0, 0, 1, 1, 2)
        assert strategy_from_letters("aacbc", num_isps=3) == (0, 0, 2, 1, 2)

    def test_rejects_out_of_range(self):
        with pytest.raises(ParameterError):
            strategy_from_letters("AAD", num_isps=3)
        with pytest.raises(ParameterError):
            strategy_from_letters("A1B")


class TestPerformanceGain:
    def test_table_formatting_example(self):
        gain = performance_gain(13.66, 10.0)
        assert gain == pytest.approx(1.366)
        assert f"{100 * gain:.1f}" == "136.6"

    def test_identity(self):
        assert performance_gain(5.0, 5.0) == 1.0

    def test_zero_numerator(self):
        assert performance_gain(0.0, 5.0) == 0.0

    def test_zero_static_raises(self):
        with pytest.raises(UndefinedGainError):
            performance_gain(1.0, 0.0)


def symmetric_star():
    """Server 0, one client 4 reachable identically through three relays."""
    return make_topology(
        5,
        [
            (0, 1, 10.0),
            (0, 2, 10.0),
            (0, 3, 10.0),
            (1, 4, 10.0),
            (2, 4, 10.0),
            (3, 4, 10.0),
        ],
    )


class TestOptimalStrategy:
    def test_symmetric_ties_pick_first(self):
        topo = symmetric_star()
        setup = MultihomeSetup(0, (0, 1, 2), (4,), unbounded(1), (0,))
        table = build_path_table(topo, setup)
        report = optimal_strategy(setup, table, topo.capacities())
        assert report.optimal_strategy == (0,)
        assert report.gain == 1.0

    def test_two_isp_disjoint_toy(self):
        # hand enumeration: static (A,A) shares the 6G trunk; (A,B) splits
        topo = make_topology(
            5,
            [
                (0, 1, 6.0),   # egress A
                (0, 2, 5.0),   # egress B
                (1, 3, 4.0),   # client 3 via A: min(6,4)=4
                (2, 4, 9.0),   # client 4 via B: min(5,9)=5
                (1, 4, 9.0),   # client 4 via A
                (2, 3, 2.0),   # client 3 via B: min(5,2)=2
            ],
        )
        setup = MultihomeSetup(0, (0, 1), (3, 4), unbounded(2), (0, 0))
        table = build_path_table(topo, setup)
        report = optimal_strategy(setup, table, topo.capacities())
        # static (A,A): x3 + x4 <= 6 shared, x3 <= 4, x4 <= 9 -> 6
        assert report.static_total == pytest.approx(6.0)
        # hand-checked best: (A,B) -> 4 + 5 = 9
        assert report.optimal_strategy == (0, 1)
        assert report.optimal_total == pytest.approx(9.0)
        assert report.gain == pytest.approx(1.5)

    def test_gain_at_least_one(self):
        for seed in range(25):
            topo, setup, table = random_instance(seed, num_isps=2, num_clients=3)
            if not table.is_feasible(setup.static_strategy):
                continue
            report = optimal_strategy(setup, table, topo.capacities())
            assert report.gain >= 1.0

    def test_scaling_invariance(self):
        for seed in range(10):
            topo, setup, table = random_instance(seed, num_isps=2, num_clients=3)
            if not table.is_feasible(setup.static_strategy):
                continue
            residuals = topo.capacities()
            base = optimal_strategy(setup, table, residuals)
            scaled = optimal_strategy(setup, table, 3.7 * residuals)
            assert scaled.optimal_strategy == base.optimal_strategy
            assert scaled.gain == pytest.approx(base.gain, rel=1e-9)

    def test_infeasible_static_raises(self):
        topo = make_topology(4, [(0, 1, 5.0), (0, 2, 5.0), (1, 3, 5.0)])
        setup = MultihomeSetup(0, (0, 1), (3,), unbounded(1), (1,))
        table = build_path_table(topo, setup)
        with pytest.raises(BaselineError):
            optimal_strategy(setup, table, topo.capacities())

    def test_skipping_infeasible_strategies(self):
        # ISP B reaches nothing: only all-A strategies are feasible
        topo = make_topology(5, [(0, 1, 5.0), (0, 4, 5.0), (1, 2, 5.0), (1, 3, 5.0)])
        setup = MultihomeSetup(0, (0, 1), (2, 3), unbounded(2), (0, 0))
        table = build_path_table(topo, setup)
        report = optimal_strategy(setup, table, topo.capacities())
        assert report.optimal_strategy == (0, 0)
