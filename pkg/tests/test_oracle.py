import math

import numpy as np
import pytest

from conftest import complete_graph, empty_graph, gnp, path_graph
from vsep.cbp import InfeasibleBoundsError, partition_violations, solve_block_lp
from vsep.oracle import TooLargeError, brute_force_lp, brute_force_vsp

EPS = 1e-9


# ------------------------------------------------------------ brute_force_vsp


def test_vsp_p5():
    res = brute_force_vsp(path_graph(5), 1, 2, 1, 2)
    assert res.optimal_weight == 1
    assert res.witness.s == (2,)
    assert res.witness.a == (0, 1)  # lexicographically smallest optimum
    assert res.witness.b == (3, 4)


def test_vsp_k4_infeasible():
    res = brute_force_vsp(complete_graph(4), 1, 2, 1, 2)
    assert not res.feasible
    assert res.witness is None


def test_vsp_two_isolated():
    res = brute_force_vsp(empty_graph(2), 1, 1, 1, 1)
    assert res.optimal_weight == 0
    assert res.witness.s == ()


def test_vsp_too_large():
    with pytest.raises(TooLargeError):
        brute_force_vsp(empty_graph(17), 1, 8, 1, 8)


def test_vsp_respects_costs():
    # the only separator is vertex 1, so its cost is the optimum
    from vsep.graphs import Graph

    g = Graph.from_edges(3, [(0, 1), (1, 2)], vertex_cost=[1, 7, 1])
    res = brute_force_vsp(g, 1, 1, 1, 1)
    assert res.optimal_weight == 7


def test_vsp_witness_always_valid():
    rng = np.random.default_rng(12)
    for trial in range(40):
        n = int(rng.integers(2, 11))
        g = gnp(n, float(rng.choice([0.2, 0.5])), seed=900 + trial)
        ua = math.floor(0.503 * n)
        if ua < 1:
            continue
        res = brute_force_vsp(g, 1, ua, 1, ua)
        if res.feasible:
            assert partition_violations(g, res.witness, 1, ua, 1, ua) == []


# ------------------------------------------------------------- brute_force_lp


def test_lp_oracle_fractional_vertex():
    val, vec = brute_force_lp([5, 4], [2, 3], 0, 4)
    assert abs(val - 23 / 3) <= EPS
    assert np.allclose(vec, [1, 2 / 3])


def test_lp_oracle_binary_vertex():
    val, vec = brute_force_lp([3, 2, 1], [1, 1, 1], 1, 2)
    assert val == 5
    assert np.array_equal(vec, [1, 1, 0])


def test_lp_oracle_pinned_at_zero():
    val, vec = brute_force_lp([1, 1], [1, 1], 0, 0)
    assert val == 0
    assert np.array_equal(vec, [0, 0])


def test_lp_oracle_too_large():
    with pytest.raises(TooLargeError):
        brute_force_lp(np.ones(13), np.ones(13), 0, 4)


def test_lp_oracle_infeasible():
    with pytest.raises(InfeasibleBoundsError):
        brute_force_lp([1, 1], [1, 1], 5, 6)


def test_lp_oracle_agreement_sample():
    rng = np.random.default_rng(21)
    for _ in range(100):
        n = int(rng.integers(1, 13))
        s = rng.integers(1, 4, size=n).astype(float)
        g = np.round(rng.normal(size=n) * 3, 4)
        total = int(s.sum())
        l = int(rng.integers(0, total + 1))
        u = int(rng.integers(l, total + 1))
        val, vec = brute_force_lp(g, s, l, u)
        assert l - EPS <= float(s @ vec) <= u + EPS
        assert np.all(vec >= -EPS) and np.all(vec <= 1 + EPS)
        fast = solve_block_lp(g, s, l, u)
        assert abs(float(g @ fast) - val) <= EPS
