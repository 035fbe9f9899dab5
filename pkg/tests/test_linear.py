import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from structnet.graph import SystemGraph, dual, u, x, y
from structnet.linear import (
    brute_force_cover,
    brute_force_linear_min_drivers,
    compare_linear_nonlinear,
    controllability_matrix,
    hopcroft_karp,
    in_neighbourhood,
    linear_driver_set,
    linear_min_driver_count,
    linear_min_sensor_count,
    linear_structural_controllability,
    linear_structural_observability,
    matching_driver_bound,
    numeric_rank,
    random_linear_instance,
    saturating_matching,
    with_driver_inputs,
)
from structnet.structural import input_reachability, minimal_driver_set, output_coreachability

from cases import G, chain, dilation_graph, dilation_graph_states, sphere_graph, star, two_cycles
from strategies import system_graphs


def all_matchings(g):
    """Every X-saturating assignment, by enumeration."""
    states = sorted(g.states)
    options = [[p for p in g.predecessors(n) if p.kind.value != "y"] for n in states]
    out = []
    for combo in itertools.product(*options):
        if len(set(combo)) == len(combo):
            out.append(dict(zip(states, combo)))
    return out


# -- Hopcroft-Karp --------------------------------------------------------------


def test_hopcroft_karp_small():
    m = hopcroft_karp({"a": [1, 2], "b": [1], "c": [2, 3]})
    assert len(m) == 3 and m[1] == "b"


@given(st.lists(st.lists(st.integers(0, 6), max_size=5), max_size=7))
def test_hopcroft_karp_is_maximum(rows):
    adj = {i: sorted(set(r)) for i, r in enumerate(rows)}
    m = hopcroft_karp(adj)
    assert len(set(m.values())) == len(m)
    assert all(r in adj[left] for r, left in m.items())
    # brute force maximum
    best = 0
    rights = sorted({r for rs in adj.values() for r in rs})
    lefts = list(adj)
    for k in range(min(len(lefts), len(rights)), -1, -1):
        found = any(
            len(set(combo)) == k
            for ls in itertools.combinations(lefts, k)
            for combo in itertools.product(*(adj[v] for v in ls))
        )
        if found:
            best = k
            break
    assert len(m) == best


# -- matching -------------------------------------------------------------------


def test_dilation_graph_matching():
    m = saturating_matching(dilation_graph())
    assert len(m.unsaturated) == 1 and m.unsaturated <= {x(1), x(2)}
    assert m.hall_violator == {x(1), x(2)}
    assert in_neighbourhood(dilation_graph(), m.hall_violator) == {u(1)}


def test_chain_matching():
    m = saturating_matching(G([("u1", "x1"), ("x1", "x2")]))
    assert m.saturated and m.matched == {x(1): u(1), x(2): x(1)}


def test_cycle_matching_is_valid():
    g = G([("x1", "x2"), ("x2", "x1"), ("u1", "x1")])
    m = saturating_matching(g)
    assert m.saturated
    assert m.matched in all_matchings(g)
    assert {x(1): x(2), x(2): x(1)} in all_matchings(g)


@settings(max_examples=200)
@given(system_graphs(max_states=6))
def test_matching_agrees_with_brute_force(g):
    m = saturating_matching(g)
    assert m.saturated == brute_force_cover(g) == bool(all_matchings(g))
    assert len(set(m.matched.values())) == len(m.matched)
    for r, left in m.matched.items():
        assert (left, r) in g.edges_A | g.edges_B


@given(system_graphs(max_states=7))
def test_hall_violator_is_deficient(g):
    m = saturating_matching(g)
    if m.saturated:
        assert m.hall_violator is None
    else:
        s = m.hall_violator
        assert m.unsaturated <= s <= set(g.states)
        assert len(in_neighbourhood(g, s)) < len(s)


# -- verdicts -------------------------------------------------------------------


def test_dilation_graph_linear_verdicts():
    c = linear_structural_controllability(dilation_graph())
    o = linear_structural_observability(dilation_graph())
    assert not c.controllable_or_observable and c.reachability_ok and not c.cover_ok
    assert c.dilation_or_contraction_witness == {x(1), x(2)}
    assert not o.controllable_or_observable and o.dilation_or_contraction_witness == {x(1), x(2)}


def test_linear_true_cases():
    assert linear_structural_controllability(G([("u1", "x1"), ("x1", "x2")])).controllable_or_observable
    assert linear_structural_controllability(sphere_graph()).controllable_or_observable
    assert linear_structural_observability(G([("x1", "y1"), ("x2", "y2"), ("x1", "x2")])).controllable_or_observable
    assert linear_structural_observability(G([("x1", "x2"), ("x2", "x1"), ("x1", "y1")])).controllable_or_observable


def test_unreached_reported():
    v = linear_structural_controllability(G([("x1", "x2")], inputs=["u1"]))
    assert not v.reachability_ok and v.unreached == {x(1), x(2)}


def test_brute_force_cover_examples():
    assert not brute_force_cover(dilation_graph())
    assert brute_force_cover(G([("u1", "x1"), ("x1", "x2")]))
    with pytest.raises(ValueError):
        brute_force_cover(chain(7))


@settings(max_examples=150)
@given(system_graphs(max_states=7))
def test_linear_implies_nonlinear(g):
    if linear_structural_controllability(g).controllable_or_observable:
        assert input_reachability(g).holds
    if linear_structural_observability(g).controllable_or_observable:
        assert output_coreachability(g).holds


@given(system_graphs(max_states=7))
def test_observability_is_dual_controllability(g):
    a = linear_structural_observability(g)
    b = linear_structural_controllability(dual(g))
    assert a.controllable_or_observable == b.controllable_or_observable


# -- driver counts --------------------------------------------------------------


def test_driver_count_examples():
    assert linear_min_driver_count(dilation_graph_states()) == 2
    assert linear_min_driver_count(chain()) == 1
    assert linear_min_driver_count(star()) == 3
    assert linear_min_driver_count(SystemGraph()) == 0


def test_perfectly_matched_roots_need_a_driver_each():
    g = two_cycles()
    assert matching_driver_bound(g) == 1
    assert linear_min_driver_count(g) == 2 == brute_force_linear_min_drivers(g)[0]
    loops = G([("x1", "x1"), ("x2", "x2")])
    assert linear_min_driver_count(loops) == 2


@settings(max_examples=150)
@given(system_graphs(max_states=7))
def test_driver_count_matches_brute_force(g):
    d = linear_driver_set(g)
    assert len(d) == brute_force_linear_min_drivers(g)[0]
    assert linear_structural_controllability(with_driver_inputs(g, d)).controllable_or_observable
    assert linear_min_driver_count(g) >= matching_driver_bound(g)


@given(system_graphs(max_states=8))
def test_dominance(g):
    rep = compare_linear_nonlinear(g)
    assert rep.nonlinear_drivers <= rep.linear_drivers
    assert rep.nonlinear_sensors <= rep.linear_sensors
    assert linear_min_sensor_count(g) == linear_min_driver_count(dual(g))


def test_compare_examples():
    assert (compare_linear_nonlinear(dilation_graph_states()).nonlinear_drivers, compare_linear_nonlinear(dilation_graph_states()).linear_drivers) == (2, 2)
    rep = compare_linear_nonlinear(star())
    assert (rep.nonlinear_drivers, rep.linear_drivers) == (1, 3)
    rep = compare_linear_nonlinear(chain())
    assert (rep.nonlinear_drivers, rep.linear_drivers) == (1, 1)
    assert set(rep.to_dict()) >= {"lin_controllable", "accessible"}


def test_nonlinear_drivers_subset_counts():
    assert len(minimal_driver_set(star())) == 1


# -- Kalman cross-check -----------------------------------------------------------


def test_random_instance_pattern():
    A, B, C = random_linear_instance(sphere_graph(), np.random.default_rng(1))
    assert A.shape == (3, 3) and B.shape == (3, 1) and C.shape == (0, 3)
    assert (A != 0).sum() == 4 and (B != 0).sum() == 2
    assert np.all((np.abs(A[A != 0]) >= 0.5) & (np.abs(A[A != 0]) <= 2))


def test_kalman_rank_dilation_graph_always_deficient():
    rng = np.random.default_rng(3)
    for _ in range(20):
        A, B, _ = random_linear_instance(dilation_graph(), rng)
        assert numeric_rank(controllability_matrix(A, B)) < 2


def test_kalman_rank_chain_full():
    A, B, _ = random_linear_instance(G([("u1", "x1"), ("x1", "x2"), ("x2", "x3")]), np.random.default_rng(0))
    assert numeric_rank(controllability_matrix(A, B)) == 3


def test_numeric_rank_edge_cases():
    assert numeric_rank(np.zeros((0, 0))) == 0
    assert numeric_rank(np.zeros((2, 2))) == 0
    assert numeric_rank(np.diag([1.0, 1e-12])) == 1
