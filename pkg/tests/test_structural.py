import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from structnet.graph import SystemGraph, add_edges, dual, remove_nodes, u, x, y
from structnet.structural import (
    StructuralError,
    analysis_report,
    brute_force_min_drivers,
    brute_force_min_sensors,
    condense,
    input_reachability,
    minimal_driver_set,
    minimal_sensor_set,
    output_coreachability,
    spanning_input_forest,
    spanning_output_forest,
    strongly_connected_components,
    tail_set,
    with_single_input,
)

from cases import G, chain, chain_io, dilation_graph, dilation_graph_states, two_cycles
from strategies import accessible_graphs, observable_graphs, system_graphs

# u1 feeds x1, x2; x1 feeds x3, x4; x2 feeds x5
TREE = G([("u1", "x1"), ("u1", "x2"), ("x1", "x3"), ("x1", "x4"), ("x2", "x5")])
# two-layer output tree: x3, x4 -> x1; x5 -> x2; x1, x2 -> y1
OUT_TREE = G([("x3", "x1"), ("x4", "x1"), ("x5", "x2"), ("x1", "y1"), ("x2", "y1")])


def _reach(g, n):
    """States reachable from n along A, including n."""
    seen, todo = {n}, [n]
    while todo:
        m = todo.pop()
        for s in g.successors(m):
            if s.kind is n.kind and s not in seen:
                seen.add(s)
                todo.append(s)
    return seen


def scc_oracle(g):
    reach = {n: _reach(g, n) for n in g.states}
    comps = {frozenset(m for m in g.states if m in reach[n] and n in reach[m]) for n in g.states}
    return comps


# -- reachability ---------------------------------------------------------------


def test_dilation_graph_accessible_and_observable():
    assert input_reachability(dilation_graph()).holds
    assert output_coreachability(dilation_graph()).holds


def test_dilation_graph_without_input():
    rep = input_reachability(remove_nodes(dilation_graph(), u(1)))
    assert not rep.holds and rep.unreached_witnesses == {x(1), x(2)}


def test_trivial_graphs_hold():
    assert input_reachability(SystemGraph()).holds
    assert output_coreachability(SystemGraph()).holds
    io_only = G([], inputs=["u1"], outputs=["y1"])
    assert input_reachability(io_only).holds and output_coreachability(io_only).holds


def test_output_on_first_of_chain():
    rep = output_coreachability(G([("x1", "x2"), ("x1", "y1")]))
    assert not rep.holds and rep.unreached_witnesses == {x(2)}


@given(system_graphs())
def test_duality(g):
    assert output_coreachability(g).holds == input_reachability(dual(g)).holds
    assert output_coreachability(g).unreached_witnesses == input_reachability(dual(g)).unreached_witnesses


@given(accessible_graphs(), st.data())
def test_adding_edges_keeps_accessibility(g, data):
    pairs = [(s, t) for s in g.inputs + g.states for t in g.states if (s, t) not in g.edges]
    if not pairs:
        return
    e = data.draw(st.sampled_from(pairs))
    assert input_reachability(add_edges(g, e)).holds


# -- condensation ---------------------------------------------------------------


def test_condense_dilation_graph():
    c = condense(dilation_graph())
    assert c.components == (frozenset({x(1)}), frozenset({x(2)}))
    assert c.roots == [0, 1] and c.tops == [0, 1]


def test_condense_cycle():
    c = condense(G([("x1", "x2"), ("x2", "x3"), ("x3", "x1")]))
    assert c.components == (frozenset({x(1), x(2), x(3)}),)
    assert c.roots == c.tops == [0]


def test_condense_tail_into_cycle():
    c = condense(G([("x1", "x2"), ("x2", "x3"), ("x3", "x2")]))
    assert c.components == (frozenset({x(1)}), frozenset({x(2), x(3)}))
    assert c.root_flags == (True, False) and c.top_flags == (False, True)
    assert c.dag_edges == {(0, 1)}
    assert c.component_of(x(3)) == 1


@settings(max_examples=150)
@given(system_graphs(max_states=8))
def test_scc_matches_mutual_reachability(g):
    assert set(strongly_connected_components(g)) == scc_oracle(g)


@given(system_graphs(max_states=8))
def test_condensation_invariants(g):
    c = condense(g)
    assert sorted(n for comp in c.components for n in comp) == sorted(g.states)
    k = len(c.components)
    # topological order exists iff acyclic
    indeg = {i: 0 for i in range(k)}
    for _, d in c.dag_edges:
        indeg[d] += 1
    order, ready = [], [i for i in range(k) if indeg[i] == 0]
    while ready:
        i = ready.pop()
        order.append(i)
        for s, d in c.dag_edges:
            if s == i:
                indeg[d] -= 1
                if indeg[d] == 0:
                    ready.append(d)
    assert len(order) == k
    for i in range(k):
        assert c.root_flags[i] == all(d != i for _, d in c.dag_edges)
        assert c.top_flags[i] == all(s != i for s, _ in c.dag_edges)


def test_scc_deep_chain_no_recursion_limit():
    g = chain(3000)
    assert len(strongly_connected_components(g)) == 3000


# -- minimal sets -----------------------------------------------------------------


def test_drivers_examples():
    assert minimal_driver_set(dilation_graph_states()) == {x(1), x(2)}
    assert minimal_driver_set(chain()) == {x(1)}
    assert minimal_driver_set(two_cycles()) == {x(1), x(3)}
    assert brute_force_min_drivers(two_cycles())[0] == 2


def test_sensors_examples():
    assert minimal_sensor_set(chain()) == {x(3)}
    assert minimal_sensor_set(dilation_graph_states()) == {x(1), x(2)}
    assert len(minimal_sensor_set(two_cycles())) == 2 == brute_force_min_sensors(two_cycles())[0]


def test_brute_force_examples():
    assert brute_force_min_drivers(chain()) == (1, frozenset({x(1)}))
    assert brute_force_min_drivers(dilation_graph_states()) == (2, frozenset({x(1), x(2)}))
    with pytest.raises(ValueError):
        brute_force_min_drivers(chain(13))


def test_drivers_ignore_existing_inputs():
    # the minimal set is a property of G(X, A) only
    assert minimal_driver_set(chain_io()) == {x(1)}
    assert minimal_driver_set(dilation_graph()) == {x(1), x(2)}


@settings(max_examples=120)
@given(system_graphs(max_states=8))
def test_driver_set_optimal(g):
    size, _ = brute_force_min_drivers(g)
    assert len(minimal_driver_set(g)) == size
    assert len(minimal_sensor_set(g)) == brute_force_min_sensors(g)[0]


@given(system_graphs(max_states=8))
def test_single_input_suffices(g):
    h = with_single_input(g, minimal_driver_set(g))
    assert input_reachability(h).holds
    assert len(h.inputs) == 1


@given(system_graphs(max_states=8))
def test_driver_set_picks_smallest_index_per_root(g):
    c = condense(g)
    assert minimal_driver_set(g) == {min(c.components[i]) for i in c.roots}
    assert minimal_sensor_set(g) == {min(c.components[i]) for i in c.tops}


# -- tail sets ----------------------------------------------------------------------


def test_tail_set_examples():
    assert tail_set(TREE, {x(4)}, 1) == {x(1)}
    assert tail_set(TREE, {x(4)}, 2) == {u(1)}
    assert tail_set(TREE, {x(3), x(5)}, 1) == {x(1), x(2)}
    assert tail_set(G([("u1", "x1"), ("x1", "x2")]), {x(2)}, 2) == {u(1)}


@given(system_graphs(), st.data())
def test_tail_set_zero_is_identity(g, data):
    s = data.draw(st.sets(st.sampled_from(g.states))) if g.states else set()
    assert tail_set(g, s, 0) == frozenset(s)


def test_tail_set_rejects_outputs():
    with pytest.raises(ValueError):
        tail_set(dilation_graph(), {y(1)}, 1)
    with pytest.raises(ValueError):
        tail_set(dilation_graph(), {x(1)}, -1)


# -- forests ------------------------------------------------------------------------


def test_input_forest_examples():
    assert spanning_input_forest(dilation_graph()).parent == {x(1): u(1), x(2): u(1)}
    assert spanning_input_forest(G([("u1", "x1"), ("x1", "x2")])).parent == {x(1): u(1), x(2): x(1)}
    diamond = G([("u1", "x1"), ("u1", "x2"), ("x1", "x3"), ("x2", "x3")])
    assert spanning_input_forest(diamond).parent[x(3)] == x(1)
    assert spanning_input_forest(TREE).edges() == TREE.edges


def test_output_forest_examples():
    assert spanning_output_forest(dilation_graph()).parent == {x(1): y(1), x(2): y(1)}
    f = spanning_output_forest(G([("x1", "x2"), ("x2", "y1")]))
    assert f.edges() == {(x(1), x(2)), (x(2), y(1))}
    assert spanning_output_forest(OUT_TREE).edges() == OUT_TREE.edges
    assert spanning_output_forest(OUT_TREE).children(x(1)) == [x(3), x(4)]
    assert spanning_output_forest(OUT_TREE).depth(x(5)) == 2


def test_forest_needs_the_property():
    with pytest.raises(StructuralError) as info:
        spanning_input_forest(G([("x1", "x2")], inputs=["u1"]))
    assert info.value.witnesses == {x(1), x(2)}
    with pytest.raises(StructuralError):
        spanning_output_forest(G([("u1", "x1")]))


@given(accessible_graphs(max_states=7))
def test_input_forest_valid(g):
    f = spanning_input_forest(g)
    assert set(f.parent) == set(g.states)
    assert f.edges() <= g.edges
    for n in g.states:
        steps = 0
        while n.kind.value == "x":
            n = f.parent[n]
            steps += 1
            assert steps <= len(g.states)
        assert n.kind.value == "u"


@given(observable_graphs(max_states=7))
def test_output_forest_valid(g):
    f = spanning_output_forest(g)
    assert set(f.parent) == set(g.states)
    assert f.edges() <= g.edges
    assert all(f.depth(n) <= len(g.states) for n in g.states)


@given(accessible_graphs(max_states=7))
def test_input_forest_is_shortest_path(g):
    # layered construction: forest depth equals BFS distance from the inputs
    f = spanning_input_forest(g)
    dist = {n: 0 for n in g.inputs}
    frontier = list(g.inputs)
    while frontier:
        nxt = []
        for n in frontier:
            for m in g.successors(n):
                if m not in dist and m.kind.value == "x":
                    dist[m] = dist[n] + 1
                    nxt.append(m)
        frontier = nxt
    assert all(f.depth(n) == dist[n] for n in g.states)


# -- report -------------------------------------------------------------------------


def test_analysis_report_dilation_graph():
    rep = analysis_report(dilation_graph())
    assert rep["accessible"] and rep["observable"]
    assert rep["min_drivers"] == ["x1", "x2"] and rep["components"] == [["x1"], ["x2"]]
    assert rep["witnesses"] == {"unreached_from_inputs": [], "no_path_to_outputs": []}


def test_brute_force_witness_is_a_driver_set():
    for n in range(1, 6):
        for edges in itertools.islice(itertools.combinations([(f"x{i}", f"x{j}") for i in range(1, n + 1) for j in range(1, n + 1) if i != j], 2), 5):
            g = G(list(edges), states=[f"x{i}" for i in range(1, n + 1)])
            size, wit = brute_force_min_drivers(g)
            assert len(wit) == size
            assert input_reachability(with_single_input(g, wit)).holds
