"""Graph conditions for nonlinear structural accessibility and observability.

Accessibility holds iff every state node is reachable from some input;
observability holds iff every state node reaches some output. Minimal
driver (sensor) sets take one node from each root (top) strongly connected
component of the state subgraph.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .graph import Kind, NodeId, SystemGraph, dual, u as input_node

__all__ = [
    "StructuralError",
    "ReachabilityReport",
    "Condensation",
    "Forest",
    "input_reachability",
    "output_coreachability",
    "strongly_connected_components",
    "condense",
    "minimal_driver_set",
    "minimal_sensor_set",
    "tail_set",
    "spanning_input_forest",
    "spanning_output_forest",
    "brute_force_min_drivers",
    "brute_force_min_sensors",
    "analysis_report",
]


class StructuralError(ValueError):
    def __init__(self, message: str, witnesses: Iterable[NodeId] = ()):
        self.witnesses = frozenset(witnesses)
        super().__init__(message)


@dataclass(frozen=True)
class ReachabilityReport:
    reached: frozenset[NodeId]
    unreached_witnesses: frozenset[NodeId]

    @property
    def holds(self) -> bool:
        return not self.unreached_witnesses


def _bfs(starts: Iterable[NodeId], step) -> set[NodeId]:
    seen = set(starts)
    queue = deque(sorted(seen))
    while queue:
        n = queue.popleft()
        for m in step(n):
            if m not in seen:
                seen.add(m)
                queue.append(m)
    return seen


def input_reachability(g: SystemGraph) -> ReachabilityReport:
    seen = _bfs(g.inputs, g.successors)
    reached = frozenset(n for n in g.states if n in seen)
    return ReachabilityReport(reached, frozenset(g.states) - reached)


def output_coreachability(g: SystemGraph) -> ReachabilityReport:
    seen = _bfs(g.outputs, g.predecessors)
    reached = frozenset(n for n in g.states if n in seen)
    return ReachabilityReport(reached, frozenset(g.states) - reached)


def _state_successors(g: SystemGraph, n: NodeId) -> list[NodeId]:
    return [m for m in g.successors(n) if m.kind is Kind.STATE]


def _state_predecessors(g: SystemGraph, n: NodeId) -> list[NodeId]:
    return [m for m in g.predecessors(n) if m.kind is Kind.STATE]


def strongly_connected_components(g: SystemGraph) -> list[frozenset[NodeId]]:
    """Tarjan's lowlink algorithm on ``G(X, A)``, iterative to avoid recursion limits."""
    index: dict[NodeId, int] = {}
    lowlink: dict[NodeId, int] = {}
    on_stack: set[NodeId] = set()
    stack: list[NodeId] = []
    counter = itertools.count()
    out: list[frozenset[NodeId]] = []

    for root in sorted(g.states):
        if root in index:
            continue
        index[root] = lowlink[root] = next(counter)
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(_state_successors(g, root)))]
        while work:
            v, it = work[-1]
            for w in it:
                if w not in index:
                    index[w] = lowlink[w] = next(counter)
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(_state_successors(g, w))))
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            else:
                work.pop()
                if work:
                    parent = work[-1][0]
                    lowlink[parent] = min(lowlink[parent], lowlink[v])
                if lowlink[v] == index[v]:
                    comp = set()
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        comp.add(w)
                        if w == v:
                            break
                    out.append(frozenset(comp))
    return out


@dataclass(frozen=True)
class Condensation:
    """SCCs of the state subgraph, sorted by their smallest member."""

    components: tuple[frozenset[NodeId], ...]
    dag_edges: frozenset[tuple[int, int]]
    root_flags: tuple[bool, ...]
    top_flags: tuple[bool, ...]

    def component_of(self, n: NodeId) -> int:
        for i, c in enumerate(self.components):
            if n in c:
                return i
        raise KeyError(n)

    @property
    def roots(self) -> list[int]:
        return [i for i, f in enumerate(self.root_flags) if f]

    @property
    def tops(self) -> list[int]:
        return [i for i, f in enumerate(self.top_flags) if f]


def condense(g: SystemGraph) -> Condensation:
    comps = sorted(strongly_connected_components(g), key=min)
    where = {n: i for i, c in enumerate(comps) for n in c}
    dag = frozenset(
        (where[s], where[d]) for s, d in g.edges_A if where[s] != where[d]
    )
    has_in = {d for _, d in dag}
    has_out = {s for s, _ in dag}
    return Condensation(
        tuple(comps),
        dag,
        tuple(i not in has_in for i in range(len(comps))),
        tuple(i not in has_out for i in range(len(comps))),
    )


def minimal_driver_set(g: SystemGraph) -> frozenset[NodeId]:
    """Smallest-index node of every root SCC of ``G(X, A)``."""
    c = condense(g)
    return frozenset(min(c.components[i]) for i in c.roots)


def minimal_sensor_set(g: SystemGraph) -> frozenset[NodeId]:
    c = condense(g)
    return frozenset(min(c.components[i]) for i in c.tops)


def tail_set(g: SystemGraph, s: Iterable[NodeId], k: int) -> frozenset[NodeId]:
    """``k``-fold in-neighbourhood ``T^k(S)`` over ``A ∪ B``; ``T^0(S) = S``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    cur = frozenset(s)
    for n in cur:
        if n not in g or n.kind is Kind.OUTPUT:
            raise ValueError(f"tail-set seed {n} must be a state or input node of the graph")
    for _ in range(k):
        cur = frozenset(p for n in cur for p in g.predecessors(n))
    return cur


@dataclass(frozen=True)
class Forest:
    """Spanning forest of the state nodes.

    ``parent`` maps each state node to its unique forest neighbour: the
    predecessor (an input or state) for input forests, the successor (an
    output or state) for output forests.
    """

    parent: dict[NodeId, NodeId]
    direction: str = "input"

    def edges(self) -> set[tuple[NodeId, NodeId]]:
        if self.direction == "input":
            return {(p, n) for n, p in self.parent.items()}
        return {(n, p) for n, p in self.parent.items()}

    def children(self, n: NodeId) -> list[NodeId]:
        """Forest neighbours on the far side from the roots/tops."""
        return sorted(c for c, p in self.parent.items() if p == n)

    def depth(self, n: NodeId) -> int:
        d = 0
        while n.kind is Kind.STATE:
            n = self.parent[n]
            d += 1
        return d


def _layered_forest(g: SystemGraph, sources, step, back) -> dict[NodeId, NodeId]:
    """Layered BFS; a node's parent is its smallest neighbour in the previous layer."""
    parent: dict[NodeId, NodeId] = {}
    seen = set(sources)
    frontier = sorted(seen)
    while frontier:
        layer = set(frontier)
        found = sorted({m for n in frontier for m in step(n) if m.kind is Kind.STATE and m not in seen})
        for m in found:
            parent[m] = min(p for p in back(m) if p in layer)
        seen.update(found)
        frontier = found
    return parent


def spanning_input_forest(g: SystemGraph) -> Forest:
    report = input_reachability(g)
    if not report.holds:
        raise StructuralError(
            "state nodes unreachable from the inputs: " + ", ".join(map(str, sorted(report.unreached_witnesses))),
            report.unreached_witnesses,
        )
    return Forest(_layered_forest(g, g.inputs, g.successors, g.predecessors), "input")


def spanning_output_forest(g: SystemGraph) -> Forest:
    report = output_coreachability(g)
    if not report.holds:
        raise StructuralError(
            "state nodes with no path to an output: " + ", ".join(map(str, sorted(report.unreached_witnesses))),
            report.unreached_witnesses,
        )
    return Forest(_layered_forest(g, g.outputs, g.predecessors, g.successors), "output")


def brute_force_min_drivers(g: SystemGraph, cap: int = 12) -> tuple[int, frozenset[NodeId]]:
    """Exhaustive minimum driver set for ``G(X, A)``: oracle for :func:`minimal_driver_set`.

    Subsets are tried by increasing size; the first one that makes every
    state reachable from a single new input is returned.
    """
    states = sorted(g.states)
    if len(states) > cap:
        raise ValueError(f"brute force limited to {cap} state nodes, graph has {len(states)}")
    succ = {n: _state_successors(g, n) for n in states}
    full = set(states)
    for size in range(len(states) + 1):
        for subset in itertools.combinations(states, size):
            if _bfs(subset, succ.__getitem__) == full:
                return size, frozenset(subset)
    raise AssertionError("unreachable: the full state set is always a driver set")


def brute_force_min_sensors(g: SystemGraph, cap: int = 12) -> tuple[int, frozenset[NodeId]]:
    return brute_force_min_drivers(dual(g), cap)


def with_single_input(g: SystemGraph, drivers: Iterable[NodeId]) -> SystemGraph:
    """``G(X, A)`` plus one fresh input node wired to ``drivers``."""
    new = input_node(1)
    return SystemGraph(
        inputs=(new,),
        states=g.states,
        outputs=(),
        edges_A=g.edges_A,
        edges_B=frozenset((new, d) for d in drivers),
    )


def _names(nodes) -> list[str]:
    return [str(n) for n in sorted(nodes)]


def analysis_report(g: SystemGraph) -> dict:
    acc = input_reachability(g)
    obs = output_coreachability(g)
    c = condense(g)
    return {
        "accessible": acc.holds,
        "observable": obs.holds,
        "witnesses": {
            "unreached_from_inputs": _names(acc.unreached_witnesses),
            "no_path_to_outputs": _names(obs.unreached_witnesses),
        },
        "components": [_names(comp) for comp in c.components],
        "root_sccs": c.roots,
        "top_sccs": c.tops,
        "min_drivers": _names(minimal_driver_set(g)),
        "min_sensors": _names(minimal_sensor_set(g)),
    }
