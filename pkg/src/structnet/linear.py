"""Linear structural controllability and observability.

Controllability needs input reachability plus a disjoint union of cycles
and input-rooted paths covering X. The cover exists iff the bipartite graph
with left side ``X ∪ U``, right side ``X`` and one edge per ``A ∪ B`` edge
has an X-saturating matching. When it does not, a Hall violator ``S`` with
``|N_in(S)| < |S|`` (a dilation) is returned as evidence.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

import numpy as np

from .graph import Kind, NodeId, SystemGraph, dual
from .structural import condense, input_reachability, minimal_driver_set, minimal_sensor_set, output_coreachability

__all__ = [
    "MatchingResult",
    "LinearVerdict",
    "ComparisonReport",
    "hopcroft_karp",
    "saturating_matching",
    "in_neighbourhood",
    "linear_structural_controllability",
    "linear_structural_observability",
    "linear_min_driver_count",
    "linear_min_sensor_count",
    "linear_driver_set",
    "linear_sensor_set",
    "matching_driver_bound",
    "with_driver_inputs",
    "brute_force_linear_min_drivers",
    "brute_force_cover",
    "compare_linear_nonlinear",
    "random_linear_instance",
    "controllability_matrix",
    "numeric_rank",
]


def hopcroft_karp(adj: Mapping[Hashable, Sequence[Hashable]]) -> dict:
    """Maximum bipartite matching in ``O(E sqrt(V))``.

    ``adj`` maps each left vertex to its right neighbours. Returns a dict
    from matched right vertices to their left partner. Iteration follows
    the order of ``adj`` and its lists, so results are deterministic.
    """
    INF = float("inf")
    left = list(adj)
    pair_l: dict = {}
    pair_r: dict = {}
    dist: dict = {}

    def bfs() -> bool:
        queue = deque()
        for v in left:
            if v in pair_l:
                dist[v] = INF
            else:
                dist[v] = 0
                queue.append(v)
        found = INF
        while queue:
            v = queue.popleft()
            if dist[v] >= found:
                continue
            for r in adj[v]:
                w = pair_r.get(r)
                if w is None:
                    found = min(found, dist[v] + 1)
                elif dist[w] == INF:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        return found != INF

    def dfs(v) -> bool:
        # explicit stack; each frame is (left vertex, iterator over its neighbours)
        stack = [(v, iter(adj[v]))]
        path = []
        while stack:
            cur, it = stack[-1]
            advanced = False
            for r in it:
                w = pair_r.get(r)
                if w is None:
                    path.append((cur, r))
                    for a, b in path:
                        pair_l[a] = b
                        pair_r[b] = a
                    return True
                if dist[w] == dist[cur] + 1:
                    path.append((cur, r))
                    stack.append((w, iter(adj[w])))
                    advanced = True
                    break
            if not advanced:
                dist[cur] = INF
                stack.pop()
                if path:
                    path.pop()
        return False

    while bfs():
        for v in left:
            if v not in pair_l:
                dfs(v)
    return dict(pair_r)


@dataclass(frozen=True)
class MatchingResult:
    matched: dict[NodeId, NodeId]
    unsaturated: frozenset[NodeId]
    hall_violator: frozenset[NodeId] | None = None

    @property
    def saturated(self) -> bool:
        return not self.unsaturated


def in_neighbourhood(g: SystemGraph, s) -> frozenset[NodeId]:
    return frozenset(p for n in s for p in g.predecessors(n) if p.kind is not Kind.OUTPUT)


def _hall_violator(g: SystemGraph, matched: dict[NodeId, NodeId], unsaturated) -> frozenset[NodeId]:
    # Alternating BFS from the unsaturated states. Every in-neighbour reached
    # is matched (or an augmenting path would exist), and its partner joins S.
    partner_of_left = {v: r for r, v in matched.items()}
    s = set(unsaturated)
    queue = deque(sorted(unsaturated))
    while queue:
        r = queue.popleft()
        for v in g.predecessors(r):
            nxt = partner_of_left.get(v)
            if nxt is not None and nxt not in s:
                s.add(nxt)
                queue.append(nxt)
    return frozenset(s)


def saturating_matching(g: SystemGraph) -> MatchingResult:
    adj = {v: [] for v in sorted(g.inputs + g.states)}
    for src, dst in sorted(g.edges_A | g.edges_B, key=lambda e: (e[0].sort_key, e[1].sort_key)):
        adj[src].append(dst)
    matched = hopcroft_karp(adj)
    unsaturated = frozenset(n for n in g.states if n not in matched)
    violator = _hall_violator(g, matched, unsaturated) if unsaturated else None
    return MatchingResult(matched, unsaturated, violator)


@dataclass(frozen=True)
class LinearVerdict:
    reachability_ok: bool
    cover_ok: bool
    dilation_or_contraction_witness: frozenset[NodeId] | None = None
    unreached: frozenset[NodeId] = frozenset()

    @property
    def controllable_or_observable(self) -> bool:
        return self.reachability_ok and self.cover_ok


def linear_structural_controllability(g: SystemGraph) -> LinearVerdict:
    reach = input_reachability(g)
    m = saturating_matching(g)
    return LinearVerdict(reach.holds, m.saturated, m.hall_violator, reach.unreached_witnesses)


def linear_structural_observability(g: SystemGraph) -> LinearVerdict:
    """Controllability of the dual; the witness is a contraction (out-neighbour deficiency)."""
    reach = output_coreachability(g)
    m = saturating_matching(dual(g))
    return LinearVerdict(reach.holds, m.saturated, m.hall_violator, reach.unreached_witnesses)


def _state_only(g: SystemGraph) -> SystemGraph:
    return SystemGraph(states=g.states, edges_A=g.edges_A)


def matching_driver_bound(g: SystemGraph) -> int:
    """``max(N - |M*|, 1)`` over the matching of ``G(X, A)``; zero for a graph without states.

    This counts independent inputs when one input may drive several nodes.
    It ignores root components that are perfectly matched internally, so it
    can undercount driver nodes; see :func:`linear_min_driver_count`.
    """
    if not g.states:
        return 0
    m = saturating_matching(_state_only(g))
    return max(len(g.states) - len(m.matched), 1)


def _root_augmented_matching(g: SystemGraph):
    # One virtual left node per root SCC, adjacent to that component's states.
    # A virtual match stands for an input placed on an otherwise unmatched
    # state, so drivers = N + #roots - |matching|.
    c = condense(g)
    adj: dict = {v: [] for v in sorted(g.states)}
    for src, dst in sorted(g.edges_A, key=lambda e: (e[0].sort_key, e[1].sort_key)):
        adj[src].append(dst)
    for i in c.roots:
        adj[("root", i)] = sorted(c.components[i])
    return c, hopcroft_karp(adj)


def linear_driver_set(g: SystemGraph) -> frozenset[NodeId]:
    """A minimum set of states that, each given its own input, satisfies both linear conditions.

    Drivers are the states not matched from inside ``G(X, A)``, plus the
    smallest state of every root component left without one.
    """
    if not g.states:
        return frozenset()
    c, matched = _root_augmented_matching(g)
    drivers = {r for r in g.states if not isinstance(matched.get(r), NodeId)}
    hit = {v[1] for v in matched.values() if not isinstance(v, NodeId)}
    drivers |= {min(c.components[i]) for i in c.roots if i not in hit}
    return frozenset(drivers)


def linear_min_driver_count(g: SystemGraph) -> int:
    return len(linear_driver_set(g))


def linear_sensor_set(g: SystemGraph) -> frozenset[NodeId]:
    return linear_driver_set(dual(g))


def linear_min_sensor_count(g: SystemGraph) -> int:
    return linear_min_driver_count(dual(g))


def with_driver_inputs(g: SystemGraph, drivers) -> SystemGraph:
    """``G(X, A)`` with a fresh input ``u_k`` wired to the k-th driver."""
    drivers = sorted(drivers)
    inputs = tuple(NodeId(Kind.INPUT, k) for k in range(1, len(drivers) + 1))
    return SystemGraph(inputs, g.states, (), g.edges_A, frozenset(zip(inputs, drivers)))


def brute_force_linear_min_drivers(g: SystemGraph, cap: int = 8) -> tuple[int, frozenset[NodeId]]:
    """Smallest driver subset (one input each) passing reachability and the cover test."""
    states = sorted(g.states)
    if len(states) > cap:
        raise ValueError(f"brute force limited to {cap} state nodes, graph has {len(states)}")
    for size in range(len(states) + 1):
        for subset in itertools.combinations(states, size):
            h = with_driver_inputs(g, subset)
            if input_reachability(h).holds and brute_force_cover(h, cap):
                return size, frozenset(subset)
    raise AssertionError("unreachable: driving every state always works")


def brute_force_cover(g: SystemGraph, cap: int = 6) -> bool:
    """Search every injective in-neighbour assignment over ``X ∪ U``."""
    states = sorted(g.states)
    if len(states) > cap:
        raise ValueError(f"brute force limited to {cap} state nodes, graph has {len(states)}")
    options = [[p for p in g.predecessors(n) if p.kind is not Kind.OUTPUT] for n in states]
    used: set[NodeId] = set()

    def assign(i: int) -> bool:
        if i == len(states):
            return True
        for p in options[i]:
            if p not in used:
                used.add(p)
                if assign(i + 1):
                    return True
                used.discard(p)
        return False

    return assign(0)


@dataclass(frozen=True)
class ComparisonReport:
    nonlinear_drivers: int
    linear_drivers: int
    nonlinear_sensors: int
    linear_sensors: int
    accessible: bool
    observable: bool
    lin_controllable: bool
    lin_observable: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def compare_linear_nonlinear(g: SystemGraph) -> ComparisonReport:
    report = ComparisonReport(
        nonlinear_drivers=len(minimal_driver_set(g)),
        linear_drivers=linear_min_driver_count(g),
        nonlinear_sensors=len(minimal_sensor_set(g)),
        linear_sensors=linear_min_sensor_count(g),
        accessible=input_reachability(g).holds,
        observable=output_coreachability(g).holds,
        lin_controllable=linear_structural_controllability(g).controllable_or_observable,
        lin_observable=linear_structural_observability(g).controllable_or_observable,
    )
    assert report.nonlinear_drivers <= report.linear_drivers
    assert report.nonlinear_sensors <= report.linear_sensors
    return report


def random_linear_instance(g: SystemGraph, rng: np.random.Generator, low: float = 0.5, high: float = 2.0):
    """Random ``(A, B, C)`` with the zero pattern of ``g``.

    Nonzero entries have magnitude uniform in ``[low, high]`` and a random sign.
    Rows/columns follow the sorted node order.
    """
    xs = {n: i for i, n in enumerate(sorted(g.states))}
    us = {n: i for i, n in enumerate(sorted(g.inputs))}
    ys = {n: i for i, n in enumerate(sorted(g.outputs))}
    A = np.zeros((len(xs), len(xs)))
    B = np.zeros((len(xs), len(us)))
    C = np.zeros((len(ys), len(xs)))

    def draw():
        return rng.uniform(low, high) * rng.choice([-1.0, 1.0])

    for s, d in sorted(g.edges_A):
        A[xs[d], xs[s]] = draw()
    for s, d in sorted(g.edges_B):
        B[xs[d], us[s]] = draw()
    for s, d in sorted(g.edges_C):
        C[ys[d], xs[s]] = draw()
    return A, B, C


def controllability_matrix(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    blocks = [B]
    for _ in range(1, n):
        blocks.append(A @ blocks[-1])
    return np.hstack(blocks) if blocks else np.zeros((0, 0))


def numeric_rank(M: np.ndarray, rel_tol: float = 1e-8) -> int:
    """Count singular values above ``rel_tol * sigma_max``."""
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))
