"""System graphs over input, state and output nodes.

A :class:`SystemGraph` holds three typed edge sets: ``edges_A`` (state to
state), ``edges_B`` (input to state) and ``edges_C`` (state to output).
Graphs are immutable; every edit returns a new graph.
"""
from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

__all__ = [
    "GraphError",
    "GraphParseError",
    "Kind",
    "NodeId",
    "SystemGraph",
    "GraphDelta",
    "parse_graph",
    "serialize_graph",
    "dual",
    "apply_delta",
    "to_dot",
    "to_json",
    "from_json",
    "u",
    "x",
    "y",
]


class GraphError(ValueError):
    """Raised when a graph, edge or delta violates the typing rules."""


class GraphParseError(GraphError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Kind(enum.Enum):
    INPUT = "u"
    STATE = "x"
    OUTPUT = "y"

    @property
    def rank(self) -> int:
        return _KIND_RANK[self]


_KIND_RANK = {Kind.INPUT: 0, Kind.STATE: 1, Kind.OUTPUT: 2}
_NODE_RE = re.compile(r"^([uxy])([1-9][0-9]*)$")


@dataclass(frozen=True)
class NodeId:
    kind: Kind
    index: int

    def __post_init__(self):
        if not isinstance(self.kind, Kind):
            raise GraphError(f"invalid node kind {self.kind!r}")
        if isinstance(self.index, bool) or not isinstance(self.index, int) or self.index < 1:
            raise GraphError(f"node index must be a positive integer, got {self.index!r}")

    @classmethod
    def parse(cls, text: str) -> "NodeId":
        m = _NODE_RE.match(text)
        if m is None:
            raise GraphError(f"invalid node name {text!r} (expected u<i>, x<i> or y<i>)")
        return cls(Kind(m.group(1)), int(m.group(2)))

    @property
    def sort_key(self) -> tuple[int, int]:
        return (self.kind.rank, self.index)

    def __lt__(self, other: "NodeId") -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        return f"{self.kind.value}{self.index}"

    def __repr__(self) -> str:
        return f"NodeId({self})"


def u(i: int) -> NodeId:
    return NodeId(Kind.INPUT, i)


def x(i: int) -> NodeId:
    return NodeId(Kind.STATE, i)


def y(i: int) -> NodeId:
    return NodeId(Kind.OUTPUT, i)


Edge = tuple[NodeId, NodeId]


def _edge_class(src: NodeId, dst: NodeId) -> str:
    """Return 'A', 'B' or 'C' for a legal edge, raise otherwise."""
    if src.kind is Kind.STATE and dst.kind is Kind.STATE:
        return "A"
    if src.kind is Kind.INPUT and dst.kind is Kind.STATE:
        return "B"
    if src.kind is Kind.STATE and dst.kind is Kind.OUTPUT:
        return "C"
    raise GraphError(f"illegal edge direction {src} -> {dst}")


def _sorted_edges(edges: Iterable[Edge]) -> list[Edge]:
    return sorted(edges, key=lambda e: (e[0].sort_key, e[1].sort_key))


@dataclass(frozen=True, eq=False)
class SystemGraph:
    """Directed graph ``(X ∪ Y ∪ U, A ∪ B ∪ C)``.

    Node tuples keep declaration order. Equality and hashing ignore that
    order, so a graph equals its canonical re-serialization.
    """

    inputs: tuple[NodeId, ...] = ()
    states: tuple[NodeId, ...] = ()
    outputs: tuple[NodeId, ...] = ()
    edges_A: frozenset[Edge] = frozenset()
    edges_B: frozenset[Edge] = frozenset()
    edges_C: frozenset[Edge] = frozenset()
    _pred: dict = field(init=False, repr=False, compare=False)
    _succ: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("inputs", "states", "outputs"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        for name in ("edges_A", "edges_B", "edges_C"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))

        seen: set[NodeId] = set()
        for nodes, kind in ((self.inputs, Kind.INPUT), (self.states, Kind.STATE), (self.outputs, Kind.OUTPUT)):
            for n in nodes:
                if not isinstance(n, NodeId) or n.kind is not kind:
                    raise GraphError(f"node {n} declared as {kind.name.lower()}")
                if n in seen:
                    raise GraphError(f"node {n} declared twice")
                seen.add(n)

        pred: dict[NodeId, list[NodeId]] = {n: [] for n in seen}
        succ: dict[NodeId, list[NodeId]] = {n: [] for n in seen}
        for label, edges in (("A", self.edges_A), ("B", self.edges_B), ("C", self.edges_C)):
            for e in edges:
                src, dst = e
                if src not in seen or dst not in seen:
                    missing = src if src not in seen else dst
                    raise GraphError(f"edge {src} -> {dst} references undeclared node {missing}")
                if _edge_class(src, dst) != label:
                    raise GraphError(f"edge {src} -> {dst} does not belong to edge set {label}")
                pred[dst].append(src)
                succ[src].append(dst)
        for d in (pred, succ):
            for n in d:
                d[n] = tuple(sorted(d[n]))
        object.__setattr__(self, "_pred", pred)
        object.__setattr__(self, "_succ", succ)

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[str | NodeId, str | NodeId]],
        inputs: Iterable[str | NodeId] = (),
        states: Iterable[str | NodeId] = (),
        outputs: Iterable[str | NodeId] = (),
    ) -> "SystemGraph":
        """Build a graph from edge pairs, declaring any endpoint not listed.

        >>> g = SystemGraph.from_edges([("u1", "x1"), ("x1", "y1")])
        >>> [str(n) for n in g.nodes]
        ['u1', 'x1', 'y1']
        """
        buckets: dict[Kind, list[NodeId]] = {Kind.INPUT: [], Kind.STATE: [], Kind.OUTPUT: []}

        def declare(n):
            n = n if isinstance(n, NodeId) else NodeId.parse(n)
            if n not in buckets[n.kind]:
                buckets[n.kind].append(n)
            return n

        for n in (*inputs, *states, *outputs):
            declare(n)
        sets: dict[str, set[Edge]] = {"A": set(), "B": set(), "C": set()}
        for src, dst in edges:
            e = (declare(src), declare(dst))
            label = _edge_class(*e)
            if e in sets[label]:
                raise GraphError(f"duplicate edge {e[0]} -> {e[1]}")
            sets[label].add(e)
        return cls(
            tuple(buckets[Kind.INPUT]),
            tuple(buckets[Kind.STATE]),
            tuple(buckets[Kind.OUTPUT]),
            frozenset(sets["A"]),
            frozenset(sets["B"]),
            frozenset(sets["C"]),
        )

    @property
    def nodes(self) -> tuple[NodeId, ...]:
        return self.inputs + self.states + self.outputs

    @property
    def edges(self) -> frozenset[Edge]:
        return self.edges_A | self.edges_B | self.edges_C

    def predecessors(self, n: NodeId) -> tuple[NodeId, ...]:
        """In-neighbours of ``n`` sorted by (kind, index)."""
        return self._pred[n]

    def successors(self, n: NodeId) -> tuple[NodeId, ...]:
        return self._succ[n]

    def __contains__(self, n: object) -> bool:
        return n in self._pred

    def _key(self):
        return (
            frozenset(self.inputs),
            frozenset(self.states),
            frozenset(self.outputs),
            self.edges_A,
            self.edges_B,
            self.edges_C,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SystemGraph):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return (
            f"SystemGraph(U={len(self.inputs)}, X={len(self.states)}, Y={len(self.outputs)}, "
            f"|A|={len(self.edges_A)}, |B|={len(self.edges_B)}, |C|={len(self.edges_C)})"
        )


@dataclass(frozen=True)
class GraphDelta:
    removed_nodes: frozenset[NodeId] = frozenset()
    added_edges: frozenset[Edge] = frozenset()


_SECTIONS = {"input": Kind.INPUT, "state": Kind.STATE, "output": Kind.OUTPUT}


def parse_graph(text: str) -> SystemGraph:
    """Parse the line-based graph format.

    ``#`` starts a comment. Section lines (``input``, ``state``, ``output``)
    list whitespace-separated node names; a section may repeat. Edge lines
    read ``SRC -> DST``. Nodes must be declared before use.
    """
    declared: dict[Kind, list[NodeId]] = {k: [] for k in Kind}
    known: set[NodeId] = set()
    sets: dict[str, set[Edge]] = {"A": set(), "B": set(), "C": set()}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" in line:
            parts = [p.strip() for p in line.split("->")]
            if len(parts) != 2 or not all(parts) or any(len(p.split()) != 1 for p in parts):
                raise GraphParseError(f"malformed edge line {line!r}", lineno)
            try:
                src, dst = NodeId.parse(parts[0]), NodeId.parse(parts[1])
            except GraphError as exc:
                raise GraphParseError(str(exc), lineno) from None
            for n in (src, dst):
                if n not in known:
                    raise GraphParseError(f"undeclared node {n}", lineno)
            try:
                label = _edge_class(src, dst)
            except GraphError as exc:
                raise GraphParseError(str(exc), lineno) from None
            if (src, dst) in sets[label]:
                raise GraphParseError(f"duplicate edge {src} -> {dst}", lineno)
            sets[label].add((src, dst))
            continue

        words = line.split()
        kind = _SECTIONS.get(words[0])
        if kind is None:
            raise GraphParseError(f"unknown section or syntax {words[0]!r}", lineno)
        for w in words[1:]:
            try:
                n = NodeId.parse(w)
            except GraphError as exc:
                raise GraphParseError(str(exc), lineno) from None
            if n.kind is not kind:
                raise GraphParseError(f"node {n} listed in the {words[0]} section", lineno)
            if n in known:
                raise GraphParseError(f"node {n} declared twice", lineno)
            known.add(n)
            declared[kind].append(n)

    return SystemGraph(
        tuple(declared[Kind.INPUT]),
        tuple(declared[Kind.STATE]),
        tuple(declared[Kind.OUTPUT]),
        frozenset(sets["A"]),
        frozenset(sets["B"]),
        frozenset(sets["C"]),
    )


def serialize_graph(g: SystemGraph) -> str:
    lines = []
    for name, nodes in (("input", g.inputs), ("state", g.states), ("output", g.outputs)):
        if nodes:
            lines.append(name + " " + " ".join(str(n) for n in sorted(nodes)))
    for src, dst in _sorted_edges(g.edges):
        lines.append(f"{src} -> {dst}")
    return "\n".join(lines) + ("\n" if lines else "")


def _swap_io(n: NodeId) -> NodeId:
    if n.kind is Kind.INPUT:
        return NodeId(Kind.OUTPUT, n.index)
    if n.kind is Kind.OUTPUT:
        return NodeId(Kind.INPUT, n.index)
    return n


def dual(g: SystemGraph) -> SystemGraph:
    """Reverse every edge and swap input labels with output labels."""
    rev = lambda edges: frozenset((_swap_io(d), _swap_io(s)) for s, d in edges)  # noqa: E731
    return SystemGraph(
        inputs=tuple(_swap_io(n) for n in g.outputs),
        states=g.states,
        outputs=tuple(_swap_io(n) for n in g.inputs),
        edges_A=rev(g.edges_A),
        edges_B=rev(g.edges_C),
        edges_C=rev(g.edges_B),
    )


def apply_delta(g: SystemGraph, d: GraphDelta) -> SystemGraph:
    for n in d.removed_nodes:
        if n not in g:
            raise GraphError(f"cannot remove unknown node {n}")
    gone = set(d.removed_nodes)
    sets: dict[str, set[Edge]] = {
        "A": {e for e in g.edges_A if e[0] not in gone and e[1] not in gone},
        "B": {e for e in g.edges_B if e[0] not in gone and e[1] not in gone},
        "C": {e for e in g.edges_C if e[0] not in gone and e[1] not in gone},
    }
    for src, dst in d.added_edges:
        for n in (src, dst):
            if n not in g or n in gone:
                raise GraphError(f"added edge {src} -> {dst} references unknown node {n}")
        label = _edge_class(src, dst)
        if (src, dst) in sets[label]:
            raise GraphError(f"duplicate edge {src} -> {dst}")
        sets[label].add((src, dst))
    keep = lambda nodes: tuple(n for n in nodes if n not in gone)  # noqa: E731
    return SystemGraph(
        keep(g.inputs),
        keep(g.states),
        keep(g.outputs),
        frozenset(sets["A"]),
        frozenset(sets["B"]),
        frozenset(sets["C"]),
    )


def remove_nodes(g: SystemGraph, *nodes: NodeId) -> SystemGraph:
    return apply_delta(g, GraphDelta(removed_nodes=frozenset(nodes)))


def add_edges(g: SystemGraph, *edges: Edge) -> SystemGraph:
    return apply_delta(g, GraphDelta(added_edges=frozenset(edges)))


_DOT_SHAPES = {Kind.INPUT: "invtriangle", Kind.STATE: "circle", Kind.OUTPUT: "box"}


def to_dot(g: SystemGraph, name: str = "G") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for n in sorted(g.nodes):
        lines.append(f'  {n} [shape={_DOT_SHAPES[n.kind]}, label="{n}"];')
    for src, dst in _sorted_edges(g.edges):
        lines.append(f"  {src} -> {dst};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(g: SystemGraph) -> dict:
    names = lambda nodes: [str(n) for n in sorted(nodes)]  # noqa: E731
    pairs = lambda edges: [[str(s), str(d)] for s, d in _sorted_edges(edges)]  # noqa: E731
    return {
        "inputs": names(g.inputs),
        "states": names(g.states),
        "outputs": names(g.outputs),
        "edges_A": pairs(g.edges_A),
        "edges_B": pairs(g.edges_B),
        "edges_C": pairs(g.edges_C),
    }


def from_json(data: dict | str) -> SystemGraph:
    if isinstance(data, str):
        data = json.loads(data)
    edges: list[tuple[str, str]] = []
    for key in ("edges_A", "edges_B", "edges_C"):
        edges.extend((s, d) for s, d in data.get(key, []))
    g = SystemGraph.from_edges(edges, data.get("inputs", ()), data.get("states", ()), data.get("outputs", ()))
    for key in ("edges_A", "edges_B", "edges_C"):
        for s, d in data.get(key, []):
            if _edge_class(NodeId.parse(s), NodeId.parse(d)) != key[-1]:
                raise GraphError(f"edge {s} -> {d} listed under {key}")
    return g


def iter_state_edges(g: SystemGraph) -> Iterator[Edge]:
    yield from _sorted_edges(g.edges_A)
