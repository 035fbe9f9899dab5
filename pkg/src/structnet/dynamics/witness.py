"""Explicit polynomial systems realizing a graph's structural properties.

Accessible witness: build the BFS input forest, give each state
``dx_i = (forest parent)^p_i`` with distinct exponents, then add
``alpha * v`` for every edge of the graph outside the forest.

Observable witness: build the BFS output forest; a state with forest
in-neighbours gets the product of their variables as its derivative, a
childless state gets a nonzero constant, and each output is the product of
its forest in-neighbours. Edges outside the forest again add ``alpha``-linear
terms.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

from ..graph import Kind, NodeId, SystemGraph
from ..structural import spanning_input_forest, spanning_output_forest
from .expr import Add, Const, Expr, Mul, Pow, Var, const, simplify
from .system import DynamicsSpec

__all__ = ["primes", "witness_accessible_dynamics", "witness_observable_dynamics", "random_dynamics"]


def primes(n: int, start: int = 2) -> list[int]:
    out: list[int] = []
    k = max(2, start)
    while len(out) < n:
        if all(k % p for p in range(2, int(k**0.5) + 1)):
            out.append(k)
        k += 1
    return out


def _var(n: NodeId) -> Var:
    return Var("x" if n.kind is Kind.STATE else "u", n.index)


def _index_maps(g: SystemGraph):
    """Graph nodes renumbered 1..N / 1..M / 1..P in sorted order."""
    xs = {n: NodeId(Kind.STATE, i) for i, n in enumerate(sorted(g.states), start=1)}
    us = {n: NodeId(Kind.INPUT, i) for i, n in enumerate(sorted(g.inputs), start=1)}
    ys = {n: NodeId(Kind.OUTPUT, i) for i, n in enumerate(sorted(g.outputs), start=1)}
    return {**xs, **us, **ys}


def _require_dense(g: SystemGraph):
    # DynamicsSpec numbers variables 1..N, so the graph must use those labels.
    ren = _index_maps(g)
    if any(ren[n] != n for n in g.nodes):
        raise ValueError("node labels must be contiguous (u1..uM, x1..xN, y1..yP) to build dynamics")


def _linear_output_map(g: SystemGraph, alpha: Expr) -> list[Expr]:
    h = []
    for yn in sorted(g.outputs):
        terms = [Mul((alpha, _var(p))) for p in g.predecessors(yn)]
        h.append(Add(tuple(terms)) if terms else Const(0))
    return h


def witness_accessible_dynamics(
    g: SystemGraph, exponents: Sequence[int] | None = None, alpha=1, seed=None
) -> DynamicsSpec:
    _require_dense(g)
    forest = spanning_input_forest(g)
    states = sorted(g.states)
    if exponents is None:
        exponents = primes(len(states))
        if seed is not None:
            exponents = list(np.random.default_rng(seed).permutation(exponents))
    exponents = [int(p) for p in exponents]
    if len(exponents) != len(states) or len(set(exponents)) != len(exponents) or min(exponents, default=1) < 1:
        raise ValueError("exponents must be N distinct positive integers")
    a = const(alpha)
    if a.value == 0:
        raise ValueError("alpha must be nonzero")
    tree_edges = forest.edges()
    f = []
    for n, p in zip(states, exponents):
        terms: list[Expr] = [Pow(_var(forest.parent[n]), p)]
        for pred in g.predecessors(n):
            if (pred, n) not in tree_edges:
                terms.append(Mul((a, _var(pred))))
        f.append(simplify(Add(tuple(terms))))
    h = [simplify(e) for e in _linear_output_map(g, a)]
    return DynamicsSpec(tuple(f), tuple(h), len(g.inputs))


def witness_observable_dynamics(
    g: SystemGraph, constants: Sequence | None = None, alpha=1, seed=None
) -> DynamicsSpec:
    _require_dense(g)
    forest = spanning_output_forest(g)
    states = sorted(g.states)
    if constants is None:
        constants = list(range(1, len(states) + 1))
        if seed is not None:
            constants = list(np.random.default_rng(seed).permutation(constants))
    cs = [const(c if not isinstance(c, np.integer) else int(c)) for c in constants]
    if len(cs) != len(states) or any(c.value == 0 for c in cs) or len({c.value for c in cs}) != len(cs):
        raise ValueError("constants must be N distinct nonzero numbers")
    a = const(alpha)
    if a.value == 0:
        raise ValueError("alpha must be nonzero")
    tree_edges = forest.edges()

    def product(children: list[NodeId]) -> Expr:
        return Mul(tuple(_var(c) for c in children)) if len(children) > 1 else _var(children[0])

    f = []
    for n, c in zip(states, cs):
        children = forest.children(n)
        terms: list[Expr] = [product(children) if children else c]
        for pred in g.predecessors(n):
            if (pred, n) not in tree_edges:
                terms.append(Mul((a, _var(pred))))
        f.append(simplify(Add(tuple(terms))))
    h = []
    for yn in sorted(g.outputs):
        children = forest.children(yn)
        terms = [product(children)] if children else []
        terms += [Mul((a, _var(p))) for p in g.predecessors(yn) if (p, yn) not in tree_edges]
        h.append(simplify(Add(tuple(terms))) if terms else Const(0))
    return DynamicsSpec(tuple(f), tuple(h), len(g.inputs))


def random_dynamics(g: SystemGraph, seed=None, max_power: int = 3) -> DynamicsSpec:
    """A random polynomial member of the graph's class.

    Each right-hand side is a sum of random-coefficient powers of its
    in-neighbours plus, when there are several, their product.
    """
    _require_dense(g)
    rng = np.random.default_rng(seed)

    def coeff() -> Const:
        return Const(Fraction(int(rng.integers(1, 10)), int(rng.integers(1, 5))) * int(rng.choice([-1, 1])))

    def rhs(preds: Sequence[NodeId]) -> Expr:
        if not preds:
            return Const(0)
        terms: list[Expr] = [Mul((coeff(), Pow(_var(p), int(rng.integers(1, max_power + 1))))) for p in preds]
        if len(preds) > 1:
            terms.append(Mul((coeff(), *(_var(p) for p in preds))))
        return simplify(Add(tuple(terms)))

    f = [rhs(g.predecessors(n)) for n in sorted(g.states)]
    h = [rhs(g.predecessors(n)) for n in sorted(g.outputs)]
    return DynamicsSpec(tuple(f), tuple(h), len(g.inputs))
