"""Seeded random system graphs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..graph import SystemGraph, u, x, y
from ..structural import minimal_driver_set, minimal_sensor_set

MODELS = ("erdos_renyi_directed", "random_forest", "random_dag")
ATTACH = ("drivers", "random", "none")


@dataclass(frozen=True)
class GenSpec:
    model: str
    n: int
    p: float = 0.3
    m_roots: int = 1
    seed: int = 0
    attach: str = "drivers"
    n_inputs: int = 1
    n_outputs: int = 1
    p_attach: float = 0.3
    self_loops: bool = False

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; choose from {', '.join(MODELS)}")
        if self.n < 0:
            raise ValueError("n must be >= 0")
        if not 0 <= self.p <= 1 or not 0 <= self.p_attach <= 1:
            raise ValueError("probabilities must lie in [0, 1]")
        if self.attach not in ATTACH:
            raise ValueError(f"unknown attachment rule {self.attach!r}")
        if self.model == "random_forest" and self.n > 0 and not 1 <= self.m_roots:
            raise ValueError("random_forest needs m_roots >= 1")
        if self.n_inputs < 0 or self.n_outputs < 0:
            raise ValueError("input/output counts must be >= 0")


def _state_edges(spec: GenSpec, rng: np.random.Generator) -> tuple[list, list]:
    n = spec.n
    a, b = [], []
    if spec.model == "erdos_renyi_directed":
        for j in range(1, n + 1):
            for i in range(1, n + 1):
                if (i != j or spec.self_loops) and rng.random() < spec.p:
                    a.append((x(j), x(i)))
    elif spec.model == "random_dag":
        order = rng.permutation(n) + 1
        for s in range(n):
            for t in range(s + 1, n):
                if rng.random() < spec.p:
                    a.append((x(int(order[s])), x(int(order[t]))))
    else:
        roots = [u(k) for k in range(1, spec.m_roots + 1)]
        placed: list = []
        for i in range(1, n + 1):
            pool = roots + placed
            parent = pool[int(rng.integers(len(pool)))]
            (b if parent in roots else a).append((parent, x(i)))
            placed.append(x(i))
    return a, b


def generate(spec: GenSpec) -> SystemGraph:
    """Deterministic for a fixed ``spec`` (including its seed)."""
    rng = np.random.default_rng(spec.seed)
    states = tuple(x(i) for i in range(1, spec.n + 1))
    a, b = _state_edges(spec, rng)
    inputs: tuple = tuple(u(k) for k in range(1, spec.m_roots + 1)) if spec.model == "random_forest" and spec.n else ()
    outputs: tuple = ()
    c: list = []
    base = SystemGraph(inputs=inputs, states=states, edges_A=frozenset(a), edges_B=frozenset(b))
    if spec.attach == "drivers" and states:
        if spec.model != "random_forest":
            inputs = (u(1),)
            b = [(u(1), d) for d in sorted(minimal_driver_set(base))]
        outputs = (y(1),)
        c = [(s, y(1)) for s in sorted(minimal_sensor_set(base))]
    elif spec.attach == "random" and states:
        if spec.model != "random_forest":
            inputs = tuple(u(k) for k in range(1, spec.n_inputs + 1))
            b = [(ui, s) for ui in inputs for s in states if rng.random() < spec.p_attach]
        outputs = tuple(y(k) for k in range(1, spec.n_outputs + 1))
        c = [(s, yi) for yi in outputs for s in states if rng.random() < spec.p_attach]
    return SystemGraph(inputs, states, outputs, frozenset(a), frozenset(b), frozenset(c))


def random_system_graph(
    rng: np.random.Generator,
    n_states: int,
    p_edge: float = 0.3,
    n_inputs: int = 1,
    n_outputs: int = 1,
    p_attach: float = 0.3,
    self_loops: bool = True,
) -> SystemGraph:
    """Erdős–Rényi state graph with randomly attached inputs and outputs, drawn from ``rng``."""
    states = [x(i) for i in range(1, n_states + 1)]
    inputs = [u(k) for k in range(1, n_inputs + 1)]
    outputs = [y(k) for k in range(1, n_outputs + 1)]
    a = [(s, t) for s in states for t in states if (s != t or self_loops) and rng.random() < p_edge]
    b = [(k, s) for k in inputs for s in states if rng.random() < p_attach]
    c = [(s, k) for k in outputs for s in states if rng.random() < p_attach]
    return SystemGraph(tuple(inputs), tuple(states), tuple(outputs), frozenset(a), frozenset(b), frozenset(c))
