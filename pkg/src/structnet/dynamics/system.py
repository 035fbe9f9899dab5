"""Explicit systems ``dx/dt = f(x, u)``, ``y = h(x)`` and their symbolic calculus."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from ..graph import SystemGraph, u as input_node, x as state_node, y as output_node
from .expr import (
    Add,
    Const,
    Expr,
    Mul,
    Var,
    as_expr,
    differentiate,
    is_polynomial_in,
    monomial_expr,
    poly_terms,
    simplify,
    variables,
)
from .parse import ExprSyntaxError, parse_expr

__all__ = [
    "DynamicsError",
    "DynamicsSpec",
    "parse_dynamics",
    "serialize_dynamics",
    "total_derivative",
    "AffineDecomposition",
    "affine_decomposition",
]


class DynamicsError(ValueError):
    pass


@dataclass(frozen=True)
class DynamicsSpec:
    f: tuple[Expr, ...]
    h: tuple[Expr, ...] = ()
    n_inputs: int = 0

    def __post_init__(self):
        # stored in canonical form so equal systems compare equal
        object.__setattr__(self, "f", tuple(simplify(as_expr(e)) for e in self.f))
        object.__setattr__(self, "h", tuple(simplify(as_expr(e)) for e in self.h))
        n, m = len(self.f), self.n_inputs
        for i, e in enumerate(self.f, start=1):
            for v in variables(e):
                if v.kind == "y" or v.order:
                    raise DynamicsError(f"dx{i} may only use states and inputs, found {v.name}")
                limit = n if v.kind == "x" else m
                if v.index > limit:
                    raise DynamicsError(f"dx{i} uses {v.name} but only {limit} {'states' if v.kind == 'x' else 'inputs'} exist")
        for j, e in enumerate(self.h, start=1):
            for v in variables(e):
                if v.kind != "x":
                    raise DynamicsError(f"y{j} may only use state variables, found {v.name}")
                if v.index > n:
                    raise DynamicsError(f"y{j} uses {v.name} but only {n} states exist")

    @property
    def N(self) -> int:
        return len(self.f)

    @property
    def M(self) -> int:
        return self.n_inputs

    @property
    def P(self) -> int:
        return len(self.h)

    @property
    def state_vars(self) -> list[Var]:
        return [Var("x", i) for i in range(1, self.N + 1)]

    @property
    def input_vars(self) -> list[Var]:
        return [Var("u", j) for j in range(1, self.M + 1)]

    def graph(self, **kwargs) -> SystemGraph:
        from .numeric import extract_graph

        return extract_graph(self, **kwargs)


_LINE = re.compile(r"^\s*(dx|y)([1-9][0-9]*)\s*=(.*)$")
_INPUTS = re.compile(r"^\s*inputs\s+([0-9]+)\s*$")


def parse_dynamics(text: str) -> DynamicsSpec:
    """Parse ``dx<i> = <expr>`` / ``y<j> = <expr>`` lines.

    The number of inputs is the largest input index used, or the value of
    an optional ``inputs <M>`` line if that is larger.
    """
    f: dict[int, Expr] = {}
    h: dict[int, Expr] = {}
    declared_inputs = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        mi = _INPUTS.match(line)
        if mi:
            declared_inputs = int(mi.group(1))
            continue
        m = _LINE.match(line)
        if m is None:
            raise ExprSyntaxError("expected 'dx<i> = <expr>' or 'y<j> = <expr>'", 0, lineno)
        target = f if m.group(1) == "dx" else h
        idx = int(m.group(2))
        if idx in target:
            raise DynamicsError(f"line {lineno}: {m.group(1)}{idx} defined twice")
        try:
            target[idx] = parse_expr(m.group(3))
        except ExprSyntaxError as exc:
            offset = m.start(3)
            pos = None if exc.position is None else exc.position + offset
            raise ExprSyntaxError(str(exc).split(": ", 1)[-1], pos, lineno) from None

    for name, d in (("dx", f), ("y", h)):
        if d and sorted(d) != list(range(1, max(d) + 1)):
            missing = sorted(set(range(1, max(d) + 1)) - set(d))
            raise DynamicsError(f"dimension mismatch: {name}{missing[0]} is not defined")
    used = [v.index for e in f.values() for v in variables(e) if v.kind == "u"]
    m_inputs = max([declared_inputs, *used])
    try:
        return DynamicsSpec(
            tuple(f[i] for i in sorted(f)),
            tuple(h[j] for j in sorted(h)),
            m_inputs,
        )
    except DynamicsError as exc:
        raise DynamicsError(f"dimension mismatch: {exc}") from None


def serialize_dynamics(spec: DynamicsSpec) -> str:
    lines = []
    used = max([0, *(v.index for e in spec.f for v in variables(e) if v.kind == "u")])
    if spec.M > used:
        lines.append(f"inputs {spec.M}")
    lines += [f"dx{i} = {e}" for i, e in enumerate(spec.f, start=1)]
    lines += [f"y{j} = {e}" for j, e in enumerate(spec.h, start=1)]
    return "\n".join(lines) + "\n"


def total_derivative(e, spec: DynamicsSpec) -> Expr:
    """Time derivative along the dynamics.

    States follow ``f``; each input derivative ``u_j^(k)`` is an independent
    symbol whose derivative is ``u_j^(k+1)``.
    """
    e = simplify(e)
    terms: list[Expr] = []
    for v in sorted(variables(e), key=lambda v: (v.kind, v.index, v.order)):
        d = differentiate(e, v)
        if d == Const(0):
            continue
        if v.kind == "x":
            terms.append(Mul((d, spec.f[v.index - 1])))
        elif v.kind == "u":
            terms.append(Mul((d, Var("u", v.index, v.order + 1))))
        else:
            raise DynamicsError(f"total derivative of output variable {v.name} is not defined")
    return simplify(Add(tuple(terms)))


@dataclass(frozen=True)
class AffineDecomposition:
    """``f_i(x, u) = sum_k alpha_{i,k}(x) u^k`` with multi-indices ``k``."""

    n_inputs: int
    coefficients: tuple[dict, ...]

    @property
    def multi_indices(self) -> list[tuple[int, ...]]:
        ks = {k for c in self.coefficients for k in c}
        ks.add((0,) * self.n_inputs)
        return sorted(ks, key=lambda k: (sum(k), k))

    def vector_field(self, k: tuple[int, ...]) -> tuple[Expr, ...]:
        return tuple(c.get(k, Const(0)) for c in self.coefficients)

    def vector_fields(self) -> dict[tuple[int, ...], tuple[Expr, ...]]:
        return {k: self.vector_field(k) for k in self.multi_indices}

    def dense(self, i: int) -> list[Expr]:
        """Single-input coefficient list ``[alpha_0, alpha_1, ...]`` of equation ``i`` (0-based)."""
        if self.n_inputs != 1:
            raise ValueError("dense coefficient lists need exactly one input")
        c = self.coefficients[i]
        top = max((k[0] for k in c), default=0)
        return [c.get((p,), Const(0)) for p in range(top + 1)]

    def reassemble(self) -> tuple[Expr, ...]:
        out = []
        for c in self.coefficients:
            terms = []
            for k, alpha in c.items():
                powers = [Var("u", j + 1) ** p for j, p in enumerate(k) if p]
                terms.append(Mul((alpha, *powers)))
            out.append(simplify(Add(tuple(terms))))
        return tuple(out)


def affine_decomposition(spec: DynamicsSpec) -> AffineDecomposition:
    inputs = spec.input_vars
    coeffs = []
    for i, fi in enumerate(spec.f, start=1):
        if not is_polynomial_in(fi, inputs):
            raise DynamicsError(f"dx{i} is not polynomial in the inputs")
        acc: dict[tuple[int, ...], dict] = {}
        for mono, c in poly_terms(fi).items():
            k = [0] * spec.M
            rest = []
            for atom, p in mono:
                if isinstance(atom, Var) and atom.kind == "u":
                    k[atom.index - 1] = p
                else:
                    rest.append((atom, p))
            acc.setdefault(tuple(k), {})[tuple(rest)] = c
        coeffs.append({k: simplify(Add(tuple(monomial_expr(m, c) for m, c in part.items()))) for k, part in acc.items()})
    return AffineDecomposition(spec.M, tuple(coeffs))


def graph_nodes(spec: DynamicsSpec) -> SystemGraph:
    """Graph with the system's nodes and no edges."""
    return SystemGraph(
        inputs=tuple(input_node(j) for j in range(1, spec.M + 1)),
        states=tuple(state_node(i) for i in range(1, spec.N + 1)),
        outputs=tuple(output_node(j) for j in range(1, spec.P + 1)),
    )


def from_strings(f: Sequence[str], h: Sequence[str] = (), n_inputs: int | None = None) -> DynamicsSpec:
    fs = tuple(parse_expr(s) for s in f)
    hs = tuple(parse_expr(s) for s in h)
    if n_inputs is None:
        n_inputs = max([0, *(v.index for e in fs for v in variables(e) if v.kind == "u")])
    return DynamicsSpec(fs, hs, n_inputs)
