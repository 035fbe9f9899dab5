"""Expression trees for small symbolic dynamics.

Trees are built freely (operator overloads or the parser) and brought to a
canonical form by :func:`simplify`: products are distributed over sums,
like monomials are collected and constants are folded. Anything that is not
a polynomial in variables, builtins and inverse sums is left untouched, so
this is flatten/fold normalisation, not a general CAS.

Coefficients are :class:`fractions.Fraction` whenever inputs are exact;
floats appear only when supplied by the caller. Builtins of exact
constants fold only at the special points (``sin 0``, ``cos 0``, ``exp 0``,
``log 1``) and otherwise stay symbolic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

import numpy as np

__all__ = [
    "Expr",
    "Const",
    "Var",
    "Add",
    "Mul",
    "Pow",
    "Div",
    "Neg",
    "Builtin",
    "BUILTINS",
    "as_expr",
    "const",
    "simplify",
    "equivalent",
    "differentiate",
    "variables",
    "substitute",
    "compile_expr",
    "evaluate",
    "is_polynomial_in",
    "X",
    "U",
]

Number = Union[Fraction, float]
BUILTINS = ("sin", "cos", "exp", "log")


def _num(v) -> Number:
    if isinstance(v, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ValueError(f"non-finite constant {v}")
        return v
    raise TypeError(f"unsupported constant {v!r}")


class Expr:
    """Base class; concrete nodes are frozen dataclasses."""

    __slots__ = ()

    def __add__(self, other):
        return Add((self, as_expr(other)))

    def __radd__(self, other):
        return Add((as_expr(other), self))

    def __sub__(self, other):
        return Add((self, Neg(as_expr(other))))

    def __rsub__(self, other):
        return Add((as_expr(other), Neg(self)))

    def __mul__(self, other):
        return Mul((self, as_expr(other)))

    def __rmul__(self, other):
        return Mul((as_expr(other), self))

    def __truediv__(self, other):
        return Div(self, as_expr(other))

    def __rtruediv__(self, other):
        return Div(as_expr(other), self)

    def __pow__(self, n: int):
        return Pow(self, n)

    def __neg__(self):
        return Neg(self)

    def __str__(self) -> str:
        return _render(self, 0)


@dataclass(frozen=True, eq=True, repr=False)
class Const(Expr):
    value: Number

    def __post_init__(self):
        object.__setattr__(self, "value", _num(self.value))

    def __repr__(self):
        return f"Const({self.value})"


_KIND_RANK = {"x": 0, "u": 1, "y": 2}


@dataclass(frozen=True, eq=True, repr=False)
class Var(Expr):
    """A state ``x<i>``, input ``u<j>`` (``order`` > 0 for its derivatives) or output ``y<j>``."""

    kind: str
    index: int
    order: int = 0

    def __post_init__(self):
        if self.kind not in _KIND_RANK:
            raise ValueError(f"unknown variable kind {self.kind!r}")
        if self.index < 1 or self.order < 0:
            raise ValueError("variable index must be >= 1 and order >= 0")
        if self.kind == "x" and self.order:
            raise ValueError("state variables carry no derivative order")

    @property
    def name(self) -> str:
        return f"{self.kind}{self.index}" + "'" * self.order

    def __repr__(self):
        return f"Var({self.name})"


@dataclass(frozen=True, eq=True, repr=False)
class Add(Expr):
    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(as_expr(t) for t in self.terms))

    def __repr__(self):
        return f"Add{self.terms!r}"


@dataclass(frozen=True, eq=True, repr=False)
class Mul(Expr):
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(as_expr(t) for t in self.factors))

    def __repr__(self):
        return f"Mul{self.factors!r}"


@dataclass(frozen=True, eq=True, repr=False)
class Pow(Expr):
    base: Expr
    exponent: int

    def __post_init__(self):
        if isinstance(self.exponent, bool) or not isinstance(self.exponent, int):
            raise TypeError(f"exponents must be integers, got {self.exponent!r}")
        object.__setattr__(self, "base", as_expr(self.base))

    def __repr__(self):
        return f"Pow({self.base!r}, {self.exponent})"


@dataclass(frozen=True, eq=True, repr=False)
class Div(Expr):
    num: Expr
    den: Expr

    def __post_init__(self):
        object.__setattr__(self, "num", as_expr(self.num))
        object.__setattr__(self, "den", as_expr(self.den))
        if isinstance(self.den, Const) and self.den.value == 0:
            raise ZeroDivisionError("literal division by zero")

    def __repr__(self):
        return f"Div({self.num!r}, {self.den!r})"


@dataclass(frozen=True, eq=True, repr=False)
class Neg(Expr):
    arg: Expr

    def __post_init__(self):
        object.__setattr__(self, "arg", as_expr(self.arg))

    def __repr__(self):
        return f"Neg({self.arg!r})"


@dataclass(frozen=True, eq=True, repr=False)
class Builtin(Expr):
    name: str
    arg: Expr

    def __post_init__(self):
        if self.name not in BUILTINS:
            raise ValueError(f"unknown builtin {self.name!r}")
        object.__setattr__(self, "arg", as_expr(self.arg))

    def __repr__(self):
        return f"{self.name}({self.arg!r})"


def as_expr(v) -> Expr:
    if isinstance(v, Expr):
        return v
    return Const(v)


def const(v) -> Const:
    """Exact constant: floats are read through their shortest decimal repr."""
    if isinstance(v, float):
        return Const(Fraction(repr(v)))
    return Const(v)


def X(i: int) -> Var:
    return Var("x", i)


def U(j: int, order: int = 0) -> Var:
    return Var("u", j, order)


# --------------------------------------------------------------------------
# canonical form
#
# A polynomial is a dict monomial -> coefficient. A monomial is a sorted
# tuple of (atom, exponent) with nonzero integer exponents. Atoms are Var,
# Builtin with canonical argument, or a canonical multi-term Add appearing
# with a negative exponent.


def sort_key(e: Expr):
    if isinstance(e, Const):
        return (0, e.value)
    if isinstance(e, Var):
        return (1, _KIND_RANK[e.kind], e.index, e.order)
    if isinstance(e, Builtin):
        return (2, e.name, sort_key(e.arg))
    if isinstance(e, Pow):
        return (3, sort_key(e.base), e.exponent)
    if isinstance(e, Mul):
        return (4, tuple(sort_key(f) for f in e.factors))
    if isinstance(e, Add):
        return (5, tuple(sort_key(t) for t in e.terms))
    if isinstance(e, Neg):
        return (6, sort_key(e.arg))
    if isinstance(e, Div):
        return (7, sort_key(e.num), sort_key(e.den))
    raise TypeError(type(e))


def _mono_key(m):
    return (sum(abs(k) for _, k in m), tuple((sort_key(a), k) for a, k in m))


def _mono_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    acc: dict = dict(m1)
    for a, k in m2:
        acc[a] = acc.get(a, 0) + k
    return tuple(sorted(((a, k) for a, k in acc.items() if k != 0), key=lambda p: sort_key(p[0])))


def _p_add(p, q):
    out = dict(p)
    for m, c in q.items():
        v = out.get(m, 0) + c
        if v == 0:
            out.pop(m, None)
        else:
            out[m] = v
    return out


def _p_scale(p, c):
    if c == 0:
        return {}
    return {m: v * c for m, v in p.items()}


def _p_mul(p, q):
    out: dict = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = _mono_mul(m1, m2)
            v = out.get(m, 0) + c1 * c2
            if v == 0:
                out.pop(m, None)
            else:
                out[m] = v
    return out


_ONE = {(): Fraction(1)}


def _p_pow(p, n: int, expr_for_atom: Callable[[], Expr]):
    if n == 0:
        return dict(_ONE)
    if n > 0:
        result = dict(_ONE)
        base = p
        while n:
            if n & 1:
                result = _p_mul(result, base)
            n >>= 1
            if n:
                base = _p_mul(base, base)
        return result
    if not p:
        raise ZeroDivisionError("division by an expression that simplifies to zero")
    if len(p) == 1:
        (m, c), = p.items()
        coeff = c ** n if isinstance(c, Fraction) else float(c) ** n
        out = {(): coeff}
        for a, k in m:
            if isinstance(a, Add) and k * n > 0:
                out = _p_mul(out, _p_pow(_to_poly(a), k * n, lambda: a))
            else:
                out = _p_mul(out, {((a, k * n),): Fraction(1)})
        return out
    return {((expr_for_atom(), n),): Fraction(1)}


def _fold_builtin(name: str, arg: Const) -> Expr:
    v = arg.value
    if v == 0 and name in ("sin",):
        return Const(0)
    if v == 0 and name in ("cos", "exp"):
        return Const(1)
    if v == 1 and name == "log":
        return Const(0)
    if isinstance(v, Fraction):
        # keep sin(3) etc. symbolic so the normal form stays exact
        return Builtin(name, arg)
    fn = getattr(math, name)
    try:
        return Const(float(fn(float(v))))
    except (ValueError, OverflowError):
        return Builtin(name, arg)


def _to_poly(e: Expr) -> dict:
    if isinstance(e, Const):
        return {(): e.value} if e.value != 0 else {}
    if isinstance(e, Var):
        return {((e, 1),): Fraction(1)}
    if isinstance(e, Add):
        out: dict = {}
        for t in e.terms:
            out = _p_add(out, _to_poly(t))
        return out
    if isinstance(e, Neg):
        return _p_scale(_to_poly(e.arg), -1)
    if isinstance(e, Mul):
        out = dict(_ONE)
        for f in e.factors:
            out = _p_mul(out, _to_poly(f))
            if not out:
                return {}
        return out
    if isinstance(e, Pow):
        p = _to_poly(e.base)
        return _p_pow(p, e.exponent, lambda: _from_poly(p))
    if isinstance(e, Div):
        num = _to_poly(e.num)
        den = _to_poly(e.den)
        inv = _p_pow(den, -1, lambda: _from_poly(den))
        return _p_mul(num, inv)
    if isinstance(e, Builtin):
        arg = simplify(e.arg)
        if isinstance(arg, Const):
            folded = _fold_builtin(e.name, arg)
            if isinstance(folded, Const):
                return _to_poly(folded)
            return {((folded, 1),): Fraction(1)}
        return {((Builtin(e.name, arg), 1),): Fraction(1)}
    raise TypeError(f"cannot canonicalise {type(e).__name__}")


def _from_poly(p: dict) -> Expr:
    if not p:
        return Const(0)
    terms = []
    for m in sorted(p, key=_mono_key):
        c = p[m]
        factors: list[Expr] = [] if c == 1 else [Const(c)]
        for a, k in m:
            factors.append(a if k == 1 else Pow(a, k))
        if not factors:
            terms.append(Const(1))
        elif len(factors) == 1:
            terms.append(factors[0])
        else:
            terms.append(Mul(tuple(factors)))
    return terms[0] if len(terms) == 1 else Add(tuple(terms))


def simplify(e) -> Expr:
    """Canonical form; ``simplify`` is idempotent."""
    return _from_poly(_to_poly(as_expr(e)))


def equivalent(a, b) -> bool:
    """Structural equality after canonicalisation."""
    return simplify(a) == simplify(b)


# --------------------------------------------------------------------------
# differentiation


def _d(e: Expr, v: Var) -> Expr:
    if isinstance(e, Const):
        return Const(0)
    if isinstance(e, Var):
        return Const(1 if e == v else 0)
    if isinstance(e, Add):
        return Add(tuple(_d(t, v) for t in e.terms))
    if isinstance(e, Neg):
        return Neg(_d(e.arg, v))
    if isinstance(e, Mul):
        parts = []
        fs = e.factors
        for i, f in enumerate(fs):
            df = _d(f, v)
            if isinstance(df, Const) and df.value == 0:
                continue
            parts.append(Mul(fs[:i] + (df,) + fs[i + 1 :]))
        return Add(tuple(parts)) if parts else Const(0)
    if isinstance(e, Pow):
        if e.exponent == 0:
            return Const(0)
        return Mul((Const(e.exponent), Pow(e.base, e.exponent - 1), _d(e.base, v)))
    if isinstance(e, Div):
        return Div(
            Add((Mul((_d(e.num, v), e.den)), Neg(Mul((e.num, _d(e.den, v)))))),
            Pow(e.den, 2),
        )
    if isinstance(e, Builtin):
        inner = _d(e.arg, v)
        if e.name == "sin":
            outer = Builtin("cos", e.arg)
        elif e.name == "cos":
            outer = Neg(Builtin("sin", e.arg))
        elif e.name == "exp":
            outer = e
        else:
            outer = Pow(e.arg, -1)
        return Mul((outer, inner))
    raise TypeError(type(e))


def differentiate(e, v: Var) -> Expr:
    """Exact partial derivative, canonicalised."""
    return simplify(_d(as_expr(e), v))


def variables(e: Expr) -> frozenset[Var]:
    out: set[Var] = set()
    stack = [e]
    while stack:
        n = stack.pop()
        if isinstance(n, Var):
            out.add(n)
        elif isinstance(n, Add):
            stack.extend(n.terms)
        elif isinstance(n, Mul):
            stack.extend(n.factors)
        elif isinstance(n, Pow):
            stack.append(n.base)
        elif isinstance(n, Div):
            stack.extend((n.num, n.den))
        elif isinstance(n, (Neg, Builtin)):
            stack.append(n.arg)
    return frozenset(out)


def sorted_variables(vs: Iterable[Var]) -> list[Var]:
    return sorted(vs, key=sort_key)


def substitute(e: Expr, mapping: Mapping[Var, Expr]) -> Expr:
    """Replace variables; the result is not simplified."""
    if isinstance(e, Var):
        return as_expr(mapping.get(e, e))
    if isinstance(e, Const):
        return e
    if isinstance(e, Add):
        return Add(tuple(substitute(t, mapping) for t in e.terms))
    if isinstance(e, Mul):
        return Mul(tuple(substitute(t, mapping) for t in e.factors))
    if isinstance(e, Pow):
        return Pow(substitute(e.base, mapping), e.exponent)
    if isinstance(e, Div):
        return Div(substitute(e.num, mapping), substitute(e.den, mapping))
    if isinstance(e, Neg):
        return Neg(substitute(e.arg, mapping))
    if isinstance(e, Builtin):
        return Builtin(e.name, substitute(e.arg, mapping))
    raise TypeError(type(e))


def is_polynomial_in(e: Expr, vs: Iterable[Var]) -> bool:
    """True if every occurrence of ``vs`` in canonical ``e`` is a nonnegative power."""
    targets = set(vs)
    for m in _to_poly(e):
        for a, k in m:
            if isinstance(a, Var):
                if a in targets and k < 0:
                    return False
            elif variables(a) & targets:
                return False
    return True


def poly_terms(e: Expr) -> dict:
    """Canonical polynomial dict of ``e`` (monomial -> coefficient)."""
    return _to_poly(e)


def monomial_expr(m, c) -> Expr:
    return _from_poly({m: c}) if c != 0 else Const(0)


# --------------------------------------------------------------------------
# numeric evaluation


class _Codegen:
    def __init__(self, index: Mapping[Var, int]):
        self.index = index

    def __call__(self, e: Expr) -> str:
        if isinstance(e, Const):
            # numpy scalar keeps 0**-1 -> inf semantics; parentheses keep -c ** k right
            return f"_np.float64({float(e.value)!r})"
        if isinstance(e, Var):
            try:
                return f"v[{self.index[e]}]"
            except KeyError:
                raise KeyError(f"variable {e.name} not bound for evaluation") from None
        if isinstance(e, Add):
            return "(" + " + ".join(self(t) for t in e.terms) + ")" if e.terms else "0.0"
        if isinstance(e, Mul):
            return "(" + " * ".join(self(t) for t in e.factors) + ")" if e.factors else "1.0"
        if isinstance(e, Pow):
            return f"({self(e.base)} ** {float(e.exponent)!r})"
        if isinstance(e, Div):
            return f"({self(e.num)} / {self(e.den)})"
        if isinstance(e, Neg):
            return f"(-{self(e.arg)})"
        if isinstance(e, Builtin):
            return f"_np.{e.name}({self(e.arg)})"
        raise TypeError(type(e))


def compile_expr(e: Expr, vs: Sequence[Var]) -> Callable[[np.ndarray], np.ndarray]:
    """Compile ``e`` to a numpy function of ``v`` with ``v[i]`` bound to ``vs[i]``.

    ``v`` may be 1-D (one point) or 2-D with one column per point. The result
    always has the broadcast point shape. Singular points give inf/nan
    rather than raising.
    """
    index = {var: i for i, var in enumerate(vs)}
    src = _Codegen(index)(e)
    code = compile(f"lambda v: {src}", "<expr>", "eval")
    fn = eval(code, {"_np": np})

    def run(v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        with np.errstate(all="ignore"):
            out = fn(v)
        return np.broadcast_to(np.asarray(out, dtype=float), v.shape[1:]).copy()

    return run


def evaluate(e: Expr, env: Mapping[Var, float]) -> float:
    vs = list(env)
    return float(compile_expr(e, vs)(np.array([env[v] for v in vs], dtype=float)))


# --------------------------------------------------------------------------
# rendering

_PREC_ADD, _PREC_MUL, _PREC_UNARY, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _render_number(v: Number) -> tuple[str, int]:
    if isinstance(v, Fraction):
        if v.denominator == 1:
            s = str(v.numerator)
        else:
            s = f"{v.numerator}/{v.denominator}"
            return s, (_PREC_UNARY if v < 0 else _PREC_MUL)
    else:
        s = repr(v)
        if "e" in s or "inf" in s:
            s = f"{v:.17g}"
    return s, (_PREC_UNARY if v < 0 else _PREC_ATOM)


def _wrap(s: str, prec: int, ctx: int) -> str:
    return f"({s})" if prec < ctx else s


def _render_with_prec(e: Expr) -> tuple[str, int]:
    if isinstance(e, Const):
        return _render_number(e.value)
    if isinstance(e, Var):
        return e.name, _PREC_ATOM
    if isinstance(e, Add):
        if not e.terms:
            return "0", _PREC_ATOM
        out = _render(e.terms[0], _PREC_ADD)
        for t in e.terms[1:]:
            s = _render(t, _PREC_ADD)
            if s.startswith("-"):
                out += " - " + _render(_negate_for_display(t), _PREC_MUL)
            else:
                out += " + " + s
        return out, _PREC_ADD
    if isinstance(e, Mul):
        if not e.factors:
            return "1", _PREC_ATOM
        fs = list(e.factors)
        if isinstance(fs[0], Const) and fs[0].value == -1 and len(fs) > 1:
            rest = Mul(tuple(fs[1:])) if len(fs) > 2 else fs[1]
            return "-" + _render(rest, _PREC_MUL), _PREC_UNARY
        parts = [_render(fs[0], _PREC_MUL)] + [_render(f, _PREC_MUL + 1) for f in fs[1:]]
        s = "*".join(parts)
        return s, (_PREC_UNARY if s.startswith("-") else _PREC_MUL)
    if isinstance(e, Pow):
        return f"{_render(e.base, _PREC_ATOM)}^{e.exponent}", _PREC_POW
    if isinstance(e, Div):
        return f"{_render(e.num, _PREC_MUL)}/{_render(e.den, _PREC_MUL + 1)}", _PREC_MUL
    if isinstance(e, Neg):
        return "-" + _render(e.arg, _PREC_UNARY), _PREC_UNARY
    if isinstance(e, Builtin):
        return f"{e.name}({_render(e.arg, 0)})", _PREC_ATOM
    raise TypeError(type(e))


def _negate_for_display(t: Expr) -> Expr:
    if isinstance(t, Const):
        return Const(-t.value)
    if isinstance(t, Neg):
        return t.arg
    if isinstance(t, Mul) and t.factors and isinstance(t.factors[0], Const):
        c = -t.factors[0].value
        rest = t.factors[1:]
        if c == 1:
            return rest[0] if len(rest) == 1 else Mul(rest)
        return Mul((Const(c),) + rest)
    return Neg(t)


def _render(e: Expr, ctx: int) -> str:
    s, prec = _render_with_prec(e)
    return _wrap(s, prec, ctx)
