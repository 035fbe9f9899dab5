"""Small reference systems used by tests, scripts and the CLI examples."""
from __future__ import annotations

from fractions import Fraction

from .expr import Builtin, Const, Expr, Pow, U, X, const, simplify
from .system import DynamicsSpec


def dilation_linear(b11=0.5, b21=1, c11=1, c12=1) -> DynamicsSpec:
    """Two states driven by one input and read by one summed output.

    Every member has ``b21*x1 - b11*x2`` conserved and ``c12*x1 - c11*x2`` hidden.
    """
    b11, b21, c11, c12 = map(const, (b11, b21, c11, c12))
    return DynamicsSpec(
        (simplify(b11 * U(1)), simplify(b21 * U(1))),
        (simplify(c11 * X(1) + c12 * X(2)),),
        1,
    )


def dilation_nonlinear(b11=0.5, b21=1, c11=1, c12=1, eps=0.5) -> DynamicsSpec:
    """The same graph with an ``eps``-perturbation that is accessible and observable."""
    b11, b21, c11, c12, eps = map(const, (b11, b21, c11, c12, eps))
    return DynamicsSpec(
        (simplify(b11 * U(1) + eps), simplify(b21 * U(1) + eps * U(1) ** 3)),
        (simplify(c11 * X(1) + c12 * X(2) + eps * X(1) * X(2)),),
        1,
    )


def sphere_rotation() -> DynamicsSpec:
    """``x1' = x2 + x3 u, x2' = -x1, x3' = -x1 u``: preserves ``|x|^2``."""
    return DynamicsSpec(
        (simplify(X(2) + X(3) * U(1)), simplify(-X(1)), simplify(-X(1) * U(1))),
        (),
        1,
    )


def product_output_star(constants=(1, 2)) -> DynamicsSpec:
    """States with constant drift observed through the product of all of them."""
    cs = [const(c) for c in constants]
    y = X(1)
    for i in range(2, len(cs) + 1):
        y = y * X(i)
    return DynamicsSpec(tuple(Const(c.value) for c in cs), (simplify(y),), 0)


def tree_chain(p=(2, 3)) -> DynamicsSpec:
    """``x1' = u^p1, x2' = x1^p2, ...``: an input-rooted chain with distinct powers."""
    f = [simplify(U(1) ** p[0])]
    for i in range(1, len(p)):
        f.append(simplify(X(i) ** p[i]))
    return DynamicsSpec(tuple(f), (), 1)


def random_expression(rng, depth: int = 5, n_states: int = 3, n_inputs: int = 1) -> Expr:
    """Random expression tree over ``x1..xn, u1..um`` that is smooth on ``[-1, 1]^dim``.

    ``log``, division and negative powers only ever see arguments of the form ``c + e^2`` with
    ``c >= 1/2``, so every sampled point is regular.
    """
    leaves = [X(i) for i in range(1, n_states + 1)] + [U(j) for j in range(1, n_inputs + 1)]

    def safe(e: Expr) -> Expr:
        return Const(Fraction(int(rng.integers(1, 4)), 2)) + e * e

    def build(d: int) -> Expr:
        if d == 0 or rng.random() < 0.2:
            if rng.random() < 0.25:
                return Const(Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4))))
            return leaves[int(rng.integers(len(leaves)))]
        op = rng.choice(["add", "sub", "mul", "pow", "sin", "cos", "exp", "log", "div", "neg"])
        if op in ("add", "sub", "mul", "div"):
            a, b = build(d - 1), build(d - 1)
            return {"add": a + b, "sub": a - b, "mul": a * b, "div": a / safe(b)}[op]
        a = build(d - 1)
        if op == "pow":
            k = int(rng.integers(-2, 4))
            return Pow(safe(a), k) if k < 0 else Pow(a, k)
        if op == "neg":
            return -a
        if op == "log":
            return Builtin("log", safe(a))
        if op == "exp":
            return Builtin("exp", Builtin("sin", a))
        return Builtin(op, a)

    return build(depth)
