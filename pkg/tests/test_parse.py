from fractions import Fraction

import pytest

from structnet.dynamics import DynamicsError, ExprSyntaxError, parse_dynamics, parse_expr, serialize_dynamics
from structnet.dynamics.expr import Builtin, Const, Pow, U, X, equivalent, simplify
from structnet.dynamics.library import dilation_linear, dilation_nonlinear, sphere_rotation
from structnet.dynamics.system import from_strings

NONLINEAR_DIL = """\
# eps = 1/2
dx1 = 0.5*u1 + 0.5
dx2 = 1*u1 + 0.5*u1^3
y1 = 1*x1 + 1*x2 + 0.5*x1*x2
"""


def test_precedence_and_associativity():
    assert equivalent(parse_expr("1 + 2*x1^2"), Const(1) + 2 * X(1) ** 2)
    assert equivalent(parse_expr("-x1^2"), -(X(1) ** 2))
    assert equivalent(parse_expr("x1 - x2 - x3"), X(1) - X(2) - X(3))
    assert equivalent(parse_expr("x1/x2/x3"), X(1) / X(2) / X(3))


def test_power_spellings():
    assert parse_expr("x1^3") == parse_expr("x1**3") == Pow(X(1), 3)
    assert parse_expr("x1^-2") == Pow(X(1), -2)


def test_decimals_are_exact():
    assert simplify(parse_expr("0.1")) == Const(Fraction(1, 10))
    assert simplify(parse_expr("1e-3")) == Const(Fraction(1, 1000))


def test_builtins_and_derivative_marks():
    assert parse_expr("sin(x1)") == Builtin("sin", X(1))
    assert parse_expr("u2''") == U(2, 2)


@pytest.mark.parametrize(
    "text, col",
    [
        ("x1 +", 5),
        ("3*^x2", 3),
        ("sin x1", 5),
        ("x1^x2", 4),
        ("q1", 1),
        ("(x1", 4),
        ("x1)", 3),
        ("x1/0", 4),
    ],
)
def test_syntax_errors_have_positions(text, col):
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr(text)
    assert info.value.position == col - 1
    assert f"col {col}" in str(info.value)


def test_state_derivative_mark_rejected():
    with pytest.raises(ExprSyntaxError, match="derivative"):
        parse_expr("x1'")


def test_unknown_function():
    with pytest.raises(ExprSyntaxError, match="tan"):
        parse_expr("tan(x1)")


# -- dynamics files ---------------------------------------------------------------


def test_parse_nonlinear_dilation_dimensions():
    spec = parse_dynamics(NONLINEAR_DIL)
    assert (spec.N, spec.M, spec.P) == (2, 1, 1)
    assert spec == dilation_nonlinear()


def test_single_zero_equation():
    spec = parse_dynamics("dx1 = 0")
    assert (spec.N, spec.M, spec.P) == (1, 0, 0)


def test_dimension_mismatch():
    with pytest.raises(DynamicsError, match="mismatch"):
        parse_dynamics("dx1 = x2")
    with pytest.raises(DynamicsError, match="dx2"):
        parse_dynamics("dx1 = 0\ndx3 = 0")


def test_output_may_not_use_inputs():
    with pytest.raises(DynamicsError):
        parse_dynamics("dx1 = u1\ny1 = u1")


def test_duplicate_equation():
    with pytest.raises(DynamicsError, match="twice"):
        parse_dynamics("dx1 = 0\ndx1 = 1")


def test_bad_line_reports_line_number():
    with pytest.raises(ExprSyntaxError) as info:
        parse_dynamics("dx1 = x1\nfoo\n")
    assert info.value.line == 2
    with pytest.raises(ExprSyntaxError) as info:
        parse_dynamics("dx1 = x1 +\n")
    assert info.value.line == 1 and info.value.position is not None


def test_declared_inputs_line():
    spec = parse_dynamics("inputs 3\ndx1 = u1")
    assert spec.M == 3
    assert parse_dynamics(serialize_dynamics(spec)) == spec


@pytest.mark.parametrize("spec", [dilation_linear(), dilation_nonlinear(), sphere_rotation()])
def test_serialize_round_trip(spec):
    assert parse_dynamics(serialize_dynamics(spec)) == spec


def test_from_strings_infers_inputs():
    spec = from_strings(["x2 + u2", "-x1"], ["x1"])
    assert spec.M == 2 and spec.P == 1
