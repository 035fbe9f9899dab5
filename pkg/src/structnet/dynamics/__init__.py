"""Explicit nonlinear systems: expressions, decision procedures, simulation, witnesses."""
from .expr import Add, Builtin, Const, Div, Expr, Mul, Neg, Pow, Var, X, U, differentiate, equivalent, simplify, variables
from .numeric import (
    Decision,
    GraphExtractionError,
    SingularEvaluationError,
    Verdict,
    accessibility_lie_rank,
    check_autonomous_candidate,
    check_hidden_candidate,
    extract_graph,
    is_nonzero,
    lie_bracket,
    observability_rank,
)
from .parse import ExprSyntaxError, parse_expr
from .simulate import (
    PiecewiseConstantInput,
    SampledInput,
    SimulationError,
    Trajectory,
    reachable_cloud_rank,
    simulate,
    simulate_ensemble,
)
from .system import (
    AffineDecomposition,
    DynamicsError,
    DynamicsSpec,
    affine_decomposition,
    parse_dynamics,
    serialize_dynamics,
    total_derivative,
)
from .witness import random_dynamics, witness_accessible_dynamics, witness_observable_dynamics
from .library import dilation_linear, dilation_nonlinear, product_output_star, random_expression, sphere_rotation, tree_chain
