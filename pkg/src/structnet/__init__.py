"""Structural accessibility and observability of networked systems."""
from .graph import (
    GraphDelta,
    GraphError,
    GraphParseError,
    Kind,
    NodeId,
    SystemGraph,
    apply_delta,
    dual,
    parse_graph,
    serialize_graph,
    to_dot,
    to_json,
)
from .linear import (
    compare_linear_nonlinear,
    linear_min_driver_count,
    linear_structural_controllability,
    linear_structural_observability,
    saturating_matching,
)
from .structural import (
    condense,
    input_reachability,
    minimal_driver_set,
    minimal_sensor_set,
    output_coreachability,
    spanning_input_forest,
    spanning_output_forest,
    tail_set,
)

__version__ = "0.1.0"
