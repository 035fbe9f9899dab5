"""JSON report schemas; every CLI document is validated before it is printed."""
from __future__ import annotations

import jsonschema

_NODES = {"type": "array", "items": {"type": "string", "pattern": "^[uxy][0-9]+$"}}
_BOOL = {"type": "boolean"}
_INT = {"type": "integer", "minimum": 0}
_EDGES = {"type": "array", "items": {**_NODES, "minItems": 2, "maxItems": 2}}

_LINEAR = {
    "type": "object",
    "required": ["reachability_ok", "cover_ok", "witness", "unreached"],
    "properties": {
        "reachability_ok": _BOOL,
        "cover_ok": _BOOL,
        "witness": {"anyOf": [_NODES, {"type": "null"}]},
        "unreached": _NODES,
    },
}

_ANALYZE = {
    "type": "object",
    "required": [
        "command", "accessible", "observable", "lin_controllable", "lin_observable",
        "witnesses", "components", "root_sccs", "top_sccs", "min_drivers", "min_sensors",
    ],
    "properties": {
        "command": {"const": "analyze"},
        "accessible": _BOOL,
        "observable": _BOOL,
        "lin_controllable": _BOOL,
        "lin_observable": _BOOL,
        "witnesses": {
            "type": "object",
            "required": ["unreached_from_inputs", "no_path_to_outputs"],
            "properties": {"unreached_from_inputs": _NODES, "no_path_to_outputs": _NODES},
        },
        "linear": {
            "type": "object",
            "required": ["controllability", "observability"],
            "properties": {"controllability": _LINEAR, "observability": _LINEAR},
        },
        "components": {"type": "array", "items": _NODES},
        "root_sccs": {"type": "array", "items": _INT},
        "top_sccs": {"type": "array", "items": _INT},
        "min_drivers": _NODES,
        "min_sensors": _NODES,
    },
}

_NODESET = {
    "type": "object",
    "required": ["command", "nodes", "count"],
    "properties": {"command": {"enum": ["drivers", "sensors"]}, "nodes": _NODES, "count": _INT, "linear_count": _INT},
}

_COMPARE = {
    "type": "object",
    "required": [
        "command", "nonlinear_drivers", "linear_drivers", "nonlinear_sensors", "linear_sensors",
        "accessible", "observable", "lin_controllable", "lin_observable",
    ],
    "properties": {
        "command": {"const": "compare"},
        "nonlinear_drivers": _INT,
        "linear_drivers": _INT,
        "nonlinear_sensors": _INT,
        "linear_sensors": _INT,
        "accessible": _BOOL,
        "observable": _BOOL,
        "lin_controllable": _BOOL,
        "lin_observable": _BOOL,
    },
}

_ENTRY = {
    "type": "object",
    "required": ["still_accessible", "still_observable", "new_driver_count", "new_sensor_count", "disconnected_witnesses"],
    "properties": {
        "still_accessible": _BOOL,
        "still_observable": _BOOL,
        "new_driver_count": _INT,
        "new_sensor_count": _INT,
        "disconnected_witnesses": _NODES,
        "lin_controllable": _BOOL,
        "lin_observable": _BOOL,
    },
}

_ABLATE = {
    "type": "object",
    "required": ["command", "baseline", "ablations"],
    "properties": {
        "command": {"const": "ablate"},
        "baseline": _ENTRY,
        "ablations": {"type": "object", "additionalProperties": _ENTRY},
    },
}

_GRAPH = {
    "type": "object",
    "required": ["inputs", "states", "outputs", "edges_A", "edges_B", "edges_C"],
    "properties": {
        "inputs": _NODES,
        "states": _NODES,
        "outputs": _NODES,
        "edges_A": _EDGES,
        "edges_B": _EDGES,
        "edges_C": _EDGES,
    },
}

_GEN = {
    "type": "object",
    "required": ["command", "params", "graph", "text"],
    "properties": {"command": {"const": "gen"}, "params": {"type": "object"}, "graph": _GRAPH, "text": {"type": "string"}},
}

_VERIFY = {
    "type": "object",
    "required": ["command", "check", "decision", "evidence"],
    "properties": {
        "command": {"const": "verify"},
        "check": {"enum": ["graph", "observability", "accessibility", "autonomous", "hidden"]},
        "decision": {"enum": ["yes", "no", "inconclusive"]},
        "evidence": {"type": "object"},
        "graph": _GRAPH,
    },
}

_SIMULATE = {
    "type": "object",
    "required": ["command", "times", "states", "inputs"],
    "properties": {
        "command": {"const": "simulate"},
        "times": {"type": "array", "items": {"type": "number"}},
        "states": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
        "inputs": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
    },
}

_WITNESS = {
    "type": "object",
    "required": ["command", "mode", "f", "h", "inputs", "text"],
    "properties": {
        "command": {"const": "witness"},
        "mode": {"enum": ["accessible", "observable"]},
        "f": {"type": "array", "items": {"type": "string"}},
        "h": {"type": "array", "items": {"type": "string"}},
        "inputs": _INT,
        "text": {"type": "string"},
    },
}

_ERROR = {
    "type": "object",
    "required": ["error", "message"],
    "properties": {"error": {"type": "string"}, "message": {"type": "string"}, "line": {"type": ["integer", "null"]}},
}

SCHEMAS: dict[str, dict] = {
    "analyze": _ANALYZE,
    "drivers": _NODESET,
    "sensors": _NODESET,
    "compare": _COMPARE,
    "ablate": _ABLATE,
    "gen": _GEN,
    "verify": _VERIFY,
    "simulate": _SIMULATE,
    "witness": _WITNESS,
    "error": _ERROR,
}


def validate_report(kind: str, doc: dict) -> dict:
    jsonschema.validate(doc, SCHEMAS[kind])
    return doc
