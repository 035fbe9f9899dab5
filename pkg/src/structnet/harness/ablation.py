"""Single-node ablation sweeps."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from ..graph import NodeId, SystemGraph, remove_nodes
from ..linear import linear_structural_controllability, linear_structural_observability
from ..structural import input_reachability, minimal_driver_set, minimal_sensor_set, output_coreachability


@dataclass(frozen=True)
class AblationEntry:
    still_accessible: bool
    still_observable: bool
    new_driver_count: int
    new_sensor_count: int
    disconnected_witnesses: frozenset[NodeId]
    lin_controllable: bool
    lin_observable: bool

    def to_dict(self) -> dict:
        return {
            "still_accessible": self.still_accessible,
            "still_observable": self.still_observable,
            "new_driver_count": self.new_driver_count,
            "new_sensor_count": self.new_sensor_count,
            "disconnected_witnesses": [str(n) for n in sorted(self.disconnected_witnesses)],
            "lin_controllable": self.lin_controllable,
            "lin_observable": self.lin_observable,
        }


@dataclass(frozen=True)
class AblationReport:
    baseline: AblationEntry
    entries: dict[NodeId, AblationEntry]

    def to_dict(self) -> dict:
        return {
            "baseline": self.baseline.to_dict(),
            "ablations": {str(n): e.to_dict() for n, e in sorted(self.entries.items())},
        }


def _evaluate(g: SystemGraph) -> AblationEntry:
    acc = input_reachability(g)
    obs = output_coreachability(g)
    return AblationEntry(
        still_accessible=acc.holds,
        still_observable=obs.holds,
        new_driver_count=len(minimal_driver_set(g)),
        new_sensor_count=len(minimal_sensor_set(g)),
        disconnected_witnesses=acc.unreached_witnesses | obs.unreached_witnesses,
        lin_controllable=linear_structural_controllability(g).controllable_or_observable,
        lin_observable=linear_structural_observability(g).controllable_or_observable,
    )


def ablate_all(g: SystemGraph, include_io: bool = False, workers: int | None = None) -> AblationReport:
    """Remove each state node (and inputs/outputs if ``include_io``) in turn and re-analyse."""
    targets = sorted(g.states + (g.inputs + g.outputs if include_io else ()))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda n: _evaluate(remove_nodes(g, n)), targets))
    return AblationReport(_evaluate(g), dict(zip(targets, results)))
