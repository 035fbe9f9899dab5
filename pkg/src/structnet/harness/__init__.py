from .ablation import AblationEntry, AblationReport, ablate_all
from .generators import ATTACH, MODELS, GenSpec, generate, random_system_graph
from .reports import SCHEMAS, validate_report

__all__ = [
    "AblationEntry", "AblationReport", "ablate_all",
    "ATTACH", "MODELS", "GenSpec", "generate", "random_system_graph",
    "SCHEMAS", "validate_report",
]
