"""Numeric thresholds shared by the randomized decision procedures."""
from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    nonzero: float = 1e-9  # any |value| above this => "nonzero"
    zero: float = 1e-12  # all |values| at or below this => "identically zero"
    rank_rel: float = 1e-6  # singular values above rank_rel * sigma_max count towards rank
    rank_margin: float = 1e-10  # sigma_min / sigma_max below this at every point => "no"
    span_residual: float = 1e-8  # relative least-squares residual for span membership
    kalman_rel: float = 1e-8
    trials: int = 20
    retry_rounds: int = 25


DEFAULT = Tolerances()
STRICT = replace(DEFAULT, trials=60, nonzero=1e-8, rank_margin=1e-12)

PROFILES = {"default": DEFAULT, "strict": STRICT}
