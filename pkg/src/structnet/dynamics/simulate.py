"""Fixed-step RK4 simulation and reachable-set sampling."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from ..config import DEFAULT, Tolerances
from .expr import compile_expr
from .numeric import Decision, Verdict
from .system import DynamicsSpec

__all__ = [
    "SimulationError",
    "PiecewiseConstantInput",
    "SampledInput",
    "Trajectory",
    "simulate",
    "simulate_ensemble",
    "reachable_cloud_rank",
]


class SimulationError(ArithmeticError):
    def __init__(self, message: str, time: float):
        self.time = time
        super().__init__(f"{message} at t={time:g}")


@dataclass(frozen=True)
class PiecewiseConstantInput:
    """Random levels uniform in ``[-amplitude, amplitude]``, redrawn every ``period`` seconds."""

    period: float
    amplitude: float = 1.0


@dataclass(frozen=True)
class SampledInput:
    """Explicit input values, one row of length ``M`` per integration step."""

    values: tuple[tuple[float, ...], ...]


InputSignal = Union[PiecewiseConstantInput, SampledInput]


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (len(times), N)
    inputs: np.ndarray  # (len(times), M); the last row repeats the final held value

    def to_dict(self) -> dict:
        return {"times": self.times.tolist(), "states": self.states.tolist(), "inputs": self.inputs.tolist()}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        n, m = self.states.shape[1], self.inputs.shape[1]
        w.writerow(["t", *(f"x{i + 1}" for i in range(n)), *(f"u{j + 1}" for j in range(m))])
        for t, xs, us in zip(self.times, self.states, self.inputs):
            w.writerow([repr(float(t)), *(repr(float(v)) for v in xs), *(repr(float(v)) for v in us)])
        return buf.getvalue()


def _input_table(spec: DynamicsSpec, signal: InputSignal, steps: int, dt: float, rng: np.random.Generator) -> np.ndarray:
    m = spec.M
    if isinstance(signal, SampledInput):
        vals = np.asarray(signal.values, dtype=float).reshape(-1, m) if m else np.zeros((len(signal.values), 0))
        if len(vals) < steps:
            raise ValueError(f"sampled input has {len(vals)} rows, {steps} steps needed")
        return vals[:steps]
    if signal.period <= 0:
        raise ValueError("switch period must be positive")
    hold = max(1, int(round(signal.period / dt)))
    n_levels = -(-steps // hold)
    levels = rng.uniform(-signal.amplitude, signal.amplitude, size=(n_levels, m))
    return np.repeat(levels, hold, axis=0)[:steps]


def _rhs(spec: DynamicsSpec):
    vs = spec.state_vars + spec.input_vars
    fns = [compile_expr(e, vs) for e in spec.f]

    def f(x: np.ndarray, u: np.ndarray) -> np.ndarray:
        v = np.concatenate([x, u], axis=0)
        return np.stack([fn(v) for fn in fns]) if fns else np.zeros_like(x)

    return f


def _integrate(spec, x0: np.ndarray, table: np.ndarray, dt: float) -> np.ndarray:
    """RK4 over a batch; ``x0`` is (N, B) and ``table`` is (steps, M, B)."""
    f = _rhs(spec)
    steps = table.shape[0]
    out = np.empty((steps + 1,) + x0.shape)
    out[0] = x = x0
    for k in range(steps):
        uk = table[k]
        k1 = f(x, uk)
        k2 = f(x + 0.5 * dt * k1, uk)
        k3 = f(x + 0.5 * dt * k2, uk)
        k4 = f(x + dt * k3, uk)
        x = x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.isfinite(x).all():
            raise SimulationError("non-finite state", (k + 1) * dt)
        out[k + 1] = x
    return out


def _steps(T: float, dt: float) -> int:
    if dt <= 0:
        raise ValueError("dt must be positive")
    if T < 0:
        raise ValueError("T must be non-negative")
    return int(round(T / dt))


def simulate(
    spec: DynamicsSpec,
    x0: Sequence[float],
    input_signal: InputSignal,
    T: float,
    dt: float,
    seed=0,
) -> Trajectory:
    steps = _steps(T, dt)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (spec.N,):
        raise ValueError(f"x0 must have length {spec.N}")
    table = _input_table(spec, input_signal, steps, dt, np.random.default_rng(seed))
    states = _integrate(spec, x0[:, None], table[:, :, None], dt)[:, :, 0]
    inputs = np.vstack([table, table[-1:] if steps else np.zeros((1, spec.M))])
    times = np.arange(steps + 1) * dt
    return Trajectory(times, states, inputs)


def simulate_ensemble(
    spec: DynamicsSpec, x0: Sequence[float], n_samples: int, T: float, dt: float, seed=0, period: float | None = None, amplitude: float = 1.0
) -> np.ndarray:
    """Endpoints ``x(T)`` of ``n_samples`` runs, shape ``(n_samples, N)``.

    Sample ``i`` draws its input from ``default_rng([seed, i])``, so results
    do not depend on batching.
    """
    steps = _steps(T, dt)
    signal = PiecewiseConstantInput(period if period is not None else 10 * dt, amplitude)
    tables = [
        _input_table(spec, signal, steps, dt, np.random.default_rng([seed, i])) for i in range(n_samples)
    ]
    table = np.stack(tables, axis=-1) if tables else np.zeros((steps, spec.M, 0))
    x0 = np.repeat(np.asarray(x0, dtype=float)[:, None], n_samples, axis=1)
    return _integrate(spec, x0, table, dt)[-1].T


def reachable_cloud_rank(
    spec: DynamicsSpec,
    x0: Sequence[float],
    n_samples: int = 200,
    T: float = 1.0,
    dt: float = 0.01,
    seed=0,
    tol: Tolerances = DEFAULT,
) -> Verdict:
    """Numeric rank of endpoint displacements from their centroid.

    Empirical evidence only: rank ``N`` is consistent with accessibility,
    lower rank reports the flat directions (unit normals).
    """
    n = spec.N
    if n_samples < n + 1:
        raise ValueError("need at least N + 1 samples")
    ends = simulate_ensemble(spec, x0, n_samples, T, dt, seed)
    disp = ends - ends.mean(axis=0)
    _, s, vt = np.linalg.svd(disp, full_matrices=True)
    s = np.concatenate([s, np.zeros(max(0, n - len(s)))])
    rank = 0 if s[0] == 0 else int(np.sum(s > tol.rank_rel * s[0]))
    evidence = {
        "label": "empirical evidence",
        "rank": rank,
        "N": n,
        "singular_values": s.tolist(),
        "sigma_ratios": (s / s[0]).tolist() if s[0] > 0 else [0.0] * n,
        "weakest_direction": vt[n - 1].tolist() if n else [],
        "samples": n_samples,
    }
    if rank == n:
        return Verdict(Decision.YES, evidence)
    evidence["flat_directions"] = vt[rank:].tolist()
    return Verdict(Decision.NO, evidence)
