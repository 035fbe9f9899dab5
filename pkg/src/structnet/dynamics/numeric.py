"""Randomized decision procedures over explicit dynamics.

Every procedure samples points uniformly in ``[-1, 1]^d``, evaluates
compiled expressions with numpy and returns a :class:`Verdict`. ``yes`` and
``no`` are only returned when the documented rule fires; everything else is
``inconclusive``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from ..config import DEFAULT, Tolerances
from ..graph import SystemGraph, u as input_node, x as state_node, y as output_node
from .expr import Add, Const, Expr, Mul, Var, compile_expr, differentiate, simplify, sort_key, variables
from .system import DynamicsSpec, affine_decomposition, total_derivative

__all__ = [
    "Decision",
    "Verdict",
    "SingularEvaluationError",
    "GraphExtractionError",
    "is_nonzero",
    "extract_graph",
    "check_autonomous_candidate",
    "output_derivative_jacobian",
    "observability_rank",
    "check_hidden_candidate",
    "lie_bracket",
    "accessibility_lie_rank",
]


class Decision(str, enum.Enum):
    YES = "yes"
    NO = "no"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Verdict:
    decision: Decision
    evidence: dict[str, Any] = field(default_factory=dict)

    @property
    def yes(self) -> bool:
        return self.decision is Decision.YES

    @property
    def no(self) -> bool:
        return self.decision is Decision.NO

    def to_dict(self) -> dict:
        return {"decision": self.decision.value, "evidence": _jsonable(self.evidence)}


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, set, frozenset)):
        items = sorted(v, key=str) if isinstance(v, (set, frozenset)) else v
        return [_jsonable(x) for x in items]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, Fraction):
        return float(v)
    if isinstance(v, (Expr, Var)):
        return str(v)
    if isinstance(v, enum.Enum):
        return v.value
    return v


class SingularEvaluationError(ArithmeticError):
    pass


class GraphExtractionError(ValueError):
    pass


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def sample_points(fns, n_vars: int, trials: int, rng: np.random.Generator, tol: Tolerances = DEFAULT):
    """Draw ``trials`` points where every function in ``fns`` is finite.

    Returns ``(points, values)`` with points of shape ``(n_vars, k)`` and one
    value array per function. Singular points are redrawn for up to
    ``tol.retry_rounds`` rounds; the survivors are returned (``k <= trials``).
    """
    pts = rng.uniform(-1.0, 1.0, size=(n_vars, trials))
    ok = np.ones(trials, dtype=bool)
    for _ in range(tol.retry_rounds):
        vals = [fn(pts) for fn in fns]
        ok = np.ones(trials, dtype=bool)
        for v in vals:
            ok &= np.isfinite(v.reshape(-1, trials)).all(axis=0)
        if ok.all():
            return pts, vals
        bad = ~ok
        pts[:, bad] = rng.uniform(-1.0, 1.0, size=(n_vars, int(bad.sum())))
    vals = [fn(pts) for fn in fns]
    ok = np.ones(trials, dtype=bool)
    for v in vals:
        ok &= np.isfinite(v.reshape(-1, trials)).all(axis=0)
    if not ok.any():
        raise SingularEvaluationError("retry cap exhausted: every sampled point is singular")
    return pts[:, ok], [v[..., ok] for v in vals]


def is_nonzero(e: Expr, trials: int = DEFAULT.trials, seed=None, tol: Tolerances = DEFAULT) -> Verdict:
    """Generic nonvanishing test for a meromorphic expression."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    e = simplify(e)
    if isinstance(e, Const):
        v = abs(float(e.value))
        decision = Decision.YES if v > tol.nonzero else Decision.NO if v <= tol.zero else Decision.INCONCLUSIVE
        return Verdict(decision, {"constant": float(e.value), "exact": True})
    vs = sorted(variables(e), key=sort_key)
    fn = compile_expr(e, vs)
    pts, (vals,) = sample_points([fn], len(vs), trials, _rng(seed), tol)
    mags = np.abs(vals)
    if (mags > tol.nonzero).any():
        decision = Decision.YES
    elif (mags <= tol.zero).all():
        decision = Decision.NO
    else:
        decision = Decision.INCONCLUSIVE
    return Verdict(
        decision,
        {"variables": [v.name for v in vs], "max_abs": float(mags.max()), "points": pts.shape[1]},
    )


def extract_graph(spec: DynamicsSpec, trials: int = DEFAULT.trials, seed=0, tol: Tolerances = DEFAULT) -> SystemGraph:
    """Graph of ``(f, h)``: an edge wherever the partial derivative is not identically zero."""
    rng = _rng(seed)
    edges = {"A": set(), "B": set(), "C": set()}

    def test(expr, var, label, src, dst, entry):
        d = differentiate(expr, var)
        if d == Const(0):
            return
        verdict = is_nonzero(d, trials, rng, tol)
        if verdict.decision is Decision.INCONCLUSIVE:
            raise GraphExtractionError(f"cannot decide whether {entry} vanishes identically")
        if verdict.yes:
            edges[label].add((src, dst))

    for i, fi in enumerate(spec.f, start=1):
        present = variables(fi)
        for v in sorted(present, key=sort_key):
            if v.kind == "x":
                test(fi, v, "A", state_node(v.index), state_node(i), f"d f{i}/d x{v.index}")
            else:
                test(fi, v, "B", input_node(v.index), state_node(i), f"d f{i}/d u{v.index}")
    for j, hj in enumerate(spec.h, start=1):
        for v in sorted(variables(hj), key=sort_key):
            test(hj, v, "C", state_node(v.index), output_node(j), f"d h{j}/d x{v.index}")
    return SystemGraph(
        inputs=tuple(input_node(j) for j in range(1, spec.M + 1)),
        states=tuple(state_node(i) for i in range(1, spec.N + 1)),
        outputs=tuple(output_node(j) for j in range(1, spec.P + 1)),
        edges_A=frozenset(edges["A"]),
        edges_B=frozenset(edges["B"]),
        edges_C=frozenset(edges["C"]),
    )


def _state_function(spec: DynamicsSpec, e, what: str) -> Expr:
    e = simplify(e)
    vs = variables(e)
    if any(v.kind != "x" or v.index > spec.N for v in vs):
        raise ValueError(f"{what} must be a function of the state variables x1..x{spec.N}")
    if not vs:
        raise ValueError(f"{what} must be non-constant")
    return e


def check_autonomous_candidate(
    spec: DynamicsSpec, xi, k_max: int, trials: int = DEFAULT.trials, seed=0, tol: Tolerances = DEFAULT
) -> Verdict:
    """Test whether ``xi`` has input-independent time derivatives up to order ``k_max``.

    ``yes`` is a certificate up to ``k_max`` only, unless some derivative
    vanishes identically, in which case every later one does too
    (``evidence['exact_closure']``).
    """
    xi = _state_function(spec, xi, "an autonomous-element candidate")
    rng = _rng(seed)
    derivs = []
    cur = xi
    undecided = []
    for k in range(1, k_max + 1):
        cur = total_derivative(cur, spec)
        derivs.append(str(cur))
        if isinstance(cur, Const):
            return Verdict(
                Decision.YES,
                {"label": f"certificate up to order {k_max}", "exact_closure": True, "closed_at": k, "derivatives": derivs},
            )
        for v in sorted((v for v in variables(cur) if v.kind == "u"), key=sort_key):
            d = differentiate(cur, v)
            if d == Const(0):
                continue
            verdict = is_nonzero(d, trials, rng, tol)
            if verdict.yes:
                return Verdict(
                    Decision.NO,
                    {"order": k, "depends_on": v.name, "derivative": str(cur), "partial": str(d), "derivatives": derivs},
                )
            if verdict.decision is Decision.INCONCLUSIVE:
                undecided.append((k, v.name))
    if undecided:
        return Verdict(Decision.INCONCLUSIVE, {"undecided": undecided, "derivatives": derivs})
    return Verdict(
        Decision.YES,
        {"label": f"certificate up to order {k_max}", "exact_closure": False, "derivatives": derivs},
    )


def output_derivative_jacobian(spec: DynamicsSpec, orders: int) -> tuple[list[Expr], list[list[Expr]]]:
    """Rows ``y_j^(k)`` for ``k = 0..orders`` and their symbolic Jacobian in ``x``."""
    rows = []
    for hj in spec.h:
        cur = simplify(hj)
        rows.append(cur)
        for _ in range(orders):
            cur = total_derivative(cur, spec)
            rows.append(cur)
    jac = [[differentiate(r, xv) for xv in spec.state_vars] for r in rows]
    return rows, jac


def _eval_matrix(entries: list[list[Expr]], extra: Sequence[Expr], trials, rng, tol):
    """Evaluate a symbolic matrix (plus ``extra`` expressions) at shared random points."""
    flat = [e for row in entries for e in row] + list(extra)
    vs = sorted(set().union(*(variables(e) for e in flat)) if flat else set(), key=sort_key)
    fns = [compile_expr(e, vs) for e in flat]
    pts, vals = sample_points(fns, len(vs), trials, rng, tol)
    k = pts.shape[1]
    n_rows = len(entries)
    n_cols = len(entries[0]) if entries else 0
    mats = np.array(vals[: n_rows * n_cols]).reshape(n_rows, n_cols, k) if n_rows * n_cols else np.zeros((n_rows, n_cols, k))
    return vs, pts, mats, vals[n_rows * n_cols :]


def observability_rank(
    spec: DynamicsSpec, orders: int | None = None, trials: int = DEFAULT.trials, seed=0, tol: Tolerances = DEFAULT
) -> Verdict:
    """Generic rank of ``d[y, y', ..., y^(orders)]/dx`` (default ``orders = N - 1``)."""
    if spec.P < 1:
        raise ValueError("observability rank needs at least one output")
    n = spec.N
    if n == 0:
        return Verdict(Decision.YES, {"rank": 0, "N": 0})
    orders = n - 1 if orders is None else orders
    _, jac = output_derivative_jacobian(spec, orders)
    _, pts, mats, _ = _eval_matrix(jac, [], trials, _rng(seed), tol)
    ranks, ratios = [], []
    best = None
    for p in range(pts.shape[1]):
        s = np.linalg.svd(mats[:, :, p], compute_uv=False)
        s = np.concatenate([s, np.zeros(max(0, n - len(s)))])
        if s[0] == 0:
            ranks.append(0)
            ratios.append(0.0)
            continue
        ranks.append(int(np.sum(s > tol.rank_rel * s[0])))
        ratios.append(float(s[n - 1] / s[0]))
        if best is None or ranks[-1] > best[0]:
            best = (ranks[-1], s.tolist())
    evidence = {
        "N": n,
        "orders": orders,
        "points": pts.shape[1],
        "max_rank": max(ranks),
        "ranks": ranks,
        "min_sigma_ratio": ratios,
        "singular_values": None if best is None else best[1],
    }
    if max(ranks) == n:
        return Verdict(Decision.YES, evidence)
    if all(r < tol.rank_margin for r in ratios):
        evidence["label"] = f"rank deficient up to derivative order {orders}"
        return Verdict(Decision.NO, evidence)
    return Verdict(Decision.INCONCLUSIVE, evidence)


def check_hidden_candidate(
    spec: DynamicsSpec, zeta, orders: int | None = None, trials: int = DEFAULT.trials, seed=0, tol: Tolerances = DEFAULT
) -> Verdict:
    """Is ``d zeta`` outside the span of the output-derivative differentials?"""
    zeta = _state_function(spec, zeta, "a hidden-element candidate")
    if spec.P < 1:
        return Verdict(Decision.YES, {"label": "no outputs: every state function is hidden"})
    orders = spec.N - 1 if orders is None else orders
    _, jac = output_derivative_jacobian(spec, orders)
    grad = [differentiate(zeta, xv) for xv in spec.state_vars]
    _, pts, mats, gvals = _eval_matrix(jac, grad, trials, _rng(seed), tol)
    residuals = []
    for p in range(pts.shape[1]):
        g = np.array([gv[p] for gv in gvals])
        gn = np.linalg.norm(g)
        if gn == 0:
            continue
        J = mats[:, :, p]
        c, *_ = np.linalg.lstsq(J.T, g, rcond=None)
        residuals.append(float(np.linalg.norm(g - J.T @ c) / gn))
    evidence = {"orders": orders, "points": len(residuals), "relative_residuals": residuals}
    if not residuals:
        return Verdict(Decision.INCONCLUSIVE, evidence)
    in_span = [r < tol.span_residual for r in residuals]
    if all(in_span):
        return Verdict(Decision.NO, evidence)
    if not any(in_span):
        evidence["label"] = f"hidden up to derivative order {orders}"
        return Verdict(Decision.YES, evidence)
    return Verdict(Decision.INCONCLUSIVE, evidence)


VectorField = tuple[Expr, ...]


def _jacobian(v: VectorField, xs: Sequence[Var]) -> list[list[Expr]]:
    return [[differentiate(c, xj) for xj in xs] for c in v]


def lie_bracket(f: VectorField, g: VectorField, xs: Sequence[Var], _cache: dict | None = None) -> VectorField:
    """``[f, g] = Dg f - Df g``."""
    cache = {} if _cache is None else _cache
    for v in (f, g):
        if v not in cache:
            cache[v] = _jacobian(v, xs)
    Df, Dg = cache[f], cache[g]
    n = len(xs)
    out = []
    for i in range(n):
        terms = []
        for j in range(n):
            if Dg[i][j] != Const(0) and f[j] != Const(0):
                terms.append(Mul((Dg[i][j], f[j])))
            if Df[i][j] != Const(0) and g[j] != Const(0):
                terms.append(Mul((Const(-1), Df[i][j], g[j])))
        out.append(simplify(Add(tuple(terms))))
    return tuple(out)


def _is_zero_field(v: VectorField) -> bool:
    return all(c == Const(0) for c in v)


def _flat_covector_candidate(vecs: np.ndarray, n: int, tol: Tolerances):
    """Constant covector annihilating every sampled field vector, as a linear state function."""
    if vecs.size == 0:
        normal = np.eye(n)[0]
    else:
        _, s, vt = np.linalg.svd(vecs, full_matrices=True)
        s = np.concatenate([s, np.zeros(n - len(s))]) if len(s) < n else s
        if s[0] > 0 and s[n - 1] >= tol.rank_rel * s[0]:
            return None
        normal = vt[n - 1]
    normal = normal / normal[np.argmax(np.abs(normal))]
    coeffs = []
    for c in normal:
        fr = Fraction(float(c)).limit_denominator(10**6)
        coeffs.append(fr if abs(float(fr) - c) < 1e-12 else float(c))
    terms = [Mul((Const(c), Var("x", i + 1))) for i, c in enumerate(coeffs) if c != 0]
    return simplify(Add(tuple(terms)))


def accessibility_lie_rank(
    spec: DynamicsSpec,
    depth: int | None = None,
    trials: int = DEFAULT.trials,
    seed=0,
    candidate=None,
    tol: Tolerances = DEFAULT,
    max_brackets: int = 5000,
) -> Verdict:
    """Rank of the Lie algebra generated by the input-power coefficient fields.

    ``f = sum_k alpha_k(x) u^k``; the fields ``alpha_k`` and right-nested
    brackets up to ``depth`` (default ``N``) are evaluated at random states.
    A field is kept only if it is linearly independent over the reals of the
    kept ones on the sampled points. ``no`` additionally needs an autonomous
    candidate, either ``candidate`` or a constant flat covector fit.
    """
    n = spec.N
    if n == 0:
        return Verdict(Decision.YES, {"rank": 0, "N": 0})
    depth = n if depth is None else depth
    rng = _rng(seed)
    xs = spec.state_vars
    decomposition = affine_decomposition(spec)
    generators = [tuple(simplify(c) for c in v) for v in decomposition.vector_fields().values()]
    generators = [v for v in generators if not _is_zero_field(v)]

    def compiled(v: VectorField):
        return [compile_expr(c, xs) for c in v]

    gen_fns = [fn for v in generators for fn in compiled(v)]
    pts, _ = sample_points(gen_fns or [compile_expr(Const(0), xs)], n, trials, rng, tol)
    k_pts = pts.shape[1]

    def values(v: VectorField) -> np.ndarray:
        arr = np.array([fn(pts) for fn in compiled(v)])
        return np.where(np.isfinite(arr), arr, 0.0)

    basis: list[np.ndarray] = []
    kept: list[VectorField] = []
    kept_vals: list[np.ndarray] = []

    def try_keep(v: VectorField) -> bool:
        vals = values(v)
        flat = vals.ravel()
        norm = np.linalg.norm(flat)
        if norm <= tol.zero:
            return False
        r = flat.copy()
        for _ in range(2):
            for q in basis:
                r -= (q @ r) * q
        if np.linalg.norm(r) <= 1e-9 * norm:
            return False
        basis.append(r / np.linalg.norm(r))
        kept.append(v)
        kept_vals.append(vals)
        return True

    def pointwise_ranks() -> list[int]:
        if not kept_vals:
            return [0] * k_pts
        stack = np.stack(kept_vals, axis=1)  # (n, K, pts)
        out = []
        for p in range(k_pts):
            s = np.linalg.svd(stack[:, :, p], compute_uv=False)
            out.append(0 if s[0] == 0 else int(np.sum(s > tol.rank_rel * s[0])))
        return out

    level = [v for v in generators if try_keep(v)]
    cache: dict = {}
    brackets = 0
    reached_depth = 0
    for d in range(1, depth + 1):
        if min(pointwise_ranks()) == n or not level:
            break
        new = []
        for g in generators:
            for b in level:
                if brackets >= max_brackets:
                    break
                brackets += 1
                br = lie_bracket(g, b, xs, cache)
                if not _is_zero_field(br) and try_keep(br):
                    new.append(br)
        level = new
        reached_depth = d

    ranks = pointwise_ranks()
    evidence = {
        "N": n,
        "fields_kept": len(kept),
        "brackets_computed": brackets,
        "bracket_depth": reached_depth,
        "points": k_pts,
        "ranks": ranks,
        "max_rank": max(ranks),
    }
    if max(ranks) == n:
        return Verdict(Decision.YES, evidence)

    if candidate is None:
        vecs = np.concatenate([kv.T for kv in kept_vals], axis=0) if kept_vals else np.zeros((0, n))
        candidate = _flat_covector_candidate(vecs, n, tol)
        evidence["candidate_source"] = "flat covector fit" if candidate is not None else None
    else:
        evidence["candidate_source"] = "user"
    if candidate is not None:
        cert = check_autonomous_candidate(spec, candidate, max(2, n), trials, rng, tol)
        evidence["candidate"] = str(simplify(candidate))
        evidence["candidate_verdict"] = cert.decision.value
        if cert.yes:
            return Verdict(Decision.NO, evidence)
    return Verdict(Decision.INCONCLUSIVE, evidence)
