import csv
import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from structnet.dynamics import (
    PiecewiseConstantInput,
    SampledInput,
    SimulationError,
    dilation_linear,
    dilation_nonlinear,
    reachable_cloud_rank,
    simulate,
    simulate_ensemble,
    sphere_rotation,
    tree_chain,
)
from structnet.dynamics.system import from_strings


def test_linear_dilation_invariant_along_trajectories():
    spec = dilation_linear()
    for seed in range(5):
        tr = simulate(spec, [1, 1], PiecewiseConstantInput(0.5), T=5, dt=0.01, seed=seed)
        inv = tr.states[:, 0] - 0.5 * tr.states[:, 1]
        assert np.ptp(inv) < 1e-6
        assert abs(inv[0] - 0.5) < 1e-12


def test_zero_field_is_constant():
    spec = from_strings(["0", "0*x1"], [], 1)
    tr = simulate(spec, [0.3, -2], PiecewiseConstantInput(0.1), T=1, dt=0.05)
    assert np.all(tr.states == np.array([0.3, -2]))


def test_one_step_against_taylor():
    # x1' = u^2, x2' = x1^3 with constant u: exact solution is a polynomial in t
    spec = tree_chain((2, 3))
    u0, a, dt = 0.7, 0.4, 1e-2
    tr = simulate(spec, [a, 0.0], SampledInput(((u0,),)), T=dt, dt=dt)
    c = u0**2
    x1 = a + c * dt
    x2 = ((a + c * dt) ** 4 - a**4) / (4 * c)
    assert tr.states[-1, 0] == pytest.approx(x1, abs=1e-15)
    assert tr.states[-1, 1] == pytest.approx(x2, abs=1e-12)


def test_rk4_fourth_order_convergence():
    spec = from_strings(["x2", "-x1"], [], 0)
    errs = []
    for dt in (0.1, 0.05):
        tr = simulate(spec, [1, 0], SampledInput(tuple(() for _ in range(int(round(2 / dt))))), T=2, dt=dt)
        errs.append(abs(tr.states[-1, 0] - np.cos(2)))
    assert 12 < errs[0] / errs[1] < 20


def test_sphere_norm_preserved():
    tr = simulate(sphere_rotation(), [1, 0, 0], PiecewiseConstantInput(0.2), T=5, dt=0.01, seed=2)
    assert np.max(np.abs((tr.states**2).sum(axis=1) - 1)) < 1e-5


def test_reproducible_and_seed_sensitive():
    a = simulate(dilation_nonlinear(), [1, 1], PiecewiseConstantInput(0.3), 1, 0.01, seed=5)
    b = simulate(dilation_nonlinear(), [1, 1], PiecewiseConstantInput(0.3), 1, 0.01, seed=5)
    c = simulate(dilation_nonlinear(), [1, 1], PiecewiseConstantInput(0.3), 1, 0.01, seed=6)
    assert np.array_equal(a.states, b.states) and not np.array_equal(a.states, c.states)


def test_ensemble_independent_of_batch_size():
    full = simulate_ensemble(dilation_nonlinear(), [1, 1], 6, 0.5, 0.01, seed=3)
    part = simulate_ensemble(dilation_nonlinear(), [1, 1], 2, 0.5, 0.01, seed=3)
    assert np.array_equal(full[:2], part)


def test_blowup_reports_time():
    spec = from_strings(["x1^2"], [], 0)
    with pytest.raises(SimulationError) as info:
        simulate(spec, [1.0], SampledInput(tuple(() for _ in range(400))), T=4, dt=0.01)
    assert 0.9 < info.value.time < 4


def test_csv_layout():
    tr = simulate(dilation_linear(), [1, 1], PiecewiseConstantInput(0.5), 0.05, 0.01)
    rows = list(csv.reader(io.StringIO(tr.to_csv())))
    assert rows[0] == ["t", "x1", "x2", "u1"]
    assert len(rows) == 1 + len(tr.times)
    assert float(rows[-1][0]) == pytest.approx(0.05)


def test_bad_arguments():
    with pytest.raises(ValueError):
        simulate(dilation_linear(), [1], PiecewiseConstantInput(0.5), 1, 0.01)
    with pytest.raises(ValueError):
        simulate(dilation_linear(), [1, 1], PiecewiseConstantInput(0.5), 1, 0)
    with pytest.raises(ValueError):
        simulate(dilation_linear(), [1, 1], SampledInput(((0.0,),)), 1, 0.01)


def test_clouds():
    v = reachable_cloud_rank(dilation_linear(), [1, 1], n_samples=100, T=1)
    assert v.no and v.evidence["rank"] == 1
    v = reachable_cloud_rank(dilation_nonlinear(), [1, 1], n_samples=100, T=1)
    assert v.yes and v.evidence["rank"] == 2


def test_sphere_cloud_weak_direction_is_radial():
    # the cloud sits on the unit sphere, so its thinnest direction is the local normal
    x0 = [0, 0, 1]
    v = reachable_cloud_rank(sphere_rotation(), x0, n_samples=200, T=1)
    assert v.evidence["label"] == "empirical evidence"
    ends = simulate_ensemble(sphere_rotation(), x0, 200, 1, 0.01)
    assert np.max(np.abs((ends**2).sum(axis=1) - 1)) < 1e-5
    c = ends.mean(axis=0)
    w = np.asarray(v.evidence["weakest_direction"])
    assert abs(w @ c) / np.linalg.norm(c) > 0.99


@settings(max_examples=15, deadline=None)
@given(
    b11=st.floats(0.2, 2.0),
    b21=st.floats(0.2, 2.0),
    seed=st.integers(0, 1000),
)
def test_cloud_flat_direction_matches_conserved_quantity(b11, b21, seed):
    v = reachable_cloud_rank(dilation_linear(b11=b11, b21=b21), [1, 1], n_samples=40, T=1, seed=seed)
    assert v.evidence["rank"] == 1
    w = np.asarray(v.evidence["weakest_direction"])
    normal = np.array([b21, -b11]) / np.hypot(b11, b21)
    assert abs(w @ normal) > 0.999
