from __future__ import annotations

import csv
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hmskit.monodromy import (
    DegenerateFrameError,
    FlowState,
    LocalModel,
    PhaseLiftError,
    PhaseSample,
    SingularityError,
    energy_gradient_field,
    fiber_frame,
    fiber_phase,
    fiber_point,
    hamiltonian_field,
    integrate_flow,
    monodromy_phase_probe,
    phase_of_frame,
    phase_term_sweep,
    symplectic_products,
    torus_adapted_frame,
    verify_phase_term,
    write_trajectory_csv,
)


def exact_flow(model, y, t):
    """Closed-form solution: moduli are frozen, each y_j turns at a constant rate."""
    y = np.asarray(y, dtype=complex)
    mods = np.abs(y[: model.k]) ** 2
    c = 1.0 / np.sum(1.0 / mods)
    out = y.copy()
    out[: model.k] *= np.exp(-1j * c * model.signs[: model.k] * t / mods)
    return out


def exact_pushforward(model, y, frame, t, h=1e-6):
    rows = [(exact_flow(model, y + h * v, t) - exact_flow(model, y - h * v, t)) / (2 * h) for v in frame]
    return np.array(rows)


moduli = st.floats(0.3, 3.0)
angles = st.floats(0, 2 * math.pi)


@st.composite
def model_points(draw):
    n = draw(st.integers(1, 3))
    k = draw(st.integers(2, n + 1))
    y = [draw(moduli) * np.exp(1j * draw(angles)) for _ in range(n + 1)]
    return LocalModel(n, k), np.array(y)


def test_model_validation():
    with pytest.raises(ValueError):
        LocalModel(2, 1)
    with pytest.raises(ValueError):
        LocalModel(2, 4)


def test_field_example_two_variables():
    m = LocalModel(2, 2)
    x = hamiltonian_field(m, [1, 1, 0.5])
    assert np.allclose(x, [0.5j, -0.5j, 0])


@given(model_points())
def test_field_rotates_p_at_unit_speed(case):
    m, y = case
    x = hamiltonian_field(m, y)
    h = 1e-7
    dp = (m.p(y + h * x) - m.p(y - h * x)) / (2 * h)
    assert abs(dp - (-1j) * m.p(y)) < 1e-5 * max(1, abs(m.p(y)))


@given(model_points())
def test_energy_field_is_positive_multiple(case):
    m, y = case
    xh = energy_gradient_field(m, y)
    x = hamiltonian_field(m, y)
    factor = abs(m.p(y)) ** 2 * np.sum(1 / np.abs(y[: m.k]) ** 2)
    assert np.allclose(xh, factor * x, atol=1e-6 * max(1, factor))


@given(model_points(), st.lists(st.floats(-4, 4), min_size=4, max_size=4))
def test_equivariance(case, s):
    m, y = case
    assert m.equivariance_defect(y, s[: m.k]) < 1e-9 * max(1, abs(m.p(y)))


def test_zero_time_is_identity():
    m = LocalModel(2, 3)
    y = np.array([1, 2j, 1 + 1j])
    fr = torus_adapted_frame(m, y)
    traj = integrate_flow(m, FlowState(y, fr), 0.0)
    assert np.array_equal(traj.final.y, y)
    assert np.array_equal(traj.final.frame, fr)


@given(model_points())
def test_integration_matches_exact_flow(case):
    m, y = case
    traj = integrate_flow(m, FlowState(y, torus_adapted_frame(m, y)), 0.5, dt=1e-3)
    assert np.allclose(traj.final.y, exact_flow(m, y, 0.5), atol=1e-8)


def test_frame_transport_matches_exact_pushforward():
    m = LocalModel(3, 3)
    y = np.array([1.0 + 0.2j, 0.4 - 1.1j, 0.9j, 0.7])
    rng = np.random.default_rng(5)
    frame = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    traj = integrate_flow(m, FlowState(y, frame), 1.0, dt=1e-3)
    assert np.allclose(traj.final.frame, exact_pushforward(m, y, frame, 1.0), atol=1e-6)


def test_conservation_along_flow():
    m = LocalModel(2, 2)
    y = np.array([1.0, 1.0, 0.7])
    traj = integrate_flow(m, FlowState(y, torus_adapted_frame(m, y)), 2.0, dt=1e-4)
    assert np.abs(np.abs(traj.ys[:, :2]) - 1.0).max() < 1e-10
    assert max(abs(m.energy(z) - m.energy(y)) for z in traj.ys) < 1e-10
    assert traj.max_symplectic < 1e-8


def test_torus_frame_is_lagrangian():
    m = LocalModel(3, 4)
    y = np.array([1, 1j, -0.5, 2 + 1j])
    assert np.abs(symplectic_products(torus_adapted_frame(m, y))).max() < 1e-14


def test_phase_of_frame_rules():
    m = LocalModel(2, 3)
    y = np.array([0.6 + 0.8j, 1.2, -0.3j])
    fr = torus_adapted_frame(m, y)
    base = phase_of_frame(m, fr, y)
    assert abs(abs(base) - 1) < 1e-14
    # multiplying every vector by i multiplies the squared volume by i^(2(n+1))
    assert abs(phase_of_frame(m, 1j * fr, y) / base - (-1) ** 3) < 1e-12
    scaled = fr.copy()
    scaled[0] *= np.exp(0.3j)
    assert abs(phase_of_frame(m, scaled, y) / base - np.exp(0.6j)) < 1e-12
    with pytest.raises(DegenerateFrameError):
        phase_of_frame(m, np.vstack([fr[:2], fr[:1]]), y)


def test_phase_lift_rejects_jumps():
    s = PhaseSample()
    s.push(0.0, 1.0)
    s.push(0.1, np.exp(0.2j))
    assert s.final == pytest.approx(0.2 / (2 * math.pi))
    with pytest.raises(PhaseLiftError):
        s.push(0.2, -1.0)


def test_phase_term_example():
    m = LocalModel(2, 3)
    rep = verify_phase_term(m, [1, 2, 2], T=0.2, dt=1e-5)
    # (1 + 1/4 + 1/4)^{-1} = 2/3 of 2T / 2 pi
    assert rep.predicted == pytest.approx(2 / 3 * 0.4 / (2 * math.pi))
    assert rep.deviation < 1e-8


def test_phase_term_against_exact_pushforward():
    # second route: the phase of the exactly transported frame
    m = LocalModel(3, 3)
    y = np.array([0.8 + 0.3j, 1.1j, 0.5 - 0.5j, 0.4])
    fr = torus_adapted_frame(m, y)
    T, steps = 1.0, 200
    lift = PhaseSample()
    for i in range(steps + 1):
        t = T * i / steps
        yt = exact_flow(m, y, t)
        lift.push(t, phase_of_frame(m, exact_pushforward(m, y, fr, t), yt))
    rep = verify_phase_term(m, y, T=T)
    assert lift.final == pytest.approx(rep.measured, abs=1e-7)
    assert lift.final == pytest.approx(rep.predicted, abs=1e-7)


@pytest.mark.slow
def test_phase_term_sweep():
    reports = phase_term_sweep()
    assert len(reports) == 10
    assert all(r.ok for r in reports)
    assert max(r.deviation for r in reports) < 1e-4


def test_fiber_frame_spans_kernel():
    m = LocalModel(3, 3)
    y = fiber_point(m, 0.7 + 0.2j)
    assert m.p(y) == pytest.approx(0.7 + 0.2j)
    h = 1e-7
    for v in fiber_frame(m, y):
        dp = (m.p(y + h * v) - m.p(y - h * v)) / (2 * h)
        assert abs(dp) < 1e-7
    assert np.abs(symplectic_products(fiber_frame(m, y))).max() < 1e-14
    assert abs(abs(fiber_phase(m, fiber_frame(m, y), y)) - 1) < 1e-12


def test_probe_zero_loops():
    p = monodromy_phase_probe(LocalModel(2, 2), 1.0, 0)
    assert p.measured == 0.0 and p.closed_form == 0.0


def test_probe_matches_closed_form_and_doubles():
    m = LocalModel(2, 3)
    one = monodromy_phase_probe(m, 0.8, 1)
    two = monodromy_phase_probe(m, 0.8, 2)
    assert one.measured == pytest.approx(one.closed_form, abs=1e-8)
    assert two.measured == pytest.approx(2 * one.measured, abs=1e-8)
    assert one.fiber_drift < 1e-9
    assert one.below_bound and two.below_bound
    assert one.as_dict()["status"] == "probe"


def test_singularity_guard():
    m = LocalModel(2, 2)
    with pytest.raises(SingularityError):
        hamiltonian_field(m, [0, 1, 1])
    with pytest.raises(ValueError):
        integrate_flow(m, FlowState(np.ones(3), np.eye(3)), 1.0, dt=0.1)
    with pytest.raises(ValueError):
        fiber_point(m, 0)


def test_csv_output(tmp_path):
    m = LocalModel(1, 2)
    y = np.array([1.0, 1j])
    traj = integrate_flow(
        m, FlowState(y, torus_adapted_frame(m, y)), 0.01, dt=1e-3,
        phase_fn=lambda fr, yy, t: phase_of_frame(m, fr, yy),
    )
    path = write_trajectory_csv(traj, str(tmp_path / "t.csv"))
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["t", "re_y1", "im_y1", "re_y2", "im_y2", "phase"]
    assert len(rows) == 12
    assert float(rows[1][0]) == 0.0
