import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from dcmwalk.errors import EmptyPlan, OutOfPhase
from dcmwalk.pattern import (Foot, Footstep, FootstepPlan, LinearMpc, MpcParams, PhaseKind,
                             PhaseSchedule, build_phases, mpc_generate, point_in_polygon,
                             pressure_ratio, support_polygon, swing_trajectory,
                             triple_integrator, zmp_reference)
from dcmwalk.spatial import Transform

OMEGA = 3.546395786840927


def step(foot, x, y, z=0.0, yaw=0.0):
    return Footstep(Transform.from_pose([x, y, z], yaw=yaw), foot)


def two_step_plan(**kw):
    return FootstepPlan(step(Foot.LEFT, 0, 0.09), step(Foot.RIGHT, 0, -0.09),
                        (step(Foot.RIGHT, 0.2, -0.09), step(Foot.LEFT, 0.2, 0.09)), **kw)


@pytest.fixture(scope="module")
def walk_pattern():
    return mpc_generate(two_step_plan(), MpcParams(OMEGA), apex_height=0.05)


def test_phase_sequence():
    phases = build_phases(two_step_plan())
    kinds = [p.kind for p in phases]
    S, D, SS = PhaseKind.STANDING, PhaseKind.DOUBLE_SUPPORT, PhaseKind.SINGLE_SUPPORT
    assert kinds == [S, D, SS, D, SS, D, S]
    for a, b in zip(phases, phases[1:]):
        assert b.t_start == pytest.approx(a.t_end)
    assert phases[-1].t_end == pytest.approx(1.0 + 0.2 + 2 * 1.6 + 2.0)
    # the right foot swings first, so the load moves to the left foot
    assert phases[1].rho_end == 1.0
    assert phases[2].swing_foot is Foot.RIGHT
    assert phases[-2].rho_end == 0.5


def test_plan_validation():
    with pytest.raises(ValueError):
        FootstepPlan(step(Foot.LEFT, 0, 0.09), step(Foot.RIGHT, 0, -0.09),
                     (step(Foot.RIGHT, 0.2, -0.09), step(Foot.RIGHT, 0.4, -0.09)))
    with pytest.raises(ValueError):
        FootstepPlan(step(Foot.RIGHT, 0, 0.09), step(Foot.RIGHT, 0, -0.09))
    with pytest.raises(EmptyPlan):
        build_phases(FootstepPlan(step(Foot.LEFT, 0, 0.09), step(Foot.RIGHT, 0, -0.09),
                                  initial_standing=0.0))
    with pytest.raises(EmptyPlan):
        PhaseSchedule([])


@given(st.floats(0.0, 1.0))
def test_pressure_ratio_interpolates(s):
    ds = build_phases(two_step_plan())[3]
    t = ds.t_start + s * ds.duration
    rho = pressure_ratio(ds, t)
    assert rho == pytest.approx((1 - s) * ds.rho_init + s * ds.rho_end)
    assert 0.0 <= rho <= 1.0


def test_pressure_ratio_out_of_phase():
    phases = build_phases(two_step_plan())
    with pytest.raises(OutOfPhase):
        pressure_ratio(phases[2], phases[2].t_start)
    with pytest.raises(OutOfPhase):
        pressure_ratio(phases[1], phases[1].t_end + 0.1)


def test_schedule_boundary_sides():
    phases = build_phases(two_step_plan())
    sched = PhaseSchedule(phases)
    t = phases[2].t_start
    assert sched.index_at(t, "left") == 1
    assert sched.index_at(t, "right") == 2
    assert sched.index_at(1e6) == len(phases) - 1


def test_zmp_reference_continuous():
    phases = build_phases(two_step_plan())
    ref = zmp_reference(phases)
    for p in phases[1:]:
        assert np.allclose(ref(p.t_start - 1e-9), ref(p.t_start), atol=1e-6)


def test_support_polygon_single_and_double():
    phases = build_phases(two_step_plan())
    G, h = support_polygon(phases[2])
    assert point_in_polygon(G, h, [0.0, 0.09])
    assert not point_in_polygon(G, h, [0.0, -0.09])
    G, h = support_polygon(phases[0])
    assert point_in_polygon(G, h, [0.0, 0.0])
    Gm, hm = support_polygon(phases[0], margin=0.02)
    assert not point_in_polygon(Gm, hm, [0.112 - 0.01, 0.09])


@given(st.floats(0.1, 2.0))
def test_triple_integrator_is_exact(T):
    Ac = np.zeros((4, 4))
    Ac[0, 1] = Ac[1, 2] = Ac[2, 3] = 1.0
    E = expm(Ac * T)
    A, B = triple_integrator(T)
    assert np.allclose(A, E[:3, :3], atol=1e-12)
    assert np.allclose(B, E[:3, 3], atol=1e-12)


def swing_case():
    return (Transform.from_pose([0.0, -0.09, 0.0]), Transform.from_pose([0.24, -0.09, 0.185],
                                                                         yaw=0.2), 0.24, 1.4)


def test_swing_endpoints_and_apex():
    a, b, apex, T = swing_case()
    s0 = swing_trajectory(a, b, apex, T, 0.0)
    s1 = swing_trajectory(a, b, apex, T, T)
    mid = swing_trajectory(a, b, apex, T, T / 2)
    assert np.allclose(s0.pose.translation, a.translation)
    assert np.allclose(s1.pose.translation, b.translation)
    assert s1.pose.yaw == pytest.approx(0.2)
    assert np.allclose(s0.velocity, 0) and np.allclose(s1.velocity, 0)
    assert mid.pose.translation[2] == pytest.approx(0.185 + apex)
    # no horizontal motion before the window opens
    early = swing_trajectory(a, b, apex, T, 0.2 * T)
    assert np.allclose(early.pose.translation[:2], a.translation[:2])
    with pytest.raises(OutOfPhase):
        swing_trajectory(a, b, apex, T, T + 0.1)


@given(st.floats(0.01, 1.39))
def test_swing_derivatives_match_finite_differences(t):
    a, b, apex, T = swing_case()
    h = 1e-6
    lo = swing_trajectory(a, b, apex, T, max(t - h, 0.0))
    hi = swing_trajectory(a, b, apex, T, min(t + h, T))
    span = min(t + h, T) - max(t - h, 0.0)
    mid = swing_trajectory(a, b, apex, T, t)
    fd = (hi.pose.translation - lo.pose.translation) / span
    assert np.allclose(mid.velocity, fd, atol=1e-4)
    fda = (hi.velocity - lo.velocity) / span
    if abs(t - T / 2) > 1e-3:
        assert np.allclose(mid.acceleration, fda, atol=1e-2)


def test_mpc_terminal_constraints_from_rest():
    phases = build_phases(two_step_plan())
    sched = PhaseSchedule(phases)
    mpc = LinearMpc(MpcParams(OMEGA), sched, zmp_reference(phases), np.zeros(3))
    _, _, rec = mpc.solve(1.0, np.zeros(3), np.zeros(3))
    assert rec.terminal_dcm_error < 1e-6
    assert rec.terminal_zmp_error < 1e-6
    assert rec.min_polygon_slack >= -1e-9


def test_mpc_matches_cvxpy(walk_pattern):
    import cvxpy as cp
    phases = build_phases(two_step_plan())
    mpc = LinearMpc(MpcParams(OMEGA), PhaseSchedule(phases), zmp_reference(phases),
                    np.array([0.05, 0.0, 0.0]))
    # mid double support, from a state the pattern actually visits
    k = 220
    sx = np.array([walk_pattern.com[k, 0], walk_pattern.comd[k, 0], walk_pattern.comdd[k, 0]])
    sy = np.array([walk_pattern.com[k, 1], walk_pattern.comd[k, 1], walk_pattern.comdd[k, 1]])
    problem, _, _ = mpc.build_problem(1.1, sx, sy)
    jx, jy, _ = mpc.solve(1.1, sx, sy)
    x = cp.Variable(problem.g.size)
    obj = 0.5 * cp.quad_form(x, cp.psd_wrap(problem.H)) + problem.g @ x
    cons = [problem.A_eq @ x == problem.b_eq, problem.A_ineq @ x <= problem.b_ineq]
    cp.Problem(cp.Minimize(obj), cons).solve(solver=cp.CLARABEL)
    ours = problem.objective(np.concatenate([jx, jy]))
    ref = problem.objective(x.value)
    assert ours <= ref + 1e-6 * max(1.0, abs(ref))


def test_pattern_consistency(walk_pattern):
    p = walk_pattern
    assert np.allclose(p.dcm[:, :2], p.com[:, :2] + p.comd[:, :2] / OMEGA)
    assert np.allclose(p.zmp[:, :2], p.com[:, :2] - p.comdd[:, :2] / OMEGA ** 2)
    # receding horizon: the final DCM settles near, not exactly on, the goal
    assert np.allclose(p.dcm[-1, :2], p.zmp_ideal[-1, :2], atol=1e-3)
    for rec in p.mpc_records:
        assert rec.terminal_dcm_error < 1e-6 and rec.terminal_zmp_error < 1e-6
        assert rec.min_polygon_slack >= -1e-9


def test_pattern_zmp_inside_support(walk_pattern):
    p = walk_pattern
    for k in range(len(p)):
        G, h = support_polygon(p.phase(k))
        assert point_in_polygon(G, h, p.zmp[k], tol=1e-6), k


def test_pattern_swing_foot_samples(walk_pattern):
    p = walk_pattern
    k = int(np.argmax(p.foot_pos[Foot.RIGHT][:, 2]))
    assert p.phase(k).swing_foot is Foot.RIGHT
    assert p.foot_pos[Foot.RIGHT][k, 2] == pytest.approx(0.05, abs=1e-3)
    assert np.allclose(p.foot_pos[Foot.RIGHT][-1], [0.2, -0.09, 0.0])
