import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from dcmwalk.errors import NonPositivePressure
from dcmwalk.spatial import (FrameId, Transform, Wrench6, cop_of_wrench, rotation_rpy,
                             transform_wrench, wrench_transform_matrix, zmp_on_plane)

angles = st.floats(-3.0, 3.0)
coords = st.floats(-2.0, 2.0)
vec3s = st.tuples(coords, coords, coords).map(np.array)


def pose(rpy, t):
    return Transform.from_pose(t, *rpy)


@given(angles, angles, angles)
def test_rotation_matches_extrinsic_xyz(roll, pitch, yaw):
    ref = Rotation.from_euler("xyz", [roll, pitch, yaw]).as_matrix()
    assert np.allclose(rotation_rpy(roll, pitch, yaw), ref, atol=1e-12)


@given(st.tuples(angles, angles, angles), vec3s, vec3s)
def test_inverse_round_trip(rpy, t, p):
    X = pose(rpy, t)
    assert np.allclose(X.inverse().apply(X.apply(p)), p, atol=1e-9)
    I = X.compose(X.inverse())
    assert np.allclose(I.rotation, np.eye(3), atol=1e-9)
    assert np.allclose(I.translation, 0.0, atol=1e-9)


@given(st.tuples(angles, angles, angles), vec3s, st.tuples(angles, angles, angles), vec3s, vec3s)
def test_compose_applies_right_first(rpy1, t1, rpy2, t2, p):
    A, B = pose(rpy1, t1), pose(rpy2, t2)
    assert np.allclose(A.compose(B).apply(p), A.apply(B.apply(p)), atol=1e-9)


def test_rejects_improper_rotation():
    with pytest.raises(ValueError):
        Transform(np.diag([1.0, 1.0, -1.0]), np.zeros(3))
    with pytest.raises(ValueError):
        Transform(np.eye(3), [np.nan, 0.0, 0.0])


def test_yaw_extraction():
    assert Transform.from_pose([0, 0, 0], yaw=0.7).yaw == pytest.approx(0.7)


@given(st.tuples(angles, angles, angles), vec3s, vec3s, vec3s, vec3s, vec3s)
@settings(max_examples=200)
def test_wrench_transform_preserves_power(rpy, t, f, tau, v, w):
    # power of a wrench on a rigid twist is frame independent
    X = pose(rpy, t)
    wr = Wrench6(f, tau, FrameId.LEFT_SOLE)
    out = transform_wrench(wr, X, FrameId.WORLD)
    # twist (v at source origin, w) expressed in the target frame
    w_t = X.rotation @ w
    v_t = X.rotation @ v - np.cross(w_t, X.translation)
    p_src = f @ v + tau @ w
    p_tgt = out.force @ v_t + out.torque @ w_t
    assert p_tgt == pytest.approx(p_src, abs=1e-8)
    assert np.allclose(wrench_transform_matrix(X) @ wr.vector(), out.vector(), atol=1e-12)


def test_wrench_addition_requires_same_frame():
    a = Wrench6.zero(FrameId.LEFT_SOLE)
    with pytest.raises(ValueError):
        a + Wrench6.zero(FrameId.RIGHT_SOLE)
    with pytest.raises(ValueError):
        Wrench6([np.inf, 0, 0], [0, 0, 0])


def test_cop_of_point_force():
    # a pure normal force at (0.03, -0.02) in the sole frame
    p, fz = np.array([0.03, -0.02, 0.0]), 300.0
    w = Wrench6([0, 0, fz], np.cross(p, [0, 0, fz]), FrameId.LEFT_SOLE)
    assert np.allclose(cop_of_wrench(w), p)
    with pytest.raises(NonPositivePressure):
        cop_of_wrench(Wrench6([0, 0, 0], [0, 0, 0]))


@given(vec3s, st.floats(1.0, 1000.0), coords, coords, st.floats(-0.5, 0.5))
def test_zmp_has_no_tilting_moment(f, fz, px, py, height):
    f = np.array([f[0], f[1], fz])
    p = np.array([px, py, height])
    tau_z = 0.3
    w = Wrench6(f, np.cross(p, f) + [0.0, 0.0, tau_z])
    z = zmp_on_plane(w, height)
    moment = w.torque - np.cross(z, w.force)
    assert np.allclose(moment[:2], 0.0, atol=1e-8)
    assert z[2] == height
