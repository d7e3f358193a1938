import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from contour_smc import planner
from contour_smc.planner import BlendedPath, LinearPath, OutOfDomain, Segment
from contour_smc.plant import Unreachable, forward_kinematics, inverse_kinematics


@pytest.fixture(scope="module")
def path():
    return planner.paper_path()


@pytest.fixture(scope="module")
def blended(path):
    return BlendedPath(path, 0.1)


def test_paper_path_waypoints(path):
    np.testing.assert_allclose(planner.eval(path, 0.0)[0], (3, 1))
    np.testing.assert_allclose(planner.eval(path, 1.5)[0], (1, 2))
    np.testing.assert_allclose(planner.eval(path, 3.0)[0], (3, 1))
    assert path.duration == 3.0


def test_linear_eval_first_segment(path):
    p, v, a, theta = planner.eval(path, 0.5)
    np.testing.assert_allclose(p, (2, 2))
    np.testing.assert_allclose(v, (-2, 2))
    np.testing.assert_array_equal(a, (0, 0))
    assert theta == pytest.approx(3 * math.pi / 4)


def test_junction_belongs_to_earlier_segment(path):
    np.testing.assert_allclose(planner.eval(path, 1.0)[1], (-2, 2))


@pytest.mark.parametrize("t", [-1e-9, 3.0 + 1e-9])
def test_eval_out_of_domain(path, blended, t):
    for p in (path, blended):
        with pytest.raises(OutOfDomain):
            planner.eval(p, t)


def test_linear_path_validation():
    with pytest.raises(ValueError, match="contiguous"):
        LinearPath((Segment(0, 1, (0, 0), (1, 0)), Segment(1, 2, (2, 0), (3, 0))))
    with pytest.raises(ValueError, match="t_end"):
        LinearPath((Segment(0, 0, (0, 0), (1, 0)),))
    with pytest.raises(ValueError):
        LinearPath(())


def test_blend_half_width_limit(path):
    BlendedPath(path, 0.5)
    with pytest.raises(ValueError, match="t_b"):
        BlendedPath(path, 0.51)
    with pytest.raises(ValueError):
        BlendedPath(path, 0.0)


def test_blend_is_local(path, blended):
    for t in np.linspace(0, 3, 3001):
        if min(abs(t - 1.0), abs(t - 2.0)) >= 0.1:
            a, b = planner.eval(path, t), planner.eval(blended, t)
            np.testing.assert_array_equal(a[0], b[0])
            np.testing.assert_array_equal(a[1], b[1])
            assert a[3] == b[3]


def test_blend_matches_edges(path, blended):
    for tj in (1.0, 2.0):
        for edge in (tj - 0.1, tj + 0.1):
            p, v = planner.eval(blended, edge)[:2]
            np.testing.assert_allclose(p, planner.eval(path, edge)[0], atol=1e-14)
            lin_v = planner.eval(path, edge + (1e-9 if edge > tj else 0))[1]
            np.testing.assert_allclose(v, lin_v, atol=1e-12)


def test_blend_velocity_jump_bound(path, blended):
    dt, t_b = 0.001, 0.1
    dv = np.linalg.norm(np.array([0.0, -2.0]) - np.array([-2.0, 2.0]))
    ts = np.arange(900, 1101) * dt
    vb = np.array([planner.eval(blended, t)[1] for t in ts])
    vl = np.array([planner.eval(path, t)[1] for t in ts])
    assert np.max(np.linalg.norm(np.diff(vb, axis=0), axis=1)) <= dv * dt / (2 * t_b) * 1.01
    assert np.max(np.linalg.norm(np.diff(vl, axis=0), axis=1)) == pytest.approx(dv)


def test_blend_continuity_scan(blended):
    dt = 0.001
    ts = planner.sample_times(3.0, dt)
    ev = [planner.eval(blended, t) for t in ts]
    p = np.array([e[0] for e in ev])
    v = np.array([e[1] for e in ev])
    a = np.array([e[2] for e in ev])
    vmax = np.max(np.linalg.norm(v, axis=1))
    amax = np.max(np.linalg.norm(a, axis=1))
    assert np.max(np.linalg.norm(np.diff(p, axis=0), axis=1)) <= vmax * dt * 1.01
    assert np.max(np.linalg.norm(np.diff(v, axis=0), axis=1)) <= amax * dt * 1.01


@pytest.mark.parametrize("which", ["linear", "blended"])
def test_tangent_angle_normal_to_velocity(path, blended, which):
    p = path if which == "linear" else blended
    for t in np.linspace(0, 3, 601):
        _, v, _, theta = planner.eval(p, t)
        vhat = v / np.linalg.norm(v)
        assert abs(-math.sin(theta) * vhat[0] + math.cos(theta) * vhat[1]) < 1e-12


def test_sample_count_and_start(params, path):
    ref = planner.sample_joint_reference(path, params, 0.1, 0.001)
    assert len(ref) == 3001
    np.testing.assert_allclose(ref.xy[0], (0.3, 0.1))
    np.testing.assert_allclose(ref.q[0], inverse_kinematics(params, (0.3, 0.1)))
    np.testing.assert_allclose(forward_kinematics(params, ref.q[0]), (0.3, 0.1), atol=1e-9)


def test_reference_derivative_self_consistency(params, blended):
    dt = 0.001
    ref = planner.sample_joint_reference(blended, params, 0.1, dt)
    central = (ref.q[2:] - ref.q[:-2]) / (2 * dt)
    assert np.max(np.abs(central - ref.qd[1:-1])) <= 1e-8
    second = (ref.q[2:] - 2 * ref.q[1:-1] + ref.q[:-2]) / dt ** 2
    assert np.max(np.abs(second - ref.qdd[1:-1])) <= 1e-6


def test_reference_matches_analytic_rates(params, path):
    # away from corners the FD rates approach J^-1 v
    dt = 0.001
    ref = planner.sample_joint_reference(path, params, 0.1, dt)
    for k in (250, 1500, 2600):
        J = np.array([[-0.2 * math.sin(ref.q[k, 0]) - 0.2 * math.sin(ref.q[k].sum()),
                       -0.2 * math.sin(ref.q[k].sum())],
                      [0.2 * math.cos(ref.q[k, 0]) + 0.2 * math.cos(ref.q[k].sum()),
                       0.2 * math.cos(ref.q[k].sum())]])
        v = planner.eval(path, k * dt)[1] * 0.1
        np.testing.assert_allclose(ref.qd[k], np.linalg.solve(J, v), rtol=1e-5)


def test_constant_path_has_zero_rates(params):
    still = LinearPath.from_waypoints([0, 1, 2], [(2, 1), (2, 1), (2, 1)])
    ref = planner.sample_joint_reference(still, params, 0.1, 0.01)
    assert not np.any(ref.qd[1:-1]) and not np.any(ref.qdd[1:-1])


def test_unreachable_sample_names_time(params):
    far = LinearPath.from_waypoints([0, 1], [(0.3, 0.0), (0.5, 0.0)])
    with pytest.raises(Unreachable) as info:
        planner.sample_joint_reference(far, params, 1.0, 0.01)
    assert info.value.t == pytest.approx(0.5, abs=0.011)


def test_check_reachable_names_waypoint(params, path):
    with pytest.raises(Unreachable, match="waypoint 0"):
        planner.check_reachable(path, params, 0.2)
    planner.check_reachable(path, params, 0.1)


def test_sample_times_rejects_fractional_grid():
    with pytest.raises(ValueError):
        planner.sample_times(1.0, 0.3)


@given(x=st.floats(0.5, 2.0), y=st.floats(0.5, 2.0), dur=st.floats(0.5, 2.0))
def test_single_segment_eval_is_linear(x, y, dur):
    p = LinearPath.from_waypoints([0, dur], [(1.0, 1.0), (x, y)])
    mid = planner.eval(p, dur / 2)[0]
    np.testing.assert_allclose(mid, ((1 + x) / 2, (1 + y) / 2), rtol=1e-12)
