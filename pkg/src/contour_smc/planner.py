"""Cartesian reference paths and their conversion to joint setpoints."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .plant import ModelParams, Unreachable, inverse_kinematics


class OutOfDomain(ValueError):
    pass


@dataclass(frozen=True)
class Segment:
    t_start: float
    t_end: float
    p_start: tuple[float, float]
    p_end: tuple[float, float]

    @property
    def velocity(self) -> np.ndarray:
        return (np.subtract(self.p_end, self.p_start)) / (self.t_end - self.t_start)

    @property
    def heading(self) -> float:
        return math.atan2(self.p_end[1] - self.p_start[1], self.p_end[0] - self.p_start[0])


@dataclass(frozen=True)
class LinearPath:
    """Constant-velocity segments, contiguous in time and space."""

    segments: tuple[Segment, ...]

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise ValueError("path needs at least one segment")
        for k, s in enumerate(segs):
            if not s.t_end > s.t_start:
                raise ValueError(f"segment {k}: t_end must exceed t_start")
            if k and (s.t_start != segs[k - 1].t_end or s.p_start != segs[k - 1].p_end):
                raise ValueError(f"segment {k} is not contiguous with segment {k - 1}")

    @classmethod
    def from_waypoints(cls, times: Sequence[float], points: Sequence[Sequence[float]]) -> "LinearPath":
        if len(times) != len(points) or len(times) < 2:
            raise ValueError("need matching times and points, at least two of each")
        pts = [(float(p[0]), float(p[1])) for p in points]
        return cls(tuple(Segment(float(times[k]), float(times[k + 1]), pts[k], pts[k + 1])
                         for k in range(len(pts) - 1)))

    @property
    def t0(self) -> float:
        return self.segments[0].t_start

    @property
    def duration(self) -> float:
        return self.segments[-1].t_end

    @property
    def waypoints(self) -> list[tuple[float, float]]:
        return [s.p_start for s in self.segments] + [self.segments[-1].p_end]

    def segment_at(self, t: float) -> Segment:
        # junction times belong to the earlier segment
        for s in self.segments:
            if t <= s.t_end:
                return s
        return self.segments[-1]


@dataclass(frozen=True)
class BlendedPath:
    """Linear path whose interior corners are replaced by constant-acceleration blends.

    Each blend spans ``[T_k - t_b, T_k + t_b]`` around junction time ``T_k``
    and matches position and velocity of the adjoining segments at both ends.
    """

    base: LinearPath
    t_b: float = 0.1

    def __post_init__(self):
        if not self.t_b > 0:
            raise ValueError(f"blend half-duration must be positive, got {self.t_b}")
        durations = [s.t_end - s.t_start for s in self.base.segments]
        for k in range(len(durations) - 1):
            limit = 0.5 * min(durations[k], durations[k + 1])
            if self.t_b > limit + 1e-12:
                raise ValueError(f"t_b={self.t_b} exceeds half of segment duration "
                                 f"({limit}) at junction {k}")

    @property
    def duration(self) -> float:
        return self.base.duration


Path = Union[LinearPath, BlendedPath]


def paper_path() -> LinearPath:
    """Closed triangle (3,1) -> (1,3) -> (1,1) -> (3,1) over 3 s."""
    return LinearPath.from_waypoints([0.0, 1.0, 2.0, 3.0],
                                     [(3.0, 1.0), (1.0, 3.0), (1.0, 1.0), (3.0, 1.0)])


def _eval_linear(path: LinearPath, t: float):
    s = path.segment_at(t)
    v = s.velocity
    p = np.asarray(s.p_start) + v * (t - s.t_start)
    return p, v, np.zeros(2), s.heading


def eval(path: Path, t: float):
    """Return ``(position, velocity, acceleration, tangent angle)`` at time ``t``."""
    base = path.base if isinstance(path, BlendedPath) else path
    if not (base.t0 <= t <= base.duration):
        raise OutOfDomain(f"t={t} outside [{base.t0}, {base.duration}]")
    if isinstance(path, LinearPath):
        return _eval_linear(path, t)
    t_b = path.t_b
    segs = base.segments
    for k in range(len(segs) - 1):
        tj = segs[k].t_end
        if tj - t_b < t < tj + t_b:
            v_in, v_out = segs[k].velocity, segs[k + 1].velocity
            acc = (v_out - v_in) / (2 * t_b)
            tau = t - (tj - t_b)
            p_edge = np.asarray(segs[k].p_end) - v_in * t_b
            p = p_edge + v_in * tau + 0.5 * acc * tau * tau
            v = v_in + acc * tau
            if np.any(v):
                theta = math.atan2(v[1], v[0])
            else:
                theta = segs[k].heading
            return p, v, acc, theta
    return _eval_linear(base, t)


@dataclass(frozen=True)
class JointReference:
    """Joint setpoints sampled every ``dt`` from ``t = 0``.

    Arrays are shaped ``(n, 2)`` except ``theta`` and ``xy`` (the scaled
    Cartesian reference point, ``(n, 2)``).
    """

    dt: float
    q: np.ndarray
    qd: np.ndarray
    qdd: np.ndarray
    theta: np.ndarray
    xy: np.ndarray

    def __len__(self) -> int:
        return len(self.theta)

    @property
    def t(self) -> np.ndarray:
        return np.arange(len(self)) * self.dt


def sample_times(duration: float, dt: float) -> np.ndarray:
    n = int(round(duration / dt))
    if abs(n * dt - duration) > 1e-9 * max(1.0, duration):
        raise ValueError(f"duration {duration} is not a multiple of dt={dt}")
    t = np.arange(n + 1) * dt
    t[-1] = duration
    return t


def sample_joint_reference(path: Path, params: ModelParams, scale: float = 0.1,
                           dt: float = 0.001, elbow: str = "up") -> JointReference:
    """Scale the path, map every sample through IK and difference the result."""
    if not scale > 0:
        raise ValueError(f"scale must be positive, got {scale}")
    times = sample_times(path.duration, dt)
    n = len(times)
    q = np.empty((n, 2))
    xy = np.empty((n, 2))
    theta = np.empty(n)
    for k, t in enumerate(times):
        p, _, _, th = eval(path, t)
        xy[k] = p * scale
        theta[k] = th
        try:
            q[k] = inverse_kinematics(params, xy[k], elbow)
        except Unreachable as exc:
            raise Unreachable(exc.point, exc.radius, exc.r_min, exc.r_max, t=float(t)) from None
    q = np.unwrap(q, axis=0)
    qd = np.empty_like(q)
    qdd = np.empty_like(q)
    if n == 1:
        qd[:] = 0.0
        qdd[:] = 0.0
    else:
        qd[1:-1] = (q[2:] - q[:-2]) / (2 * dt)
        qd[0] = (q[1] - q[0]) / dt
        qd[-1] = (q[-1] - q[-2]) / dt
        if n >= 3:
            qdd[1:-1] = (q[2:] - 2 * q[1:-1] + q[:-2]) / (dt * dt)
            qdd[0] = qdd[1]
            qdd[-1] = qdd[-2]
        else:
            qdd[:] = 0.0
    return JointReference(dt, q, qd, qdd, theta, xy)


def check_reachable(path: Path, params: ModelParams, scale: float, dt: float = 0.001,
                    tol: float = 1e-9) -> None:
    """Raise Unreachable naming the first waypoint or sample outside the workspace."""
    r_min, r_max = params.reach
    base = path.base if isinstance(path, BlendedPath) else path
    for k, p in enumerate(base.waypoints):
        x, y = p[0] * scale, p[1] * scale
        r = math.hypot(x, y)
        if r < r_min - tol or r > r_max + tol:
            exc = Unreachable((x, y), r, r_min, r_max)
            exc.args = (f"waypoint {k} {exc}",)
            raise exc
    for t in sample_times(path.duration, dt):
        p = eval(path, t)[0] * scale
        r = math.hypot(p[0], p[1])
        if r < r_min - tol or r > r_max + tol:
            raise Unreachable(p, r, r_min, r_max, t=float(t))
