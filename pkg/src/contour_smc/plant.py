"""Planar two-link arm: dynamics, kinematics, uncertainty and fault models.

Joint angles are measured from the +x axis (joint 1) and relative to link 1
(joint 2); gravity acts along -y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from ._backend import CHRISTOFFEL, PAPER, Plant

CORIOLIS_MODES = {"paper": PAPER, "christoffel": CHRISTOFFEL}


class Unreachable(ValueError):
    """Cartesian point outside the annulus the arm can reach."""

    def __init__(self, point, radius, r_min, r_max, t=None):
        self.point = tuple(point)
        self.radius = radius
        self.r_min = r_min
        self.r_max = r_max
        self.t = t
        where = "" if t is None else f" at t={t:g}"
        super().__init__(
            f"point ({point[0]:g}, {point[1]:g}){where} has |p|={radius:.6g}, "
            f"outside reach [{r_min:.6g}, {r_max:.6g}]"
        )


@dataclass(frozen=True)
class ModelParams:
    m1: float = 1.0
    m2: float = 1.0
    L1: float = 0.2
    L2: float = 0.2
    r1: float = 0.1
    r2: float = 0.1
    I1: float = 0.64
    I2: float = 0.16
    g: float = 9.8

    def __post_init__(self):
        for name in ("m1", "m2", "L1", "L2", "r1", "r2", "I1", "I2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v}")
        # g = 0 is allowed for gravity-free sanity runs
        if not (math.isfinite(self.g) and self.g >= 0):
            raise ValueError(f"g must be non-negative and finite, got {self.g}")
        if self.r1 > self.L1:
            raise ValueError(f"r1={self.r1} exceeds L1={self.L1}")
        if self.r2 > self.L2:
            raise ValueError(f"r2={self.r2} exceeds L2={self.L2}")

    @property
    def reach(self) -> tuple[float, float]:
        return abs(self.L1 - self.L2), self.L1 + self.L2


@dataclass
class JointState:
    q: np.ndarray
    qd: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float).reshape(2)
        self.qd = np.asarray(self.qd, dtype=float).reshape(2)
        if not (np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.qd))):
            raise FloatingPointError(f"non-finite joint state q={self.q}, qd={self.qd}")


def _pair(v) -> tuple[float, float]:
    a, b = v
    return (float(a), float(b))


@dataclass(frozen=True)
class UncertaintySpec:
    """phi_i = a_i*qd_i + b_i*sin(c_i*q_i) + d_i*sin(qd_i)."""

    a: tuple[float, float] = (0.5, 1.3)
    b: tuple[float, float] = (1.0, -1.8)
    c: tuple[float, float] = (3.0, 2.0)
    d: tuple[float, float] = (0.5, 1.1)
    enabled: bool = True

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, _pair(getattr(self, name)))
        if min(self.c) <= 0:
            raise ValueError(f"uncertainty frequencies c must be > 0, got {self.c}")

    def coefficients(self) -> tuple[float, ...]:
        if not self.enabled:
            return (0.0,) * 8
        return (self.a[0], self.b[0], self.c[0], self.d[0],
                self.a[1], self.b[1], self.c[1], self.d[1])


@dataclass(frozen=True)
class FaultSpec:
    """Joint-1 actuator fault gamma_1(t) * (A sin(q1 q2) + B cos(qd1 q2) + C cos(qd1 qd2))."""

    t_f: float = 1.5
    sigma: tuple[float, float] = (10.0, 10.0)
    A: float = 30.0
    B: float = 4.0
    C: float = 15.0
    enabled: bool = True

    def __post_init__(self):
        object.__setattr__(self, "sigma", _pair(self.sigma))
        if min(self.sigma) <= 0:
            raise ValueError(f"fault evolution rates sigma must be > 0, got {self.sigma}")
        if self.t_f < 0:
            raise ValueError(f"fault onset t_f must be >= 0, got {self.t_f}")


NO_UNCERTAINTY = UncertaintySpec(enabled=False)
NO_FAULT = FaultSpec(enabled=False)


@lru_cache(maxsize=64)
def kernel(params: ModelParams, uspec: UncertaintySpec = NO_UNCERTAINTY,
           fspec: FaultSpec = NO_FAULT, coriolis: str = "paper") -> Plant:
    """Backend plant object for the given model; cached, treat as immutable."""
    try:
        mode = CORIOLIS_MODES[coriolis]
    except KeyError:
        raise ValueError(f"unknown coriolis mode {coriolis!r}") from None
    p = params
    return Plant(p.m1, p.m2, p.L1, p.L2, p.r1, p.r2, p.I1, p.I2, p.g, mode,
                 uspec.coefficients(), fspec.enabled, fspec.t_f,
                 fspec.sigma[0], fspec.sigma[1], fspec.A, fspec.B, fspec.C)


def mass_matrix(params: ModelParams, q: Sequence[float]) -> np.ndarray:
    m11, m12, m22 = kernel(params).mass(float(q[0]), float(q[1]))
    return np.array([[m11, m12], [m12, m22]])


def coriolis_matrix(params: ModelParams, q, qd, mode: str = "paper") -> np.ndarray:
    """Coriolis/centripetal matrix B(q, qd).

    ``mode="paper"`` reproduces the printed two-link entries; ``"christoffel"``
    gives the Christoffel-symbol form for which dM/dt - 2B is skew-symmetric.
    """
    b11, b12, b21, b22 = kernel(params, coriolis=mode).coriolis(
        float(q[0]), float(q[1]), float(qd[0]), float(qd[1]))
    return np.array([[b11, b12], [b21, b22]])


def gravity_vector(params: ModelParams, q) -> np.ndarray:
    return np.array(kernel(params).gravity(float(q[0]), float(q[1])))


def gravity_bound(params: ModelParams) -> float:
    p = params
    return (p.m1 * p.r1 + p.m2 * p.L1 + 2 * p.m2 * p.r2) * p.g


def potential_energy(params: ModelParams, q) -> float:
    p = params
    return ((p.m1 * p.r1 + p.m2 * p.L1) * p.g * math.sin(q[0])
            + p.m2 * p.r2 * p.g * math.sin(q[0] + q[1]))


def kinetic_energy(params: ModelParams, q, qd) -> float:
    qd = np.asarray(qd, dtype=float)
    return 0.5 * float(qd @ mass_matrix(params, q) @ qd)


def lumped_uncertainty(spec: UncertaintySpec, q, qd) -> np.ndarray:
    a, b, c, d = spec.a, spec.b, spec.c, spec.d
    if not spec.enabled:
        return np.zeros(2)
    return np.array([a[i] * qd[i] + b[i] * math.sin(c[i] * q[i]) + d[i] * math.sin(qd[i])
                     for i in range(2)])


def fault_time_profile(spec: FaultSpec, t: float) -> np.ndarray:
    """Per-joint activation gamma_i(t): 0 before onset, 1 - exp(-sigma_i (t - t_f)) after."""
    if t < spec.t_f:
        return np.zeros(2)
    return np.array([1.0 - math.exp(-s * (t - spec.t_f)) for s in spec.sigma])


def fault_torque(spec: FaultSpec, t: float, q, qd) -> np.ndarray:
    if not spec.enabled:
        return np.zeros(2)
    gamma = fault_time_profile(spec, t)
    shape = (spec.A * math.sin(q[0] * q[1]) + spec.B * math.cos(qd[0] * q[1])
             + spec.C * math.cos(qd[0] * qd[1]))
    return np.array([gamma[0] * shape, 0.0])


def forward_dynamics(params: ModelParams, uspec: UncertaintySpec, fspec: FaultSpec,
                     state: JointState, tau, t: float = 0.0,
                     coriolis: str = "paper") -> np.ndarray:
    """Joint accelerations M^-1 (tau + f - B qd - G - phi)."""
    q, qd = state.q, state.qd
    tau = np.asarray(tau, dtype=float)
    if not np.all(np.isfinite(tau)) or not math.isfinite(t):
        raise FloatingPointError(f"non-finite torque or time: tau={tau}, t={t}")
    k = kernel(params, uspec, fspec, coriolis)
    return np.array(k.accel(float(t), q[0], q[1], qd[0], qd[1], float(tau[0]), float(tau[1])))


def forward_kinematics(params: ModelParams, q) -> np.ndarray:
    q1, q12 = q[0], q[0] + q[1]
    return np.array([params.L1 * math.cos(q1) + params.L2 * math.cos(q12),
                     params.L1 * math.sin(q1) + params.L2 * math.sin(q12)])


def jacobian(params: ModelParams, q) -> np.ndarray:
    L1, L2 = params.L1, params.L2
    s1, c1 = math.sin(q[0]), math.cos(q[0])
    s12, c12 = math.sin(q[0] + q[1]), math.cos(q[0] + q[1])
    return np.array([[-L1 * s1 - L2 * s12, -L2 * s12],
                     [L1 * c1 + L2 * c12, L2 * c12]])


def wrap_angle(a: float) -> float:
    """Map an angle to (-pi, pi]; -pi goes to pi."""
    r = math.fmod(a, 2 * math.pi)
    if r <= -math.pi:
        r += 2 * math.pi
    elif r > math.pi:
        r -= 2 * math.pi
    return r


def inverse_kinematics(params: ModelParams, p, elbow: str = "up", tol: float = 1e-9) -> np.ndarray:
    """Closed-form IK. ``elbow="up"`` picks q2 in [0, pi], ``"down"`` q2 in [-pi, 0]."""
    if elbow not in ("up", "down"):
        raise ValueError(f"elbow must be 'up' or 'down', got {elbow!r}")
    x, y = float(p[0]), float(p[1])
    L1, L2 = params.L1, params.L2
    r = math.hypot(x, y)
    r_min, r_max = params.reach
    if r < r_min - tol or r > r_max + tol:
        raise Unreachable((x, y), r, r_min, r_max)
    c2 = (r * r - L1 * L1 - L2 * L2) / (2 * L1 * L2)
    c2 = min(1.0, max(-1.0, c2))
    q2 = math.acos(c2)
    if elbow == "down":
        q2 = -q2
    q1 = math.atan2(y, x) - math.atan2(L2 * math.sin(q2), L1 + L2 * math.cos(q2))
    return np.array([wrap_angle(q1), q2])
