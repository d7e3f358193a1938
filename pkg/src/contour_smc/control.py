"""PID, NTSMC, ANTSMC and cross-coupled ANTSMC controllers.

Error convention throughout: ``e = q - q_d``. The sliding-mode laws share one
kernel (``Sliding.torque``); they differ only in the additive lumped-term
estimate ``K`` and the switching gain ``k`` they hand it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from . import plant as _plant
from ._backend import Sliding, kernels
from .plant import ModelParams

CONTROLLERS = ("pid", "ntsmc", "antsmc", "ccc-antsmc")
LABELS = {"pid": "PID", "ntsmc": "NTSMC", "antsmc": "ANTSMC", "ccc-antsmc": "CCC-ANTSMC"}


def _diag2(v) -> tuple[float, float]:
    v = np.asarray(v, dtype=float)
    if v.shape == (2, 2):
        v = np.diag(v)
    a, b = np.broadcast_to(v, (2,))
    return (float(a), float(b))


def _is_odd_int(x) -> bool:
    return float(x).is_integer() and int(x) > 0 and int(x) % 2 == 1


@dataclass(frozen=True)
class SlidingParams:
    """Gains of the terminal sliding surface and the (adaptive) switching law.

    Diagonal matrices are stored as their two diagonal entries.
    """

    c1: tuple[float, float] = (10.0, 10.0)
    c2: tuple[float, float] = (10.0, 13.5)
    alpha: int = 5
    beta: int = 3
    eta: tuple[float, float] = (0.5, 0.5)
    nu: tuple[float, float] = (50.0, 165.0)
    xi: float = 10.0
    eps_reg: float = 1e-6
    allow_paper_exponents: bool = False

    def __post_init__(self):
        for name in ("c1", "c2", "eta", "nu"):
            object.__setattr__(self, name, _diag2(getattr(self, name)))
        if min(self.c1) <= 0 or min(self.c2) <= 0:
            raise ValueError(f"c1, c2 must be positive, got c1={self.c1}, c2={self.c2}")
        if not (_is_odd_int(self.alpha) and _is_odd_int(self.beta)):
            raise ValueError(f"alpha and beta must be positive odd integers, "
                             f"got alpha={self.alpha}, beta={self.beta}")
        object.__setattr__(self, "alpha", int(self.alpha))
        object.__setattr__(self, "beta", int(self.beta))
        r = self.ratio
        if not self.allow_paper_exponents and not (1.0 < r < 2.0):
            raise ValueError(f"alpha/beta = {self.alpha}/{self.beta} = {r:.4g} violates "
                             f"1 < alpha/beta < 2 (set allow_paper_exponents to accept it)")
        if min(self.eta) <= 0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if min(self.nu) < 0:
            raise ValueError(f"nu must be non-negative, got {self.nu}")
        if not self.xi > 0:
            raise ValueError(f"xi must be positive, got {self.xi}")
        if not self.eps_reg > 0:
            raise ValueError(f"eps_reg must be positive, got {self.eps_reg}")

    @property
    def ratio(self) -> float:
        return self.alpha / self.beta

    def kernel(self) -> Sliding:
        return _sliding_kernel(self)


@lru_cache(maxsize=32)
def _sliding_kernel(sp: SlidingParams) -> Sliding:
    return Sliding(sp.c1[0], sp.c1[1], sp.c2[0], sp.c2[1], sp.ratio,
                   sp.eta[0], sp.eta[1], sp.eps_reg)


@dataclass(frozen=True)
class PidGains:
    Kp: tuple[float, float] = (4500.0, 4500.0)
    Ki: tuple[float, float] = (150.0, 150.0)
    Kd: tuple[float, float] = (650.0, 650.0)

    def __post_init__(self):
        for name in ("Kp", "Ki", "Kd"):
            v = _diag2(getattr(self, name))
            if min(v) < 0:
                raise ValueError(f"PID gain {name} must be non-negative, got {v}")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class CccGains:
    Kp_c: float = 500.0
    Kd_c: float = 100.0
    sign: float = -1.0

    def __post_init__(self):
        if self.Kp_c < 0 or self.Kd_c < 0:
            raise ValueError(f"contour gains must be non-negative, got Kp={self.Kp_c}, Kd={self.Kd_c}")


@dataclass
class ControllerState:
    integral: np.ndarray = field(default_factory=lambda: np.zeros(2))
    K_hat: np.ndarray = field(default_factory=lambda: np.zeros(2))
    eps_prev: float = 0.0
    initialized: bool = False

    def copy(self) -> "ControllerState":
        return replace(self, integral=self.integral.copy(), K_hat=self.K_hat.copy())


# -- scalar building blocks ---------------------------------------------------

def signed_pow(x: float, p: float) -> float:
    """sgn(x) * |x|**p."""
    if p <= 0:
        raise ValueError(f"exponent must be positive, got {p}")
    return kernels.signed_pow(float(x), float(p))


def sliding_manifold(e, edot, sp: SlidingParams) -> np.ndarray:
    return np.array(sp.kernel().surface(float(e[0]), float(e[1]),
                                        float(edot[0]), float(edot[1])))


def manifold_derivative_gain(e, sp: SlidingParams) -> np.ndarray:
    """Coefficient of edot in ds/dt, with |e| floored at eps_reg in negative-power factors."""
    return np.array(sp.kernel().gain(float(e[0]), float(e[1])))


def pid_torque(gains: PidGains, state: ControllerState, e, edot, dt: float) -> np.ndarray:
    """Rectangle-rule PID; updates ``state.integral`` in place."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    e = np.asarray(e, dtype=float)
    edot = np.asarray(edot, dtype=float)
    state.integral = state.integral + e * dt
    state.initialized = True
    return -(np.multiply(gains.Kp, e) + np.multiply(gains.Ki, state.integral)
             + np.multiply(gains.Kd, edot))


def _nominal(params: ModelParams, coriolis: str):
    return _plant.kernel(params, coriolis=coriolis)


def ntsmc_torque(params: ModelParams, sp: SlidingParams, K_bound, q, qd, q_d, qd_d, qdd_d,
                 coriolis: str = "paper") -> np.ndarray:
    """Fixed-gain law with switching gain ``K_bound + nu``.

    The lumped term itself is not estimated, so its additive slot is zero.
    """
    kb = _diag2(K_bound)
    u1, u2, _, _ = sp.kernel().torque(
        _nominal(params, coriolis), float(q[0]), float(q[1]), float(qd[0]), float(qd[1]),
        float(q_d[0]), float(q_d[1]), float(qd_d[0]), float(qd_d[1]),
        float(qdd_d[0]), float(qdd_d[1]), 0.0, 0.0, kb[0] + sp.nu[0], kb[1] + sp.nu[1])
    return np.array([u1, u2])


def _adapt(nominal, sp: SlidingParams, q1, q2, s1, s2, K1, K2, h):
    """One explicit-Euler step of dK/dt = xi * M^-T s."""
    m11, m12, m22 = nominal.mass(q1, q2)
    det = m11 * m22 - m12 * m12
    w1 = (m22 * s1 - m12 * s2) / det
    w2 = (m11 * s2 - m12 * s1) / det
    return K1 + h * sp.xi * w1, K2 + h * sp.xi * w2


def _antsmc(nominal, sp: SlidingParams, K1, K2, q1, q2, v1, v2,
            r1, r2, rd1, rd2, rdd1, rdd2, h):
    sk = sp.kernel()
    s1, s2 = sk.surface(q1 - r1, q2 - r2, v1 - rd1, v2 - rd2)
    K1, K2 = _adapt(nominal, sp, q1, q2, s1, s2, K1, K2, h)
    norm = math.hypot(K1, K2)
    u1, u2, s1, s2 = sk.torque(nominal, q1, q2, v1, v2, r1, r2, rd1, rd2, rdd1, rdd2,
                               K1, K2, norm + sp.nu[0], norm + sp.nu[1])
    return u1, u2, s1, s2, K1, K2


def antsmc_step(params: ModelParams, sp: SlidingParams, state: ControllerState, q, qd,
                ref, dt: float, coriolis: str = "paper"):
    """Adaptive NTSMC: update K_hat, then apply the law with k_hat = |K_hat| + nu.

    ``ref`` is ``(q_d, qd_d, qdd_d)``. Returns ``(torque, new_state)``.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    q_d, qd_d, qdd_d = ref
    u1, u2, _, _, K1, K2 = _antsmc(
        _nominal(params, coriolis), sp, float(state.K_hat[0]), float(state.K_hat[1]),
        float(q[0]), float(q[1]), float(qd[0]), float(qd[1]), float(q_d[0]), float(q_d[1]),
        float(qd_d[0]), float(qd_d[1]), float(qdd_d[0]), float(qdd_d[1]), dt)
    new = state.copy()
    new.K_hat = np.array([K1, K2])
    new.initialized = True
    return np.array([u1, u2]), new


def contour_error(e_c, theta: float) -> float:
    """Signed normal component of a Cartesian error relative to a line at angle theta."""
    return -math.sin(theta) * e_c[0] + math.cos(theta) * e_c[1]


def cartesian_error(J, e_q) -> np.ndarray:
    return np.asarray(J, dtype=float) @ np.asarray(e_q, dtype=float)


def rectifier_gains(theta: float, J) -> np.ndarray:
    """Row C = [-sin(theta), cos(theta)] J mapping joint error to contour error."""
    return np.array([-math.sin(theta), math.cos(theta)]) @ np.asarray(J, dtype=float)


def _rectifier(L1, L2, q1, q2, theta):
    s1, c1 = math.sin(q1), math.cos(q1)
    s12, c12 = math.sin(q1 + q2), math.cos(q1 + q2)
    nx, ny = -math.sin(theta), math.cos(theta)
    return (nx * (-L1 * s1 - L2 * s12) + ny * (L1 * c1 + L2 * c12),
            nx * (-L2 * s12) + ny * (L2 * c12))


def _ccc(params: ModelParams, ccc: CccGains, state_eps_prev, first, q1, q2, e1, e2, theta, h):
    C1, C2 = _rectifier(params.L1, params.L2, q1, q2, theta)
    eps = C1 * e1 + C2 * e2
    eps_dot = 0.0 if first else (eps - state_eps_prev) / h
    drive = ccc.sign * (ccc.Kp_c * eps + ccc.Kd_c * eps_dot)
    return C1 * drive, C2 * drive, eps


def ccc_antsmc_step(params: ModelParams, sp: SlidingParams, ccc: CccGains,
                    state: ControllerState, q, qd, ref, dt: float, coriolis: str = "paper"):
    """ANTSMC plus contour feedback ``sign * C^T (Kp eps + Kd deps/dt)``.

    ``ref`` is ``(q_d, qd_d, qdd_d, theta)``. Returns ``(torque, new_state)``.
    """
    q_d, qd_d, qdd_d, theta = ref
    tau, new = antsmc_step(params, sp, state, q, qd, (q_d, qd_d, qdd_d), dt, coriolis)
    du1, du2, eps = _ccc(params, ccc, state.eps_prev, not state.initialized,
                         float(q[0]), float(q[1]), float(q[0] - q_d[0]), float(q[1] - q_d[1]),
                         float(theta), dt)
    new.eps_prev = eps
    return tau + np.array([du1, du2]), new


def reaching_metric(t, s, tol: float = 0.05, hold: int = 50) -> Optional[float]:
    """Earliest time after which max|s| stays below ``tol`` for ``hold`` samples."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float).reshape(len(t), -1)
    below = np.max(np.abs(s), axis=1) < tol
    run = 0
    for k in range(len(below) - 1, -1, -1):
        run = run + 1 if below[k] else 0
        below[k] = run >= hold
    hits = np.flatnonzero(below)
    return float(t[hits[0]]) if hits.size else None


# -- stateful controllers used by the simulator --------------------------------

@dataclass(frozen=True)
class ControllerSpec:
    kind: str = "ccc-antsmc"
    pid: PidGains = PidGains()
    sliding: SlidingParams = SlidingParams()
    ccc: CccGains = CccGains()
    k_bound: tuple[float, float] = (25.0, 25.0)

    def __post_init__(self):
        if self.kind not in CONTROLLERS:
            raise ValueError(f"unknown controller {self.kind!r}; choose from {', '.join(CONTROLLERS)}")
        kb = _diag2(self.k_bound)
        if min(kb) < 0:
            raise ValueError(f"k_bound must be non-negative, got {kb}")
        object.__setattr__(self, "k_bound", kb)

    @property
    def label(self) -> str:
        return LABELS[self.kind]


class Controller:
    """Stateful controller stepped once per control period.

    ``step`` returns ``(tau1, tau2, s1, s2)``; ``s`` is the sliding variable
    evaluated with the run's sliding parameters (logged for every controller,
    including PID, as a common diagnostic). After a step, ``eps`` holds the
    contour error at the step's state.
    """

    def __init__(self, spec: ControllerSpec, params: ModelParams, coriolis: str = "paper"):
        self.spec = spec
        self.params = params
        self.nominal = _nominal(params, coriolis)
        self._sliding = spec.sliding.kernel()
        self.state = ControllerState()
        self._k = (spec.k_bound[0] + spec.sliding.nu[0], spec.k_bound[1] + spec.sliding.nu[1])
        self.eps = 0.0

    @property
    def name(self) -> str:
        return self.spec.kind

    def reset(self):
        self.state = ControllerState()
        self.eps = 0.0

    def step(self, q1, q2, v1, v2, r1, r2, rd1, rd2, rdd1, rdd2, theta, h):
        kind = self.spec.kind
        st = self.state
        e1, e2 = q1 - r1, q2 - r2
        if kind == "pid":
            g = self.spec.pid
            i1 = st.integral[0] + e1 * h
            i2 = st.integral[1] + e2 * h
            st.integral = np.array([i1, i2])
            ed1, ed2 = v1 - rd1, v2 - rd2
            # PID on top of nominal gravity compensation
            gr1, gr2 = self.nominal.gravity(q1, q2)
            u1 = gr1 - (g.Kp[0] * e1 + g.Ki[0] * i1 + g.Kd[0] * ed1)
            u2 = gr2 - (g.Kp[1] * e2 + g.Ki[1] * i2 + g.Kd[1] * ed2)
            s1, s2 = self._sliding.surface(e1, e2, ed1, ed2)
        elif kind == "ntsmc":
            u1, u2, s1, s2 = self._sliding.torque(
                self.nominal, q1, q2, v1, v2, r1, r2, rd1, rd2, rdd1, rdd2,
                0.0, 0.0, self._k[0], self._k[1])
        else:
            u1, u2, s1, s2, K1, K2 = _antsmc(
                self.nominal, self.spec.sliding, st.K_hat[0], st.K_hat[1],
                q1, q2, v1, v2, r1, r2, rd1, rd2, rdd1, rdd2, h)
            st.K_hat = np.array([K1, K2])
        C1, C2 = _rectifier(self.params.L1, self.params.L2, q1, q2, theta)
        eps = C1 * e1 + C2 * e2
        if kind == "ccc-antsmc":
            du1, du2, eps = _ccc(self.params, self.spec.ccc, st.eps_prev, not st.initialized,
                                 q1, q2, e1, e2, theta, h)
            u1 += du1
            u2 += du2
            st.eps_prev = eps
        st.initialized = True
        self.eps = eps
        return u1, u2, s1, s2


def controller_torque_at_rest(spec: ControllerSpec, params: ModelParams, q: Sequence[float],
                              coriolis: str = "paper") -> np.ndarray:
    """Torque from a fresh controller handed zero error, zero velocity and zero reference rates."""
    c = Controller(spec, params, coriolis)
    u1, u2, _, _ = c.step(q[0], q[1], 0.0, 0.0, q[0], q[1], 0.0, 0.0, 0.0, 0.0, 0.0, 1e-3)
    return np.array([u1, u2])
