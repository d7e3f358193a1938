"""Fixed-step closed-loop simulation, logging and error metrics."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import plant as _plant
from .control import Controller, ControllerSpec, reaching_metric
from .plant import NO_FAULT, NO_UNCERTAINTY, FaultSpec, ModelParams, UncertaintySpec
from .planner import BlendedPath, JointReference, LinearPath, paper_path, sample_joint_reference

COLUMNS = ("t", "qd1", "qd2", "q1", "q2", "e1", "e2", "tau1", "tau2", "s1", "s2",
           "khat1", "khat2", "xref", "yref", "x", "y", "eps")


class SimulationDiverged(FloatingPointError):
    def __init__(self, step: int, t: float, last_record: Optional[dict]):
        self.step = step
        self.t = t
        self.last_record = last_record
        super().__init__(f"non-finite state at control step {step} (t={t:.6g}); "
                         f"last logged record: {last_record}")


@dataclass(frozen=True)
class SimConfig:
    """Run settings.

    ``dt`` is the logging/sampling period. The controller and the plant
    integrator both run at ``dt / substeps`` (torque held over each
    sub-step), which keeps the paper's high-gain laws stable.
    """

    dt: float = 0.001
    T: float = 3.0
    integrator: str = "rk4"
    substeps: int = 50
    q0: tuple[float, float] = (0.3, 0.3)
    qd0: tuple[float, float] = (0.0, 0.0)
    enable_uncertainty: bool = True
    enable_fault: bool = True
    coriolis_mode: str = "paper"
    scale: float = 0.1
    planning: str = "none"
    t_b: float = 0.1
    elbow: str = "up"

    def __post_init__(self):
        object.__setattr__(self, "q0", tuple(float(v) for v in self.q0))
        object.__setattr__(self, "qd0", tuple(float(v) for v in self.qd0))
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.T >= self.dt:
            raise ValueError(f"T must be at least dt, got T={self.T}, dt={self.dt}")
        if abs(self.T / self.dt - round(self.T / self.dt)) > 1e-6:
            raise ValueError(f"T/dt must be an integer, got {self.T / self.dt}")
        if self.integrator not in ("euler", "rk4"):
            raise ValueError(f"integrator must be 'euler' or 'rk4', got {self.integrator!r}")
        if int(self.substeps) != self.substeps or self.substeps < 1:
            raise ValueError(f"substeps must be a positive integer, got {self.substeps}")
        object.__setattr__(self, "substeps", int(self.substeps))
        if self.coriolis_mode not in _plant.CORIOLIS_MODES:
            raise ValueError(f"coriolis_mode must be one of {sorted(_plant.CORIOLIS_MODES)}")
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale}")
        if self.planning not in ("none", "parabolic"):
            raise ValueError(f"planning must be 'none' or 'parabolic', got {self.planning!r}")
        if not self.t_b > 0:
            raise ValueError(f"t_b must be positive, got {self.t_b}")
        if self.elbow not in ("up", "down"):
            raise ValueError(f"elbow must be 'up' or 'down', got {self.elbow!r}")
        if not all(math.isfinite(v) for v in self.q0 + self.qd0):
            raise ValueError("initial state must be finite")

    @property
    def n_records(self) -> int:
        return int(round(self.T / self.dt)) + 1

    @property
    def h(self) -> float:
        return self.dt / self.substeps


@dataclass
class SimLog:
    """Per-record time series; ``data`` columns follow :data:`COLUMNS`."""

    data: np.ndarray
    qdot: np.ndarray
    controller: str = ""

    def column(self, name: str) -> np.ndarray:
        return self.data[:, COLUMNS.index(name)]

    def columns(self, *names: str) -> np.ndarray:
        return self.data[:, [COLUMNS.index(n) for n in names]]

    @property
    def t(self) -> np.ndarray:
        return self.column("t")

    def __len__(self) -> int:
        return len(self.data)

    def record(self, k: int) -> dict:
        return dict(zip(COLUMNS, self.data[k].tolist()))


@dataclass(frozen=True)
class Metrics:
    e1_rms: float
    e2_rms: float
    eps_rms: float
    reaching_time: Optional[float] = None


def build_path(config: SimConfig, base: Optional[LinearPath] = None):
    base = paper_path() if base is None else base
    if config.planning == "parabolic":
        return BlendedPath(base, config.t_b)
    return base


def build_reference(config: SimConfig, params: ModelParams,
                    base: Optional[LinearPath] = None) -> JointReference:
    """Joint reference for ``config`` sampled at the control period."""
    path = build_path(config, base)
    if abs(path.duration - config.T) > 1e-9:
        raise ValueError(f"path lasts {path.duration} s but T={config.T}")
    return sample_joint_reference(path, params, config.scale, config.h, config.elbow)


def run(config: SimConfig, params: ModelParams, uspec: UncertaintySpec, fspec: FaultSpec,
        reference: JointReference, spec: ControllerSpec) -> SimLog:
    sub = config.substeps
    h = config.h
    n_rec = config.n_records
    n_ctrl = (n_rec - 1) * sub
    if abs(reference.dt - h) > 1e-12 or len(reference) != n_ctrl + 1:
        raise ValueError(f"reference must hold {n_ctrl + 1} samples every {h} s, "
                         f"got {len(reference)} every {reference.dt} s")
    uspec = uspec if config.enable_uncertainty else NO_UNCERTAINTY
    fspec = fspec if config.enable_fault else NO_FAULT
    plant = _plant.kernel(params, uspec, fspec, config.coriolis_mode)
    ctrl = Controller(spec, params, config.coriolis_mode)
    rk4 = config.integrator == "rk4"
    L1, L2 = params.L1, params.L2

    rq, rqd, rqdd = reference.q.tolist(), reference.qd.tolist(), reference.qdd.tolist()
    rth, rxy = reference.theta.tolist(), reference.xy.tolist()
    data = np.empty((n_rec, len(COLUMNS)))
    qdot = np.empty((n_rec, 2))
    q1, q2 = config.q0
    v1, v2 = config.qd0
    row = 0
    for j in range(n_ctrl + 1):
        t = j * h
        r1, r2 = rq[j]
        rd1, rd2 = rqd[j]
        rdd1, rdd2 = rqdd[j]
        u1, u2, s1, s2 = ctrl.step(q1, q2, v1, v2, r1, r2, rd1, rd2, rdd1, rdd2, rth[j], h)
        if j % sub == 0:
            a, b = q1, q1 + q2
            K = ctrl.state.K_hat
            data[row] = (row * config.dt, r1, r2, q1, q2, q1 - r1, q2 - r2, u1, u2, s1, s2,
                         K[0], K[1], rxy[j][0], rxy[j][1],
                         L1 * math.cos(a) + L2 * math.cos(b), L1 * math.sin(a) + L2 * math.sin(b),
                         ctrl.eps)
            qdot[row] = (v1, v2)
            row += 1
        if j == n_ctrl:
            break
        q1, q2, v1, v2 = plant.step(t, q1, q2, v1, v2, u1, u2, h, rk4)
        if not (math.isfinite(q1) and math.isfinite(q2) and math.isfinite(v1)
                and math.isfinite(v2) and math.isfinite(u1) and math.isfinite(u2)):
            last = dict(zip(COLUMNS, data[row - 1].tolist())) if row else None
            raise SimulationDiverged(j, t, last)
    return SimLog(data, qdot, spec.kind)


def rms_error(values) -> float:
    """sqrt(mean(|v_k|^2)) over the series (vector entries use the Euclidean norm)."""
    v = np.asarray(values, dtype=float)
    if v.size == 0 or len(v) == 0:
        raise ValueError("rms_error needs a non-empty series")
    sq = v * v if v.ndim == 1 else np.sum(v * v, axis=tuple(range(1, v.ndim)))
    return math.sqrt(float(np.sum(sq)) / len(v))


def metrics(log: SimLog, tol: float = 0.05) -> Metrics:
    if len(log) == 0:
        raise ValueError("empty log")
    return Metrics(rms_error(log.column("e1")), rms_error(log.column("e2")),
                   rms_error(log.column("eps")),
                   reaching_metric(log.t, log.columns("s1", "s2"), tol))


@dataclass(frozen=True)
class Scenario:
    """Everything a comparison run shares besides the controller."""

    config: SimConfig = field(default_factory=SimConfig)
    params: ModelParams = field(default_factory=ModelParams)
    uncertainty: UncertaintySpec = field(default_factory=UncertaintySpec)
    fault: FaultSpec = field(default_factory=FaultSpec)
    path: Optional[LinearPath] = None

    def with_planning(self, planning: str) -> "Scenario":
        return replace(self, config=replace(self.config, planning=planning))

    def reference(self) -> JointReference:
        return build_reference(self.config, self.params, self.path)

    def run(self, spec: ControllerSpec, reference: Optional[JointReference] = None) -> SimLog:
        ref = self.reference() if reference is None else reference
        return run(self.config, self.params, self.uncertainty, self.fault, ref, spec)


class RunError(RuntimeError):
    pass


def _run_one(args):
    scenario, spec, reference = args
    try:
        return scenario.run(spec, reference)
    except Exception as exc:
        raise RunError(f"{spec.label} (planning={scenario.config.planning}): {exc}") from exc


def compare(scenario: Scenario, specs: Sequence[ControllerSpec], workers: int = 1,
            keep_logs: bool = False):
    """Run every controller on the same scenario.

    Returns a list of ``(label, Metrics)`` in declaration order, plus the logs
    when ``keep_logs`` is set.
    """
    reference = scenario.reference()
    jobs = [(scenario, spec, reference) for spec in specs]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            logs = list(pool.map(_run_one, jobs))
    else:
        logs = [_run_one(job) for job in jobs]
    table = [(spec.label, metrics(log)) for spec, log in zip(specs, logs)]
    return (table, logs) if keep_logs else table
