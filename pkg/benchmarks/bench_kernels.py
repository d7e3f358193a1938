"""Compare the compiled and pure-Python kernel backends.

Each measurement runs in a fresh interpreter so that ``CONTOUR_SMC_PURE``
takes effect at import. Usage::

    python3 benchmarks/bench_kernels.py [--steps N] [--repeat R]
"""

import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import json, sys, time
from contour_smc import _backend as kb
from contour_smc.config import parse_text
from contour_smc.control import ControllerSpec, SlidingParams
from contour_smc.plant import FaultSpec, ModelParams, UncertaintySpec, kernel

steps, repeat = int(sys.argv[1]), int(sys.argv[2])

plant = kernel(ModelParams(), UncertaintySpec(), FaultSpec())
sliding = SlidingParams().kernel()

def best(fn):
    out = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return min(out)

def rk4_loop():
    q1, q2, v1, v2 = 0.3, 0.3, 0.0, 0.0
    for i in range(steps):
        q1, q2, v1, v2 = plant.step(i * 2e-5, q1, q2, v1, v2, 1.0, 0.5, 2e-5, True)

def law_loop():
    for i in range(steps):
        sliding.torque(plant, 0.3, 0.3, 0.1, -0.1, 0.29, 0.31, 0.0, 0.0, 0.0, 0.0,
                       0.0, 0.0, 50.0, 165.0)

cfg = parse_text("defaults paper\n")
c = cfg.controller
spec = ControllerSpec("antsmc", c.pid, c.sliding, c.ccc, c.k_bound)
scenario = cfg.scenario("none")
ref = scenario.reference()
res = {
    "backend": kb.BACKEND,
    "rk4_step_us": best(rk4_loop) / steps * 1e6,
    "torque_us": best(law_loop) / steps * 1e6,
    "paper_run_s": best(lambda: scenario.run(spec, ref)) if repeat else None,
}
print(json.dumps(res))
"""


def measure(pure: bool, steps: int, repeat: int) -> dict:
    env = dict(os.environ, CONTOUR_SMC_PURE="1" if pure else "0")
    out = subprocess.run([sys.executable, "-c", CHILD, str(steps), str(repeat)],
                         env=env, check=True, capture_output=True, text=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    fast = measure(False, args.steps, args.repeat)
    slow = measure(True, args.steps, args.repeat)
    if fast["backend"] != "compiled":
        print("note: compiled extension not available; both rows use the fallback")
    print(f"{'metric':<14} {fast['backend']:>12} {slow['backend']:>12} {'speedup':>8}")
    for key, label in (("rk4_step_us", "rk4 step us"), ("torque_us", "torque us"),
                       ("paper_run_s", "ANTSMC run s")):
        print(f"{label:<14} {fast[key]:12.4g} {slow[key]:12.4g} {slow[key] / fast[key]:8.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
