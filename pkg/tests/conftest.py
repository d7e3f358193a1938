import numpy as np
import pytest
from hypothesis import settings

from contour_smc import sim
from contour_smc.control import CONTROLLERS, ControllerSpec
from contour_smc.plant import ModelParams

settings.register_profile("ci", deadline=None, max_examples=200)
settings.load_profile("ci")


@pytest.fixture(scope="session")
def params():
    return ModelParams()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def benchmark_logs():
    """Logs of all four controllers on the default scenario, both planning modes."""
    out = {}
    for planning in ("none", "parabolic"):
        sc = sim.Scenario().with_planning(planning)
        ref = sc.reference()
        for kind in CONTROLLERS:
            out[kind, planning] = sc.run(ControllerSpec(kind=kind), ref)
    return out
