import json
import os
import subprocess
import sys

_PROBE = r"""
import json

import numpy as np

from sodsim._accel import NUMBA_ENABLED
from sodsim.core import RngHandle
from sodsim.experiments import grid_minimize_theta
from sodsim.isotonic import pava

rng = RngHandle(77, 0).generator()
v = rng.standard_normal(500)
w = rng.random(500) + 0.5
X = rng.standard_normal((300, 2))
y = X @ np.array([0.28, 0.96]) + 0.3 * rng.standard_normal(300)
theta, u = grid_minimize_theta(X, y, 0.01)
print(json.dumps({
    "numba": NUMBA_ENABLED,
    "pava": pava(v, w).tolist(),
    "theta": theta,
    "u": u.tolist(),
}))
"""


def _run(disable: str):
    env = dict(os.environ, SODSIM_DISABLE_NUMBA=disable)
    out = subprocess.run([sys.executable, "-c", _PROBE], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def test_fallback_backend_matches_numba():
    fast = _run("0")
    slow = _run("1")
    assert slow["numba"] is False
    assert fast["pava"] == slow["pava"]
    assert fast["theta"] == slow["theta"]
    assert fast["u"] == slow["u"]
