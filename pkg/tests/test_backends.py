import os
import subprocess
import sys

import numpy as np
import pytest

from celsteer import kernels
from celsteer._accel import HAVE_NUMBA

SCRIPT = """
import numpy as np
from celsteer import BACKEND
from celsteer.oracle import OracleConfig, simulate_covariance
from celsteer.dynamics import char_poly, hurwitz_determinants
k = np.array([[-1.0, 0.4, 0.0], [-0.4, -2.0, 0.3], [0.0, -0.3, -0.5]])
b = np.diag([1.0, 0.5, 0.2])
res = simulate_covariance(k, b, OracleConfig(seed=3, n_trajectories=100, n_steps=3000))
a = char_poly(k, exact=False)
print(BACKEND)
print(repr(res.estimate.tolist()))
print(repr(hurwitz_determinants(a, exact=False).tolist()))
"""


def _run(disable):
    env = dict(os.environ)
    env["CELSTEER_DISABLE_NUMBA"] = "1" if disable else "0"
    out = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True, text=True,
                         check=True).stdout.splitlines()
    return out[0], np.array(eval(out[1])), np.array(eval(out[2]))


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")
def test_backends_agree():
    name_np, est_np, h_np = _run(True)
    name_nb, est_nb, h_nb = _run(False)
    assert (name_np, name_nb) == ("numpy", "numba")
    assert np.allclose(est_np, est_nb, rtol=1e-11, atol=0)
    assert np.allclose(h_np, h_nb, rtol=1e-12)


def test_em_forms_agree_in_process():
    rng = np.random.default_rng(0)
    k = -np.eye(4) + 0.1 * rng.normal(size=(4, 4))
    b = np.eye(4)
    dw = rng.normal(size=(3, 50, 4))
    outs = []
    for fn in (kernels._em_advance_loop, kernels._em_advance_vec):
        x = np.zeros((3, 4))
        acc = np.zeros((3, 4, 4))
        fn(x, k, b, dw, 0.01, 10, acc)
        outs.append(acc)
    assert np.allclose(outs[0], outs[1], rtol=1e-12)


def test_float_faddeev_leverrier_matches_numpy_poly():
    k = np.diag([-1.0, -2.0, -3.0]) + 0.1
    assert np.allclose(kernels._faddeev_leverrier_py(k), np.poly(k), rtol=1e-12)
