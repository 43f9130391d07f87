import os
import subprocess
import sys

import numpy as np
import pytest

from fbmac import _kernels_py, kernels


def loop_reference(xi, z, w1, w2, a1, a2, b1, b2):
    """Sample-by-sample loop with scalar arithmetic."""
    n, eta = z.shape
    out = np.zeros((3, n, eta))
    for s in range(n):
        v1, v2 = [], []
        for l in range(eta):
            x1 = a1[l] * xi[s, 0] + sum(b1[l, j] * v1[j] for j in range(l))
            x2 = a2[l] * xi[s, 1] + sum(b2[l, j] * v2[j] for j in range(l))
            y = x1 + x2 + z[s, l]
            v1.append(y + w1[s, l])
            v2.append(y + w2[s, l])
            out[:, s, l] = x1, x2, y
    return out


def loop_inputs(rng, n, eta):
    xi = rng.normal(size=(n, 2))
    z, w1, w2 = (rng.normal(size=(n, eta)) for _ in range(3))
    a1, a2 = rng.normal(size=eta), rng.normal(size=eta)
    b1 = np.tril(0.3 * rng.normal(size=(eta, eta)), -1)
    b2 = np.tril(0.3 * rng.normal(size=(eta, eta)), -1)
    return xi, z, w1, w2, a1, a2, b1, b2


@pytest.mark.parametrize("eta", [1, 2, 5])
def test_feedback_loop_matches_scalar_reference(kernel_module, eta):
    args = loop_inputs(np.random.default_rng(eta), 50, eta)
    got = np.array(kernel_module.feedback_loop(*args))
    assert np.allclose(got, loop_reference(*args), rtol=1e-13, atol=1e-13)


def test_backends_agree_on_long_blocks(kernel_module):
    args = loop_inputs(np.random.default_rng(50), 2000, 16)
    ref = np.array(_kernels_py.feedback_loop(*args))
    got = np.array(kernel_module.feedback_loop(*args))
    assert np.max(np.abs(got - ref)) <= 1e-12 * np.max(np.abs(ref))


def test_min_dual_bound(kernel_module):
    rng = np.random.default_rng(51)
    b = rng.uniform(0, 2, size=(300, 13))
    v = rng.uniform(0, 1, size=(20, 13))
    want = np.array([min(float(vv @ bb) for vv in v) for bb in b])
    assert np.allclose(kernel_module.min_dual_bound(b, v), want, rtol=1e-14, atol=1e-14)


def test_dispatch_names_a_known_backend():
    assert kernels.BACKEND in ("python", "cython")
    if kernels.BACKEND == "python":
        assert kernels.feedback_loop is _kernels_py.feedback_loop


def test_environment_forces_numpy_route():
    code = "from fbmac import kernels; print(kernels.BACKEND)"
    env = {**os.environ, "FBMAC_PURE_PYTHON": "1"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
