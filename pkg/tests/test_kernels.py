import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cdk import _kernels
from cdk.generate import RandomMapConfig, gen_map, gen_shape, rng_for
from cdk.maps import eval_batch

BACKENDS = _kernels.backends()


def test_fallback_always_available():
    assert "python" in BACKENDS
    assert _kernels.BACKEND in ("python", "cython")


@pytest.mark.skipif("cython" not in BACKENDS, reason="compiled kernel not built")
@given(st.integers(0, 5000))
def test_backends_agree(seed):
    rng = rng_for(seed, "kernels")
    cfg = RandomMapConfig(seed=seed, max_depth=4, dims=(1, 3), allow_transcendental=True)
    a, b = gen_shape(rng, (1, 3)), gen_shape(rng, (1, 3))
    f = gen_map(cfg, a, b, index=seed)
    pts = rng.uniform(-1.5, 1.5, (17, a.dim))
    fast = eval_batch(f, pts, backend=BACKENDS["cython"])
    slow = eval_batch(f, pts, backend=BACKENDS["python"])
    np.testing.assert_allclose(fast, slow, rtol=1e-12, atol=1e-12)


def test_env_var_forces_fallback():
    code = "import cdk._kernels as k; print(k.BACKEND)"
    env = dict(os.environ, CDK_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"


def test_zero_dimensional_domain():
    from cdk.syntax import parse_map
    f = parse_map("map () -> (3/2, 2)")
    for run in BACKENDS.values():
        np.testing.assert_array_equal(eval_batch(f, np.zeros((2, 0)), backend=run), [[1.5, 2.0]] * 2)
