import os
import subprocess
import sys

import numpy as np
import pytest

from econgeom._ext import BACKEND, compiled_kernels, python_kernels

SNIPPET = """
import numpy as np
from econgeom import money, BACKEND
e = money.init_ensemble(50, 100.0, seed=8)
r = money.run_exchange(e, 20000, sample_every=20000)
print(BACKEND, ",".join(map(str, r.final.holdings.tolist())))
"""


def run_backend(pure):
    env = dict(os.environ)
    env.pop("ECONGEOM_PURE_PYTHON", None)
    if pure:
        env["ECONGEOM_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", SNIPPET], env=env, capture_output=True, text=True, check=True)
    return out.stdout.split()


def test_pure_python_backend_selected_by_environment():
    backend, holdings = run_backend(pure=True)
    assert backend == "python"
    if compiled_kernels is not None:
        backend_c, holdings_c = run_backend(pure=False)
        assert backend_c == "cython" and holdings_c == holdings


@pytest.mark.skipif(compiled_kernels is None, reason="compiled kernels not built")
def test_kernels_agree_on_raw_arrays():
    rng = np.random.default_rng(0)
    m0 = rng.integers(0, 1000, size=64).astype(np.int64)
    i = rng.integers(0, 64, size=5000).astype(np.int64)
    j = (i + 1 + rng.integers(0, 63, size=5000)) % 64
    u = rng.random(5000)
    a, b = m0.copy(), m0.copy()
    compiled_kernels.random_split(a, i, j, u)
    python_kernels.random_split(b, i, j, u)
    assert np.array_equal(a, b) and a.sum() == m0.sum()
    a, b = m0.copy(), m0.copy()
    compiled_kernels.fixed_delta(a, i, j, 7)
    python_kernels.fixed_delta(b, i, j, 7)
    assert np.array_equal(a, b) and a.sum() == m0.sum()


def test_backend_name():
    assert BACKEND in ("cython", "python")
