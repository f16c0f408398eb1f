import json
import os
import subprocess
import sys

import numpy as np
import pytest

from kleinian import _accel, _kernels as K

needs_numba = pytest.mark.skipif(not _accel.USE_NUMBA, reason="numba disabled")


def _py(fn):
    return getattr(fn, "py_func", fn)


def _spd(rng, d):
    A = rng.normal(size=(d, d))
    return A @ A.T + 0.5 * np.eye(d)


@needs_numba
def test_fp_kernels_agree(rng):
    for d in (2, 4, 6):
        G = _spd(rng, d)
        q1, ok1 = K.fp_decompose(G)
        q2, ok2 = _py(K.fp_decompose)(G)
        assert ok1 == ok2 and np.allclose(q1, q2, atol=1e-14)
        X1 = K.fp_enumerate(q1, 4.0, True)
        X2 = _py(K.fp_enumerate)(q1, 4.0, True)
        assert np.array_equal(X1, X2)
        assert np.allclose(K.quad_values(X1, G), _py(K.quad_values)(X1, G))


@needs_numba
def test_zeta_kernels_agree():
    f = np.array([3, 0, 1], dtype=np.int64)
    for p in (2, 3, 5, 7, 11, 13):
        assert np.array_equal(K.root_counts_mod_p(f, p), _py(K.root_counts_mod_p)(f, p))
    primes = np.array([5, 7, 11, 13, 17, 19, 23], dtype=np.int64)
    skip = np.zeros(len(primes), dtype=np.bool_)
    a = K.zeta_local_factors(f, primes, skip)
    b = _py(K.zeta_local_factors)(f, primes, skip)
    assert abs(a - b) < 1e-15


@needs_numba
def test_reduce_kernel_agrees(rng):
    mats = rng.normal(size=(12, 2, 2)) + 1j * rng.normal(size=(12, 2, 2))
    mats /= np.sqrt(np.linalg.det(mats))[:, None, None]
    P = np.array([[3.0 + 1j, 2.0], [0.5j, 1.0]])
    P /= np.sqrt(np.linalg.det(P))
    c1, s1, st1 = K.reduce_loop(mats, P, 1e-9, 500)
    c2, s2, st2 = _py(K.reduce_loop)(mats, P, 1e-9, 500)
    assert st1 == st2 and np.array_equal(s1, s2)
    assert np.allclose(c1, c2, atol=1e-13)
    assert np.allclose(K.norms_after(mats, P), _py(K.norms_after)(mats, P))


_SCRIPT = """
import json, numpy as np
from kleinian import _accel
from kleinian.field import NumberField, dedekind_zeta_2
from kleinian.enumeration import fincke_pohst
F = NumberField([1, 0, 15], integral_basis=[[1, 0], ["1/2", "1/2"]], prime_splitting={"2": [1, 1]})
z = dedekind_zeta_2(F, 3000)[0]
G = np.array([[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]])
X, _ = fincke_pohst(G, 12.0)
print(json.dumps({"backend": _accel.backend(), "zeta": z, "X": X.tolist()}))
"""


def _run(disable):
    env = dict(os.environ)
    env["KLEINIAN_DISABLE_NUMBA"] = "1" if disable else "0"
    r = subprocess.run([sys.executable, "-c", _SCRIPT], capture_output=True, text=True, env=env, check=True)
    return json.loads(r.stdout)


def test_env_flag_selects_fallback():
    slow = _run(True)
    assert slow["backend"] == "python"
    fast = _run(False)
    if fast["backend"] == "numba":
        assert abs(fast["zeta"] - slow["zeta"]) < 1e-14
        assert fast["X"] == slow["X"]
