import os
import subprocess
import sys
from fractions import Fraction

import numpy as np

from coopcore import _kernels


def test_backend_flag_selects_numpy():
    env = dict(os.environ, COOPCORE_DISABLE_NUMBA="1")
    code = "from coopcore import _kernels as k; print(k.BACKEND, k.karp_min_mean is k.karp_min_mean_np)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["numpy", "True"]


def test_numpy_fallback_runs_a_solver():
    env = dict(os.environ, COOPCORE_DISABLE_NUMBA="1")
    code = (
        "from coopcore import gen, coop_mp;"
        "g, r = gen.mp_empty_core_3p();"
        "print(coop_mp.mp_core_membership(g, r['stay-R']).status.value)"
    )
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "FAILS"


def test_karp_simple_cycle():
    # 0 -> 1 -> 0 with weights 3 and -1, plus a self loop of weight 2 on 1
    src = np.array([0, 1, 1], dtype=np.int64)
    dst = np.array([1, 0, 1], dtype=np.int64)
    w = np.array([3, -1, 2], dtype=np.int64)
    for kernel in (_kernels.karp_min_mean_np, _kernels.karp_min_mean):
        num, den = kernel(2, 0, src, dst, w)
        assert Fraction(int(num), int(den)) == 1


def test_karp_acyclic():
    src = np.array([0], dtype=np.int64)
    dst = np.array([1], dtype=np.int64)
    w = np.array([5], dtype=np.int64)
    assert _kernels.karp_min_mean_np(2, 0, src, dst, w)[1] == 0
