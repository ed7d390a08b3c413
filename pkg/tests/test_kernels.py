import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import invariant_factors_oracle, rank_mod
from stp import kernels

arrays = st.integers(1, 6).flatmap(
    lambda m: st.integers(1, 6).flatmap(
        lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n),
                           min_size=m, max_size=m)))


@given(arrays, st.sampled_from([2, 3, 5, 7]))
def test_rank_mod_p_backends_agree(m, p):
    a = np.array(m, dtype=np.int64)
    want = rank_mod(m, p)
    assert int(kernels._rank_mod_p_numba(a, np.int64(p))) == want
    assert kernels._rank_mod_p_numpy(a, p) == want


@given(arrays)
def test_snf_diagonal_backends_agree(m):
    a = np.array(m, dtype=np.int64)
    ok1, d1 = kernels._snf_diag_numba(a, np.int64(kernels._LIMIT))
    ok2, d2 = kernels._snf_diag_numpy(a, kernels._LIMIT)
    assert ok1 and ok2
    want = invariant_factors_oracle(m)
    assert [int(x) for x in d1 if x] == want
    assert [int(x) for x in d2 if x] == want


def test_overflow_is_reported():
    a = np.array([[2 ** 40, 1], [1, 1]], dtype=np.int64)
    ok, _ = kernels.snf_diagonal_int64(a)
    assert not ok


@pytest.mark.parametrize("backend", ["numpy", "numba"])
def test_backend_env_selection(backend):
    code = "from stp import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, STP_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == backend


def test_bad_backend_rejected():
    env = dict(os.environ, STP_BACKEND="fortran")
    out = subprocess.run([sys.executable, "-c", "import stp.kernels"], env=env, capture_output=True, text=True)
    assert out.returncode != 0 and "STP_BACKEND" in out.stderr
