import importlib
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qswitch import _kernels_py, kernels

BACKENDS = [pytest.param(_kernels_py, id="python")]
try:
    _compiled = importlib.import_module("qswitch._kernels")
    BACKENDS.append(pytest.param(_compiled, id="cython"))
except ImportError:
    pass


def transpose_oracle(images, d):
    # move axis i to axis images[i] on a labelled basis tensor
    n = len(images)
    labels = np.arange(d**n).reshape((d,) * n)
    moved = np.moveaxis(labels, list(range(n)), list(images))
    out = np.empty(d**n, dtype=np.int64)
    out[moved.ravel()] = np.arange(d**n)
    return out


perms = st.integers(1, 6).flatmap(lambda n: st.permutations(list(range(n))))


@pytest.mark.parametrize("impl", BACKENDS)
@given(images=perms, d=st.integers(1, 3))
@settings(max_examples=60, deadline=None)
def test_index_map_matches_transpose(impl, images, d):
    got = impl.induced_index_map(np.array(images, dtype=np.int64), d)
    np.testing.assert_array_equal(got, transpose_oracle(images, d))


@pytest.mark.parametrize("impl", BACKENDS)
@given(images=perms)
@settings(max_examples=60, deadline=None)
def test_sign_matches_inversion_count(impl, images):
    inv = sum(1 for i, j in itertools.combinations(range(len(images)), 2) if images[i] > images[j])
    assert impl.permutation_sign(np.array(images, dtype=np.int64)) == (-1) ** inv


@pytest.mark.parametrize("impl", BACKENDS)
def test_commutator_search_counts_identity(impl):
    group = np.array(list(itertools.permutations(range(3))), dtype=np.int64)
    # every (p, a, b) with commuting a, b solves the identity target
    commuting = sum(
        1
        for a in group
        for b in group
        if np.array_equal(a[b], b[a])
    )
    got = impl.commutator_conjugate_solutions(group, np.arange(3, dtype=np.int64))
    assert got == 6 * commuting


def test_backends_agree_on_search():
    if len(BACKENDS) < 2:
        pytest.skip("compiled extension not built")
    group = np.array(list(itertools.permutations(range(4))), dtype=np.int64)
    target = np.array([1, 2, 3, 0], dtype=np.int64)
    assert _kernels_py.commutator_conjugate_solutions(group, target) == _compiled.commutator_conjugate_solutions(
        group, target
    )


def test_dispatch_reports_backend():
    assert kernels.BACKEND in ("cython", "python")


def test_env_forces_fallback():
    import os
    import subprocess
    import sys

    env = dict(os.environ, QSWITCH_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import qswitch.kernels as k; print(k.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
