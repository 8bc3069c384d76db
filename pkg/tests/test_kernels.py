import os
import subprocess
import sys

import numpy as np
import pytest

from postselect import kernels

needs_numba = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not installed or disabled")


@needs_numba
def test_sweep_backends_agree_on_random_tables():
    tables = np.random.default_rng(0).integers(0, 0xFFFF, 3000)
    a = kernels.sweep_bipartite(tables, use_numba=True)
    b = kernels.sweep_bipartite(tables, use_numba=False)
    for x, y in zip(a, b):
        assert np.allclose(x, y, atol=1e-12, equal_nan=True)


@needs_numba
def test_satisfies_backends_agree():
    rng = np.random.default_rng(1)
    lits = rng.integers(1, 11, (30, 3)) * rng.choice([-1, 1], (30, 3))
    assignments = rng.integers(0, 1 << 10, 5000)
    a = kernels.satisfies_batch(lits, assignments, use_numba=True)
    b = kernels.satisfies_batch(lits, assignments, use_numba=False)
    assert np.array_equal(a, b)
    assert kernels.count_assignments(lits, 10, use_numba=True) == kernels.count_assignments(lits, 10, use_numba=False)


def test_padded_literals_are_ignored():
    lits = np.array([[1, 0, 0], [-1, 2, 0]])
    sat = kernels.satisfies_batch(lits, np.arange(4), use_numba=False)
    # x1 and (not x1 or x2): only x1 = x2 = 1, i.e. assignment 3
    assert sat.tolist() == [False, False, False, True]


def test_facet_rows_are_relabelled_chsh():
    assert kernels.FACET_WINS.shape == (8, 16)
    assert np.all(kernels.FACET_WINS.sum(axis=1) == 8)
    assert len({tuple(r) for r in kernels.FACET_WINS}) == 8


def test_env_flag_selects_numpy():
    env = dict(os.environ, POSTSELECT_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "import postselect; print(postselect.backend())"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "numpy"
    with_numba = dict(os.environ, POSTSELECT_NO_NUMBA="0")
    out = subprocess.run(
        [sys.executable, "-c", "import postselect.kernels as k; print(k.HAVE_NUMBA)"],
        env=with_numba, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == str(kernels.HAVE_NUMBA)


def test_requesting_disabled_numba_raises():
    env = dict(os.environ, POSTSELECT_NO_NUMBA="1")
    code = (
        "import numpy as np, postselect.kernels as k\n"
        "try:\n    k.sweep_bipartite(np.arange(3), use_numba=True)\n"
        "except RuntimeError:\n    print('refused')\n"
    )
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "refused"


@pytest.mark.parametrize("use_numba", [False, pytest.param(True, marks=needs_numba)])
def test_all_reject_table_gives_nan(use_numba):
    eta, i_ab, i_ba, full, chsh, chsh_sym = kernels.sweep_bipartite(np.array([0xFFFF, 0]), use_numba=use_numba)
    assert eta.tolist() == [0.0, 1.0]
    assert np.isnan([i_ab[0], i_ba[0], chsh[0], chsh_sym[0]]).all()
    assert i_ab[1] == 0.0 and not full[0] and full[1]
