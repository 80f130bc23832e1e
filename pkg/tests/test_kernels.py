import os
import subprocess
import sys

import numpy as np
import pytest

from heraldpy import _kernels as k

needs_numba = pytest.mark.skipif(not k.HAVE_NUMBA, reason="numba not installed")


@pytest.fixture
def data():
    rng = np.random.default_rng(3)
    x = np.linspace(-2.0, 2.0, 301)
    a = rng.random(301)
    phi = rng.normal(size=301) + 1j * rng.normal(size=301)
    u = np.linspace(-5.0, 5.0, 257)
    return x, a, phi, u


@needs_numba
@pytest.mark.parametrize("s", [0.0, 0.7, 12.0])
def test_double_sum_backends_agree(data, s):
    x, a, _, _ = data
    assert k.sinc2_double_sum_numba(x, a, s) == pytest.approx(k.sinc2_double_sum_numpy(x, a, s), rel=1e-12)


def test_double_sum_matches_dense(data):
    x, a, _, _ = data
    d = x[:, None] - x[None, :]
    dense = a @ (np.sinc(1.3 * d) ** 2) @ a
    assert k.sinc2_double_sum_numpy(x, a, 1.3) == pytest.approx(dense, rel=1e-12)


@needs_numba
def test_density_fill_backends_agree(data):
    x, _, phi, _ = data
    np.testing.assert_allclose(
        k.density_fill_numba(x, phi, 2.5, 0.3), k.density_fill_numpy(x, phi, 2.5, 0.3), rtol=1e-13, atol=1e-15
    )


@needs_numba
def test_dft_backends_agree(data):
    x, _, phi, u = data
    np.testing.assert_allclose(k.dft_direct_numba(x, phi, u), k.dft_direct_numpy(x, phi, u), rtol=1e-11, atol=1e-11)


def test_numpy_block_path(monkeypatch, data):
    x, a, phi, u = data
    ref_sum = k.sinc2_double_sum_numpy(x, a, 3.0)
    ref_dft = k.dft_direct_numpy(x, phi, u)
    monkeypatch.setattr(k, "_BLOCK_ELEMS", 1000)
    assert k.sinc2_double_sum_numpy(x, a, 3.0) == pytest.approx(ref_sum, rel=1e-13)
    np.testing.assert_allclose(k.dft_direct_numpy(x, phi, u), ref_dft, rtol=1e-13)


@pytest.mark.parametrize("flag, expected", [("1", "numpy"), ("", "numba")])
def test_env_flag_selects_backend(flag, expected):
    if expected == "numba" and not k.HAVE_NUMBA:
        pytest.skip("numba not installed")
    env = dict(os.environ, HERALDPY_DISABLE_NUMBA=flag)
    out = subprocess.run(
        [sys.executable, "-c", "from heraldpy import _kernels; print(_kernels.backend())"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == expected
