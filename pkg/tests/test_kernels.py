"""The compiled and numpy kernels must agree; the env flag picks the backend."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from toruslab import _accel, _kernels
from toruslab.verify import random_curve, unit_disk


def _cases(n=12):
    rng = np.random.default_rng(11)
    for _ in range(n):
        c = random_curve(rng, log_scale=1.0)
        scale = 10.0 ** rng.uniform(0, 2)
        yield np.asarray(c.homogeneous), scale * unit_disk(rng, 300)


@pytest.mark.parametrize("name", ["eval_rows", "density", "log_partition"])
def test_curve_kernels_agree(name):
    fast, ref = _kernels.NUMBA_KERNELS[name], _kernels.NUMPY_KERNELS[name]
    for rows, z in _cases():
        a, b = fast(rows, z), ref(rows, z)
        if not isinstance(a, tuple):
            a, b = (a,), (b,)
        for x, y in zip(a, b):
            assert x.shape == y.shape
            np.testing.assert_allclose(x, y, rtol=1e-10, atol=1e-300)


def test_pairwise_sum_agrees():
    rng = np.random.default_rng(3)
    for n in (1, 7, 128, 1000, 4096):
        x = rng.standard_normal(n)
        a = _kernels.NUMBA_KERNELS["pairwise_sum"](x)
        b = _kernels.NUMPY_KERNELS["pairwise_sum"](x)
        assert a == pytest.approx(b, rel=1e-13, abs=1e-13)
        assert a == pytest.approx(math.fsum(x), rel=1e-12, abs=1e-12)


def test_cos_level_count_agrees():
    x = (np.arange(10 ** 5) + 0.5) * (2 * math.pi / 10 ** 5)
    for k in (1, 3, 6):
        for pert in (np.zeros_like(x), 0.005 * np.sin(2 * x)):
            counts = [_kernels.NUMBA_KERNELS["cos_level_count"](float(k), pert, 0.05, 0.0, 2 * math.pi),
                      _kernels.NUMPY_KERNELS["cos_level_count"](k, pert, 0.05, 0.0, 2 * math.pi)]
            assert counts[0] == counts[1]


def test_density_extreme_exponents_agree():
    rows = np.array([[0, 0], [0, 1e6]], dtype=complex)
    z = np.array([1.0, -1.0, 1e-6, 1j])
    np.testing.assert_allclose(_kernels.NUMBA_KERNELS["density"](rows, z),
                               _kernels.NUMPY_KERNELS["density"](rows, z), rtol=1e-10, atol=1e-300)


def test_backend_reported():
    assert _accel.backend_name() in ("numba", "numpy")


@pytest.mark.parametrize("flag,expected", [("1", "numpy"), ("0", "numba")])
def test_env_flag_selects_backend(flag, expected):
    code = ("from toruslab import _accel, _kernels, ExpPolyCurve, Polynomial, fs_density;"
            "print(_accel.backend_name(), fs_density(ExpPolyCurve([Polynomial([0, 1])]), 0.0))")
    env = dict(os.environ, TORUSLAB_DISABLE_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True).stdout.split()
    assert out[0] == expected
    assert float(out[1]) == pytest.approx(1 / (4 * math.pi), rel=1e-14)
