import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from toruslab import InputError
from toruslab.numerics import (adaptive_gk, geometric_grid, golden_max, graded_integral,
                               is_power_of_two, loglog_slope, ordered_map, periodic_trapezoid,
                               top_decade)


def test_geometric_grid_default():
    g = geometric_grid(1.0, 1e6)
    assert g[0] == 1.0 and g[-1] == 1e6
    ratios = g[1:-1] / g[:-2]
    np.testing.assert_allclose(ratios, 2 ** 0.25)
    assert np.all(np.diff(g) > 0)


def test_geometric_grid_per_decade():
    g = geometric_grid(1.0, 100.0, 4)
    assert len(g) == 9
    np.testing.assert_allclose(g, 10 ** np.linspace(0, 2, 9))


def test_geometric_grid_rejects():
    with pytest.raises(InputError):
        geometric_grid(2.0, 1.0)


def test_top_decade_and_slope():
    r = geometric_grid(1.0, 1e4)
    mask = top_decade(r)
    assert r[mask][0] >= 1e3 * (1 - 1e-9)
    slope, _, rms = loglog_slope(r, 2.5 * np.log(r) + 1.0)
    assert slope == pytest.approx(2.5) and rms < 1e-10


def test_power_of_two():
    assert is_power_of_two(64) and not is_power_of_two(96) and not is_power_of_two(0)
    assert not is_power_of_two(64.0)


def test_golden_max():
    x, fx = golden_max(lambda t: -(t - 0.3) ** 2, -1.0, 2.0, 1e-10)
    assert x == pytest.approx(0.3, abs=1e-8) and fx == pytest.approx(0.0, abs=1e-15)


def test_periodic_trapezoid_spectral():
    # int_0^{2 pi} exp(cos t) dt = 2 pi I_0(1)
    val, n, ok = periodic_trapezoid(lambda t: np.exp(np.cos(t)), 8, 1e-14)
    assert ok and val == pytest.approx(2 * math.pi * 1.2660658777520082, rel=1e-14)
    with pytest.raises(InputError):
        periodic_trapezoid(np.cos, 12)


def test_adaptive_gk_smooth_and_peaked():
    assert adaptive_gk(np.sin, [0.0, math.pi]) == pytest.approx(2.0, rel=1e-12)
    eps = 1e-9
    peak = lambda x: eps / (x * x + eps * eps)  # noqa: E731
    assert graded_integral(peak, -1.0, 1.0, anchors=[0.0], rtol=1e-10) == pytest.approx(
        2 * math.atan(1 / eps), rel=1e-8)


def test_adaptive_gk_empty():
    assert adaptive_gk(np.cos, [1.0, 1.0]) == 0.0
    assert graded_integral(np.cos, 1.0, 0.5) == 0.0


@given(st.floats(0.1, 10), st.floats(0.1, 3))
def test_adaptive_gk_polynomial_exact(a, b):
    val = adaptive_gk(lambda x: a * x ** 5, [0.0, b])
    assert val == pytest.approx(a * b ** 6 / 6, rel=1e-13)


def test_ordered_map_keeps_order():
    items = list(range(50))
    assert ordered_map(lambda x: x * x, items, threads=4) == [x * x for x in items]
    assert ordered_map(lambda x: x, [], threads=4) == []
