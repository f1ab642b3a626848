import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from toruslab import (ExpPolyCurve, InputError, Polynomial, component_norm, decomposition_check,
                      fs_density, fs_density_laplacian_oracle, fs_norm, log_partition)
from toruslab.verify import random_curve, unit_disk

Z = Polynomial([0, 1])
Z2 = Polynomial([0, 0, 1])
CONST = ExpPolyCurve([Polynomial([5])])


def test_density_examples():
    assert fs_density(CONST, 0.3 + 2j) == 0.0
    assert fs_density(ExpPolyCurve([Z]), 0) == pytest.approx(1 / (4 * math.pi), rel=1e-14)
    assert fs_density(ExpPolyCurve([Z, -Z]), 0) == pytest.approx(2 / (3 * math.pi), rel=1e-14)


def test_density_closed_form_on_real_axis():
    x = np.linspace(-30, 30, 61)
    expected = np.exp(2 * x) / (1 + np.exp(2 * x)) ** 2 / math.pi
    np.testing.assert_allclose(fs_density(ExpPolyCurve([Z]), x), expected, rtol=1e-12)


def test_norm_examples():
    assert fs_norm(CONST, 1j) == 0.0
    assert fs_norm(ExpPolyCurve([Z]), 0) == pytest.approx(0.2820948, abs=1e-7)
    vals = fs_norm(ExpPolyCurve([Z]), np.array([0.5, 1.0, 5.0, 20.0, 700.0]))
    assert np.all(np.diff(vals) < 0)


def test_component_norm_examples():
    assert component_norm(Z, 0) == pytest.approx(1 / (2 * math.sqrt(math.pi)))
    assert component_norm(Polynomial([3 - 1j]), 2.0) == 0.0
    for r in (1.0, 10.0, 1e3):
        z = r * np.exp(1j * math.pi / 4)
        assert component_norm(Z2, z) == pytest.approx(r / math.sqrt(math.pi), rel=1e-9)


def test_oracle_examples():
    assert abs(fs_density_laplacian_oracle(CONST, 1 + 1j, h=1e-3)) < 1e-12
    assert fs_density_laplacian_oracle(ExpPolyCurve([Z]), 0, h=1e-3) == pytest.approx(
        1 / (4 * math.pi), abs=1e-6)
    assert fs_density_laplacian_oracle(ExpPolyCurve([Z, -Z]), 0, h=1e-3) == pytest.approx(
        2 / (3 * math.pi), abs=1e-5)


def test_oracle_rejects_bad_step():
    with pytest.raises(InputError):
        fs_density_laplacian_oracle(ExpPolyCurve([Z]), 0, h=0.0)


def test_decomposition_examples():
    one = decomposition_check(ExpPolyCurve([Z2]), 0.7 + 0.2j)
    assert one.pair_terms == {}
    assert one.bound == pytest.approx(one.diagonal_terms[0])
    assert one.total <= one.bound * (1 + 1e-12)

    two = decomposition_check(ExpPolyCurve([Z, -Z]), 0)
    assert two.total == pytest.approx(2 / (3 * math.pi))
    assert two.bound == pytest.approx(3 / (2 * math.pi))
    assert two.slack > 0

    const = decomposition_check(CONST, 2.0)
    assert const.total == 0.0 and const.bound == 0.0


def test_non_finite_point_rejected():
    with pytest.raises(InputError):
        fs_density(ExpPolyCurve([Z]), complex(float("nan"), 0))


def test_no_overflow_z10():
    c = ExpPolyCurve([Polynomial.monomial(10)])
    z = 1e4 * np.exp(2j * math.pi * np.arange(1024) / 1024)
    for values in (fs_density(c, z), component_norm(c.exponents[0], z), log_partition(c, z),
                   fs_density_laplacian_oracle(c, z)):
        assert np.all(np.isfinite(values))


def test_log_partition_large_exponent():
    c = ExpPolyCurve([Polynomial([0, 0, 0, 0, 1])])
    # Re z^4 at z = 30 is 810000, far past exp overflow
    assert log_partition(c, 30.0) == pytest.approx(2 * 30.0 ** 4)


def test_gauge_invariance_exact():
    rng = np.random.default_rng(5)
    c = random_curve(rng)
    shifted = ExpPolyCurve([g + Polynomial([2.5j]) for g in c.exponents])
    z = 2 * unit_disk(rng, 500)
    assert np.array_equal(fs_density(c, z), fs_density(shifted, z))


curves = st.integers(0, 2 ** 32 - 1).map(lambda s: random_curve(np.random.default_rng(s)))


@settings(max_examples=40, deadline=None)
@given(curves, st.integers(0, 2 ** 32 - 1))
def test_decomposition_inequality(c, seed):
    z = 2 * unit_disk(np.random.default_rng(seed), 200)
    dens = fs_density(c, z)
    bound = sum(component_norm(g, z) ** 2 for g in c.exponents)
    for i, j in c.pairs():
        bound = bound + component_norm(c.exponents[i] - c.exponents[j], z) ** 2
    assert np.all(dens <= bound * (1 + 1e-12) + 1e-300)


@settings(max_examples=40, deadline=None)
@given(curves, st.integers(0, 2 ** 32 - 1))
def test_oracle_agreement(c, seed):
    z = 2 * unit_disk(np.random.default_rng(seed), 100)
    dens = fs_density(c, z)
    lap = fs_density_laplacian_oracle(c, z)
    mask = dens >= 1e-12
    assert np.all(np.abs(lap[mask] - dens[mask]) <= 1e-4 * dens[mask])


@settings(max_examples=30, deadline=None)
@given(curves, st.data())
def test_permutation_invariance(c, data):
    perm = data.draw(st.permutations(c.exponents))
    z = 2 * unit_disk(np.random.default_rng(1), 50)
    np.testing.assert_allclose(fs_density(ExpPolyCurve(perm), z), fs_density(c, z),
                               rtol=1e-12, atol=1e-300)
