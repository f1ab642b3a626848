import math

import numpy as np
import pytest

from toruslab import (ExpPolyCurve, InputError, Polynomial, UndefinedQuantityError,
                      characteristic_direct, characteristic_jensen, characteristic_profile,
                      circle_max_norm, disk_max_profile, floor_exponent_check, growth_exponent,
                      max_norm_profile, order_estimate, polynomial_bound_constant)
from toruslab.asymptotics import RadialProfile, is_nondecreasing
from toruslab.numerics import geometric_grid

Z = Polynomial([0, 1])
Z2 = Polynomial([0, 0, 1])
Z3 = Polynomial([0, 0, 0, 1])
CONST = ExpPolyCurve([Polynomial([4.0])])


@pytest.fixture(scope="module")
def z2_profile():
    return max_norm_profile(ExpPolyCurve([Z2]), geometric_grid(1.0, 1e6))


class TestCircleMax:
    def test_constant(self):
        assert circle_max_norm(CONST, 10.0) == 0.0

    def test_z(self):
        assert circle_max_norm(ExpPolyCurve([Z]), 10.0) == pytest.approx(
            1 / (2 * math.sqrt(math.pi)), rel=1e-9)

    def test_z2_against_dense_scan(self):
        c = ExpPolyCurve([Z2])
        assert circle_max_norm(c, 100.0) == pytest.approx(100 / math.sqrt(math.pi), rel=1e-3)
        th = np.linspace(0, 2 * math.pi, 10 ** 6, endpoint=False)
        from toruslab import fs_norm
        dense = fs_norm(c, 100.0 * np.exp(1j * th)).max()
        assert circle_max_norm(c, 100.0) >= dense * (1 - 1e-12)

    def test_huge_radius_finite(self):
        v = circle_max_norm(ExpPolyCurve([Z3, Z3 * 1j]), 1e6)
        assert math.isfinite(v) and v > 0


class TestGrowth:
    @pytest.mark.parametrize("curve,m", [
        (ExpPolyCurve([Z2]), 1),
        (ExpPolyCurve([Z, -Z]), 0),
        (ExpPolyCurve([Z3, Z3 * 1j]), 2),
    ])
    def test_slope(self, curve, m):
        est = growth_exponent(curve, r_max=1e6)
        assert abs(est.slope - m) <= 0.05
        assert est.window[0] >= 1.0 and est.window[1] <= 1e6 * (1 + 1e-12)

    def test_constant_undefined(self):
        with pytest.raises(UndefinedQuantityError):
            growth_exponent(CONST)

    def test_bad_range(self):
        with pytest.raises(InputError):
            growth_exponent(ExpPolyCurve([Z]), r_min=10.0, r_max=5.0)

    def test_disk_max_is_running_max(self, z2_profile):
        disk = disk_max_profile(z2_profile)
        assert np.all(disk.values >= z2_profile.values)
        assert np.all(np.diff(disk.values) >= 0)
        est_c = growth_exponent(ExpPolyCurve([Z2]), profile=z2_profile)
        est_d = growth_exponent(ExpPolyCurve([Z2]), profile=disk)
        assert abs(est_c.slope - est_d.slope) <= 0.05


class TestBoundConstant:
    def test_z2_exponent_one(self, z2_profile):
        chk = polynomial_bound_constant(ExpPolyCurve([Z2]), 1.0, profile=z2_profile)
        assert chk.C_hat == pytest.approx(1 / math.sqrt(math.pi), rel=1e-3)
        assert chk.monotone_ok

    def test_z2_exponent_zero_flagged(self, z2_profile):
        assert not polynomial_bound_constant(ExpPolyCurve([Z2]), 0.0, profile=z2_profile).monotone_ok

    def test_constant(self):
        assert polynomial_bound_constant(CONST, 0.0).C_hat == 0.0

    def test_floor_exponent(self):
        rep = floor_exponent_check(ExpPolyCurve([Z2]), 1.5, r_max=1e4)
        assert rep.floor_exponent == 1 and rep.passed
        rep = floor_exponent_check(ExpPolyCurve([Z]), 0.9, r_max=1e4)
        assert rep.floor_exponent == 0 and rep.passed
        rep = floor_exponent_check(CONST, 0.0, r_max=1e3)
        assert rep.passed and rep.C_hat_floor == 0.0


class TestCharacteristic:
    def test_at_one_and_constant(self):
        assert characteristic_jensen(ExpPolyCurve([Z3]), 1.0) == 0.0
        assert characteristic_jensen(CONST, 50.0) == 0.0
        assert characteristic_direct(ExpPolyCurve([Z]), 1.0) == 0.0

    def test_z_at_100(self):
        # r/pi is the leading term; the exact value sits a bounded offset below it
        t = characteristic_jensen(ExpPolyCurve([Z]), 100.0)
        assert t == pytest.approx(100 / math.pi, rel=0.02)

    @pytest.mark.parametrize("curve,r", [(ExpPolyCurve([Z]), 3.0), (ExpPolyCurve([Z, -Z]), 2.0),
                                         (ExpPolyCurve([Z2, Polynomial([1j, 0.5])]), 4.0)])
    def test_jensen_vs_direct(self, curve, r):
        j, d = characteristic_jensen(curve, r), characteristic_direct(curve, r)
        assert j == pytest.approx(d, rel=1e-6)

    def test_below_one_rejected(self):
        with pytest.raises(InputError):
            characteristic_jensen(ExpPolyCurve([Z]), 0.5)

    def test_profile_monotone(self):
        prof = characteristic_profile(ExpPolyCurve([Z3, Z]), geometric_grid(1.0, 1e4))
        assert prof.values[0] == 0.0
        assert is_nondecreasing(prof)

    @pytest.mark.parametrize("curve,rho", [(ExpPolyCurve([Z]), 1), (ExpPolyCurve([Z2]), 2),
                                           (ExpPolyCurve([Z3, Z]), 3)])
    def test_order(self, curve, rho):
        assert abs(order_estimate(curve, r_max=1e6) - rho) <= 0.05


def test_profile_validation():
    with pytest.raises(InputError):
        RadialProfile(np.array([1.0, 1.0]), np.array([0.0, 1.0]), "max_norm")
    with pytest.raises(InputError):
        RadialProfile(np.array([1.0, 2.0]), np.array([0.0]), "max_norm")
