"""Fubini-Study derivative density of exponential-polynomial curves.

For ``f = [1 : e^{g_1} : ... : e^{g_n}]`` with ``u_i = Re g_i`` the squared
derivative norm is

    |df|^2 = (1/pi) sum_{0 <= a < b <= n} |g_a' - g_b'|^2 exp(2u_a + 2u_b - 2L)

with ``g_0 = 0`` and ``L = log(1 + sum_i e^{2 u_i})``.  Every exponential is
taken after the shift by ``L`` so nothing overflows when ``u_i`` is huge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .curve import ExpPolyCurve, Polynomial
from .errors import InputError, NumericalError

_INV_2SQRTPI = 0.5 / math.sqrt(math.pi)


def _points(z):
    arr = np.asarray(z, dtype=np.complex128)
    if not np.all(np.isfinite(arr)):
        raise InputError("evaluation point must be finite")
    return arr


def _shape_like(z, values):
    if np.ndim(z) == 0:
        return float(values[0])
    return values.reshape(np.shape(z))


def fs_density(c: ExpPolyCurve, z):
    """``|df|^2`` at ``z`` (scalar or array of points)."""
    arr = _points(z)
    out = _kernels.density(c.homogeneous, arr)
    if np.isnan(out).any():
        raise NumericalError("exponent evaluation overflowed", stage="fs_density")
    return _shape_like(z, out)


def fs_norm(c: ExpPolyCurve, z):
    return np.sqrt(fs_density(c, z)) if np.ndim(z) else math.sqrt(fs_density(c, z))


def component_norm(g: Polynomial, z):
    """``|d e^g|`` for the map ``e^g`` into the Riemann sphere.

    Evaluated as ``|g'| sech(Re g) / (2 sqrt(pi))`` with the hyperbolic secant
    assembled in the log domain.
    """
    arr = _points(z)
    val = g(arr)
    der = g.derivative()(arr)
    u = np.abs(np.real(val))
    mag = np.abs(der)
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        # sech(u) = 2 / (e^{|u|} (1 + e^{-2|u|}))
        log_sech = math.log(2.0) - u - np.log1p(np.exp(-2.0 * u))
        out = np.where(mag > 0, np.exp(np.log(np.where(mag > 0, mag, 1.0)) + log_sech), 0.0)
    out = np.asarray(out * _INV_2SQRTPI, dtype=float)
    if np.ndim(z) == 0:
        return float(out)
    return out


def log_partition(c: ExpPolyCurve, z):
    """``log(1 + sum_i |f_i|^2)`` evaluated as a log-sum-exp."""
    arr = _points(z)
    return _shape_like(z, _kernels.log_partition(c.homogeneous, arr))


def _taylor_at_points(rows: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Taylor coefficients ``g_l^{(k)}(z)/k!`` for every row and point."""
    deg = rows.shape[1] - 1
    b = np.broadcast_to(rows[:, None, :], (rows.shape[0], z.shape[0], deg + 1)).copy()
    for j in range(deg):
        for k in range(deg - 1, j - 1, -1):
            b[:, :, k] += z[None, :] * b[:, :, k + 1]
    return b


def _remainder_stencil(taylor, top, weights, hh):
    """Five-point stencil (over h^2) of ``L - 2 Re g_top`` about each centre."""
    rows, npts, width = taylor.shape
    idx = np.arange(npts)
    acc = np.zeros(npts)
    for step in (1.0, -1.0, 1j, -1j):
        delta = step * hh
        inc = np.zeros((rows, npts))
        power = np.ones(npts, dtype=np.complex128)
        for k in range(1, width):
            power = power * delta
            inc += 2.0 * (taylor[:, :, k] * power).real
        shift = inc - inc[top, idx]
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            small = np.log1p(np.sum(weights * np.expm1(np.minimum(shift, 1.0)), axis=0))
            # far from the centre's regime fall back to a plain log-sum-exp
            expo = np.log(weights) + shift
            peak = expo.max(axis=0)
            large = peak + np.log(np.sum(np.exp(expo - peak), axis=0))
        acc += np.where(np.abs(shift).max(axis=0) < 1.0, small, large)
    return acc / (hh * hh)


def fs_density_laplacian_oracle(c: ExpPolyCurve, z, h=None, richardson=True):
    """Finite-difference Laplacian of ``L`` divided by ``4 pi``.

    ``h`` defaults to ``1e-4 * max(1, |z|)``.  The dominant exponent at the
    centre is harmonic, so the stencil is applied to ``L - 2 Re g_top``; its
    increments come from Taylor expansions about the centre, which avoids
    subtracting four nearly equal large values.  With ``richardson`` the
    five-point results at ``h`` and ``h/2`` are combined to cancel the
    O(h^2) term.  Test oracle only: it shares no code with ``fs_density``.
    """
    arr = _points(z)
    flat = np.atleast_1d(arr).ravel()
    if h is None:
        hh = 1e-4 * np.maximum(1.0, np.abs(flat))
    else:
        hh = np.broadcast_to(np.asarray(h, dtype=float), flat.shape).astype(float)
        if np.any(hh <= 0):
            raise InputError("finite-difference step must be positive")
    rows = np.asarray(c.homogeneous)
    if rows.shape[1] == 1:
        return _shape_like(z, np.zeros(flat.shape))
    taylor = _taylor_at_points(rows, flat)
    levels = 2.0 * taylor[:, :, 0].real
    top = np.argmax(levels, axis=0)
    weights = np.exp(levels - levels[top, np.arange(flat.shape[0])])
    weights /= weights.sum(axis=0)
    lap = _remainder_stencil(taylor, top, weights, hh)
    if richardson:
        lap = (4.0 * _remainder_stencil(taylor, top, weights, 0.5 * hh) - lap) / 3.0
    return _shape_like(z, lap / (4.0 * math.pi))


@dataclass
class DensityBreakdown:
    total: float
    diagonal_terms: list = field(default_factory=list)
    pair_terms: dict = field(default_factory=dict)
    bound: float = 0.0

    @property
    def slack(self) -> float:
        return self.bound - self.total


def decomposition_check(c: ExpPolyCurve, z) -> DensityBreakdown:
    """Compare ``|df|^2`` with the sum of its one-dimensional upper bounds."""
    total = fs_density(c, z)
    diag = [component_norm(g, z) ** 2 for g in c.exponents]
    pairs = {(i, j): component_norm(c.exponents[i] - c.exponents[j], z) ** 2
             for i, j in c.pairs()}
    bound = math.fsum(diag) + math.fsum(pairs.values())
    return DensityBreakdown(total=total, diagonal_terms=diag, pair_terms=pairs, bound=bound)
