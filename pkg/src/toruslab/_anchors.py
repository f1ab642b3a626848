"""Tie points on a circle and locally recentred exponents.

On ``|z| = r`` the interesting features of an exponential-polynomial curve
sit where ``Re p(r e^{i theta})`` vanishes for a tie polynomial ``p`` (an
exponent, or a difference of two exponents).  For large ``r`` these features
are far narrower than the spacing of doubles near ``theta``; ``Re p`` itself
is ~``r^k`` and cannot be evaluated to O(1) absolute accuracy in double.

The remedy used here: locate each zero ``theta*`` with mpmath at enough digits,
then Taylor-shift every exponent to ``z* = r e^{i theta*}`` and drop the
(metric-invariant) imaginary constant.  The shifted polynomials have O(1)
constant terms near the tie and can be evaluated in double at small offsets
``w = z* (e^{i eps} - 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

_EPS = np.finfo(float).eps
# absolute accuracy wanted for Re p at a tie before switching to mpmath
_ABS_TOL = 1e-7
_ROOT_LOG_MOD_TOL = 1e-5


def magnitude_bound(coef: np.ndarray, r: float) -> float:
    """``max_l sum_k |a_{l,k}| r^k`` over the rows of ``coef`` (1-D or 2-D)."""
    coef = np.atleast_2d(coef)
    powers = float(r) ** np.arange(coef.shape[1])
    return float(np.max(np.abs(coef) @ powers))


def needs_high_precision(coef: np.ndarray, r: float) -> bool:
    return 64.0 * _EPS * magnitude_bound(coef, r) > _ABS_TOL


def working_dps(coef: np.ndarray, r: float) -> int:
    mag = max(magnitude_bound(coef, r), 1.0)
    return 25 + int(math.ceil(math.log10(mag)))


def taylor_shift(coeffs: np.ndarray, z: complex) -> np.ndarray:
    """Coefficients of ``p(z + w)`` in powers of ``w`` (double precision)."""
    b = np.array(coeffs, dtype=np.complex128)
    deg = b.shape[0] - 1
    for j in range(deg):
        for k in range(deg - 1, j - 1, -1):
            b[k] += z * b[k + 1]
    return b


def _taylor_shift_mp(coeffs, z):
    b = [mpmath.mpc(c.real, c.imag) for c in coeffs]
    deg = len(b) - 1
    for j in range(deg):
        for k in range(deg - 1, j - 1, -1):
            b[k] += z * b[k + 1]
    return b


def _trig_companion(p: np.ndarray, r: float) -> np.ndarray:
    """Ascending coefficients of ``w^K (p(rw) + conj(p)(r/w)) / r^K``."""
    deg = p.shape[0] - 1
    q = np.zeros(2 * deg + 1, dtype=np.complex128)
    for k in range(deg + 1):
        scale = float(r) ** (k - deg)
        q[deg + k] += p[k] * scale
        q[deg - k] += np.conj(p[k]) * scale
    return q


def _phi_double(p, r, theta):
    z = r * complex(math.cos(theta), math.sin(theta))
    val = 0j
    der = 0j
    for a in p[::-1]:
        der = der * z + val
        val = val * z + a
    return val.real, -(z * der).imag


def circle_zeros(p: np.ndarray, r: float) -> np.ndarray:
    """Approximate zeros of ``theta -> Re p(r e^{i theta})`` in ``[0, 2 pi)``.

    Roots are found from the trigonometric companion polynomial and polished
    by a few Newton steps in double precision.  Near-tangential zeros that the
    eigenvalue solver pushes slightly off the unit circle are kept too; callers
    only use them as candidate locations.
    """
    p = np.trim_zeros(np.asarray(p, dtype=np.complex128), "b")
    if p.shape[0] < 2 or r <= 0:
        return np.empty(0)
    q = _trig_companion(p, r)
    with np.errstate(all="ignore"):
        w = np.polynomial.polynomial.polyroots(q)
    w = w[np.isfinite(w)]
    w = w[np.abs(np.log(np.abs(w))) < _ROOT_LOG_MOD_TOL]
    thetas = []
    for root in w:
        th = float(np.angle(root)) % (2 * math.pi)
        for _ in range(3):
            f, fp = _phi_double(p, r, th)
            if fp == 0 or not math.isfinite(f / fp):
                break
            step = f / fp
            if abs(step) > 1e-3:
                break
            th -= step
        thetas.append(th % (2 * math.pi))
    thetas.sort()
    out = []
    for th in thetas:
        if not out or th - out[-1] > 1e-13:
            out.append(th)
    if len(out) > 1 and out[0] + 2 * math.pi - out[-1] <= 1e-13:
        out.pop()
    return np.array(out)


@dataclass(frozen=True)
class LocalFrame:
    """A tie point ``z*`` on the circle and exponents recentred there.

    ``rows`` are Taylor coefficients in ``w`` of ``g_l(z* + w) - level`` with
    imaginary constants removed, so the curve near ``z*`` is evaluated as
    ``rows`` at ``w = z* (e^{i eps} - 1)``.  ``rate`` is
    ``|d/dtheta Re p|`` at the tie.
    """

    theta: float
    z: complex
    rate: float
    rows: np.ndarray

    def offsets(self, eps) -> np.ndarray:
        eps = np.asarray(eps, dtype=float)
        s = np.sin(0.5 * eps)
        return self.z * (-2.0 * s * s + 1j * np.sin(eps))


def _mp_difference(row_b, row_a):
    """``row_b - row_a`` formed in the current mpmath precision.

    Subtracting in double would round the coefficients, and at large ``r``
    that rounding moves the zero of ``Re p`` by far more than a peak width.
    """
    out = [mpmath.mpc(c.real, c.imag) for c in row_b]
    if row_a is not None:
        out = [x - mpmath.mpc(c.real, c.imag) for x, c in zip(out, row_a)]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _refine_mp(row_b, row_a, r, theta0, dps):
    with mpmath.workdps(dps):
        coeffs = _mp_difference(row_b, row_a)
        rr = mpmath.mpf(r)
        th = mpmath.mpf(theta0)
        tol = mpmath.mpf(10) ** (-(dps - 4))
        for _ in range(12):
            z = rr * mpmath.expj(th)
            val = mpmath.mpc(0)
            der = mpmath.mpc(0)
            for a in reversed(coeffs):
                der = der * z + val
                val = val * z + a
            fp = -mpmath.im(z * der)
            if fp == 0:
                break
            step = mpmath.re(val) / fp
            th -= step
            if abs(step) <= tol:
                break
        return th


def local_frame(rows: np.ndarray, tie: tuple, r: float, theta0: float,
                high_precision: bool | None = None) -> LocalFrame:
    """Build the recentred frame for tie rows ``tie = (a, b)`` near ``theta0``.

    ``rows`` is a homogeneous coefficient matrix (or a single polynomial as a
    1-row matrix with ``tie = (None, 0)`` meaning "zero of row 0").
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=np.complex128))
    a, b = tie
    p = rows[b] - (rows[a] if a is not None else 0)
    p = np.trim_zeros(p, "b")
    if high_precision is None:
        high_precision = needs_high_precision(rows, r)
    if not high_precision:
        th = float(theta0)
        z = r * complex(math.cos(th), math.sin(th))
        shifted = np.array([taylor_shift(row, z) for row in rows])
        level = shifted[a, 0].real if a is not None else 0.0
        shifted[:, 0] = shifted[:, 0].real - level
        _, rate = _phi_double(p, r, th)
        return LocalFrame(th, z, abs(rate), shifted)

    dps = working_dps(rows, r)
    th = _refine_mp(rows[b], rows[a] if a is not None else None, r, theta0, dps)
    with mpmath.workdps(dps):
        z = mpmath.mpf(r) * mpmath.expj(th)
        shifted = [_taylor_shift_mp(row, z) for row in rows]
        level = mpmath.re(shifted[a][0]) if a is not None else mpmath.mpf(0)
        out = np.empty(rows.shape, dtype=np.complex128)
        for i, coeffs in enumerate(shifted):
            out[i, 0] = float(mpmath.re(coeffs[0]) - level)
            for k in range(1, len(coeffs)):
                out[i, k] = complex(coeffs[k])
        lead = shifted[b] if a is None else [x - y for x, y in zip(shifted[b], shifted[a])]
        rate = abs(float(mpmath.im(z * lead[1]))) if len(lead) > 1 else 0.0
        theta = float(th % (2 * mpmath.pi))
        zc = complex(z)
    return LocalFrame(theta, zc, rate, out)
