"""Recover exponents from circle samples of ``log|e^g| = Re g``.

For ``g = sum_k a_k z^k`` and ``u = Re g`` on ``|z| = r``,

    a_k = (1 / (pi r^k)) int_0^{2 pi} u(r e^{i theta}) e^{-i k theta} d theta,   k >= 1,

and the mean of ``u`` is ``Re a_0``.  With ``N`` equispaced samples the
trapezoid rule (one FFT) is exact once ``N > 2 deg g``.  ``Im a_0`` is
invisible in ``|e^g|`` and is fixed to zero.

A genuine coefficient does not depend on the sampling radius, while aliasing
and noise do; two radii are compared to tell them apart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import characteristic_jensen, circle_integral_log_partition, growth_exponent
from .curve import ExpPolyCurve, Polynomial
from .errors import InputError
from .numerics import is_power_of_two

DEFAULT_N = 4096
DEFAULT_TOL = 1e-8
DEFAULT_KMAX = 16
DEFAULT_RADII = (2.0, 5.0)


@dataclass(frozen=True)
class CircleSamples:
    """``values[j] = Re g(r e^{2 pi i j / N})`` for ``j = 0 .. N-1``."""

    r: float
    values: np.ndarray

    def __post_init__(self):
        if not (self.r > 0 and math.isfinite(self.r)):
            raise InputError(f"sample radius must be positive and finite, got {self.r}")
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or not is_power_of_two(values.shape[0]):
            raise InputError(f"sample count must be a power of two, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise InputError("samples must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "values", values)

    @property
    def N(self) -> int:
        return self.values.shape[0]

    @property
    def max_k(self) -> int:
        """Largest coefficient index kept clear of aliasing."""
        return self.N // 2 - 1


def circle_log_samples(c: ExpPolyCurve, i: int, r: float, N: int = DEFAULT_N) -> CircleSamples:
    """Samples of ``Re g_i`` (0-based component index) on ``|z| = r``."""
    if not (isinstance(i, (int, np.integer)) and 0 <= i < c.n):
        raise InputError(f"component index must be in [0, {c.n}), got {i}")
    return polynomial_log_samples(c.exponents[i], r, N)


def polynomial_log_samples(g: Polynomial, r: float, N: int = DEFAULT_N) -> CircleSamples:
    if not (is_power_of_two(N) and N >= 64):
        raise InputError(f"N must be a power of two >= 64, got {N}")
    if not (r > 0 and math.isfinite(r)):
        raise InputError(f"sample radius must be positive and finite, got {r}")
    z = r * np.exp(2j * math.pi * np.arange(N) / N)
    return CircleSamples(r, np.real(g(z)))


def _coefficients(s: CircleSamples, k_max: int) -> np.ndarray:
    """``a_0 .. a_{k_max}`` from one radius (``a_0`` real)."""
    spectrum = np.fft.fft(s.values)[: k_max + 1]
    k = np.arange(k_max + 1)
    out = 2.0 * spectrum / (s.N * float(s.r) ** k)
    out[0] = spectrum[0].real / s.N
    return out


def schwarz_coefficient(s: CircleSamples, k: int) -> complex:
    """``g^{(k)}(0) / k!`` from the samples, ``1 <= k <= N/2 - 1``."""
    if not (isinstance(k, (int, np.integer)) and 1 <= k <= s.max_k):
        raise InputError(f"k must lie in [1, {s.max_k}], got {k}")
    return complex(_coefficients(s, int(k))[k])


@dataclass(frozen=True)
class RecoveredPolynomial:
    coefficients: tuple
    discrepancies: tuple
    radii: tuple = ()
    # true where the coefficient survived zeroing and agreed across radii
    confirmed: tuple = field(default=())

    @property
    def degree(self) -> int:
        """Largest confirmed index (0 for constants)."""
        idx = [k for k, ok in enumerate(self.confirmed) if ok and k > 0]
        return max(idx) if idx else 0

    def as_polynomial(self) -> Polynomial:
        return Polynomial(self.coefficients)


def recover_polynomial(s1: CircleSamples, s2: CircleSamples, k_max: int = DEFAULT_KMAX,
                       tol: float = DEFAULT_TOL) -> RecoveredPolynomial:
    """Taylor coefficients from two radii (values taken at the larger one).

    A coefficient is zeroed when it is below ``tol * max(1, max_k |a_k|)`` at
    both radii.  It is *confirmed* when it survives and the two radii agree to
    ``tol * max(1, |a_k|)``.
    """
    if s1.r == s2.r:
        raise InputError("recovery needs two distinct radii")
    if not (isinstance(k_max, (int, np.integer)) and k_max >= 1):
        raise InputError(f"k_max must be a positive integer, got {k_max}")
    if k_max > min(s1.max_k, s2.max_k):
        raise InputError(f"k_max {k_max} exceeds the alias-free limit "
                         f"{min(s1.max_k, s2.max_k)} for these sample counts")
    if not tol > 0:
        raise InputError("tol must be positive")
    lo, hi = sorted((s1, s2), key=lambda s: s.r)
    a_lo = _coefficients(lo, int(k_max))
    a_hi = _coefficients(hi, int(k_max))
    small_lo = np.abs(a_lo) < tol * max(1.0, float(np.abs(a_lo).max()))
    small_hi = np.abs(a_hi) < tol * max(1.0, float(np.abs(a_hi).max()))
    zeroed = small_lo & small_hi
    coeffs = np.where(zeroed, 0.0, a_hi)
    disc = np.abs(a_hi - a_lo)
    confirmed = ~zeroed & (disc < tol * np.maximum(1.0, np.abs(a_hi)))
    return RecoveredPolynomial(tuple(complex(a) for a in coeffs), tuple(float(d) for d in disc),
                               (lo.r, hi.r), tuple(bool(x) for x in confirmed))


def detect_degree(s1: CircleSamples, s2: CircleSamples, k_max: int = DEFAULT_KMAX,
                  tol: float = DEFAULT_TOL) -> int:
    """Largest ``k`` with a confirmed non-zero coefficient (0 for constants)."""
    return recover_polynomial(s1, s2, k_max, tol).degree


@dataclass(frozen=True)
class Theorem1Report:
    m_hat: int
    slope: float | None
    component_degrees: tuple
    difference_degrees: dict
    max_degree: int
    degrees_bounded: bool
    max_attained: bool
    coefficient_error: float
    constant: bool = False

    @property
    def passed(self) -> bool:
        return self.degrees_bounded and self.max_attained


def _normwise_error(recovered: RecoveredPolynomial, truth: Polynomial) -> float:
    k = len(recovered.coefficients)
    est = np.array(recovered.coefficients)
    ref = np.zeros(max(k, truth.degree + 1 if truth.degree >= 0 else 1), dtype=complex)
    ref[: len(truth.coefficients)] = truth.coefficients
    ref[0] = ref[0].real
    est = np.pad(est, (0, ref.shape[0] - k))
    scale = float(np.abs(ref).max())
    return float(np.abs(est - ref).max() / scale) if scale > 0 else float(np.abs(est).max())


def theorem1_verify(c: ExpPolyCurve, radii: tuple = DEFAULT_RADII, N: int = DEFAULT_N,
                    k_max: int = DEFAULT_KMAX, tol: float = DEFAULT_TOL,
                    slope: float | None = None, r_max: float = 1e6, n_angles: int = 4096,
                    threads=None) -> Theorem1Report:
    """Degrees detected from circle samples against the measured growth.

    ``m_hat`` is the rounded growth-exponent slope (measured unless ``slope``
    is given).  Passing means every component and pairwise difference has
    detected degree ``<= m_hat + 1`` and the largest equals ``m_hat + 1``.
    ``coefficient_error`` is the worst normwise relative error of the
    recovered components against the true coefficients (gauge-fixed).
    """
    if c.is_constant:
        return Theorem1Report(-1, None, tuple(0 for _ in range(c.n)), {}, 0, True, True, 0.0,
                              constant=True)
    if slope is None:
        slope = growth_exponent(c, r_max=r_max, n_angles=n_angles, threads=threads).slope
    m_hat = int(round(slope))
    r1, r2 = radii

    def recover(g):
        return recover_polynomial(polynomial_log_samples(g, r1, N),
                                  polynomial_log_samples(g, r2, N), k_max, tol)

    comps = [recover(g) for g in c.exponents]
    diffs = {(i, j): recover(c.exponents[i] - c.exponents[j]).degree for i, j in c.pairs()}
    comp_deg = tuple(rp.degree for rp in comps)
    degrees = list(comp_deg) + list(diffs.values())
    max_deg = max(degrees)
    error = max(_normwise_error(rp, g) for rp, g in zip(comps, c.exponents))
    return Theorem1Report(m_hat, float(slope), comp_deg, diffs, max_deg,
                          all(d <= m_hat + 1 for d in degrees), max_deg == m_hat + 1, error)


@dataclass(frozen=True)
class SchwarzBound:
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs


def schwarz_bound_diagnostic(c: ExpPolyCurve, i: int, r: float, k: int,
                             N: int = DEFAULT_N, n_angles: int = 256) -> SchwarzBound:
    """Coefficient growth against the characteristic.

    From ``|Re g_i| <= L - Re g_i`` (``L`` the log partition) and the mean
    value property, ``r^k |a_k| / 4 <= T(r) + K_i`` with the explicit
    ``K_i = (1/4 pi) int L(e^{i theta}) d theta - Re g_i(0) / 2``.
    """
    s = circle_log_samples(c, i, r, N)
    lhs = float(r) ** k * abs(schwarz_coefficient(s, k)) / 4.0
    base, _, _ = circle_integral_log_partition(c, 1.0, n_angles)
    const = base / (4.0 * math.pi) - c.exponents[i](0.0).real / 2.0
    return SchwarzBound(lhs, characteristic_jensen(c, r, n_angles) + const)
