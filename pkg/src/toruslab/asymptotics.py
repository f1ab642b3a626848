"""Radial growth statistics of exponential-polynomial curves.

* circle maxima of ``|df|`` and the log-log growth exponent, which tends to
  the growth degree ``m``;
* polynomial bound constants ``sup |df| / r^lambda`` and the floor-exponent
  check;
* the Shimizu-Ahlfors characteristic ``T(r, f)``, both through the circle
  form of Jensen's formula and by brute-force double quadrature, and the
  order estimate built on it (tends to ``m + 1``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _anchors, _kernels
from .curve import ExpPolyCurve
from .errors import InputError, NumericalError, UndefinedQuantityError
from .numerics import (MAX_ANGLES, geometric_grid, golden_max, is_power_of_two,
                       loglog_slope, ordered_map, periodic_trapezoid, top_decade)

_EPS = np.finfo(float).eps
# ties dominated by another level by more than this are skipped
_PRUNE_GAP = 80.0
_LOCAL_POINTS = 257
_LOCAL_HALF_WIDTH = 40.0
MONOTONE_SLOPE_TOL = 0.05


@dataclass(frozen=True)
class RadialProfile:
    """Values sampled on an increasing radius grid.

    ``kind`` is one of ``max_norm``, ``max_log_norm``, ``characteristic``,
    ``ratio``; log-valued profiles use ``-inf`` for the log of zero.
    """

    radii: np.ndarray
    values: np.ndarray
    kind: str

    def __post_init__(self):
        radii = np.asarray(self.radii, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if radii.shape != values.shape:
            raise InputError("radii and values must have equal length")
        if radii.size > 1 and np.any(np.diff(radii) <= 0):
            raise InputError("radii must be strictly increasing")
        if np.any(np.isnan(values)) or np.any(values == np.inf):
            raise NumericalError(f"non-finite value in {self.kind} profile")
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "values", values)

    def rows(self):
        return list(zip(self.radii.tolist(), self.values.tolist()))


@dataclass(frozen=True)
class ExponentEstimate:
    slope: float
    window: tuple
    pointwise_ratios: RadialProfile
    residual: float
    profile: RadialProfile


class BoundCheck(NamedTuple):
    C_hat: float
    monotone_ok: bool
    slope: float


@dataclass(frozen=True)
class FloorExponentReport:
    lam: float
    floor_exponent: int
    hypothesis_ok: bool
    holds: bool
    C_hat_lambda: float
    C_hat_floor: float

    @property
    def passed(self) -> bool:
        return self.hypothesis_ok and self.holds


# ---------------------------------------------------------------------------
# circle maxima
# ---------------------------------------------------------------------------

def _check_angles(n_angles, minimum):
    if not is_power_of_two(n_angles) or n_angles < minimum:
        raise InputError(f"angle count must be a power of two >= {minimum}, got {n_angles}")


def _tie_pairs(rows):
    out = []
    for a in range(rows.shape[0]):
        for b in range(a + 1, rows.shape[0]):
            p = np.trim_zeros(rows[b] - rows[a], "b")
            if p.shape[0] >= 2:
                out.append((a, b, p))
    return out


def _dominated(rows, a, b, r, theta, err):
    z = r * complex(math.cos(theta), math.sin(theta))
    val, _ = _kernels.eval_rows(rows, np.array([z]))
    lev = 2.0 * val[:, 0].real
    tie = max(lev[a], lev[b])
    others = np.delete(lev, [a, b])
    if others.size == 0:
        return False
    return float(others.max()) - tie > _PRUNE_GAP + err


def _local_max(frame, cap):
    if frame.rate > 0:
        half = min(_LOCAL_HALF_WIDTH / frame.rate, cap)
    else:
        half = cap
    eps = np.linspace(-half, half, _LOCAL_POINTS)
    dens = _kernels.density(frame.rows, frame.offsets(eps))
    j = int(np.argmax(dens))
    lo, hi = eps[max(j - 1, 0)], eps[min(j + 1, eps.size - 1)]

    def f(e):
        return float(_kernels.density(frame.rows, frame.offsets(np.array([e])))[0])

    _, best = golden_max(f, lo, hi, 1e-10 * min(1.0, half))
    return max(best, float(dens[j]))


def circle_max_density(c: ExpPolyCurve, r: float, n_angles: int = 4096) -> float:
    """``max_{|z|=r} |df|^2``.

    A uniform angular scan is refined by golden-section search in the best
    cell.  In addition every zero of ``Re p`` on the circle, for ``p`` an
    exponent or a difference of two exponents, is examined in a recentred
    frame (see ``_anchors``); this is where the sharp peaks of ``|df|`` live
    at large radii.
    """
    if not (r >= 0 and math.isfinite(r)):
        raise InputError(f"radius must be finite and >= 0, got {r}")
    _check_angles(n_angles, 64)
    if c.is_constant:
        return 0.0
    rows = np.asarray(c.homogeneous)
    if r == 0:
        return float(_kernels.density(rows, np.zeros(1, dtype=np.complex128))[0])

    step = 2.0 * math.pi / n_angles
    theta = step * np.arange(n_angles)
    dens = _kernels.density(rows, r * np.exp(1j * theta))
    if np.isnan(dens).any():
        raise NumericalError("density overflow on circle", stage="circle_max_norm")
    j = int(np.argmax(dens))

    def on_circle(t):
        return float(_kernels.density(rows, np.array([r * complex(math.cos(t), math.sin(t))]))[0])

    _, refined = golden_max(on_circle, theta[j] - step, theta[j] + step, 1e-10)
    best = max(float(dens[j]), refined)

    high = _anchors.needs_high_precision(rows, r)
    err = 4.0 * 64.0 * _EPS * _anchors.magnitude_bound(rows, r)
    cap = 4.0 * step
    for a, b, p in _tie_pairs(rows):
        for th in _anchors.circle_zeros(p, r):
            if _dominated(rows, a, b, r, th, err):
                continue
            frame = _anchors.local_frame(rows, (a, b), r, th, high_precision=high)
            best = max(best, _local_max(frame, cap))
    return best


def circle_max_norm(c: ExpPolyCurve, r: float, n_angles: int = 4096) -> float:
    """``max_{|z|=r} |df|``."""
    return math.sqrt(circle_max_density(c, r, n_angles))


def max_norm_profile(c: ExpPolyCurve, radii, n_angles: int = 4096, threads=None) -> RadialProfile:
    radii = np.asarray(radii, dtype=float)
    values = ordered_map(lambda r: circle_max_norm(c, float(r), n_angles), radii, threads)
    return RadialProfile(radii, np.array(values), "max_norm")


def disk_max_profile(profile: RadialProfile) -> RadialProfile:
    """Running maximum of circle maxima: ``max_{|z| <= r} |df|`` on the grid."""
    return RadialProfile(profile.radii, np.maximum.accumulate(profile.values), profile.kind)


# ---------------------------------------------------------------------------
# growth exponent and polynomial bounds
# ---------------------------------------------------------------------------

def _log_values(values):
    with np.errstate(divide="ignore"):
        return np.log(values)


def _fit_top_decade(profile: RadialProfile):
    mask = top_decade(profile.radii)
    logs = _log_values(profile.values[mask])
    if not np.all(np.isfinite(logs)):
        raise NumericalError("zero circle maximum inside the fit window", stage="growth_exponent")
    slope, _, rms = loglog_slope(profile.radii[mask], logs)
    window = (float(profile.radii[mask][0]), float(profile.radii[mask][-1]))
    return slope, window, rms


def growth_exponent(c: ExpPolyCurve, r_min: float = 1.0, r_max: float = 1e6,
                    points_per_decade: float | None = None, n_angles: int = 4096,
                    profile: RadialProfile | None = None, threads=None) -> ExponentEstimate:
    """Estimate ``limsup log max_{|z|=r} |df| / log r`` by a log-log fit.

    The slope is fitted over the top decade of the radius grid only.
    """
    if c.is_constant:
        raise UndefinedQuantityError("growth exponent undefined for a constant map (m = -1)")
    if not (1.0 <= r_min < r_max):
        raise InputError(f"need 1 <= r_min < r_max, got {r_min}, {r_max}")
    if profile is None:
        radii = geometric_grid(r_min, r_max, points_per_decade)
        profile = max_norm_profile(c, radii, n_angles, threads)
    slope, window, rms = _fit_top_decade(profile)
    keep = profile.radii > 1.0
    ratios = _log_values(profile.values[keep]) / np.log(profile.radii[keep])
    return ExponentEstimate(slope, window, RadialProfile(profile.radii[keep], ratios, "ratio"),
                            rms, profile)


def polynomial_bound_constant(c: ExpPolyCurve, exponent: float, r_min: float = 1.0,
                              r_max: float = 1e6, n_angles: int = 4096,
                              profile: RadialProfile | None = None, threads=None) -> BoundCheck:
    """Empirical ``sup_r max|df| / r^exponent`` and a finiteness verdict.

    ``monotone_ok`` is true when the log-log slope of the ratio over the top
    decade is at most 0.05.
    """
    if exponent < 0:
        raise InputError("exponent must be non-negative")
    if not (1.0 <= r_min < r_max):
        raise InputError(f"need 1 <= r_min < r_max, got {r_min}, {r_max}")
    if profile is None:
        profile = max_norm_profile(c, geometric_grid(r_min, r_max), n_angles, threads)
    ratio = profile.values / profile.radii ** exponent
    c_hat = float(ratio.max())
    if c_hat == 0.0:
        return BoundCheck(0.0, True, 0.0)
    mask = top_decade(profile.radii)
    logs = _log_values(ratio[mask])
    if not np.all(np.isfinite(logs)):
        raise NumericalError("zero ratio inside the fit window", stage="polynomial_bound_constant")
    slope, _, _ = loglog_slope(profile.radii[mask], logs)
    return BoundCheck(c_hat, slope <= MONOTONE_SLOPE_TOL, slope)


def floor_exponent_check(c: ExpPolyCurve, lam: float, r_min: float = 1.0, r_max: float = 1e6,
                         n_angles: int = 4096, threads=None) -> FloorExponentReport:
    """Check that a bound with exponent ``lam`` also holds with ``floor(lam)``."""
    if lam < 0:
        raise InputError("lambda must be non-negative")
    floor = int(math.floor(lam))
    profile = max_norm_profile(c, geometric_grid(r_min, r_max), n_angles, threads)
    at_lam = polynomial_bound_constant(c, lam, r_min, r_max, profile=profile)
    at_floor = polynomial_bound_constant(c, floor, r_min, r_max, profile=profile)
    return FloorExponentReport(lam, floor, at_lam.monotone_ok, at_floor.monotone_ok,
                               at_lam.C_hat, at_floor.C_hat)


# ---------------------------------------------------------------------------
# Shimizu-Ahlfors characteristic
# ---------------------------------------------------------------------------

def circle_integral_log_partition(c: ExpPolyCurve, r: float, n_angles: int = 256,
                                  rtol: float = 1e-10):
    """``(integral of L over |z| = r in d theta, nodes used, converged)``."""
    rows = np.asarray(c.homogeneous)
    return periodic_trapezoid(lambda th: _kernels.log_partition(rows, r * np.exp(1j * th)),
                              n_angles, rtol, MAX_ANGLES)


def characteristic_jensen(c: ExpPolyCurve, r: float, n_angles: int = 256) -> float:
    """``T(r, f)`` as a difference of circle integrals of ``L``."""
    if not (r >= 1.0 and math.isfinite(r)):
        raise InputError(f"characteristic needs finite r >= 1, got {r}")
    _check_angles(n_angles, 256)
    if r == 1.0 or c.is_constant:
        return 0.0
    outer, _, _ = circle_integral_log_partition(c, r, n_angles)
    inner, _, _ = circle_integral_log_partition(c, 1.0, n_angles)
    t = (outer - inner) / (4.0 * math.pi)
    if not math.isfinite(t):
        raise NumericalError("non-finite characteristic", stage="characteristic_jensen")
    if t < 0:
        if -t > 1e-9 * (abs(outer) + abs(inner)) / (4.0 * math.pi):
            raise NumericalError(f"negative characteristic {t}", stage="characteristic_jensen")
        t = 0.0
    return t


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(6)


def _panel_nodes(edges):
    a, b = edges[:-1], edges[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    weights = half[:, None] * _GL_WEIGHTS[None, :]
    return nodes, weights


def _circle_sums(rows, rho, n_angles):
    theta = 2.0 * math.pi * np.arange(n_angles) / n_angles
    ring = np.exp(1j * theta)
    out = np.empty(rho.shape[0])
    chunk = max(1, 2 ** 21 // n_angles)
    for s in range(0, rho.shape[0], chunk):
        block = rho[s:s + chunk]
        dens = _kernels.density(rows, (block[:, None] * ring[None, :]).ravel())
        out[s:s + chunk] = dens.reshape(block.shape[0], n_angles).sum(axis=1)
    return out * (2.0 * math.pi / n_angles)


def characteristic_direct(c: ExpPolyCurve, r: float, radial_points: int = 512,
                          n_angles: int = 512) -> float:
    """Brute-force ``T(r, f) = int_1^r dt/t int_{|z|<=t} |df|^2`` (r <= 10).

    Outer integral: trapezoid rule in ``log t`` with one Richardson step.
    Disk integrals: cumulative Gauss-Legendre panels in the radius between
    consecutive outer nodes, periodic trapezoid in the angle.
    """
    if not (1.0 <= r <= 10.0):
        raise InputError(f"direct characteristic is an oracle for 1 <= r <= 10, got {r}")
    if radial_points < 2 or radial_points % 2:
        raise InputError("radial_points must be an even integer >= 2")
    _check_angles(n_angles, 64)
    if r == 1.0 or c.is_constant:
        return 0.0
    rows = np.asarray(c.homogeneous)

    # settle the angular resolution at the outermost circle
    probe = np.array([r])
    while n_angles < 2 ** 14:
        a = _circle_sums(rows, probe, n_angles)[0]
        b = _circle_sums(rows, probe, 2 * n_angles)[0]
        if abs(a - b) <= 1e-13 * max(abs(b), 1e-300):
            break
        n_angles *= 2

    s = np.linspace(0.0, math.log(r), radial_points + 1)
    t = np.exp(s)
    inner_edges = np.linspace(0.0, 1.0, 9)
    edges = np.concatenate([inner_edges, t[1:]])
    nodes, weights = _panel_nodes(edges)
    sums = _circle_sums(rows, nodes.ravel(), n_angles).reshape(nodes.shape)
    panel = (weights * nodes * sums).sum(axis=1)
    cumulative = np.cumsum(panel)
    disk = np.concatenate([[cumulative[len(inner_edges) - 2]], cumulative[len(inner_edges) - 1:]])

    h = s[1] - s[0]
    fine = h * (disk.sum() - 0.5 * (disk[0] + disk[-1]))
    coarse = 2 * h * (disk[::2].sum() - 0.5 * (disk[0] + disk[-1]))
    return float((4.0 * fine - coarse) / 3.0)


def characteristic_profile(c: ExpPolyCurve, radii, n_angles: int = 256, threads=None) -> RadialProfile:
    radii = np.asarray(radii, dtype=float)
    values = ordered_map(lambda r: characteristic_jensen(c, float(r), n_angles), radii, threads)
    return RadialProfile(radii, np.array(values), "characteristic")


def is_nondecreasing(profile: RadialProfile, rtol: float = 1e-12) -> bool:
    v = profile.values
    return bool(np.all(v[1:] >= v[:-1] - rtol * np.abs(v[1:])))


def order_estimate(c: ExpPolyCurve, r_max: float = 1e6, n_angles: int = 256,
                   profile: RadialProfile | None = None, threads=None) -> float:
    """Log-log slope of ``T(r, f)`` over the top decade below ``r_max``."""
    if c.is_constant:
        raise UndefinedQuantityError("order undefined for a constant map (T vanishes)")
    if profile is None:
        if r_max <= 1.0:
            raise InputError("r_max must exceed 1")
        profile = characteristic_profile(c, geometric_grid(max(1.0, r_max / 10.0), r_max),
                                         n_angles, threads)
    mask = top_decade(profile.radii) & (profile.values > 0)
    if mask.sum() < 2:
        raise NumericalError("characteristic vanishes on the fit window", stage="order_estimate")
    slope, _, _ = loglog_slope(profile.radii[mask], np.log(profile.values[mask]))
    return slope
