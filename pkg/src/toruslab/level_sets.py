"""Angular level sets ``E(r) = {theta : |Re g(r e^{i theta})| <= C r^delta}``.

Measures are compared with the bound ``8 C / (|a_0| r^{k - delta})`` (``a_0``
the leading coefficient, ``k = deg g``); the asymptotic ratio
``measure |a_0| r^{k-delta}`` is ``4 C``.

Two regimes:

* *scan*: ``Re g`` is resolvable in double relative to the threshold.  The
  scan nodes are a uniform grid plus every zero of ``phi = Re g`` and of
  ``phi'`` on the circle, which guarantees that each component of
  ``{|phi| <= t}`` contains a node and each gap between nodes holds at most
  one threshold crossing; crossings are then bisected.
* *anchored*: the sub-threshold bands are narrower than double resolution in
  ``theta``.  Each band is measured around its zero of ``phi`` in a
  high-precision recentred frame (see ``_anchors``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from . import _anchors, _kernels
from .asymptotics import circle_max_density
from .curve import ExpPolyCurve, Polynomial
from .errors import InputError, NumericalError
from .geometry import component_norm, fs_density
from .numerics import adaptive_gk, graded_edges, graded_integral

TWO_PI = 2.0 * math.pi
_EPS = np.finfo(float).eps
# scan regime only if the double error of Re g is this small relative to t
_SCAN_REL_ERR = 1e-6
LEMMA_CONSTANT = 8.0


def _phi(coeffs, r, theta):
    z = r * np.exp(1j * np.asarray(theta, dtype=float))
    acc = np.zeros_like(z)
    for a in coeffs[::-1]:
        acc = acc * z + a
    return acc.real


def _check_args(r, delta, n_scan):
    if not (r > 0 and math.isfinite(r)):
        raise InputError(f"radius must be positive and finite, got {r}")
    if not (0.0 < delta <= 1.0):
        raise InputError(f"delta must lie in (0, 1], got {delta}")
    if n_scan < 4096:
        raise InputError(f"n_scan must be at least 4096, got {n_scan}")


def _scan_intervals(coeffs, r, t, n_scan):
    deriv = np.array([1j * k * a for k, a in enumerate(coeffs)])
    nodes = np.concatenate([
        TWO_PI * np.arange(n_scan) / n_scan,
        _anchors.circle_zeros(coeffs, r),
        _anchors.circle_zeros(deriv, r),
    ])
    nodes = np.unique(nodes % TWO_PI)
    nodes = np.append(nodes, nodes[0] + TWO_PI)
    psi = np.abs(_phi(coeffs, r, nodes)) - t
    inside = psi <= 0

    lo, hi = nodes[:-1], nodes[1:]
    flip = inside[:-1] != inside[1:]
    a, b = lo[flip].copy(), hi[flip].copy()
    a_in = inside[:-1][flip]
    # bisect to full double resolution (well below the 1e-12 target): the
    # excised-set integrals are sensitive to edge placement
    for _ in range(64):
        mid = 0.5 * (a + b)
        if not a.size or not np.any((mid > a) & (mid < b)):
            break
        mid_in = np.abs(_phi(coeffs, r, mid)) - t <= 0
        same = mid_in == a_in
        a = np.where(same, mid, a)
        b = np.where(same, b, mid)
    cross = 0.5 * (a + b)

    # walk the circle, emitting sub-threshold intervals
    intervals = []
    k = 0
    start = lo[0] if inside[0] else None
    for i in range(lo.shape[0]):
        if flip[i]:
            if inside[i]:
                intervals.append((start, cross[k]))
                start = None
            else:
                start = cross[k]
            k += 1
    if start is not None:
        intervals.append((start, nodes[-1]))
    if inside.all():
        return [(0.0, TWO_PI)]
    # merge the piece wrapping past 2 pi with the one starting at 0
    if len(intervals) > 1 and inside[0] and intervals[-1][1] == nodes[-1]:
        first = intervals.pop(0)
        last = intervals.pop()
        intervals.append((last[0], first[1] + TWO_PI))
    return intervals


def _band_edge(phi_local, t, direction, scale):
    step = scale
    for _ in range(400):
        if abs(phi_local(direction * step)) > t:
            break
        step *= 2.0
    else:
        raise NumericalError("level-set band edge not bracketed", stage="level_set_measure")
    lo, hi = 0.0, step
    while hi - lo > 1e-13 * hi:
        mid = 0.5 * (lo + hi)
        if abs(phi_local(direction * mid)) > t:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _anchored_intervals(coeffs, r, t):
    """Bands around each zero of ``Re g``, as ``(theta*, eps_lo, eps_hi)``."""
    mag_err = 64.0 * _EPS * _anchors.magnitude_bound(coeffs, r)
    deriv = np.array([1j * k * a for k, a in enumerate(coeffs)])
    crit = _anchors.circle_zeros(deriv, r)
    if crit.size and np.min(np.abs(_phi(coeffs, r, crit))) - mag_err <= t:
        raise NumericalError("near-tangential level set beyond double resolution",
                             stage="level_set_measure")
    zeros = _anchors.circle_zeros(coeffs, r)
    bands = []
    for th in zeros:
        frame = _anchors.local_frame(coeffs[None, :], (None, 0), r, th, high_precision=True)
        local = frame.rows[0]

        def phi_local(e, frame=frame, local=local):
            w = frame.offsets(np.array([e]))[0]
            acc = 0j
            for a in local[::-1]:
                acc = acc * w + a
            return acc.real

        scale = t / frame.rate if frame.rate > 0 else 1e-300
        bands.append((frame.theta, -_band_edge(phi_local, t, -1.0, scale),
                      _band_edge(phi_local, t, 1.0, scale)))
    if len(bands) > 1:
        centres = np.array([b[0] for b in bands])
        gaps = np.diff(np.append(centres, centres[0] + TWO_PI))
        widest = max(b[2] - b[1] for b in bands)
        if widest >= 0.5 * gaps.min():
            raise NumericalError("level-set bands overlap", stage="level_set_measure")
    return bands


def _threshold(r, delta, scale):
    return scale * r ** delta


def level_set_intervals(g: Polynomial, r: float, delta: float = 1.0, n_scan: int = 4096,
                        scale: float = 1.0) -> list:
    """Sub-threshold angle intervals ``(start, end)``; ``end`` may exceed 2 pi.

    In the anchored regime interval endpoints are only accurate to double
    precision in ``theta``; use :func:`level_set_measure` for the measure.
    """
    _check_args(r, delta, n_scan)
    coeffs = np.asarray(g.array)
    t = _threshold(r, delta, scale)
    if g.degree <= 0:
        return [(0.0, TWO_PI)] if abs(coeffs[0].real) <= t else []
    if 64.0 * _EPS * _anchors.magnitude_bound(coeffs, r) <= _SCAN_REL_ERR * t:
        return _scan_intervals(coeffs, r, t, n_scan)
    return [(th + lo, th + hi) for th, lo, hi in _anchored_intervals(coeffs, r, t)]


def level_set_measure(g: Polynomial, r: float, delta: float = 1.0, n_scan: int = 4096,
                      scale: float = 1.0) -> float:
    """Lebesgue measure of ``{theta : |Re g(r e^{i theta})| <= scale r^delta}``."""
    _check_args(r, delta, n_scan)
    coeffs = np.asarray(g.array)
    t = _threshold(r, delta, scale)
    if g.degree <= 0:
        return TWO_PI if abs(coeffs[0].real) <= t else 0.0
    if 64.0 * _EPS * _anchors.magnitude_bound(coeffs, r) <= _SCAN_REL_ERR * t:
        measure = math.fsum(b - a for a, b in _scan_intervals(coeffs, r, t, n_scan))
    else:
        measure = math.fsum(hi - lo for _, lo, hi in _anchored_intervals(coeffs, r, t))
    return min(measure, TWO_PI)


@dataclass(frozen=True)
class LevelSetReport:
    r: float
    measure: float
    bound: float
    ratio: float
    r0_empirical: float | None

    @property
    def holds(self) -> bool:
        return self.measure <= self.bound


def level_set_reports(g: Polynomial, radii, delta: float = 1.0, scale: float = 1.0,
                      n_scan: int = 4096, constant: float = LEMMA_CONSTANT) -> list:
    """Measure vs. ``constant * scale / (|a_0| r^{k - delta})`` on a radius grid.

    ``r0_empirical`` is the smallest grid radius from which the bound holds at
    every larger grid radius (``None`` if it fails at the last one).
    """
    k = g.degree
    if k < 2:
        raise InputError(f"level-set bounds assume degree >= 2, got {k}")
    lead = abs(g.leading)
    rows = []
    for r in np.asarray(radii, dtype=float):
        measure = level_set_measure(g, float(r), delta, n_scan, scale)
        scaled = lead * float(r) ** (k - delta)
        rows.append((float(r), measure, constant * scale / scaled, measure * scaled))
    r0 = None
    for r, measure, bound, _ in reversed(rows):
        if measure > bound:
            break
        r0 = r
    return [LevelSetReport(r, m, b, q, r0) for r, m, b, q in rows]


def monic_bound_check(g: Polynomial, C: float, radii, n_scan: int = 4096) -> list:
    """Level sets of ``|Re g| <= C |z|`` for monic ``g`` against ``8C/r^{k-1}``."""
    if g.leading != 1:
        raise InputError("polynomial must be monic; rescale and rotate it first")
    if not C > 0:
        raise InputError("C must be positive")
    return level_set_reports(g, radii, delta=1.0, scale=C, n_scan=n_scan)


def cos_level_measure(k: int, perturbation=None, t: float = 0.0, n_grid: int = 10 ** 6,
                      domain: tuple = (0.0, TWO_PI)) -> float:
    """Brute-force measure of ``{x : |cos kx + u(x)| <= t}`` by cell counting.

    ``perturbation`` is ``None``, a callable, or an array of its values at the
    ``n_grid`` cell midpoints of ``domain``.
    """
    if t < 0:
        raise InputError("t must be non-negative")
    lo, hi = map(float, domain)
    h = (hi - lo) / n_grid
    if perturbation is None:
        pert = np.zeros(n_grid)
    elif callable(perturbation):
        pert = np.asarray(perturbation(lo + (np.arange(n_grid) + 0.5) * h), dtype=float)
    else:
        pert = np.asarray(perturbation, dtype=float)
    if pert.shape != (n_grid,):
        raise InputError(f"perturbation must have {n_grid} samples")
    return _kernels.cos_level_count(k, pert, t, lo, hi) * h


# ---------------------------------------------------------------------------
# integrals split along E
# ---------------------------------------------------------------------------

def _complement(intervals):
    """Gaps of a union of intervals on the circle (inputs may pass 2 pi)."""
    if not intervals:
        return [(0.0, TWO_PI)]
    pieces = []
    for a, b in intervals:
        a0 = a % TWO_PI
        b0 = a0 + (b - a)
        if b - a >= TWO_PI:
            return []
        if b0 > TWO_PI:
            pieces += [(a0, TWO_PI), (0.0, b0 - TWO_PI)]
        else:
            pieces.append((a0, b0))
    pieces.sort()
    merged = [list(pieces[0])]
    for a, b in pieces[1:]:
        if a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    gaps = []
    prev = merged[0][1]
    for a, b in merged[1:]:
        gaps.append((prev, a))
        prev = b
    if merged[0][0] > 0 or prev < TWO_PI:
        gaps.append((prev, merged[0][0] + TWO_PI))
    return [(a, b) for a, b in gaps if b > a]


def _union(intervals):
    return _complement(_complement(intervals))


def _angular(func, intervals, rtol, anchors=()):
    anchors = np.asarray(anchors, dtype=float)
    total = 0.0
    for a, b in intervals:
        # anchors are reported in [0, 2 pi); intervals may run past 2 pi
        inside = np.concatenate([anchors, anchors + TWO_PI])
        total += graded_integral(func, a, b, inside[(inside > a) & (inside < b)], rtol)
    return total


def _on_circle(rho, theta):
    return rho * np.exp(1j * theta)


def tail_integral(g: Polynomial, delta: float = 1.0, r_lo: float = 1.0, r_hi: float = 2.0,
                  rtol: float = 1e-5, n_scan: int = 4096) -> float:
    """Integral of ``component_norm(g)^2`` over the annulus minus ``E``.

    The integrand falls off like ``exp(-2 |Re g|)`` across each excised edge,
    so rounding in the edge positions caps the attainable relative accuracy
    near ``k |a_0| r^k 1e-16``; the default ``rtol`` reflects that.
    """
    if not (0 < r_lo < r_hi):
        raise InputError(f"need 0 < r_lo < r_hi, got {r_lo}, {r_hi}")
    if g.degree < 1:
        return 0.0

    def ring(rho):
        gaps = _complement(level_set_intervals(g, rho, delta, n_scan))
        if not gaps:
            return 0.0
        # inner noise must sit well below the outer tolerance
        return rho * _angular(lambda th: component_norm(g, _on_circle(rho, th)) ** 2,
                              gaps, 1e-3 * rtol)

    return adaptive_gk(lambda x: np.array([ring(float(rho)) for rho in x]),
                       graded_edges(r_lo, r_hi, levels=8), rtol)


class SplitIntegral(NamedTuple):
    on_E: float
    off_E: float


def exceptional_polynomials(c: ExpPolyCurve, delta: float = 1.0,
                            threshold_degree: int | None = None) -> list:
    """Exponents and pairwise differences that carry a nonempty set ``E``.

    With ``delta == 1`` these are the ones of degree at least ``m + 2``;
    for ``delta < 1`` (the sharpened variant) degree at least ``m + 1``.
    ``m`` is the curve's growth degree unless ``threshold_degree`` overrides it.
    """
    m = c.m if threshold_degree is None else int(threshold_degree)
    cutoff = m + 2 if delta >= 1.0 else m + 1
    polys = list(c.exponents) + [c.exponents[i] - c.exponents[j] for i, j in c.pairs()]
    return [p for p in polys if p.degree >= max(cutoff, 1)]


def _exceptional_intervals(polys, rho, delta, n_scan):
    out = []
    for p in polys:
        out += level_set_intervals(p, rho, delta, n_scan)
    return _union(out)


def _radial(func, r, rtol):
    """``int_0^r rho log(r / max(1, rho)) func(rho) d rho``."""
    def integrand(x):
        return np.array([rho * math.log(r / max(1.0, rho)) * func(float(rho)) for rho in x])

    edges = np.concatenate([np.linspace(0.0, 1.0, 5), np.linspace(1.0, r, 9)[1:]])
    return adaptive_gk(integrand, edges, rtol)


def split_integral_profile(c: ExpPolyCurve, r: float, delta: float = 1.0,
                           threshold_degree: int | None = None, rtol: float = 1e-9,
                           n_scan: int = 4096) -> SplitIntegral:
    """Split ``T(r, f)`` into the parts over ``E`` and over its complement.

    Uses ``int_1^r dt/t int_{|z|<=t} F = int_0^r rho log(r/max(1,rho)) int F d theta d rho``
    and integrates ``|df|^2`` separately over ``E(rho)`` and its complement.
    """
    if not r >= 1.0:
        raise InputError(f"need r >= 1, got {r}")
    if not (0.0 < delta <= 1.0):
        raise InputError(f"delta must lie in (0, 1], got {delta}")
    if c.is_constant or r == 1.0:
        return SplitIntegral(0.0, 0.0)
    polys = exceptional_polynomials(c, delta, threshold_degree)

    ties = [p.array for p in c.exponents] + [(c.exponents[i] - c.exponents[j]).array
                                             for i, j in c.pairs()]

    def parts(rho):
        density = lambda th: fs_density(c, _on_circle(rho, th))  # noqa: E731
        peaks = np.concatenate([_anchors.circle_zeros(p, rho) for p in ties])
        inside = _exceptional_intervals(polys, rho, delta, n_scan) if polys else []
        return (_angular(density, inside, rtol, peaks),
                _angular(density, _complement(inside), rtol, peaks))

    cache = {}

    def on(rho):
        if rho not in cache:
            cache[rho] = parts(rho)
        return cache[rho][0]

    def off(rho):
        if rho not in cache:
            cache[rho] = parts(rho)
        return cache[rho][1]

    return SplitIntegral(_radial(on, r, rtol), _radial(off, r, rtol))


def first_term_bound(c: ExpPolyCurve, r: float, delta: float = 1.0,
                     threshold_degree: int | None = None, rtol: float = 1e-7,
                     n_scan: int = 4096, n_angles: int = 4096) -> float:
    """Upper bound for the ``E`` part: ``max_{|z|=rho} |df|^2 * |E(rho)|``
    integrated with the same radial weight."""
    polys = exceptional_polynomials(c, delta, threshold_degree)
    if not polys or c.is_constant or r == 1.0:
        return 0.0

    def ring(rho):
        measure = sum(b - a for a, b in _exceptional_intervals(polys, rho, delta, n_scan))
        return circle_max_density(c, rho, n_angles) * measure

    return _radial(ring, r, rtol)
