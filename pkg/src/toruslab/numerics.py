"""Small numerical utilities shared by the analysis modules."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _kernels
from .errors import InputError

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
MAX_ANGLES = 2 ** 20


def is_power_of_two(n: int) -> bool:
    return isinstance(n, (int, np.integer)) and n > 0 and (n & (n - 1)) == 0


def geometric_grid(r_min: float, r_max: float, points_per_decade: float | None = None) -> np.ndarray:
    """Radii ``r_min * q^j`` up to ``r_max`` (``r_max`` always included).

    The default ratio is ``q = 2^(1/4)``.
    """
    if not (r_min > 0 and r_max > r_min):
        raise InputError(f"need 0 < r_min < r_max, got {r_min}, {r_max}")
    log_q = math.log(2.0) / 4.0 if points_per_decade is None else math.log(10.0) / points_per_decade
    count = int(math.floor(math.log(r_max / r_min) / log_q + 1e-9))
    radii = r_min * np.exp(log_q * np.arange(count + 1))
    if r_max / radii[-1] > 1.0 + 1e-9:
        radii = np.append(radii, r_max)
    else:
        radii[-1] = r_max
    return radii


def top_decade(radii: np.ndarray) -> np.ndarray:
    """Boolean mask of radii within a factor 10 of the largest one."""
    radii = np.asarray(radii)
    return radii >= radii[-1] / 10.0 * (1.0 - 1e-12)


def loglog_slope(radii, values):
    """Least-squares slope of ``log values`` against ``log radii``.

    Returns ``(slope, intercept, rms_residual)``.
    """
    x = np.log(np.asarray(radii, dtype=float))
    y = np.asarray(values, dtype=float)
    if x.shape[0] < 2:
        raise InputError("need at least two radii for a slope fit")
    coef, res, *_ = np.polyfit(x, y, 1, full=True)
    rms = math.sqrt(float(res[0]) / x.shape[0]) if res.size else 0.0
    return float(coef[0]), float(coef[1]), rms


def golden_max(f, a: float, b: float, tol: float):
    """Golden-section search for a maximum of a unimodal ``f`` on ``[a, b]``.

    Returns ``(x, f(x))``.
    """
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def periodic_trapezoid(func, n_start: int, rtol: float = 1e-10, n_max: int = MAX_ANGLES):
    """Integrate a 2 pi-periodic ``func(theta_array)`` by the trapezoid rule.

    The node count doubles (reusing old samples) until the relative change
    falls below ``rtol`` or ``n_max`` nodes are used.  Sums are pairwise in a
    fixed order.  Returns ``(integral, n_used, converged)``.
    """
    if not is_power_of_two(n_start):
        raise InputError(f"angle count must be a power of two, got {n_start}")
    n = n_start
    total = _kernels.pairwise_sum(func(2.0 * math.pi * np.arange(n) / n))
    value = 2.0 * math.pi * total / n
    while n < n_max:
        odd = 2.0 * math.pi * (2.0 * np.arange(n) + 1.0) / (2 * n)
        total = total + _kernels.pairwise_sum(func(odd))
        n *= 2
        new = 2.0 * math.pi * total / n
        if abs(new - value) <= rtol * max(abs(new), 1e-300):
            return new, n, True
        value = new
    return value, n, False


def thread_count(threads: int | None = None) -> int:
    env = os.environ.get("TORUSLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InputError(f"TORUSLAB_THREADS must be an integer, got {env!r}") from None
    if threads is not None:
        return max(1, int(threads))
    return os.cpu_count() or 1


def ordered_map(func, items, threads: int | None = None) -> list:
    """``[func(x) for x in items]`` fanned out to a thread pool; order kept."""
    items = list(items)
    workers = min(thread_count(threads), len(items)) if items else 1
    if workers <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


# Gauss-Kronrod 7/15 abscissae and weights (QUADPACK dqk15)
_XGK = np.array([0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                 0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                 0.207784955007898467600689403773245, 0.0])
_WGK = np.array([0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                 0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                 0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                0.381830050505118944950369775488975, 0.417959183673469387755102040816327])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_W_K = np.concatenate([_WGK[:-1], _WGK[::-1]])
_W_G = np.zeros(15)
_W_G[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


def adaptive_gk(func, edges, rtol: float = 1e-10, max_rounds: int = 60,
                max_panels: int = 4096) -> float:
    """Integrate a vectorized ``func`` over consecutive panels ``edges``.

    Every round evaluates the 15-point Kronrod rule on all unsettled panels in
    one call and bisects those whose Kronrod/Gauss gap exceeds their share of
    ``rtol`` times the running total.  Refinement stops once more than
    ``max_panels`` panels would be evaluated (noise-limited integrands).
    Accepted contributions are summed in panel order, so the result does not
    depend on the refinement history.
    """
    lo = np.asarray(edges[:-1], dtype=float)
    hi = np.asarray(edges[1:], dtype=float)
    span = float(edges[-1] - edges[0])
    if not span > 0:
        return 0.0
    done_lo, done_val = [], []
    scale = None
    for round_ in range(max_rounds):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        fx = np.asarray(func((mid[:, None] + half[:, None] * _NODES).ravel()), dtype=float)
        fx = fx.reshape(lo.shape[0], 15)
        kron = half * (fx @ _W_K)
        err = np.abs(kron - half * (fx @ _W_G))
        if scale is None:
            scale = abs(math.fsum(kron))
        share = rtol * max(scale, 1e-300) * (hi - lo) / span
        ok = (err <= np.maximum(share, rtol * np.abs(kron))) | (half <= 1e-15 * np.abs(mid))
        if (ok.all() or round_ == max_rounds - 1
                or 2 * np.count_nonzero(~ok) > max_panels):
            done_lo.append(lo)
            done_val.append(kron)
            break
        done_lo.append(lo[ok])
        done_val.append(kron[ok])
        scale = abs(math.fsum(np.concatenate(done_val)) + math.fsum(kron[~ok]))
        lo, hi, mid = lo[~ok], hi[~ok], mid[~ok]
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
    starts = np.concatenate(done_lo)
    vals = np.concatenate(done_val)
    return math.fsum(vals[np.argsort(starts, kind="stable")])


def graded_edges(a: float, b: float, anchors=(), levels: int = 48) -> np.ndarray:
    """Panel edges on ``[a, b]`` graded geometrically (ratio 2, down to
    ``2^-levels`` of the width) towards both endpoints and every anchor."""
    width = b - a
    steps = width * 0.5 ** np.arange(1, levels + 1)
    cuts = [np.array([a, b]), a + steps, b - steps]
    for x in anchors:
        if a < x < b:
            cuts += [np.array([x]), x - steps, x + steps]
    cuts = np.unique(np.concatenate(cuts))
    return cuts[(cuts >= a) & (cuts <= b)]


def graded_integral(func, a: float, b: float, anchors=(), rtol: float = 1e-10,
                    levels: int = 48) -> float:
    """:func:`adaptive_gk` on :func:`graded_edges`, so boundary layers and
    narrow peaks at known places cannot slip between the first-pass nodes."""
    if not b > a:
        return 0.0
    return adaptive_gk(func, graded_edges(a, b, anchors, levels), rtol)
