"""Hot numeric kernels, each in a numba loop form and a vectorised numpy form.

All curve kernels work on a *homogeneous* coefficient matrix: row ``l`` holds
the ascending coefficients of the exponent attached to homogeneous coordinate
``l``.  An ordinary curve ``[1 : e^{g_1} : ... : e^{g_n}]`` uses a zero first
row.  Working homogeneously lets callers shift every exponent by a common
constant (see ``_anchors``) without changing the metric.

The public names at the bottom dispatch on ``_accel.USE_NUMBA``.
"""

import math

import numpy as np

from . import _accel
from ._accel import njit

INV_PI = 1.0 / math.pi
_EXP_FLOOR = -745.0  # exp() underflows to zero below this
_BLOCK = 128


# --------------------------------------------------------------------------
# numba loop kernels
# --------------------------------------------------------------------------

@njit
def _horner_nb(coef, row, z):
    deg = coef.shape[1] - 1
    p = coef[row, deg]
    dp = 0.0 + 0.0j
    for k in range(deg - 1, -1, -1):
        dp = dp * z + p
        p = p * z + coef[row, k]
    return p, dp


@njit
def _eval_rows_nb(coef, z):
    rows = coef.shape[0]
    m = z.shape[0]
    val = np.empty((rows, m), dtype=np.complex128)
    der = np.empty((rows, m), dtype=np.complex128)
    for i in range(m):
        for r in range(rows):
            p, dp = _horner_nb(coef, r, z[i])
            val[r, i] = p
            der[r, i] = dp
    return val, der


@njit
def _density_nb(coef, z):
    rows = coef.shape[0]
    m = z.shape[0]
    out = np.empty(m)
    lev = np.empty(rows)
    der = np.empty(rows, dtype=np.complex128)
    for i in range(m):
        vmax = -np.inf
        for r in range(rows):
            p, dp = _horner_nb(coef, r, z[i])
            lev[r] = 2.0 * p.real
            der[r] = dp
            if lev[r] > vmax:
                vmax = lev[r]
        if not np.isfinite(vmax):
            out[i] = np.nan
            continue
        s = 0.0
        for r in range(rows):
            s += math.exp(lev[r] - vmax)
        log_s = math.log(s)
        acc = 0.0
        for a in range(rows):
            for b in range(a + 1, rows):
                w = (lev[a] - vmax) + (lev[b] - vmax) - 2.0 * log_s
                if w > _EXP_FLOOR:
                    diff = der[a] - der[b]
                    acc += (diff.real * diff.real + diff.imag * diff.imag) * math.exp(w)
        out[i] = acc * INV_PI
    return out


@njit
def _log_partition_nb(coef, z):
    rows = coef.shape[0]
    m = z.shape[0]
    out = np.empty(m)
    lev = np.empty(rows)
    for i in range(m):
        vmax = -np.inf
        for r in range(rows):
            p, _ = _horner_nb(coef, r, z[i])
            lev[r] = 2.0 * p.real
            if lev[r] > vmax:
                vmax = lev[r]
        s = 0.0
        for r in range(rows):
            s += math.exp(lev[r] - vmax)
        out[i] = vmax + math.log(s)
    return out


@njit
def _pairwise_sum_nb(x):
    n = x.shape[0]
    if n == 0:
        return 0.0
    nblocks = (n + _BLOCK - 1) // _BLOCK
    part = np.zeros(nblocks)
    for b in range(nblocks):
        s = 0.0
        stop = min(n, (b + 1) * _BLOCK)
        for i in range(b * _BLOCK, stop):
            s += x[i]
        part[b] = s
    width = nblocks
    while width > 1:
        half = width // 2
        for j in range(half):
            part[j] = part[2 * j] + part[2 * j + 1]
        if width % 2 == 1:
            part[half] = part[width - 1]
            width = half + 1
        else:
            width = half
    return part[0]


@njit
def _cos_level_count_nb(k, pert, t, lo, hi):
    n = pert.shape[0]
    h = (hi - lo) / n
    count = 0
    for i in range(n):
        x = lo + (i + 0.5) * h
        if abs(math.cos(k * x) + pert[i]) <= t:
            count += 1
    return count


# --------------------------------------------------------------------------
# numpy fallbacks
# --------------------------------------------------------------------------

def _eval_rows_np(coef, z):
    deg = coef.shape[1] - 1
    zz = z[None, :]
    p = np.repeat(coef[:, deg:deg + 1], z.shape[0], axis=1).astype(np.complex128)
    dp = np.zeros_like(p)
    for k in range(deg - 1, -1, -1):
        dp = dp * zz + p
        p = p * zz + coef[:, k:k + 1]
    return p, dp


def _density_np(coef, z):
    val, der = _eval_rows_np(coef, z)
    lev = 2.0 * val.real
    vmax = lev.max(axis=0)
    with np.errstate(invalid="ignore", over="ignore"):
        shifted = lev - vmax
        log_s = np.log(np.exp(shifted).sum(axis=0))
        acc = np.zeros(z.shape[0])
        rows = coef.shape[0]
        for a in range(rows):
            for b in range(a + 1, rows):
                w = shifted[a] + shifted[b] - 2.0 * log_s
                diff = der[a] - der[b]
                mag = diff.real ** 2 + diff.imag ** 2
                acc += np.where(w > _EXP_FLOOR, mag * np.exp(np.maximum(w, _EXP_FLOOR)), 0.0)
    out = acc * INV_PI
    out[~np.isfinite(vmax)] = np.nan
    return out


def _log_partition_np(coef, z):
    val, _ = _eval_rows_np(coef, z)
    lev = 2.0 * val.real
    vmax = lev.max(axis=0)
    return vmax + np.log(np.exp(lev - vmax).sum(axis=0))


def _pairwise_sum_np(x):
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    if n == 0:
        return 0.0
    nblocks = -(-n // _BLOCK)
    padded = np.zeros(nblocks * _BLOCK)
    padded[:n] = x
    part = padded.reshape(nblocks, _BLOCK).sum(axis=1)
    while part.shape[0] > 1:
        if part.shape[0] % 2:
            tail = part[-1:]
            part = np.concatenate([part[:-1:2] + part[1::2], tail])
        else:
            part = part[0::2] + part[1::2]
    return float(part[0])


def _cos_level_count_np(k, pert, t, lo, hi):
    n = pert.shape[0]
    h = (hi - lo) / n
    x = lo + (np.arange(n) + 0.5) * h
    return int(np.count_nonzero(np.abs(np.cos(k * x) + pert) <= t))


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------

NUMBA_KERNELS = {
    "eval_rows": _eval_rows_nb,
    "density": _density_nb,
    "log_partition": _log_partition_nb,
    "pairwise_sum": _pairwise_sum_nb,
    "cos_level_count": _cos_level_count_nb,
}
NUMPY_KERNELS = {
    "eval_rows": _eval_rows_np,
    "density": _density_np,
    "log_partition": _log_partition_np,
    "pairwise_sum": _pairwise_sum_np,
    "cos_level_count": _cos_level_count_np,
}

_ACTIVE = NUMBA_KERNELS if _accel.USE_NUMBA else NUMPY_KERNELS


def _as_points(z):
    return np.ascontiguousarray(np.atleast_1d(np.asarray(z, dtype=np.complex128)).ravel())


def eval_rows(coef, z):
    return _ACTIVE["eval_rows"](coef, _as_points(z))


def density(coef, z):
    return _ACTIVE["density"](coef, _as_points(z))


def log_partition(coef, z):
    return _ACTIVE["log_partition"](coef, _as_points(z))


def pairwise_sum(x):
    return float(_ACTIVE["pairwise_sum"](np.ascontiguousarray(x, dtype=np.float64)))


def cos_level_count(k, pert, t, lo, hi):
    pert = np.ascontiguousarray(pert, dtype=np.float64)
    return int(_ACTIVE["cos_level_count"](float(k), pert, float(t), float(lo), float(hi)))
