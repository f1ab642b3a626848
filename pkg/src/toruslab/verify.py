"""Property checks behind ``toruslab verify``.

Each check returns a :class:`CheckResult`; the suite passes iff all do.  The
random generators are seeded so a run is reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import level_sets
from .asymptotics import (characteristic_direct, characteristic_jensen, characteristic_profile,
                          circle_max_density, growth_exponent, is_nondecreasing,
                          order_estimate, polynomial_bound_constant)
from .curve import ExpPolyCurve, Polynomial
from .errors import InputError
from .geometry import (component_norm, fs_density, fs_density_laplacian_oracle,
                       log_partition)
from .numerics import geometric_grid, ordered_map
from .recovery import polynomial_log_samples, recover_polynomial, theorem1_verify

DEFAULT_SEED = 20240601
SLOPE_TOL = 0.05
ORDER_GAP_TOL = 0.1


@dataclass(frozen=True)
class CheckResult:
    id: str
    name: str
    passed: bool
    detail: str


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def unit_disk(rng: np.random.Generator, size: int) -> np.ndarray:
    return np.sqrt(rng.uniform(0.0, 1.0, size)) * np.exp(2j * math.pi * rng.uniform(0.0, 1.0, size))


def random_polynomial(rng: np.random.Generator, degree: int, scale: float = 1.0,
                      min_leading: float = 0.25) -> Polynomial:
    """Unit-disk coefficients times ``scale``; the leading one has modulus
    at least ``min_leading * scale`` so the degree is not nearly degenerate."""
    co = unit_disk(rng, degree + 1)
    if degree > 0 and abs(co[-1]) < min_leading:
        co[-1] = min_leading * co[-1] / abs(co[-1]) if co[-1] != 0 else min_leading
    return Polynomial(list(co * scale))


def random_curve(rng: np.random.Generator, max_n: int = 4, max_deg: int = 5,
                 log_scale: float = 0.0) -> ExpPolyCurve:
    """Non-constant curve with ``n <= max_n`` exponents of degree ``<= max_deg``.

    Each exponent is scaled by ``10^u`` with ``u`` uniform in
    ``[-log_scale, log_scale]``.
    """
    while True:
        n = int(rng.integers(1, max_n + 1))
        polys = [random_polynomial(rng, int(rng.integers(0, max_deg + 1)),
                                   10.0 ** rng.uniform(-log_scale, log_scale))
                 for _ in range(n)]
        c = ExpPolyCurve(polys)
        if not c.is_constant:
            return c


def named_suite() -> dict:
    z = Polynomial([0, 1])
    z2 = Polynomial([0, 0, 1])
    z3 = Polynomial([0, 0, 0, 1])
    return {
        "(z)": ExpPolyCurve([z]),
        "(z^2)": ExpPolyCurve([z2]),
        "(z^3, z)": ExpPolyCurve([z3, z]),
        "(z, -z)": ExpPolyCurve([z, -z]),
        "(z^3, iz^3)": ExpPolyCurve([z3, z3 * 1j]),
    }


def curve_suite(seed: int, n_random: int) -> dict:
    rng = np.random.default_rng(seed)
    suite = named_suite()
    for i in range(n_random):
        suite[f"random[{i}]"] = random_curve(rng, log_scale=2.0)
    return suite


def _fmt(x: float) -> str:
    return f"{x:.6g}"


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def _growth_and_order(suite: dict, threads=None) -> dict:
    def work(item):
        name, c = item
        g = growth_exponent(c, r_max=1e6)
        rho = order_estimate(c, r_max=1e6)
        return name, g.slope, rho
    return {name: (slope, rho) for name, slope, rho in ordered_map(work, suite.items(), threads)}


def check_growth(suite, stats) -> CheckResult:
    bad = [f"{name}: slope {_fmt(s)} vs m={suite[name].m}" for name, (s, _) in stats.items()
           if abs(s - suite[name].m) > SLOPE_TOL]
    return CheckResult("C1", "growth exponent slope within 0.05 of m", not bad,
                       "; ".join(bad) or f"{len(stats)} curves")


def check_order(suite, stats) -> CheckResult:
    bad = []
    for name, (s, rho) in stats.items():
        m = suite[name].m
        if abs(rho - (m + 1)) > SLOPE_TOL or abs(rho - s - 1.0) > ORDER_GAP_TOL:
            bad.append(f"{name}: order {_fmt(rho)}, slope {_fmt(s)}, m={m}")
    return CheckResult("C2", "order within 0.05 of m+1 and one above the slope", not bad,
                       "; ".join(bad) or f"{len(stats)} curves")


def check_theorem1(suite, stats, seed: int, n_roundtrip: int) -> CheckResult:
    bad = []
    worst = 0.0
    for name, c in suite.items():
        rep = theorem1_verify(c, slope=stats[name][0])
        worst = max(worst, rep.coefficient_error)
        if not rep.passed or rep.coefficient_error > 1e-9:
            bad.append(f"{name}: degrees {rep.component_degrees}/{rep.difference_degrees}, "
                       f"m_hat={rep.m_hat}, err {_fmt(rep.coefficient_error)}")
    # exactness and radius invariance up to degree 8
    rng = np.random.default_rng(seed + 3)
    for i in range(n_roundtrip):
        g = random_polynomial(rng, int(rng.integers(0, 9)))
        rp = recover_polynomial(polynomial_log_samples(g, 2.0), polynomial_log_samples(g, 5.0))
        ref = np.zeros(len(rp.coefficients), dtype=complex)
        ref[: len(g.coefficients)] = g.coefficients
        ref[0] = ref[0].real
        est = np.array(rp.coefficients)
        err = float(np.abs(est - ref).max() / max(np.abs(ref).max(), 1e-300))
        worst = max(worst, err)
        inv = max(d / max(1.0, abs(a)) for d, a in zip(rp.discrepancies, ref))
        if err > 1e-9 or inv > 1e-9 or rp.degree != max(g.degree, 0):
            bad.append(f"roundtrip[{i}]: err {_fmt(err)}, radius drift {_fmt(inv)}")
    return CheckResult("C3", "Schwarz degrees <= m_hat+1 with max attained; exact recovery",
                       not bad, "; ".join(bad) or f"worst relative error {_fmt(worst)}")


def check_level_sets(seed: int, n_poly: int, constant: float) -> CheckResult:
    rng = np.random.default_rng(seed + 4)
    radii = 10.0 ** np.arange(0.0, 4.0 + 1e-9, 0.25)
    bad = []
    for i in range(n_poly):
        k = int(rng.integers(2, 7))
        co = unit_disk(rng, k + 1)
        co[-1] = rng.uniform(0.5, 4.0) * np.exp(2j * math.pi * rng.uniform())
        g = Polynomial(list(co))
        for delta in (1.0, 0.5):
            reps = level_sets.level_set_reports(g, radii, delta, constant=constant)
            r0 = reps[-1].r0_empirical
            over = [r.ratio for r in reps if r0 is not None and r.r >= r0 and r.ratio > constant]
            last = reps[-1].ratio
            if r0 is None or over or not (3.8 <= last <= 4.2):
                bad.append(f"poly[{i}] k={k} delta={delta}: ratio at 1e4 {_fmt(last)}, r0={r0}")
    return CheckResult("C4", f"level-set measure * |a0| r^(k-delta) <= {_fmt(constant)}, "
                       "ratio in [3.8, 4.2] at 1e4", not bad, "; ".join(bad) or f"{n_poly} polynomials")


def check_cos_levels(n_grid: int) -> CheckResult:
    bad = []
    perts = {
        "0": None,
        "0.0025 sin 3x": lambda x: 0.0025 * np.sin(3.0 * x),
        "0.005 cos(x+1)": lambda x: 0.005 * np.cos(x + 1.0),
    }
    for t in (0.01, 0.05):
        for label, pert in perts.items():
            m1 = level_sets.cos_level_measure(1, pert, t, n_grid, (0.0, math.pi))
            if m1 > 4 * t:
                bad.append(f"k=1 t={t} u={label}: {_fmt(m1)} > 4t")
            for k in range(1, 7):
                mk = level_sets.cos_level_measure(k, pert, t, n_grid)
                if mk > 8 * t:
                    bad.append(f"k={k} t={t} u={label}: {_fmt(mk)} > 8t")
                if pert is None and abs(mk - 4 * math.asin(t)) > 2 * math.pi * 1e-5:
                    bad.append(f"k={k} t={t}: {_fmt(mk)} vs 4 arcsin t")
    return CheckResult("C5", "cos level sets within 4t / 8t and the closed form", not bad,
                       "; ".join(bad) or "k <= 6, t in {0.01, 0.05}")


def check_tails(j_max: int) -> CheckResult:
    bad = []
    for name, g in (("z^2", Polynomial([0, 0, 1])), ("2z^3", Polynomial([0, 0, 0, 2]))):
        seq = [level_sets.tail_integral(g, 1.0, 2.0 ** j, 2.0 ** (j + 1)) for j in range(3, j_max + 1)]
        if any(b >= a for a, b in zip(seq, seq[1:])):
            bad.append(f"{name}: annuli not strictly decreasing {[_fmt(v) for v in seq]}")
        beyond = 0.0
        lo = 50.0
        while True:
            piece = level_sets.tail_integral(g, 1.0, lo, 2.0 * lo)
            beyond += piece
            lo *= 2.0
            if piece == 0.0 or piece < 1e-300 or lo > 1e4:
                break
        if not beyond < 1e-15:
            bad.append(f"{name}: tail beyond 50 is {_fmt(beyond)}")
    return CheckResult("C6", "tail integrals decrease and vanish beyond r = 50", not bad,
                       "; ".join(bad) or "z^2 and 2z^3")


def check_density(seed: int, n_curves: int, n_points: int) -> CheckResult:
    rng = np.random.default_rng(seed + 7)
    worst_slack = 0.0
    worst_lap = 0.0
    bad = []
    for i in range(n_curves):
        c = random_curve(rng)
        z = 2.0 * unit_disk(rng, n_points)
        dens = fs_density(c, z)
        bound = sum(component_norm(g, z) ** 2 for g in c.exponents)
        for a, b in c.pairs():
            bound = bound + component_norm(c.exponents[a] - c.exponents[b], z) ** 2
        excess = (dens - bound) / np.maximum(bound, 1e-300)
        worst_slack = max(worst_slack, float(excess.max()))
        lap = fs_density_laplacian_oracle(c, z)
        mask = dens >= 1e-12
        if mask.any():
            rel = np.abs(lap[mask] - dens[mask]) / dens[mask]
            worst_lap = max(worst_lap, float(rel.max()))
        if excess.max() > 1e-12 or (mask.any() and rel.max() > 1e-4):
            bad.append(f"curve[{i}]")
    detail = f"max relative excess {_fmt(worst_slack)}, max oracle error {_fmt(worst_lap)}"
    return CheckResult("C7", "density <= decomposition bound; matches Laplacian oracle",
                       not bad, (", ".join(bad) + "; " if bad else "") + detail)


def check_jensen(seed: int, n_curves: int, profiles) -> CheckResult:
    rng = np.random.default_rng(seed + 8)
    bad = []
    worst = 0.0
    curves = list(named_suite().values())[:1] + [random_curve(rng, max_n=2, max_deg=2)
                                                 for _ in range(n_curves)]
    for i, c in enumerate(curves):
        if characteristic_jensen(c, 1.0) != 0.0:
            bad.append(f"curve[{i}]: T(1) != 0")
        for r in (2.0, 3.0, 4.0):
            j = characteristic_jensen(c, r)
            d = characteristic_direct(c, r)
            rel = abs(j - d) / max(abs(d), 1e-300)
            worst = max(worst, rel)
            if rel > 1e-6:
                bad.append(f"curve[{i}] r={r}: jensen {_fmt(j)} direct {_fmt(d)}")
        prof = characteristic_profile(c, geometric_grid(1.0, 1e3))
        if not is_nondecreasing(prof):
            bad.append(f"curve[{i}]: T not nondecreasing")
    for name, prof in profiles.items():
        if not is_nondecreasing(prof):
            bad.append(f"{name}: T not nondecreasing")
    return CheckResult("C8", "Jensen and direct characteristic agree; T monotone, T(1) = 0",
                       not bad, "; ".join(bad) or f"max relative gap {_fmt(worst)}")


def check_stability() -> CheckResult:
    c = ExpPolyCurve([Polynomial.monomial(10)])
    g = c.exponents[0]
    z = 1e4 * np.exp(2j * math.pi * np.arange(4096) / 4096)
    values = {
        "fs_density": fs_density(c, z),
        "component_norm": component_norm(g, z),
        "log_partition": log_partition(c, z),
        "laplacian_oracle": fs_density_laplacian_oracle(c, z),
        "circle_max": np.array([circle_max_density(c, 1e4)]),
    }
    bad = [k for k, v in values.items() if not np.all(np.isfinite(v))]
    return CheckResult("C9", "z^10 at |z| = 1e4 evaluates finitely", not bad,
                       ", ".join(bad) or "all finite")


def check_negative_controls(seed: int) -> CheckResult:
    bad = []
    planted = polynomial_bound_constant(ExpPolyCurve([Polynomial([0, 0, 1])]), 0.0)
    if planted.monotone_ok:
        bad.append("z^2 against exponent 0 not flagged")
    corrupted = check_level_sets(seed, 2, constant=1.0)
    if corrupted.passed:
        bad.append("corrupted level-set constant not detected")
    return CheckResult("C10", "negative controls are flagged", not bad,
                       "; ".join(bad) or f"planted slope {_fmt(planted.slope)}")


CHECK_IDS = tuple(f"C{i}" for i in range(1, 11))


def run_checks(seed: int = DEFAULT_SEED, quick: bool = False,
               bound_constant: float = level_sets.LEMMA_CONSTANT, threads=None,
               progress=None, only=None) -> list:
    """Run the checks (all, or the ids in ``only``) in a fixed order.

    ``bound_constant`` replaces the level-set constant 8 in check C4 (a test
    hook for the negative control).  ``progress`` is called with each result.
    """
    selected = set(CHECK_IDS if only is None else only)
    unknown = selected - set(CHECK_IDS)
    if unknown:
        raise InputError(f"unknown check ids: {', '.join(sorted(unknown))}")
    results = []

    def emit(res):
        results.append(res)
        if progress is not None:
            progress(res)

    if selected & {"C1", "C2", "C3"}:
        suite = curve_suite(seed, 4 if quick else 20)
        stats = _growth_and_order(suite, threads)
        if "C1" in selected:
            emit(check_growth(suite, stats))
        if "C2" in selected:
            emit(check_order(suite, stats))
        if "C3" in selected:
            emit(check_theorem1(suite, stats, seed, 10 if quick else 50))
    later = {
        "C4": lambda: check_level_sets(seed, 10, bound_constant),
        "C5": lambda: check_cos_levels(10 ** 6),
        "C6": lambda: check_tails(5 if quick else 8),
        "C7": lambda: check_density(seed, 20 if quick else 200, 500),
        "C8": lambda: check_jensen(seed, 2 if quick else 5,
                                   {name: characteristic_profile(c, geometric_grid(1.0, 1e4))
                                    for name, c in named_suite().items()}),
        "C9": check_stability,
        "C10": lambda: check_negative_controls(seed),
    }
    for cid, run in later.items():
        if cid in selected:
            emit(run())
    return results
