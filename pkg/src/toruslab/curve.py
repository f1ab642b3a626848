"""Exponent polynomials and exponential-polynomial curves.

A curve ``f = [1 : e^{g_1} : ... : e^{g_n}]`` into the algebraic torus is
stored as the list of its exponent polynomials.  Coefficients are kept in
ascending powers and trimmed only of *exact* trailing zeros, so the degree of
every exponent (and hence the growth degree ``m``) is never altered by a
tolerance.
"""

from __future__ import annotations

import cmath
import math
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError

#: degree reported for the identically zero polynomial
ZERO_DEGREE = -math.inf


def _to_complex(value) -> complex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        value = complex(float(value[0]), float(value[1]))
    try:
        c = complex(value)
    except (TypeError, ValueError) as exc:
        raise InputError(f"not a complex number: {value!r}") from exc
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise InputError(f"non-finite coefficient: {value!r}")
    return c


class Polynomial:
    """Complex polynomial in one variable, coefficients in ascending powers.

    >>> p = Polynomial([5, 1 + 2j, 3])
    >>> p.degree, p(2)
    (2, (19+4j))
    """

    def __init__(self, coefficients: Iterable = ()):
        coeffs = [_to_complex(c) for c in coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self._coefficients = tuple(coeffs)

    @classmethod
    def monomial(cls, k: int, coefficient: complex = 1.0) -> "Polynomial":
        return cls([0.0] * k + [coefficient])

    @property
    def coefficients(self) -> tuple:
        return self._coefficients

    @property
    def degree(self):
        """Index of the highest nonzero coefficient; ``ZERO_DEGREE`` for 0."""
        if not self._coefficients:
            return ZERO_DEGREE
        return len(self._coefficients) - 1

    @property
    def is_zero(self) -> bool:
        return not self._coefficients

    @property
    def leading(self) -> complex:
        return self._coefficients[-1] if self._coefficients else 0j

    @cached_property
    def array(self) -> np.ndarray:
        out = np.array(self._coefficients or (0j,), dtype=np.complex128)
        out.setflags(write=False)
        return out

    def __call__(self, z):
        if np.ndim(z) == 0:
            zc = complex(z)
            if not (cmath.isfinite(zc)):
                raise InputError(f"evaluation point must be finite, got {z!r}")
            acc = 0j
            for a in reversed(self._coefficients):
                acc = acc * zc + a
            return acc
        z = np.asarray(z, dtype=np.complex128)
        if not np.all(np.isfinite(z)):
            raise InputError("evaluation points must be finite")
        acc = np.zeros_like(z)
        for a in reversed(self._coefficients):
            acc = acc * z + a
        return acc

    def derivative(self) -> "Polynomial":
        return Polynomial([k * a for k, a in enumerate(self._coefficients)][1:])

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self._coefficients, Polynomial._coerce(other)._coefficients
        n = max(len(a), len(b))
        a = a + (0j,) * (n - len(a))
        b = b + (0j,) * (n - len(b))
        return Polynomial([x + y for x, y in zip(a, b)])

    def __neg__(self) -> "Polynomial":
        return Polynomial([-a for a in self._coefficients])

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-Polynomial._coerce(other))

    def __mul__(self, scalar) -> "Polynomial":
        s = _to_complex(scalar)
        return Polynomial([s * a for a in self._coefficients])

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._coefficients == other._coefficients

    def __hash__(self) -> int:
        return hash(self._coefficients)

    def __repr__(self) -> str:
        return f"Polynomial({list(self._coefficients)!r})"

    @staticmethod
    def _coerce(value) -> "Polynomial":
        if isinstance(value, Polynomial):
            return value
        if np.ndim(value) == 0:
            return Polynomial([value])
        return Polynomial(value)


def poly_eval(p: Polynomial, z):
    """Horner evaluation of ``p`` at ``z`` (scalar or array)."""
    return p(z)


def poly_derivative(p: Polynomial) -> Polynomial:
    return p.derivative()


class ExpPolyCurve:
    """The holomorphic curve ``[1 : e^{g_1} : ... : e^{g_n}]``.

    ``exponents`` may be given as :class:`Polynomial` instances or as raw
    ascending coefficient sequences.  Instances are immutable.
    """

    def __init__(self, exponents: Sequence, label: str | None = None):
        polys = tuple(e if isinstance(e, Polynomial) else Polynomial(e) for e in exponents)
        if not polys:
            raise InputError("a curve needs at least one exponent polynomial")
        self._exponents = polys
        self.label = label

    @property
    def exponents(self) -> tuple:
        return self._exponents

    @property
    def n(self) -> int:
        return len(self._exponents)

    @property
    def m(self) -> int:
        """Growth degree: ``m + 1`` is the largest exponent degree.

        Constants (including the zero polynomial) count as degree 0, so
        ``m == -1`` exactly for constant maps.
        """
        return max(max(g.degree, 0) for g in self._exponents) - 1

    @property
    def is_constant(self) -> bool:
        return self.m == -1

    @cached_property
    def homogeneous(self) -> np.ndarray:
        """Coefficient matrix with a leading zero row for the coordinate 1."""
        width = max(self.m + 2, 1)
        mat = np.zeros((self.n + 1, width), dtype=np.complex128)
        for i, g in enumerate(self._exponents, start=1):
            if g.coefficients:
                mat[i, :len(g.coefficients)] = g.coefficients
        mat.setflags(write=False)
        return mat

    def pairs(self):
        """Index pairs ``(i, j)``, ``i < j``, over the exponents (0-based)."""
        return [(i, j) for i in range(self.n) for j in range(i + 1, self.n)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExpPolyCurve):
            return NotImplemented
        return self._exponents == other._exponents

    def __hash__(self) -> int:
        return hash(self._exponents)

    def __repr__(self) -> str:
        return f"ExpPolyCurve({[list(g.coefficients) for g in self._exponents]!r})"


def curve_growth_degree(c: ExpPolyCurve) -> int:
    return c.m


def pairwise_difference(c: ExpPolyCurve, i: int, j: int) -> Polynomial:
    """``g_i - g_j`` for 0-based indices ``i < j``."""
    if not (0 <= i < j < c.n):
        raise InputError(f"need 0 <= i < j < {c.n}, got i={i}, j={j}")
    return c.exponents[i] - c.exponents[j]


def curve_from_rows(rows: np.ndarray) -> ExpPolyCurve:
    """Rebuild a curve from a homogeneous matrix whose first row is zero."""
    return ExpPolyCurve([Polynomial(r) for r in np.asarray(rows)[1:]])
