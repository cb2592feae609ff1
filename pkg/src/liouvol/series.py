"""Truncated power/Laurent series representing conformal maps.

PowerSeriesMap holds f(z) = sum_k a_k z^k on a disk of radius > 1,
LaurentMap holds g(w) = b1 w + b0 + sum_k b_{-k} w^{-k} on |w| > 1.
Differentiation is exact on coefficients; evaluation is Horner.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DomainError, SingularDerivative

DERIVATIVE_FLOOR = 1e-14


def _as_coeffs(c):
    a = np.asarray(c, dtype=complex).ravel()
    if a.size == 0:
        raise DomainError("empty coefficient list")
    return a


@dataclass(frozen=True, eq=False)
class PowerSeriesMap:
    """f(z) = a_0 + a_1 z + ... + a_N z^N, meant to be evaluated on |z| <= 1.

    ``hint_radius`` (> 1 for analytic curves) declares where the truncated
    series is trusted; evaluation outside raises DomainError.
    """

    coeffs: np.ndarray
    hint_radius: float = 1.5

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeffs(self.coeffs))

    @property
    def order(self):
        return self.coeffs.size - 1

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if np.any(np.abs(z) > self.hint_radius * (1 + 1e-12)):
            raise DomainError(
                f"|z| exceeds declared radius {self.hint_radius}")
        return npoly.polyval(z, self.coeffs)

    def eval_unchecked(self, z):
        return npoly.polyval(np.asarray(z, dtype=complex), self.coeffs)

    def deriv(self, m=1):
        c = npoly.polyder(self.coeffs, m=m)
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        return PowerSeriesMap(c, self.hint_radius)

    @cached_property
    def _jet_coeffs(self):
        c1 = npoly.polyder(self.coeffs)
        c2 = npoly.polyder(c1) if c1.size > 1 else np.zeros(1, complex)
        c3 = npoly.polyder(c2) if c2.size > 1 else np.zeros(1, complex)
        return (np.atleast_1d(c1), np.atleast_1d(c2), np.atleast_1d(c3))

    def jet(self, z, upto=3):
        """Values (f, f', f'', f''') at z, truncated to ``upto`` derivatives."""
        z = np.asarray(z, dtype=complex)
        c1, c2, c3 = self._jet_coeffs
        out = [npoly.polyval(z, self.coeffs)]
        for c in (c1, c2, c3)[:upto]:
            out.append(npoly.polyval(z, c))
        return tuple(out)

    def tail_profile(self):
        """Max |a_k| over the last quartile, used by solver auto-refinement."""
        n = self.coeffs.size
        return float(np.max(np.abs(self.coeffs[3 * n // 4:])))

    def is_normalized_map(self):
        return self.coeffs.size >= 2 and self.coeffs[1] != 0


@dataclass(frozen=True, eq=False)
class LaurentMap:
    """g(w) = b1 w + b0 + sum_{k=1..M} bneg[k-1] w^{-k} for |w| >= 1."""

    b1: complex
    b0: complex = 0.0
    bneg: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))

    def __post_init__(self):
        if self.b1 == 0:
            raise DomainError("leading Laurent coefficient must be nonzero")
        object.__setattr__(self, "b1", complex(self.b1))
        object.__setattr__(self, "b0", complex(self.b0))
        object.__setattr__(
            self, "bneg", np.asarray(self.bneg, dtype=complex).ravel())

    @property
    def order(self):
        return self.bneg.size

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        if np.any(np.abs(w) < 1 - 1e-12):
            raise DomainError("LaurentMap is defined on |w| >= 1")
        if self.bneg.size == 0:
            return self.b1 * w + self.b0
        u = 1.0 / w
        return self.b1 * w + self.b0 + u * npoly.polyval(u, self.bneg)

    def deriv_at(self, w, m=1):
        """m-th derivative (m = 1, 2 or 3), evaluated directly."""
        w = np.asarray(w, dtype=complex)
        if self.bneg.size == 0:
            base = self.b1 if m == 1 else 0.0
            return np.full_like(w, base, dtype=complex) if w.ndim else complex(base)
        u = 1.0 / w
        k = np.arange(1, self.bneg.size + 1)
        if m == 1:
            c = -k * self.bneg
            return self.b1 + u * u * npoly.polyval(u, c)
        if m == 2:
            c = k * (k + 1) * self.bneg
            return u ** 3 * npoly.polyval(u, c)
        if m == 3:
            c = -k * (k + 1) * (k + 2) * self.bneg
            return u ** 4 * npoly.polyval(u, c)
        raise ValueError("m must be 1, 2 or 3")

    def jet(self, w, upto=3):
        out = [self(w)]
        for m in range(1, upto + 1):
            out.append(self.deriv_at(w, m))
        return tuple(out)

    def deriv_at_infinity(self):
        return self.b1

    def rotated(self, alpha):
        """Precompose with w -> w e^{-i alpha} (coefficient of w^k gets e^{-ik alpha})."""
        k = np.arange(1, self.bneg.size + 1)
        return LaurentMap(
            self.b1 * np.exp(-1j * alpha),
            self.b0,
            self.bneg * np.exp(1j * k * alpha),
        )


def _jet12(m, z):
    j = m.jet(z, upto=2)
    return j[1], j[2]


def nonlinearity(m, z):
    """f''/f' from exact series differentiation."""
    d1, d2 = _jet12(m, z)
    if np.any(np.abs(d1) < DERIVATIVE_FLOOR):
        raise SingularDerivative(f"|f'| below {DERIVATIVE_FLOOR}")
    return d2 / d1


def schwarzian(m, z):
    """f'''/f' - (3/2)(f''/f')^2 from exact series differentiation."""
    _, d1, d2, d3 = m.jet(z, upto=3)
    if np.any(np.abs(d1) < DERIVATIVE_FLOOR):
        raise SingularDerivative(f"|f'| below {DERIVATIVE_FLOOR}")
    nl = d2 / d1
    return d3 / d1 - 1.5 * nl * nl


def equipotential(f, n):
    """Level-n approximating curve map: scale the domain by (n-1)/n and
    renormalize so the derivative at 0 is unchanged."""
    if n < 2:
        raise DomainError("equipotential level must be >= 2")
    k = np.arange(f.coeffs.size)
    factor = (n / (n - 1.0)) * ((n - 1.0) / n) ** k
    return PowerSeriesMap(f.coeffs * factor, f.hint_radius * n / (n - 1.0))
