r"""Theta functions with characteristics and the Weierstrass function.

The theta series is

.. math:: \theta[a,b](z, \tau) = \sum_n \exp(i\pi\tau(n+a)^2 + 2i\pi(n+a)(z+b)).

Arguments are first reduced to the fundamental parallelogram and the exact
quasi-periodicity factor is carried separately as a logarithm, so the series
itself only ever sees bounded arguments.

On the Gaussian lattice ``Z + iZ`` the Weierstrass function is represented as
a theta quotient, ``wp = c * theta_00^2 / theta_11^2``; a truncated lattice sum
is kept as an independent cross-check.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import PoleError, ThetaConvergenceError
from .lattice import GAUSSIAN, Lattice, distance_to_lattice, reduce_coefficients

MAX_TERMS = 64
DEFAULT_TOL = 1e-16
POLE_GUARD = 1e-6


@dataclass(frozen=True)
class ThetaChar:
    """Characteristics ``[a, b]``, stored as exact rationals."""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a).limit_denominator(1 << 20))
        object.__setattr__(self, "b", Fraction(self.b).limit_denominator(1 << 20))

    @classmethod
    def half(cls, j: int, k: int) -> "ThetaChar":
        """``theta_jk = theta[j/2, k/2]``."""
        return cls(Fraction(j, 2), Fraction(k, 2))


THETA_00 = ThetaChar.half(0, 0)
THETA_11 = ThetaChar.half(1, 1)


def _term_count(tau: complex, tol: float) -> int:
    # Terms satisfy |term| <= exp(-pi*Im(tau)*(k^2 - 2k)) for |n+a| = k once
    # the argument is reduced; sum the tail as a geometric series.
    if tol <= 0:
        raise ValueError("tol must be positive")
    y = tau.imag
    if y <= 0:
        raise ThetaConvergenceError(f"Im(tau) must be positive, got {tau!r}")
    target = math.log(tol) - math.log(4.0)
    for N in range(2, MAX_TERMS + 1):
        k = N - 0.5
        if -math.pi * y * (k * k - 2.0 * k) < target and k > 2:
            return N
    raise ThetaConvergenceError(
        f"theta series needs more than {MAX_TERMS} terms (tau={tau!r}, tol={tol})"
    )


def theta_parts(ch: ThetaChar, z: complex, tau: complex = 1j, tol: float = DEFAULT_TOL,
                order: int = 0) -> tuple[complex, complex]:
    """Return ``(S, E)`` with ``d^order theta / dz^order = S * exp(E)``.

    ``E`` is the logarithm of the quasi-periodicity factor picked up while
    reducing ``z``; ``S`` is a finite series in the reduced argument.
    """
    tau = complex(tau)
    N = _term_count(tau, tol)
    a, b = float(ch.a), float(ch.b)
    z0, m, n = reduce_coefficients(z, Lattice(tau))
    k = np.arange(-N, N + 1) + a
    terms = np.exp(1j * math.pi * tau * k * k + 2j * math.pi * k * (z0 + b))
    # theta(z0 + m + n tau) = exp(2i pi a m - i pi n^2 tau - 2i pi n (z0 + b)) theta(z0)
    E = 2j * math.pi * a * m - 1j * math.pi * n * n * tau - 2j * math.pi * n * (z0 + b)
    if order == 0:
        return complex(terms.sum()), E
    # derivative of exp(E(z)) * S(z) with E linear, dE/dz = -2i pi n
    dE = -2j * math.pi * n
    derivs = [complex(((2j * math.pi * k) ** j * terms).sum()) for j in range(order + 1)]
    total = sum(math.comb(order, j) * dE ** (order - j) * derivs[j] for j in range(order + 1))
    return total, E


def theta(ch: ThetaChar, z: complex, tau: complex = 1j, tol: float = DEFAULT_TOL) -> complex:
    S, E = theta_parts(ch, z, tau, tol)
    return S * cmath.exp(E)


def theta_deriv(ch: ThetaChar, z: complex, tau: complex = 1j, tol: float = DEFAULT_TOL,
                order: int = 1) -> complex:
    """``order``-th derivative in ``z`` of :func:`theta` (termwise)."""
    S, E = theta_parts(ch, z, tau, tol, order=order)
    return S * cmath.exp(E)


def normalized_theta(ch: ThetaChar, z: complex, tau: complex = 1j, tol: float = DEFAULT_TOL) -> complex:
    """``exp(pi z^2 / 2) * theta(ch, z, i)``.

    This is a normalized theta function of type ``(H, alpha)`` with
    ``H(z, w) = conj(z) w``, ``alpha(1) = exp(2i pi a)`` and
    ``alpha(i) = exp(-2i pi b)``.
    """
    if complex(tau) != 1j:
        raise ValueError("normalized theta is only implemented for tau = i")
    z = complex(z)
    S, E = theta_parts(ch, z, 1j, tol)
    return S * cmath.exp(E + math.pi * z * z / 2)


@dataclass(frozen=True)
class LatticeConstants:
    """Constants tying the theta quotient to the Weierstrass function.

    ``wp = c * theta_00^2 / theta_11^2 - offset``; on the Gaussian lattice
    ``offset`` vanishes and ``wp'^2 = 4 wp (wp^2 - alpha^2)`` with
    ``alpha = wp(1/2)``.
    """

    alpha: complex
    c: complex
    lattice: Lattice = GAUSSIAN
    offset: complex = 0j
    tol: float = field(default=DEFAULT_TOL, compare=False)

    def __post_init__(self):
        if self.alpha == 0 or self.c == 0:
            raise ValueError("alpha and c must be nonzero")


def compute_constants(L: Lattice = GAUSSIAN, tol: float = DEFAULT_TOL) -> LatticeConstants:
    """Match the double pole of ``theta_11^-2`` against ``1/z^2``.

    ``c = theta_11'(0)^2 / theta_00(0)^2``; the constant term of the Laurent
    expansion gives ``offset`` (zero for ``tau = i``, where ``wp((1+i)/2) = 0``).
    """
    tau = L.tau
    t00 = theta(THETA_00, 0, tau, tol)
    t00_2 = theta_deriv(THETA_00, 0, tau, tol, order=2)
    t11_1 = theta_deriv(THETA_11, 0, tau, tol, order=1)
    t11_3 = theta_deriv(THETA_11, 0, tau, tol, order=3)
    c = t11_1 ** 2 / t00 ** 2
    offset = t00_2 / t00 - t11_3 / (3 * t11_1)
    if abs(offset) < 1e-12 * abs(c):
        offset = 0j
    partial = LatticeConstants(alpha=1.0, c=c, lattice=L, offset=offset, tol=tol)
    alpha = wp(0.5, partial)
    return LatticeConstants(alpha=alpha, c=c, lattice=L, offset=offset, tol=tol)


def _guard(z: complex, L: Lattice, radius: float) -> None:
    if distance_to_lattice(z, L) < radius:
        raise PoleError(f"{z!r} lies within {radius} of a lattice point")


def wp(z: complex, consts: LatticeConstants, pole_guard: float = POLE_GUARD) -> complex:
    """Weierstrass function from the theta quotient."""
    L = consts.lattice
    _guard(z, L, pole_guard)
    z0, _, _ = reduce_coefficients(z, L)
    s00, _ = theta_parts(THETA_00, z0, L.tau, consts.tol)
    s11, _ = theta_parts(THETA_11, z0, L.tau, consts.tol)
    return consts.c * s00 * s00 / (s11 * s11) - consts.offset


def wp_prime(z: complex, consts: LatticeConstants, pole_guard: float = POLE_GUARD) -> complex:
    """Derivative of :func:`wp`; behaves like ``-2/z^3`` at the origin."""
    L = consts.lattice
    _guard(z, L, pole_guard)
    z0, _, _ = reduce_coefficients(z, L)
    a, _ = theta_parts(THETA_00, z0, L.tau, consts.tol)
    da, _ = theta_parts(THETA_00, z0, L.tau, consts.tol, order=1)
    b, _ = theta_parts(THETA_11, z0, L.tau, consts.tol)
    db, _ = theta_parts(THETA_11, z0, L.tau, consts.tol, order=1)
    return 2 * consts.c * a * (da * b - a * db) / b ** 3


def _lattice_points(L: Lattice, radius: int) -> np.ndarray:
    """Nonzero lattice points with ``|w| <= radius``.

    A disk rather than a coefficient box: the ``z^2 / w^4`` tail averages out
    over circles but not over the boundary of a parallelogram.
    """
    tau = L.tau
    n_max = int(radius / tau.imag) + 1
    m_max = int(radius + n_max * abs(tau.real)) + 1
    m, n = np.meshgrid(np.arange(-m_max, m_max + 1), np.arange(-n_max, n_max + 1))
    w = (m + n * tau).ravel()
    return w[(w != 0) & (np.abs(w) <= radius)]


def wp_lattice_sum(z: complex, L: Lattice = GAUSSIAN, radius: int = 60,
                   pole_guard: float = POLE_GUARD) -> complex:
    """``1/z^2 + sum'(1/(z-w)^2 - 1/w^2)`` over the lattice points of the disk
    of the given radius.

    Truncation error decays algebraically in ``radius``; for cross-checks only.
    """
    if radius < 20:
        raise ValueError("radius must be at least 20")
    _guard(z, L, pole_guard)
    z = complex(z)
    w = _lattice_points(L, radius)
    return complex(1 / z ** 2 + np.sum(1 / (z - w) ** 2 - 1 / w ** 2))


def wp_prime_lattice_sum(z: complex, L: Lattice = GAUSSIAN, radius: int = 60,
                         pole_guard: float = POLE_GUARD) -> complex:
    """``-2 * sum 1/(z-w)^3`` over the truncated lattice (including ``w = 0``)."""
    if radius < 20:
        raise ValueError("radius must be at least 20")
    _guard(z, L, pole_guard)
    z = complex(z)
    w = _lattice_points(L, radius)
    return complex(-2 / z ** 3 - 2 * np.sum(1 / (z - w) ** 3))


def absolute_series(ch: ThetaChar, z: complex, tau: complex = 1j) -> float:
    """``sum |term|`` of the theta series at ``z``: the scale against which
    cancellation near zeros of ``theta`` is measured."""
    z, tau = complex(z), complex(tau)
    return abs(theta(ThetaChar(ch.a, 0), 1j * z.imag, 1j * tau.imag))


def quasi_periodicity_residual(ch: ThetaChar, z: complex, tau: complex = 1j) -> float:
    """Residual of ``theta(z + 1) = e^{2i pi a} theta(z)`` and
    ``theta(z + tau) = e^{-i pi tau - 2i pi (z + b)} theta(z)``, relative to
    the absolute series at the three points."""
    z, tau = complex(z), complex(tau)
    t = theta(ch, z, tau)
    a, b = float(ch.a), float(ch.b)
    r1 = theta(ch, z + 1, tau) - cmath.exp(2j * math.pi * a) * t
    r2 = theta(ch, z + tau, tau) - cmath.exp(-1j * math.pi * tau - 2j * math.pi * (z + b)) * t
    scale = max(absolute_series(ch, w, tau) for w in (z, z + 1, z + tau))
    return max(abs(r1), abs(r2)) / scale
