"""Rank-2 lattices ``Z + tau Z`` in the complex plane and their squares."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class Lattice:
    """The lattice generated by ``1`` and ``tau`` (``Im tau > 0``)."""

    tau: complex = 1j

    def __post_init__(self):
        tau = complex(self.tau)
        if not tau.imag > 0:
            raise ValueError(f"Im(tau) must be positive, got tau={tau!r}")
        object.__setattr__(self, "tau", tau)

    def coefficients(self, z: complex) -> tuple[float, float]:
        """Real coordinates ``(s, t)`` with ``z = s + t*tau``."""
        z = complex(z)
        t = z.imag / self.tau.imag
        s = z.real - t * self.tau.real
        return s, t

    def point(self, m: float, n: float) -> complex:
        return m + n * self.tau

    def generators(self) -> tuple[complex, complex]:
        return 1.0 + 0j, self.tau


GAUSSIAN = Lattice(1j)


@dataclass(frozen=True)
class Lattice2:
    """The product lattice ``L x L`` in C^2."""

    component: Lattice = GAUSSIAN

    @property
    def tau(self) -> complex:
        return self.component.tau

    def generators(self) -> list[np.ndarray]:
        """The four real generators ``e1, tau e1, e2, tau e2``."""
        one, tau = self.component.generators()
        return [
            np.array([one, 0j]),
            np.array([tau, 0j]),
            np.array([0j, one]),
            np.array([0j, tau]),
        ]

    def point(self, coeffs) -> np.ndarray:
        m1, n1, m2, n2 = coeffs
        L = self.component
        return np.array([L.point(m1, n1), L.point(m2, n2)])


GAUSSIAN2 = Lattice2(GAUSSIAN)


def _wrap(s: float) -> tuple[int, float]:
    m = math.floor(s)
    r = s - m
    if r >= 1.0:
        m += 1
        r = s - m
    return m, min(max(r, 0.0), math.nextafter(1.0, 0.0))


def reduce_coefficients(z: complex, L: Lattice) -> tuple[complex, int, int]:
    """Like :func:`reduce` but returns the integer offset ``(m, n)``."""
    s, t = L.coefficients(z)
    m, r = _wrap(s)
    n, u = _wrap(t)
    return r + u * L.tau, m, n


def reduce(z: complex, L: Lattice = GAUSSIAN) -> tuple[complex, complex]:
    """Split ``z = z0 + gamma`` with ``z0`` in the half-open parallelogram
    ``{s + t*tau : 0 <= s, t < 1}`` and ``gamma`` a lattice point."""
    z0, m, n = reduce_coefficients(z, L)
    return z0, L.point(m, n)


def nearest_lattice_point(z: complex, L: Lattice = GAUSSIAN) -> complex:
    s, t = L.coefficients(z)
    return L.point(round(s), round(t))


def integer_coefficients(z: complex, L: Lattice, tol: float = DEFAULT_TOL) -> tuple[int, int] | None:
    """``(m, n)`` with ``z = m + n*tau`` to within ``tol``, or ``None``."""
    s, t = L.coefficients(z)
    m, n = round(s), round(t)
    if abs(complex(z) - L.point(m, n)) <= tol:
        return int(m), int(n)
    return None


def contains(gamma: complex, L: Lattice = GAUSSIAN, tol: float = DEFAULT_TOL) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return integer_coefficients(gamma, L, tol) is not None


def distance_to_lattice(z: complex, L: Lattice = GAUSSIAN) -> float:
    """Distance from ``z`` to the closest lattice point (exact for the
    near-rectangular lattices used here; checks the 3x3 neighbourhood)."""
    s, t = L.coefficients(z)
    m0, n0 = math.floor(s), math.floor(t)
    z = complex(z)
    return min(
        abs(z - L.point(m0 + i, n0 + j)) for i in (-1, 0, 1, 2) for j in (-1, 0, 1, 2)
    )


def torus_equal(x, y, L2: Lattice2 = GAUSSIAN2, tol: float = DEFAULT_TOL) -> bool:
    """Equality of two points of ``C^2 / (L x L)``."""
    diff = np.asarray(x, dtype=complex) - np.asarray(y, dtype=complex)
    return all(contains(d, L2.component, tol) for d in diff)


def lattice2_coefficients(gamma, L2: Lattice2, tol: float = DEFAULT_TOL) -> tuple[int, int, int, int] | None:
    """Integer coordinates of ``gamma`` in the basis of :meth:`Lattice2.generators`."""
    c1 = integer_coefficients(gamma[0], L2.component, tol)
    c2 = integer_coefficients(gamma[1], L2.component, tol)
    if c1 is None or c2 is None:
        return None
    return (*c1, *c2)
