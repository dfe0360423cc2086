"""Invariant polynomials of reflection groups and the local boundary
equations they produce near singular points of the quotient."""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from math import prod

import numpy as np

from .groups import FiniteGroup
from .hermitian import HermitianForm


@dataclass(frozen=True)
class Polynomial:
    """Sparse polynomial in two variables: ``{(i, j): coeff}`` for ``c X^i Y^j``."""

    terms: tuple[tuple[tuple[int, int], complex], ...]

    @classmethod
    def from_dict(cls, d: dict) -> "Polynomial":
        return cls(tuple(sorted((tuple(k), complex(v)) for k, v in d.items() if v != 0)))

    def __call__(self, t) -> complex:
        x, y = t
        return sum(c * x ** i * y ** j for (i, j), c in self.terms)

    def degree(self) -> int:
        return max((i + j for (i, j), _ in self.terms), default=0)

    def is_homogeneous(self) -> bool:
        return len({i + j for (i, j), _ in self.terms}) <= 1

    def gradient(self, t) -> np.ndarray:
        x, y = t
        dx = sum(c * i * x ** (i - 1) * y ** j for (i, j), c in self.terms if i)
        dy = sum(c * j * x ** i * y ** (j - 1) for (i, j), c in self.terms if j)
        return np.array([dx, dy], dtype=complex)


@dataclass(frozen=True)
class InvariantBasis:
    polynomials: tuple[Polynomial, ...]
    degrees: tuple[int, ...]

    def __post_init__(self):
        for P, d in zip(self.polynomials, self.degrees):
            if not P.is_homogeneous() or P.degree() != d:
                raise ValueError(f"polynomial is not homogeneous of degree {d}")

    def degree_product(self) -> int:
        return prod(self.degrees)


def basis_g212() -> InvariantBasis:
    """``P = X^2 + Y^2`` and ``Q = X^2 Y^2``."""
    P = Polynomial.from_dict({(2, 0): 1, (0, 2): 1})
    Q = Polynomial.from_dict({(2, 2): 1})
    return InvariantBasis((P, Q), (2, 4))


def check_invariance(B: InvariantBasis, G: FiniteGroup, samples: int = 20, seed: int = 0) -> float:
    """Max of ``|P(A t) - P(t)| / (1 + |P(t)|)`` over elements, basis
    polynomials and random points."""
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(samples, 2)) + 1j * rng.normal(size=(samples, 2))
    worst = 0.0
    for g in G:
        if not g.is_linear:
            raise ValueError("invariance is checked for linear groups only")
        for t in pts:
            At = g.A @ t
            for P in B.polynomials:
                v = P(t)
                worst = max(worst, abs(P(At) - v) / (1 + abs(v)))
    return worst


def check_jacobian_nonzero(B: InvariantBasis, t) -> complex:
    """Jacobian determinant of the basis at ``t`` (exact from coefficients)."""
    J = np.array([P.gradient(t) for P in B.polynomials])
    if J.shape == (2, 2):
        return complex(J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0])
    return complex(np.linalg.det(J))


def phi_eval(B: InvariantBasis, t) -> np.ndarray:
    """Quotient chart ``t -> (P_1(t), ..., P_k(t))``."""
    return np.array([P(t) for P in B.polynomials], dtype=complex)


def vieta_roots(theta1: complex, theta2: complex) -> tuple[complex, complex]:
    """Roots of ``L^2 - theta1 L + theta2``, i.e. ``{X^2, Y^2}`` when
    ``(theta1, theta2) = (X^2 + Y^2, X^2 Y^2)``."""
    r = cmath.sqrt(theta1 * theta1 - 4 * theta2)
    return (theta1 + r) / 2, (theta1 - r) / 2


def singularity_lhs_g212(theta1: complex, theta2: complex) -> float:
    """``|theta1 + sqrt(D)| + |theta1 - sqrt(D)|`` with ``D = theta1^2 - 4 theta2``.

    Symmetric in the choice of square root; pulled back by the chart it equals
    ``2 (|X|^2 + |Y|^2)``.
    """
    r = cmath.sqrt(theta1 * theta1 - 4 * theta2)
    return abs(theta1 + r) + abs(theta1 - r)


def singularity_lhs_1d(y: complex, m: int) -> float:
    """``|y|^(2/m)`` for a cyclic stabilizer of order ``m``."""
    if m not in (2, 3, 4, 6):
        raise ValueError("m must be one of 2, 3, 4, 6")
    return abs(y) ** (2.0 / m)


def boundary_defining_value(w: complex, t, H: HermitianForm) -> float:
    """``Re(w) - H(t, t)``: zero exactly on the boundary in the ``(y, w)`` chart,
    for any preimage ``t`` of ``y``."""
    return complex(w).real - H.norm2(t)
