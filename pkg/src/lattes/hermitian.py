"""Line-bundle types ``(H, alpha)`` on the torus ``C^2 / (L x L)``.

Forms are stored exactly as they enter the multiplicator
``e_gamma(x) = alpha(gamma) * exp(pi * (H(gamma, x) + H(gamma, gamma) / 2))``,
with no sign flip. Normalized theta functions on the Gaussian lattice have a
positive definite form; the bundle carrying the basin boundary has the
opposite type, obtained with :meth:`BundleType.dual`. That is the only place
a sign changes.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import LatticeError
from .lattice import GAUSSIAN2, Lattice2, lattice2_coefficients

LINALG_TOL = 1e-12
EXP_TOL = 1e-9


def _vec(x) -> np.ndarray:
    return np.asarray(x, dtype=complex).reshape(2)


@dataclass(frozen=True, eq=False)
class HermitianForm:
    """``H(w, w') = conj(w)^T M w'`` (linear in the second argument)."""

    matrix: np.ndarray

    def __post_init__(self):
        M = np.array(self.matrix, dtype=complex).reshape(2, 2)
        if np.max(np.abs(M - M.conj().T)) > LINALG_TOL * max(1.0, np.max(np.abs(M))):
            raise ValueError("matrix is not Hermitian")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @classmethod
    def scalar(cls, lam: float) -> "HermitianForm":
        return cls(lam * np.eye(2))

    def __call__(self, w, w2) -> complex:
        return complex(_vec(w).conj() @ self.matrix @ _vec(w2))

    def norm2(self, w) -> float:
        return self(w, w).real

    def __neg__(self):
        return HermitianForm(-self.matrix)

    def __mul__(self, k):
        return HermitianForm(k * self.matrix)

    __rmul__ = __mul__

    def pullback(self, A) -> "HermitianForm":
        A = np.asarray(A, dtype=complex)
        return HermitianForm(A.conj().T @ self.matrix @ A)

    def distance(self, other: "HermitianForm") -> float:
        return float(np.max(np.abs(self.matrix - other.matrix)))

    def imag_matrix(self, L2: Lattice2) -> np.ndarray:
        """``Im H(g_j, g_k)`` on the four lattice generators."""
        gens = L2.generators()
        return np.array([[self(g, h).imag for h in gens] for g in gens])

    def integrality_residual(self, L2: Lattice2 = GAUSSIAN2) -> float:
        E = self.imag_matrix(L2)
        return float(np.max(np.abs(E - np.round(E))))


class Semicharacter:
    """A map ``alpha: L x L -> S^1`` given by its values on the generators.

    By default other values follow from the cocycle rule attached to the
    integer matrix ``E[j, k] = Im H(g_j, g_k)``. A custom ``rule`` (used for
    pullbacks) evaluates ``alpha`` directly on integer coordinates instead.
    """

    def __init__(self, values, form: HermitianForm, lattice2: Lattice2 = GAUSSIAN2,
                 rule: Callable[[tuple[int, int, int, int]], complex] | None = None):
        vals = tuple(complex(v) for v in values)
        if len(vals) != 4:
            raise ValueError("a semicharacter needs four generator values")
        if any(abs(abs(v) - 1) > LINALG_TOL for v in vals):
            raise ValueError("semicharacter values must have modulus 1")
        self.values = vals
        self.lattice2 = lattice2
        self._E = np.round(form.imag_matrix(lattice2)).astype(np.int64)
        self._rule = rule

    def at_coefficients(self, n) -> complex:
        n = tuple(int(k) for k in n)
        if self._rule is not None:
            return self._rule(n)
        value = 1 + 0j
        for v, k in zip(self.values, n):
            value *= v ** k
        sign = 0
        for j in range(4):
            for k in range(j + 1, 4):
                sign += n[j] * n[k] * int(self._E[j, k])
        return -value if sign % 2 else value

    def __call__(self, gamma) -> complex:
        n = lattice2_coefficients(_vec(gamma), self.lattice2)
        if n is None:
            raise LatticeError(f"{gamma!r} is not a lattice point")
        return self.at_coefficients(n)

    def __repr__(self):
        vals = ", ".join(f"{v:.6g}" for v in self.values)
        return f"Semicharacter([{vals}])"


@dataclass(frozen=True, eq=False)
class BundleType:
    H: HermitianForm
    alpha: Semicharacter
    lattice: Lattice2 = GAUSSIAN2

    def __post_init__(self):
        if self.H.integrality_residual(self.lattice) > EXP_TOL:
            raise ValueError("Im H is not integral on the lattice")

    def dual(self) -> "BundleType":
        """The type ``(-H, 1/alpha)``."""
        rule = None
        if self.alpha._rule is not None:
            orig = self.alpha._rule
            rule = lambda n: 1 / orig(n)  # noqa: E731
        alpha = Semicharacter([1 / v for v in self.alpha.values], -self.H, self.lattice, rule)
        return BundleType(-self.H, alpha, self.lattice)


@dataclass(frozen=True, eq=False)
class AffineEndo:
    """``x -> A x + t`` on ``C^2``, with ``A`` preserving the lattice."""

    A: np.ndarray
    t: np.ndarray = field(default_factory=lambda: np.zeros(2, dtype=complex))
    lattice: Lattice2 = GAUSSIAN2

    def __post_init__(self):
        A = np.array(self.A, dtype=complex).reshape(2, 2)
        t = _vec(self.t).copy()
        for g in self.lattice.generators():
            if lattice2_coefficients(A @ g, self.lattice) is None:
                raise LatticeError("linear part does not preserve the lattice")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "t", t)

    def __call__(self, x) -> np.ndarray:
        return self.A @ _vec(x) + self.t

    def compose(self, other: "AffineEndo") -> "AffineEndo":
        """``self o other``."""
        return AffineEndo(self.A @ other.A, self.A @ other.t + self.t, self.lattice)


def trivial_type(L2: Lattice2 = GAUSSIAN2) -> BundleType:
    H = HermitianForm(np.zeros((2, 2)))
    return BundleType(H, Semicharacter([1, 1, 1, 1], H, L2), L2)


def theta_char_type(ch_x, ch_y) -> BundleType:
    """Type of ``(x, y) -> N[ch_x](x) * N[ch_y](y)`` for normalized thetas ``N``
    on the Gaussian lattice: ``H = Id``, ``alpha(1) = e^{2i pi a}``,
    ``alpha(i) = e^{-2i pi b}`` on each factor."""
    H = HermitianForm(np.eye(2))
    vals = []
    for ch in (ch_x, ch_y):
        vals += [cmath.exp(2j * math.pi * float(ch.a)), cmath.exp(-2j * math.pi * float(ch.b))]
    return BundleType(H, Semicharacter(vals, H, GAUSSIAN2), GAUSSIAN2)


def _pairs_box(radius: int = 1):
    rng = range(-radius, radius + 1)
    return list(itertools.product(rng, repeat=4))


def semicharacter_law_check(T: BundleType, radius: int = 1) -> float:
    """Max of ``|alpha(g1+g2) - alpha(g1) alpha(g2) (-1)^{Im H(g1, g2)}|`` over
    lattice points with coordinates in ``[-radius, radius]`` (generator pairs
    included)."""
    L2 = T.lattice
    pts = _pairs_box(radius)
    table = {n: T.alpha.at_coefficients(n) for n in _pairs_box(2 * radius)}
    vecs = {n: L2.point(n) for n in pts}
    worst = 0.0
    for n1 in pts:
        for n2 in pts:
            e = T.H(vecs[n1], vecs[n2]).imag
            sign = -1 if round(e) % 2 else 1
            n12 = tuple(a + b for a, b in zip(n1, n2))
            worst = max(worst, abs(table[n12] - table[n1] * table[n2] * sign))
    return worst


def multiplicator(T: BundleType, gamma, x) -> complex:
    """``e_gamma(x) = alpha(gamma) exp(pi (H(gamma, x) + H(gamma, gamma)/2))``."""
    gamma = _vec(gamma)
    return T.alpha(gamma) * cmath.exp(math.pi * (T.H(gamma, x) + 0.5 * T.H(gamma, gamma)))


def pullback_type(T: BundleType, phi: AffineEndo) -> BundleType:
    """``H_phi(w, w') = H(A w, A w')`` and
    ``alpha_phi(g) = alpha(A g) exp(2i pi Im H(A g, t))``."""
    L2 = T.lattice
    A, t = phi.A, phi.t
    H_phi = T.H.pullback(A)

    def rule(n):
        g = A @ L2.point(n)
        return T.alpha(g) * cmath.exp(2j * math.pi * T.H(g, t).imag)

    values = [rule(n) for n in np.eye(4, dtype=int)]
    return BundleType(H_phi, Semicharacter(values, H_phi, L2, rule), L2)


def alpha_distance(a: Semicharacter, b: Semicharacter, power: int = 1, radius: int = 1) -> float:
    """Max ``|a(g) - b(g)^power|`` over a box of lattice points."""
    return max(abs(a.at_coefficients(n) - b.at_coefficients(n) ** power) for n in _pairs_box(radius))


@dataclass(frozen=True)
class LattesCondition:
    ok: bool
    form_residual: float
    alpha_residual: float


def check_lattes_condition(T: BundleType, D: AffineEndo, d: int, tol: float = EXP_TOL) -> LattesCondition:
    """Whether ``(H_D, alpha_D) = (d H, alpha^d)``."""
    if d < 2:
        raise ValueError("degree must be at least 2")
    P = pullback_type(T, D)
    h = P.H.distance(d * T.H)
    a = alpha_distance(P.alpha, T.alpha, power=d)
    return LattesCondition(h <= tol and a <= tol, h, a)


def metric_q(T: BundleType, delta: float, x, u: complex) -> float:
    if delta <= 0:
        raise ValueError("delta must be positive")
    return delta * math.exp(-0.5 * math.pi * T.H.norm2(x)) * abs(u)


def delta_normalization(T: BundleType, D: AffineEndo, d: int) -> float:
    """``(exp(-pi/2 H(t, t)))^{1/(d-1)}`` for the translation part ``t`` of ``D``."""
    if d < 2:
        raise ValueError("degree must be at least 2")
    return math.exp(-0.5 * math.pi * T.H.norm2(D.t) / (d - 1))


def lift_morphism(T: BundleType, D: AffineEndo, d: int, x, u: complex) -> tuple[np.ndarray, complex]:
    """``(x, u) -> (D x, exp(pi H(t, A x)) u^d)``."""
    x = _vec(x)
    Ax = D.A @ x
    return Ax + D.t, cmath.exp(math.pi * T.H(D.t, Ax)) * u ** d


def epsilon0(x0, t, H: HermitianForm) -> complex:
    """Equivariant trivialization factor ``exp(-pi H(x0, t))``."""
    return cmath.exp(-math.pi * H(x0, t))


def read_semicharacter(fn: Callable[[np.ndarray], complex], H: HermitianForm,
                       L2: Lattice2 = GAUSSIAN2, x=None) -> Semicharacter:
    """Recover ``alpha`` on the generators from a function assumed to satisfy
    ``fn(x + g) = alpha(g) exp(pi (H(g, x) + H(g, g)/2)) fn(x)``.

    Values are taken at one base point and rounded onto the unit circle.
    """
    x = _vec([0.137 + 0.291j, 0.353 + 0.079j] if x is None else x)
    vals = []
    for g in L2.generators():
        r = fn(x + g) / (fn(x) * cmath.exp(math.pi * (H(g, x) + 0.5 * H(g, g))))
        vals.append(r / abs(r))
    return Semicharacter(vals, H, L2)
