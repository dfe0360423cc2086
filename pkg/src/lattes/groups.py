"""Finite groups of affine maps of ``C^2 / (L x L)`` and the registry of
pairs ``(A^2, G)`` with quotient ``P^2``."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ClosureError
from .hermitian import HermitianForm
from .lattice import GAUSSIAN, GAUSSIAN2, Lattice, Lattice2, contains, reduce, torus_equal

CLOSURE_CAP = 4096
ELEMENT_TOL = 1e-9
_KEY_DIGITS = 6


@dataclass(frozen=True, eq=False)
class GroupElement:
    """``x -> A x + t``; translations are kept reduced modulo the lattice."""

    A: np.ndarray
    t: np.ndarray = field(default_factory=lambda: np.zeros(2, dtype=complex))
    lattice: Lattice2 = GAUSSIAN2

    def __post_init__(self):
        A = np.array(self.A, dtype=complex).reshape(2, 2)
        t = np.array([reduce(v, self.lattice.component)[0] for v in np.asarray(self.t, dtype=complex).reshape(2)])
        A.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "t", t)

    def __call__(self, x) -> np.ndarray:
        return self.A @ np.asarray(x, dtype=complex) + self.t

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.A @ other.A, self.A @ other.t + self.t, self.lattice)

    def inverse(self) -> "GroupElement":
        Ai = np.linalg.inv(self.A)
        return GroupElement(Ai, -Ai @ self.t, self.lattice)

    @property
    def is_linear(self) -> bool:
        return torus_equal(self.t, np.zeros(2), self.lattice, ELEMENT_TOL)

    def key(self) -> tuple:
        L = self.lattice.component
        coords = []
        for v in self.t:
            s, u = L.coefficients(v)
            coords += [round(s % 1.0, _KEY_DIGITS) % 1.0, round(u % 1.0, _KEY_DIGITS) % 1.0]
        entries = [round(x, _KEY_DIGITS) + 0.0 for v in self.A.ravel() for x in (v.real, v.imag)]
        return tuple(entries + coords)

    def unitarity_residual(self) -> float:
        return float(np.max(np.abs(self.A.conj().T @ self.A - np.eye(2))))

    def __repr__(self):
        A = np.round(self.A, 6).tolist()
        if self.is_linear:
            return f"GroupElement({A})"
        return f"GroupElement({A}, t={np.round(self.t, 6).tolist()})"


def identity(L2: Lattice2 = GAUSSIAN2) -> GroupElement:
    return GroupElement(np.eye(2), np.zeros(2), L2)


@dataclass(frozen=True)
class FiniteGroup:
    elements: tuple[GroupElement, ...]
    lattice: Lattice2 = GAUSSIAN2
    name: str = ""

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def keys(self) -> set:
        return {g.key() for g in self.elements}

    def __contains__(self, g: GroupElement) -> bool:
        return g.key() in self.keys()

    def closure_defect(self) -> int:
        """Number of products and inverses that fall outside the set (0 for a group)."""
        keys = self.keys()
        missing = {(g @ h).key() for g in self for h in self} - keys
        missing |= {g.inverse().key() for g in self} - keys
        if identity(self.lattice).key() not in keys:
            missing.add("identity")
        return len(missing)

    def linear_parts(self) -> list[np.ndarray]:
        seen, out = set(), []
        for g in self:
            k = GroupElement(g.A, np.zeros(2), self.lattice).key()
            if k not in seen:
                seen.add(k)
                out.append(g.A)
        return out

    def translation_classes(self) -> int:
        return len({GroupElement(np.eye(2), g.t, self.lattice).key() for g in self})


def close(generators, L2: Lattice2 = GAUSSIAN2, cap: int = CLOSURE_CAP, name: str = "") -> FiniteGroup:
    """Breadth-first closure of ``generators`` under composition."""
    e = identity(L2)
    found = {e.key(): e}
    frontier = [e]
    while frontier:
        nxt = []
        for g in frontier:
            for s in generators:
                h = s @ g
                k = h.key()
                if k not in found:
                    found[k] = h
                    nxt.append(h)
                    if len(found) > cap:
                        raise ClosureError(f"closure exceeded {cap} elements")
        frontier = nxt
    return FiniteGroup(tuple(found.values()), L2, name)


def gmp2_generators(m: int, p: int, L2: Lattice2 = GAUSSIAN2) -> list[GroupElement]:
    z = cmath.exp(2j * math.pi / m)
    mats = [
        np.array([[0, 1], [1, 0]]),
        np.array([[0, z], [1 / z, 0]]),
        np.array([[z ** p, 0], [0, 1]]),
    ]
    return [GroupElement(M, np.zeros(2), L2) for M in mats]


def gmp2(m: int, p: int, L2: Lattice2 = GAUSSIAN2) -> FiniteGroup:
    """The imprimitive reflection group ``G(m, p, 2)`` (linear parts only)."""
    if m < 1 or p < 1 or m % p:
        raise ValueError("p must divide m")
    return close(gmp2_generators(m, p, L2), L2, name=f"G({m},{p},2)")


S3_MATRICES = (
    ((1, 0), (0, 1)),
    ((-1, -1), (0, 1)),
    ((0, 1), (1, 0)),
    ((1, 0), (-1, -1)),
    ((-1, -1), (1, 0)),
    ((0, 1), (-1, -1)),
)


def s3_rep(L2: Lattice2 = GAUSSIAN2) -> FiniteGroup:
    """The integer representation of S_3 on the lattice ``Z + tau Z`` (six matrices)."""
    return FiniteGroup(tuple(GroupElement(np.array(M), np.zeros(2), L2) for M in S3_MATRICES), L2, "S3")


HALF_PERIOD = (1 + 1j) / 2


def situation5_group() -> FiniteGroup:
    """``<G(4,2,2), translation by (1+i)/2 (1, 1)>`` acting on ``A_i x A_i``."""
    shift = GroupElement(np.eye(2), [HALF_PERIOD, HALF_PERIOD], GAUSSIAN2)
    return close(gmp2_generators(4, 2) + [shift], GAUSSIAN2, name="situation5")


def check_H_invariance(G: FiniteGroup, H: HermitianForm, samples: int = 8, seed: int = 0) -> float:
    """Max of ``|H(Ax, Ay) - H(x, y)|`` over elements and random vector pairs."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    pts = rng.normal(size=(samples, 2, 2)) + 1j * rng.normal(size=(samples, 2, 2))
    for g in G:
        for x, y in pts:
            worst = max(worst, abs(H(g.A @ x, g.A @ y) - H(x, y)))
    return worst


def stabilizer_of_point(G: FiniteGroup, x0, L2: Lattice2 | None = None, tol: float = ELEMENT_TOL) -> FiniteGroup:
    L2 = L2 or G.lattice
    x0 = np.asarray(x0, dtype=complex)
    els = tuple(g for g in G if torus_equal(g(x0), x0, L2, tol))
    return FiniteGroup(els, L2, f"Stab({np.round(x0, 6).tolist()})")


@dataclass(frozen=True)
class AffineLine:
    """The line ``s -> (s, slope * s + offset)`` in ``C^2``; ``slope`` must be a
    Gaussian integer-like multiplier preserving the lattice."""

    slope: complex
    offset: complex

    def __call__(self, s: complex) -> np.ndarray:
        return np.array([s, self.slope * s + self.offset])

    def contains_mod(self, q, L: Lattice, tol: float = ELEMENT_TOL) -> bool:
        # (q1 - g1, q2 - g2) on the line iff q2 - slope*q1 - offset = g2 - slope*g1,
        # and g2 - slope*g1 ranges over all of L when slope*L is inside L.
        return contains(q[1] - self.slope * q[0] - self.offset, L, tol)


LINE_SAMPLES = (0.1307 + 0.3119j, 0.7731 - 0.2047j, 0.4123 + 0.0518j, -0.2979 + 0.6037j, 0.9011 + 0.8893j)


def stabilizer_of_line(G: FiniteGroup, line: AffineLine, L2: Lattice2 | None = None,
                       samples: int = 5, mode: str = "pointwise", tol: float = ELEMENT_TOL) -> FiniteGroup:
    """Elements preserving the image of ``line`` in the torus.

    ``mode="pointwise"`` keeps elements fixing every sampled point (the generic
    isotropy group, whose order is the branching order of the quotient map
    along the line); ``mode="setwise"`` keeps elements mapping the line into
    itself.
    """
    if samples < 3:
        raise ValueError("need at least 3 samples")
    if mode not in ("pointwise", "setwise"):
        raise ValueError(f"unknown mode {mode!r}")
    L2 = L2 or G.lattice
    params = [LINE_SAMPLES[i % len(LINE_SAMPLES)] * (1 + 0.37 * (i // len(LINE_SAMPLES))) for i in range(samples)]
    pts = [line(s) for s in params]
    keep = []
    for g in G:
        if mode == "pointwise":
            ok = all(torus_equal(g(p), p, L2, tol) for p in pts)
        else:
            ok = all(line.contains_mod(g(p), L2.component, tol) for p in pts)
        if ok:
            keep.append(g)
    return FiniteGroup(tuple(keep), L2, f"Stab_{mode}")


def is_reflection(g: GroupElement, tol: float = ELEMENT_TOL) -> bool:
    """Non-identity linear map fixing a hyperplane (here a line) pointwise."""
    K = g.A - np.eye(2)
    if np.max(np.abs(K)) <= tol:
        return False
    return int(np.linalg.matrix_rank(K, tol=1e-8)) == 1


def reflections(G: FiniteGroup) -> list[GroupElement]:
    return [g for g in G if is_reflection(GroupElement(g.A, np.zeros(2), G.lattice))]


OMEGA_REPRESENTATIVE = Lattice(0.23 + 1.07j)
RHO = Lattice(cmath.exp(2j * math.pi / 3))


@dataclass(frozen=True)
class ClassificationEntry:
    label: int
    lattice: Lattice
    generic_modulus: bool
    group_name: str
    constructor: Callable[[], FiniteGroup]
    branch_locus: str

    def to_dict(self, with_order: bool = True) -> dict:
        d = {
            "label": self.label,
            "tau": [self.lattice.tau.real, self.lattice.tau.imag],
            "generic_modulus": self.generic_modulus,
            "group": self.group_name,
            "branch_locus": self.branch_locus,
        }
        if with_order:
            d["order"] = len(self.constructor())
        return d


def _on(L: Lattice, fn):
    return lambda: fn(Lattice2(L))


def classification_registry() -> list[ClassificationEntry]:
    """The six pairs ``(A^2, G)`` with ``A^2 / G = P^2``.

    ``A_omega`` has an arbitrary modulus; a fixed representative stands in for
    it. Branch loci are short descriptions of the curve in P^2.
    """
    return [
        ClassificationEntry(1, OMEGA_REPRESENTATIVE, True, "G(2,1,2)",
                            _on(OMEGA_REPRESENTATIVE, lambda L2: gmp2(2, 1, L2)),
                            "4 lines and a conic"),
        ClassificationEntry(2, RHO, False, "G(3,1,2)", _on(RHO, lambda L2: gmp2(3, 1, L2)),
                            "3 lines and a conic"),
        ClassificationEntry(3, GAUSSIAN, False, "G(4,1,2)", _on(GAUSSIAN, lambda L2: gmp2(4, 1, L2)),
                            "3 lines and a conic"),
        ClassificationEntry(4, RHO, False, "G(6,1,2)", _on(RHO, lambda L2: gmp2(6, 1, L2)),
                            "3 lines and a conic"),
        ClassificationEntry(5, GAUSSIAN, False, "<G(4,2,2), (1+i)/2 (1,1)>", situation5_group, "6 lines"),
        ClassificationEntry(6, OMEGA_REPRESENTATIVE, True, "S3", _on(OMEGA_REPRESENTATIVE, s3_rep),
                            "dual curve of a smooth cubic"),
    ]


def registry_report() -> list[dict]:
    return [e.to_dict() for e in classification_registry()]
