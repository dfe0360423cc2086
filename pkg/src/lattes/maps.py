"""Projective points, homogeneous polynomial maps of C^3 and the explicit
endomorphisms of P^2 studied here."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class ProjPoint:
    """A point of P^2, stored scaled so its largest coordinate is 1."""

    coords: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.coords, dtype=complex).reshape(3)
        k = int(np.argmax(np.abs(z)))
        if not np.abs(z[k]) > 0 or not np.all(np.isfinite(z)):
            raise ValueError("projective point needs a finite nonzero representative")
        z = z / z[k]
        z.setflags(write=False)
        object.__setattr__(self, "coords", z)

    def __repr__(self):
        return "[" + " : ".join(f"{c:.6g}" for c in self.coords) + "]"


def proj_distance(p, q) -> float:
    """Norm of the cross product of unit representatives (sine of the angle)."""
    a = np.asarray(p.coords if isinstance(p, ProjPoint) else p, dtype=complex)
    b = np.asarray(q.coords if isinstance(q, ProjPoint) else q, dtype=complex)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    # Lagrange identity: |a|^2 |b|^2 - |<a, b>|^2 = sum over i < j of |a_i b_j - a_j b_i|^2
    minors = (a[0] * b[1] - a[1] * b[0], a[0] * b[2] - a[2] * b[0], a[1] * b[2] - a[2] * b[1])
    return float(math.sqrt(sum(abs(m) ** 2 for m in minors)))


def _exponents(d: int) -> list[tuple[int, int, int]]:
    return [(i, j, d - i - j) for i in range(d, -1, -1) for j in range(d - i, -1, -1)]


@dataclass(frozen=True, eq=False)
class HomogeneousMap:
    """Three homogeneous polynomials of degree ``d`` on C^3.

    ``coeffs[k]`` maps exponent triples to coefficients of component ``k``.
    Maps built from squared linear forms keep those forms in ``linear_forms``
    (rows ``l_k`` with component ``k`` equal to ``scale * (l_k . z)^2``).
    """

    coeffs: tuple[dict, dict, dict]
    degree: int
    name: str = ""
    linear_forms: np.ndarray | None = None
    scale: complex = 1.0
    _table: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("degree must be positive")
        table = []
        for comp in self.coeffs:
            for e in comp:
                if sum(e) != self.degree:
                    raise ValueError(f"monomial {e} is not of degree {self.degree}")
            exps = np.array(list(comp.keys()) or [(self.degree, 0, 0)], dtype=int)
            cs = np.array(list(comp.values()) or [0], dtype=complex)
            table.append((exps, cs))
        object.__setattr__(self, "_table", tuple(table))

    @classmethod
    def from_squared_linear_forms(cls, rows, name: str = "", scale: complex = 1.0) -> "HomogeneousMap":
        L = np.asarray(rows, dtype=complex).reshape(3, 3)
        comps = []
        for l in L:
            d = {}
            for i in range(3):
                for j in range(3):
                    e = [0, 0, 0]
                    e[i] += 1
                    e[j] += 1
                    d[tuple(e)] = d.get(tuple(e), 0) + scale * l[i] * l[j]
            comps.append({k: v for k, v in d.items() if v != 0})
        return cls(tuple(comps), 2, name, L, complex(scale))

    def scaled(self, c: complex) -> "HomogeneousMap":
        """The lift ``c * F``."""
        if self.linear_forms is not None:
            return HomogeneousMap.from_squared_linear_forms(self.linear_forms, self.name, self.scale * c)
        comps = tuple({k: c * v for k, v in comp.items()} for comp in self.coeffs)
        return HomogeneousMap(comps, self.degree, self.name, None, self.scale * c)

    def __call__(self, z) -> np.ndarray:
        """Evaluate on a vector of shape ``(3,)`` or a batch ``(3, N)``."""
        z = np.asarray(z, dtype=complex)
        if self.linear_forms is not None:
            return self.scale * (self.linear_forms @ z) ** 2
        out = []
        for exps, cs in self._table:
            acc = np.zeros_like(z[0])
            for e, c in zip(exps, cs):
                acc = acc + c * z[0] ** e[0] * z[1] ** e[1] * z[2] ** e[2]
            out.append(acc)
        return np.array(out)

    def jacobian(self, z) -> np.ndarray:
        """3x3 matrix of partial derivatives at a single point."""
        z = np.asarray(z, dtype=complex).reshape(3)
        J = np.zeros((3, 3), dtype=complex)
        for r, (exps, cs) in enumerate(self._table):
            for e, c in zip(exps, cs):
                for v in range(3):
                    if e[v]:
                        e2 = list(e)
                        e2[v] -= 1
                        J[r, v] += c * e[v] * z[0] ** e2[0] * z[1] ** e2[1] * z[2] ** e2[2]
        return J

    def jacobian_det(self, z) -> complex:
        return complex(np.linalg.det(self.jacobian(z)))

    def proj(self, p: ProjPoint) -> ProjPoint:
        return ProjPoint(self(p.coords))

    def homogeneity_residual(self, samples: int = 20, seed: int = 0) -> float:
        """Max relative ``|F(lam z) - lam^d F(z)|`` at random ``lam, z``."""
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(samples):
            z = rng.normal(size=3) + 1j * rng.normal(size=3)
            lam = complex(rng.normal(), rng.normal())
            a = self(lam * z)
            b = lam ** self.degree * self(z)
            worst = max(worst, float(np.max(np.abs(a - b)) / np.max(np.abs(b))))
        return worst

    def regularity_certificate(self, samples: int = 200, seed: int = 0) -> float:
        """Min of ``|F(z)|_inf`` over random unit-sphere samples; positive
        values are (sampled) evidence that ``F^{-1}(0) = {0}``."""
        rng = np.random.default_rng(seed)
        z = rng.normal(size=(3, samples)) + 1j * rng.normal(size=(3, samples))
        z /= np.linalg.norm(z, axis=0)
        return float(np.min(np.max(np.abs(self(z)), axis=0)))


# Linear forms whose squares give the coordinates.
_L1 = (-1, 1, 1)
_L2 = (1, -1, 1)
_L3 = (1, 1, -1)

F_ROWS = {
    1: (_L1, _L2, _L3),
    2: (_L2, _L1, _L3),
    3: (_L3, _L1, _L2),
}
G_ROWS = ((1, -2, 0), (1, 0, -2), (1, 0, 0))


def map_f(i: int) -> HomogeneousMap:
    """Integer lift of ``f_i``."""
    if i not in F_ROWS:
        raise ValueError("i must be 1, 2 or 3")
    return HomogeneousMap.from_squared_linear_forms(F_ROWS[i], name=f"f{i}")


def map_g() -> HomogeneousMap:
    """``[x:y:z] -> [(x-2y)^2 : (x-2z)^2 : x^2]``."""
    return HomogeneousMap.from_squared_linear_forms(G_ROWS, name="g")


def power_map(d: int = 2) -> HomogeneousMap:
    if d == 2:
        return HomogeneousMap.from_squared_linear_forms(np.eye(3), name="power")
    comps = tuple({tuple(d if k == j else 0 for k in range(3)): 1} for j in range(3))
    return HomogeneousMap(comps, d, name="power")


def builtin_map(name: str) -> HomogeneousMap:
    table = {"f1": lambda: map_f(1), "f2": lambda: map_f(2), "f3": lambda: map_f(3),
             "g": map_g, "power": power_map}
    if name not in table:
        raise ValueError(f"unknown map {name!r}; expected one of {sorted(table)}")
    return table[name]()


def dilation(i: int) -> np.ndarray:
    """The dilations ``D_1 = (1+i) Id``, ``D_2 = [[1,1],[1,-1]]``, ``D_3 = [[1,1],[i,-i]]``."""
    w = SQRT2 * np.exp(1j * math.pi / 4)
    r = 1 / SQRT2
    mats = {
        1: np.array([[w, 0], [0, w]]),
        2: SQRT2 * np.array([[r, r], [r, -r]]),
        3: SQRT2 * np.array([[r, r], [1j * r, -1j * r]]),
    }
    if i not in mats:
        raise ValueError("i must be 1, 2 or 3")
    # entries are Gaussian integers up to rounding
    M = mats[i].astype(complex)
    return np.round(M.real, 12) + 1j * np.round(M.imag, 12)
