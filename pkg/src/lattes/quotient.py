"""The quotient map ``sigma: A_i x A_i -> P^2`` of the situation-5 covering,
its theta lift, and the residual checks of ``sigma o D_i = f_i o sigma``."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import PoleError
from .lattice import GAUSSIAN, distance_to_lattice
from .maps import ProjPoint, dilation, map_f, proj_distance
from .special import (
    THETA_00,
    THETA_11,
    LatticeConstants,
    compute_constants,
    normalized_theta,
    theta,
    wp,
)

SAMPLE_GUARD = 1e-3
# Identity residuals lose digits near poles; keep every wp argument this far
# from the lattice when sampling.
WP_SAMPLE_GUARD = 0.05


@lru_cache(maxsize=1)
def gaussian_constants() -> LatticeConstants:
    return compute_constants(GAUSSIAN)


def _theta_pair(z, consts: LatticeConstants, normalized: bool):
    if normalized:
        return normalized_theta(THETA_00, z), normalized_theta(THETA_11, z)
    return theta(THETA_00, z, consts.lattice.tau), theta(THETA_11, z, consts.lattice.tau)


def theta_lift(x: complex, y: complex, consts: LatticeConstants | None = None,
               normalized: bool = True) -> np.ndarray:
    """The three theta products defining ``sigma`` (before projectivization).

    With ``normalized=True`` each factor is a normalized theta function, so the
    coordinates share the type ``H = 4 Id`` with trivial semicharacter and the
    vector is a genuine lift of ``sigma`` to ``C^3``.
    """
    k = consts or gaussian_constants()
    c2, a2 = k.c ** 2, k.alpha ** 2
    t00x, t11x = _theta_pair(x, k, normalized)
    t00y, t11y = _theta_pair(y, k, normalized)
    Ax, Bx = t00x * t00x, t11x * t11x
    Ay, By = t00y * t00y, t11y * t11y
    return np.array([
        (c2 * Ax * Ay + a2 * Bx * By) ** 2,
        (c2 * Ax * Ax - a2 * Bx * Bx) * (c2 * Ay * Ay - a2 * By * By),
        (c2 * Ax * Ay - a2 * Bx * By) ** 2,
    ])


def sigma_theta(x: complex, y: complex, consts: LatticeConstants | None = None) -> ProjPoint:
    return ProjPoint(theta_lift(x, y, consts, normalized=False))


def sigma_wp_coords(px: complex, py: complex, alpha: complex) -> np.ndarray:
    a2 = alpha * alpha
    return np.array([(px * py + a2) ** 2, (px * px - a2) * (py * py - a2), (px * py - a2) ** 2])


def sigma_wp(x: complex, y: complex, consts: LatticeConstants | None = None) -> ProjPoint:
    """``[(wp_x wp_y + a^2)^2 : (wp_x^2 - a^2)(wp_y^2 - a^2) : (wp_x wp_y - a^2)^2]``."""
    k = consts or gaussian_constants()
    return ProjPoint(sigma_wp_coords(wp(x, k), wp(y, k), k.alpha))


def random_torus_point(rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(0, 1, 2) + 1j * rng.uniform(0, 1, 2)


def _far_from_lattice(points, radius) -> bool:
    return all(distance_to_lattice(p, GAUSSIAN) >= radius for p in points)


def _sample_pairs(n: int, seed: int, avoid=lambda x, y: True):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        x, y = random_torus_point(rng)
        if avoid(x, y):
            out.append((complex(x), complex(y)))
    return out


def _sigma_regular(x, y, consts) -> bool:
    # stay away from zeros of both theta factors (indeterminacy of the
    # theta form) and from poles of the wp form
    z11 = [x, y]
    z00 = [x - (1 + 1j) / 2, y - (1 + 1j) / 2]
    return _far_from_lattice(z11 + z00, SAMPLE_GUARD)


def check_semiconjugacy(i: int, samples: int = 100, seed: int = 0,
                        consts: LatticeConstants | None = None, form: str = "theta") -> float:
    """Max projective distance between ``sigma(D_i (x, y))`` and ``f_i(sigma(x, y))``."""
    if samples < 1:
        raise ValueError("samples must be positive")
    k = consts or gaussian_constants()
    D = dilation(i)
    f = map_f(i)
    sig = sigma_theta if form == "theta" else sigma_wp
    worst = 0.0
    for x, y in _sample_pairs(samples, seed, lambda x, y: _sigma_regular(x, y, k)):
        X, Y = D @ np.array([x, y])
        if form == "wp" and not _far_from_lattice([X, Y], SAMPLE_GUARD):
            continue
        lhs = sig(X, Y, k)
        rhs = f.proj(sig(x, y, k))
        worst = max(worst, proj_distance(lhs, rhs))
    return worst


SWAP_XZ = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]])


def check_f3_reduction(samples: int = 50, seed: int = 0, consts: LatticeConstants | None = None) -> float:
    """Residual of the reduction of ``f_3`` to ``f_2``.

    ``D_3 = diag(1, i) D_2`` and ``wp(i z) = -wp(z)``, so
    ``sigma(u, i v)`` is ``sigma(u, v)`` with the outer coordinates swapped;
    together with ``f_3 = swap o f_2`` this gives ``sigma o D_3 = f_3 o sigma``.
    Returns the max of the sampled swap residual and the coefficient mismatch
    between ``f_3`` and ``swap o f_2``.
    """
    k = consts or gaussian_constants()
    f2, f3 = map_f(2), map_f(3)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        z = rng.normal(size=3) + 1j * rng.normal(size=3)
        worst = max(worst, float(np.max(np.abs(SWAP_XZ @ f2(z) - f3(z)))) / float(np.max(np.abs(f3(z)))))
    for u, v in _sample_pairs(samples, seed + 1, lambda x, y: _sigma_regular(x, y, k)):
        a = sigma_theta(u, 1j * v, k).coords
        b = SWAP_XZ @ sigma_theta(u, v, k).coords
        worst = max(worst, proj_distance(a, b))
    return worst


def check_sigma_forms(samples: int = 50, seed: int = 0, consts: LatticeConstants | None = None) -> float:
    """Max projective distance between the theta and wp forms of ``sigma``."""
    k = consts or gaussian_constants()
    worst = 0.0
    for x, y in _sample_pairs(samples, seed, lambda x, y: _far_from_lattice([x, y], WP_SAMPLE_GUARD)
                              and _sigma_regular(x, y, k)):
        worst = max(worst, proj_distance(sigma_theta(x, y, k), sigma_wp(x, y, k)))
    return worst


def wp_identity(n: int, x: complex, y: complex, consts: LatticeConstants | None = None) -> float:
    """Relative residual ``|LHS - RHS| / (1 + |RHS|)`` of the three wp identities.

    1. ``wp_x wp_{x+ix} = -(i/2)(wp_x^2 - a^2)`` (``y`` unused)
    2. ``(wp_x - wp_y)^2 wp_{x+y} wp_{x-y} = (wp_x wp_y + a^2)^2``
    3. ``(wp_x - wp_y)^2 (wp_{x+y} + wp_{x-y}) = 2 (wp_x + wp_y)(wp_x wp_y - a^2)``
    """
    k = consts or gaussian_constants()
    a2 = k.alpha ** 2
    px = wp(x, k)
    if n == 1:
        lhs = px * wp(x + 1j * x, k)
        rhs = -0.5j * (px * px - a2)
    elif n in (2, 3):
        py = wp(y, k)
        s, d = wp(x + y, k), wp(x - y, k)
        if n == 2:
            lhs = (px - py) ** 2 * s * d
            rhs = (px * py + a2) ** 2
        else:
            lhs = (px - py) ** 2 * (s + d)
            rhs = 2 * (px + py) * (px * py - a2)
    else:
        raise ValueError("identity index must be 1, 2 or 3")
    return abs(lhs - rhs) / (1 + abs(rhs))


def identity_arguments(n: int, x: complex, y: complex) -> list[complex]:
    if n == 1:
        return [x, x + 1j * x]
    return [x, y, x + y, x - y]


def sample_identity_points(n: int, samples: int, seed: int) -> list[tuple[complex, complex]]:
    return _sample_pairs(samples, seed,
                         lambda x, y: _far_from_lattice(identity_arguments(n, x, y), WP_SAMPLE_GUARD))


def max_wp_identity_residual(n: int, samples: int = 50, seed: int = 0,
                             consts: LatticeConstants | None = None) -> float:
    k = consts or gaussian_constants()
    worst = 0.0
    for x, y in sample_identity_points(n, samples, seed):
        try:
            worst = max(worst, wp_identity(n, x, y, k))
        except PoleError:  # pragma: no cover - excluded by sampling
            continue
    return worst


def addition_formula_residual(x: complex, y: complex, consts: LatticeConstants | None = None) -> float:
    """``(wp_x - wp_y)^2 wp_{x+y} = (wp'_x - wp'_y)^2 / 4 - (wp_x + wp_y)(wp_x - wp_y)^2``,
    relative to ``1 + |RHS|``."""
    from .special import wp_prime

    k = consts or gaussian_constants()
    px, py = wp(x, k), wp(y, k)
    dx, dy = wp_prime(x, k), wp_prime(y, k)
    lhs = (px - py) ** 2 * wp(x + y, k)
    rhs = 0.25 * (dx - dy) ** 2 - (px + py) * (px - py) ** 2
    return abs(lhs - rhs) / (1 + abs(rhs))


def situation5_theta_type():
    """Type of the normalized theta coordinates of ``sigma``: ``H = 4 Id`` with
    the semicharacter read off numerically from the lift (trivial here)."""
    from .hermitian import BundleType, HermitianForm, read_semicharacter

    H = HermitianForm.scalar(4.0)
    k = gaussian_constants()
    # take the coordinate with no zero near the base point
    fn = lambda v: theta_lift(v[0], v[1], k)[1]  # noqa: E731
    alpha = read_semicharacter(fn, H)
    return BundleType(H, alpha)


def situation5_basin_type():
    """The type ``(H, alpha)`` of the bundle carrying the basin boundary, dual
    to :func:`situation5_theta_type` (``H = -4 Id``)."""
    return situation5_theta_type().dual()


THETA_TYPE_SCALE = 4.0
