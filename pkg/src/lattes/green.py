"""Escape-rate Green functions of homogeneous lifts, the calibration of the
lifts of ``f_i`` against the theta lift, the profile law on the torus, and
grid evaluation on affine slices of ``C^3``."""

from __future__ import annotations

import ast
import math
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateOrbitError
from .maps import HomogeneousMap, dilation, map_f
from .quotient import _far_from_lattice, gaussian_constants, random_torus_point, theta_lift
from .special import LatticeConstants

GAP_TOL = 1e-12
# consecutive small gaps required before stopping; one step can land on norm
# exactly 1 by coincidence (e.g. Gaussian-integer points)
GAP_STREAK = 3
MAX_RESOLUTION = 4096


@dataclass(frozen=True)
class GreenParams:
    degree: int = 2
    p_max: int = 40
    escape_floor: float = 1e-300
    blow_ceiling: float = 1e300

    def __post_init__(self):
        if self.degree < 2:
            raise ValueError("degree must be at least 2")
        if self.p_max < 8:
            raise ValueError("p_max must be at least 8")


@dataclass(frozen=True)
class GreenResult:
    value: float
    iterations_used: int
    cauchy_gap: float
    gap_ratio: float | None = None


def _green_core(F: HomogeneousMap, z: np.ndarray, params: GreenParams):
    """Vectorized renormalized iteration over the columns of ``z`` (3, N).

    Columns that reach the origin come back as NaN.
    """
    d = F.degree
    norm0 = np.max(np.abs(z), axis=0)
    bad = ~(norm0 > 0)
    w = z / np.where(bad, 1.0, norm0)
    acc = np.zeros(z.shape[1])
    gaps: list[float] = []
    streak = 0
    p = 0
    for p in range(1, params.p_max + 1):
        w = F(w)
        n = np.max(np.abs(w), axis=0)
        dead = ~((n > params.escape_floor) & (n < params.blow_ceiling))
        bad |= dead
        n = np.where(dead, 1.0, n)
        step = np.log(n) / d ** p
        acc += step
        w = w / n
        gap = float(np.max(np.abs(step[~bad]))) if np.any(~bad) else 0.0
        gaps.append(gap)
        streak = streak + 1 if gap < GAP_TOL else 0
        if streak >= GAP_STREAK:
            break
    with np.errstate(divide="ignore"):
        G = np.log(np.where(bad, 1.0, norm0)) + acc
    G[bad] = np.nan
    return G, p, gaps


def green(F: HomogeneousMap, z, params: GreenParams | None = None) -> GreenResult:
    """``lim d^-p log ||F^p(z)||`` with the max-modulus norm."""
    params = params or GreenParams(degree=F.degree)
    z = np.asarray(z, dtype=complex).reshape(3, 1)
    if not np.any(z):
        raise DegenerateOrbitError("green is undefined at the origin")
    G, p, gaps = _green_core(F, z, params)
    if math.isnan(G[0]):
        raise DegenerateOrbitError(f"orbit of {z.ravel()} reaches the indeterminacy cone of {F.name}")
    ratio = gaps[-1] / gaps[-2] if len(gaps) >= 2 and gaps[-2] > 0 else None
    return GreenResult(float(G[0]), p, gaps[-1], ratio)


def green_batch(F: HomogeneousMap, z, params: GreenParams | None = None) -> np.ndarray:
    """Green values for the columns of ``z``; degenerate columns are NaN."""
    params = params or GreenParams(degree=F.degree)
    G, _, _ = _green_core(F, np.asarray(z, dtype=complex), params)
    return G


def gap_ratios(F: HomogeneousMap, z, p_max: int = 20) -> list[float]:
    """Ratios of successive Cauchy gaps, without early stopping."""
    z = np.asarray(z, dtype=complex).reshape(3, 1)
    d = F.degree
    w = z / np.max(np.abs(z))
    gaps = []
    for p in range(1, p_max + 1):
        w = F(w)
        n = float(np.max(np.abs(w)))
        gaps.append(abs(math.log(n)) / d ** p)
        w = w / n
    return [b / a for a, b in zip(gaps, gaps[1:]) if a > 0]


def mean_gap_ratio(F: HomogeneousMap, z, p_start: int = 10, p_max: int = 30) -> float:
    """Geometric mean of the gap ratios for ``p >= p_start``.

    Single ratios follow the orbit and scatter widely; their mean settles
    near ``1/d``.
    """
    r = gap_ratios(F, z, p_max)[p_start - 1:]
    return float(np.exp(np.mean(np.log(r))))


# calibration and profile ---------------------------------------------------

def _lift_samples(samples: int, seed: int, consts: LatticeConstants, rel_floor: float = 1e-6):
    """Torus points with a well-conditioned theta lift (no tiny coordinate)."""
    rng = np.random.default_rng(seed)
    xs, lifts = [], []
    while len(xs) < samples:
        x = random_torus_point(rng)
        if not _far_from_lattice([x[0], x[1], x[0] - (1 + 1j) / 2, x[1] - (1 + 1j) / 2], 1e-2):
            continue
        v = theta_lift(x[0], x[1], consts)
        if np.min(np.abs(v)) < rel_floor * np.max(np.abs(v)):
            continue
        xs.append(x)
        lifts.append(v)
    return xs, lifts


def calibrate_lift(i: int, consts: LatticeConstants | None = None, samples: int = 50,
                   seed: int = 0) -> tuple[complex, float]:
    """The constant ``c`` with ``c F_i(theta(x)) = theta(D_i x)`` and the
    largest relative deviation of the componentwise ratios from it.

    ``theta`` is the normalized theta lift; ``c`` is the median of the
    ratios (real and imaginary parts separately).
    """
    k = consts or gaussian_constants()
    F, D = map_f(i), dilation(i)
    ratios = []
    xs, lifts = _lift_samples(samples, seed, k)
    for x, v in zip(xs, lifts):
        Dx = D @ x
        lhs = theta_lift(Dx[0], Dx[1], k)
        rhs = F(v)
        if np.min(np.abs(rhs)) < 1e-8 * np.max(np.abs(rhs)):
            continue
        ratios.extend(lhs / rhs)
    r = np.array(ratios)
    c = complex(np.median(r.real), np.median(r.imag))
    spread = float(np.max(np.abs(r - c)) / abs(c))
    return c, spread


def calibrated_map(i: int, consts: LatticeConstants | None = None) -> HomogeneousMap:
    c, _ = calibrate_lift(i, consts)
    return map_f(i).scaled(c)


@dataclass(frozen=True)
class ProfileFit:
    lam: float
    C: float
    residual: float


def green_profile_check(i: int, consts: LatticeConstants | None = None, samples: int = 100,
                        seed: int = 0, params: GreenParams | None = None) -> ProfileFit:
    """Least-squares fit of ``G_F(theta(x)) = C + (pi/2) lam |x|^2`` for the
    calibrated lift of ``f_i``."""
    k = consts or gaussian_constants()
    F = calibrated_map(i, k)
    xs, lifts = _lift_samples(samples, seed, k)
    G = green_batch(F, np.array(lifts).T, params)
    r2 = np.array([float(np.sum(np.abs(x) ** 2)) for x in xs])
    A = np.column_stack([np.ones_like(r2), 0.5 * math.pi * r2])
    (C, lam), *_ = np.linalg.lstsq(A, G, rcond=None)
    residual = float(np.max(np.abs(A @ np.array([C, lam]) - G)))
    return ProfileFit(float(lam), float(C), residual)


def boundary_sample(x, lam: float, consts: LatticeConstants | None = None) -> np.ndarray:
    """``u theta(x)`` with ``log u = -(pi/2) lam |x|^2``: a point of the basin
    boundary of every calibrated lift."""
    k = consts or gaussian_constants()
    x = np.asarray(x, dtype=complex).reshape(2)
    v = theta_lift(x[0], x[1], k)
    if not np.any(np.abs(v) > 0):
        raise DegenerateOrbitError(f"theta lift vanishes at {x}")
    return math.exp(-0.5 * math.pi * lam * float(np.sum(np.abs(x) ** 2))) * v


def boundary_residual(i: int, lam: float, samples: int = 50, seed: int = 0,
                      consts: LatticeConstants | None = None) -> float:
    """Max ``|G_F|`` over boundary samples for the calibrated lift of ``f_i``."""
    k = consts or gaussian_constants()
    F = calibrated_map(i, k)
    xs, _ = _lift_samples(samples, seed, k)
    z = np.array([boundary_sample(x, lam, k) for x in xs]).T
    return float(np.max(np.abs(green_batch(F, z))))


# slices and grids ----------------------------------------------------------

_ALLOWED = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Constant, ast.Name, ast.Add, ast.Sub,
            ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd, ast.Load)


def _compile_component(text: str):
    text = text.strip()
    if not text:
        raise ValueError("empty slice component")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse slice component {text!r}") from exc
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED):
            raise ValueError(f"unsupported syntax in slice component {text!r}")
        if isinstance(node, ast.Name) and node.id not in ("s", "t", "i"):
            raise ValueError(f"unknown name {node.id!r} in slice component {text!r}")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float, complex)):
            raise ValueError(f"bad constant in slice component {text!r}")
    code = compile(tree, "<slice>", "eval")
    return lambda s, t: eval(code, {"__builtins__": {}}, {"s": s, "t": t, "i": 1j})


@dataclass(frozen=True)
class SliceSpec:
    """An affine plane ``(s, t) -> z(s, t)`` in ``C^3`` over the real square
    ``[-extent, extent]^2``, e.g. ``"z=(s,t,1)"`` or ``"z=(1, s+i*t, 0.5)"``."""

    text: str
    extent: float = 2.0

    def __post_init__(self):
        if not self.extent > 0:
            raise ValueError("extent must be positive")
        self.components  # validate eagerly

    @property
    def components(self):
        body = self.text.strip()
        if body.startswith("z="):
            body = body[2:].strip()
        if not (body.startswith("(") and body.endswith(")")):
            raise ValueError(f"slice must look like z=(a,b,c), got {self.text!r}")
        parts = body[1:-1].split(",")
        if len(parts) != 3:
            raise ValueError("slice needs exactly three components")
        return [_compile_component(p) for p in parts]

    def evaluate(self, s, t) -> np.ndarray:
        s, t = np.asarray(s, dtype=float), np.asarray(t, dtype=float)
        return np.array([np.broadcast_to(np.asarray(f(s, t), dtype=complex), s.shape) for f in self.components])


@dataclass
class SliceGrid:
    values: np.ndarray  # (res, res); NaN marks degenerate cells
    s: np.ndarray
    t: np.ndarray

    @property
    def resolution(self) -> int:
        return self.values.shape[0]

    def zero_crossings(self) -> int:
        """Cells whose sign differs from the right or lower neighbour."""
        sg = np.sign(self.values)
        right = np.zeros_like(sg, dtype=bool)
        down = np.zeros_like(sg, dtype=bool)
        right[:, :-1] = sg[:, :-1] * sg[:, 1:] < 0
        down[:-1, :] = sg[:-1, :] * sg[1:, :] < 0
        return int(np.count_nonzero(right | down))

    def summary(self) -> dict:
        finite = self.values[np.isfinite(self.values)]
        return {
            "resolution": self.resolution,
            "min": float(finite.min()) if finite.size else None,
            "max": float(finite.max()) if finite.size else None,
            "degenerate_cells": int(np.count_nonzero(~np.isfinite(self.values))),
            "zero_crossing_cells": self.zero_crossings(),
        }


def boundary_slice_grid(F: HomogeneousMap, plane: SliceSpec, resolution: int,
                        params: GreenParams | None = None) -> SliceGrid:
    """Green values on a ``resolution x resolution`` grid of the slice; rows
    follow ``t`` (top = +extent), columns follow ``s``."""
    if not 1 <= resolution <= MAX_RESOLUTION:
        raise ValueError(f"resolution must be in [1, {MAX_RESOLUTION}]")
    e = plane.extent
    axis = np.linspace(-e, e, resolution) if resolution > 1 else np.zeros(1)
    s, t = np.meshgrid(axis, axis[::-1])
    z = plane.evaluate(s.ravel(), t.ravel())
    values = green_batch(F, z, params).reshape(resolution, resolution)
    return SliceGrid(values, s, t)


def _atomic_write(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def grid_csv(grid: SliceGrid) -> bytes:
    rows = ["row,col,re_param,im_param,green_value"]
    n = grid.resolution
    for r in range(n):
        for c in range(n):
            g = grid.values[r, c]
            gs = "nan" if not math.isfinite(g) else f"{g:.12e}"
            rows.append(f"{r},{c},{grid.s[r, c]:.12e},{grid.t[r, c]:.12e},{gs}")
    return ("\n".join(rows) + "\n").encode("ascii")


def grid_ppm(grid: SliceGrid) -> bytes:
    """P6 image: red for ``G > 0``, blue for ``G < 0`` (brightness ``tanh|G|``),
    green for degenerate cells."""
    v = grid.values
    mag = np.tanh(np.abs(np.nan_to_num(v)))
    level = np.round(55 + 200 * mag).astype(np.uint8)
    img = np.zeros(v.shape + (3,), dtype=np.uint8)
    img[..., 0] = np.where(v > 0, level, 0)
    img[..., 2] = np.where(v <= 0, level, 0)
    bad = ~np.isfinite(v)
    img[bad] = (0, 255, 0)
    h, w = v.shape
    return f"P6\n{w} {h}\n255\n".encode("ascii") + img.tobytes()


def write_csv(grid: SliceGrid, path: str) -> None:
    _atomic_write(path, grid_csv(grid))


def write_ppm(grid: SliceGrid, path: str) -> None:
    _atomic_write(path, grid_ppm(grid))
