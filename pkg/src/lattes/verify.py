"""Named verification suites: each check reports a residual against its own
tolerance, and a suite passes when every check does."""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import green as gr
from . import groups as grp
from . import hermitian as hm
from . import invariants as inv
from . import orbits
from . import quotient as qt
from . import special as sp
from .maps import dilation, map_f, map_g, power_map


@dataclass(frozen=True)
class CheckRecord:
    check_id: str
    n_samples: int
    seed: int
    tolerance: float
    max_residual: float
    passed: bool


@dataclass
class VerificationReport:
    suite: str
    checks: list[CheckRecord] = field(default_factory=list)
    wall_time: float | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        d = {"suite": self.suite, "passed": self.passed, "checks": [asdict(c) for c in self.checks]}
        if self.wall_time is not None:
            d["wall_time"] = self.wall_time
        return d

    def to_text(self) -> str:
        w = max((len(c.check_id) for c in self.checks), default=10)
        out = [f"suite {self.suite}"]
        for c in self.checks:
            flag = "PASS" if c.passed else "FAIL"
            out.append(f"  {flag}  {c.check_id:<{w}}  residual {c.max_residual:.3e}  tol {c.tolerance:.1e}  n={c.n_samples}")
        out.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(out)


@dataclass(frozen=True)
class RunConfig:
    samples: int | None = None
    seed: int = 0
    tol_scale: float = 1.0
    tol: float | None = None

    def n(self, default: int) -> int:
        return default if self.samples is None else self.samples

    def tolerance(self, default: float) -> float:
        return self.tol if self.tol is not None else default * self.tol_scale


class _Suite:
    def __init__(self, cfg: RunConfig, report: VerificationReport):
        self.cfg, self.report = cfg, report

    def check(self, check_id: str, residual: float, tol: float, n: int = 1) -> None:
        t = self.cfg.tolerance(tol)
        residual = float(residual)
        ok = math.isfinite(residual) and residual <= t
        self.report.checks.append(CheckRecord(check_id, n, self.cfg.seed, t, residual, ok))


def _rng_points(n: int, seed: int, box: float = 1.0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(-box, box, n) + 1j * rng.uniform(-box, box, n)


def suite_theta(s: _Suite) -> None:
    cfg = s.cfg
    n = cfg.n(50)
    zs = _rng_points(n, cfg.seed)
    worst = max(sp.quasi_periodicity_residual(sp.ThetaChar.half(j, k), z)
                for z in zs for j in (0, 1) for k in (0, 1))
    s.check("theta.quasi_periodicity", worst, 1e-10, n)
    s.check("theta.divisor.theta11_at_0", abs(sp.theta(sp.THETA_11, 0)), 1e-10)
    s.check("theta.divisor.theta00_at_half_period", abs(sp.theta(sp.THETA_00, (1 + 1j) / 2)), 1e-10)
    k = qt.gaussian_constants()
    s.check("theta.alpha_equals_wp_half", abs(k.alpha - sp.wp(0.5, k)) / abs(k.alpha), 1e-12)


def _wp_points(n: int, seed: int, guard: float = qt.WP_SAMPLE_GUARD) -> list[complex]:
    """Points away from the poles and from the double zero ``(1+i)/2`` of wp,
    where a relative comparison is ill-conditioned."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        z = complex(rng.uniform(0, 1), rng.uniform(0, 1))
        if min(sp.distance_to_lattice(z, sp.GAUSSIAN), sp.distance_to_lattice(z - (1 + 1j) / 2, sp.GAUSSIAN)) >= guard:
            out.append(z)
    return out


def suite_wp(s: _Suite) -> None:
    cfg = s.cfg
    k = qt.gaussian_constants()
    pts = _wp_points(cfg.n(20), cfg.seed)
    rel = max(abs(sp.wp(z, k) - sp.wp_lattice_sum(z)) / abs(sp.wp_lattice_sum(z)) for z in pts)
    s.check("wp.theta_vs_lattice_sum", rel, 1e-3, len(pts))
    de = 0.0
    for z in pts:
        p, dp = sp.wp(z, k), sp.wp_prime(z, k)
        rhs = 4 * p * (p * p - k.alpha ** 2)
        # scaled by the size of the terms: the right side vanishes at half periods
        de = max(de, abs(dp * dp - rhs) / (4 * abs(p) * (abs(p) ** 2 + abs(k.alpha) ** 2)))
    s.check("wp.differential_equation", de, 1e-6, len(pts))
    pairs = qt._sample_pairs(cfg.n(50), cfg.seed + 1,
                             lambda x, y: qt._far_from_lattice([x, y, x + y, x - y], qt.WP_SAMPLE_GUARD))
    add = max(qt.addition_formula_residual(x, y, k) for x, y in pairs)
    s.check("wp.addition_formula", add, 1e-6, len(pairs))
    for j in (1, 2, 3):
        n = cfg.n(50)
        s.check(f"wp.identity_{j}", qt.max_wp_identity_residual(j, n, cfg.seed + 10 * j, k), 1e-7, n)


def _dilation_endo(i: int) -> hm.AffineEndo:
    return hm.AffineEndo(np.round(dilation(i), 12))


def suite_hermitian(s: _Suite) -> None:
    cfg = s.cfg
    T = qt.situation5_basin_type()
    law = max(hm.semicharacter_law_check(T),
              *(hm.semicharacter_law_check(hm.theta_char_type(sp.ThetaChar.half(a, b), sp.ThetaChar.half(c, d)))
                for a in (0, 1) for b in (0, 1) for c in (0, 1) for d in (0, 1)))
    s.check("hermitian.semicharacter_law", law, 1e-10)
    for i in (1, 2, 3):
        cond = hm.check_lattes_condition(T, _dilation_endo(i), 2)
        s.check(f"hermitian.lattes_condition_D{i}", max(cond.form_residual, cond.alpha_residual), 1e-9)
    worst = 0.0
    for g in grp.situation5_group():
        P = hm.pullback_type(T, hm.AffineEndo(g.A, g.t))
        worst = max(worst, P.H.distance(T.H), hm.alpha_distance(P.alpha, T.alpha))
    s.check("hermitian.situation5_type_invariance", worst, 1e-9, len(grp.situation5_group()))
    n = cfg.n(100)
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for i in (1, 2, 3):
        D = _dilation_endo(i)
        delta = hm.delta_normalization(T, D, 2)
        for _ in range(n):
            x = rng.uniform(-1, 1, 2) + 1j * rng.uniform(-1, 1, 2)
            u = complex(*rng.normal(size=2))
            y, v = hm.lift_morphism(T, D, 2, x, u)
            q2 = hm.metric_q(T, delta, x, u) ** 2
            worst = max(worst, abs(hm.metric_q(T, delta, y, v) - q2) / q2)
    s.check("hermitian.metric_q_equivariance", worst, 1e-9, n)


def suite_groups(s: _Suite) -> None:
    for (m, p), expected in {(2, 1): 8, (4, 2): 16, (4, 1): 32, (3, 1): 18, (6, 1): 72}.items():
        s.check(f"groups.order_G({m},{p},2)", abs(len(grp.gmp2(m, p)) - 2 * m * m // p), 0)
        s.check(f"groups.order_G({m},{p},2)_expected", abs(len(grp.gmp2(m, p)) - expected), 0)
    s3 = grp.s3_rep()
    s.check("groups.S3_order", abs(len(s3) - 6), 0)
    s.check("groups.S3_closed", s3.closure_defect(), 0)
    G5 = grp.situation5_group()
    s.check("groups.situation5_order", abs(len(G5) - 32), 0)
    s.check("groups.situation5_unitary", max(g.unitarity_residual() for g in G5), 1e-12)
    s.check("groups.situation5_stabilizer_origin", abs(len(grp.stabilizer_of_point(G5, [0, 0])) - 16), 0)
    stab = grp.stabilizer_of_line(G5, grp.AffineLine(1j, grp.HALF_PERIOD))
    s.check("groups.line_stabilizer_order", abs(len(stab) - 2), 0)


def suite_invariants(s: _Suite) -> None:
    cfg = s.cfg
    B = inv.basis_g212()
    G = grp.gmp2(2, 1)
    n = cfg.n(20)
    s.check("invariants.basis_invariance", inv.check_invariance(B, G, n, cfg.seed), 1e-10, n)
    s.check("invariants.degree_product", abs(B.degree_product() - len(G)), 0)
    rng = np.random.default_rng(cfg.seed)
    t = rng.normal(size=2) + 1j * rng.normal(size=2)
    jac = abs(inv.check_jacobian_nonzero(B, t))
    s.check("invariants.jacobian_nonzero", 0.0 if jac > 1e-8 else 1.0, 0)
    worst = 0.0
    for _ in range(n):
        t = rng.normal(size=2) + 1j * rng.normal(size=2)
        P, Q = inv.phi_eval(B, t)
        target = 2 * float(np.sum(np.abs(t) ** 2))
        worst = max(worst, abs(inv.singularity_lhs_g212(P, Q) - target) / target)
    s.check("invariants.singularity_pullback", worst, 1e-10, n)
    worst = 0.0
    for m in (2, 3, 4, 6):
        for _ in range(n):
            t = complex(*rng.normal(size=2))
            worst = max(worst, abs(inv.singularity_lhs_1d(t ** m, m) - abs(t) ** 2) / abs(t) ** 2)
    s.check("invariants.cyclic_singularity", worst, 1e-12, n)


def suite_dynamics(s: _Suite) -> None:
    cfg = s.cfg
    k = qt.gaussian_constants()
    n = cfg.n(100)
    for i in (1, 2, 3):
        s.check(f"dynamics.semiconjugacy_f{i}", qt.check_semiconjugacy(i, n, cfg.seed, k), 1e-6, n)
    s.check("dynamics.sigma_theta_vs_wp", qt.check_sigma_forms(cfg.n(50), cfg.seed, k), 1e-7, cfg.n(50))
    s.check("dynamics.f3_reduction", qt.check_f3_reduction(cfg.n(50), cfg.seed, k), 1e-7, cfg.n(50))
    for i in (1, 2, 3):
        cert = map_f(i).regularity_certificate(200, cfg.seed)
        s.check(f"dynamics.f{i}_regular", 0.0 if cert > 1e-6 else 1.0, 0, 200)


def suite_orbits(s: _Suite) -> None:
    graph = orbits.post_critical_graph(map_g())
    arrows = set(graph.arrows())
    s.check("orbits.g_arrows", len(arrows ^ set(orbits.EXPECTED_G_ARROWS)), 0)
    s.check("orbits.g_post_critical_count", abs(len(graph.post_critical) - 6), 0)
    for i in (1, 2, 3):
        s.check(f"orbits.f{i}_closed", 0 if orbits.post_critical_graph(map_f(i)).closed else 1, 0)


def suite_green(s: _Suite) -> None:
    cfg = s.cfg
    n = cfg.n(100)
    rng = np.random.default_rng(cfg.seed)
    P = power_map()
    z = rng.normal(size=(3, n)) + 1j * rng.normal(size=(3, n))
    oracle = np.log(np.max(np.abs(z), axis=0))
    s.check("green.power_map_oracle", np.max(np.abs(gr.green_batch(P, z) - oracle)), 1e-12, n)
    F = map_f(1)
    lam = rng.normal(size=n) + 1j * rng.normal(size=n)
    G = gr.green_batch(F, z)
    s.check("green.homogeneity", np.max(np.abs(gr.green_batch(F, lam * z) - G - np.log(np.abs(lam)))), 1e-9, n)
    s.check("green.functional_equation", np.max(np.abs(gr.green_batch(F, F(z)) - 2 * G)), 1e-9, n)
    ratio = gr.mean_gap_ratio(F, z[:, 0])
    s.check("green.gap_ratio_band", max(0.0, 0.3 - ratio, ratio - 0.7), 0)
    k = qt.gaussian_constants()
    lams = []
    for i in (1, 2, 3):
        _, spread = gr.calibrate_lift(i, k, cfg.n(50), cfg.seed)
        s.check(f"green.calibration_spread_f{i}", spread, 1e-6, cfg.n(50))
        fit = gr.green_profile_check(i, k, n, cfg.seed)
        s.check(f"green.profile_residual_f{i}", fit.residual, 1e-4, n)
        s.check(f"green.profile_constant_f{i}", abs(fit.C), 1e-4, n)
        s.check(f"green.profile_lambda_positive_f{i}", 0.0 if fit.lam > 0 else 1.0, 0, n)
        lams.append(fit.lam)
    s.check("green.profile_lambda_consistency", max(lams) - min(lams), 1e-4)
    nb = cfg.n(50)
    worst = max(gr.boundary_residual(i, lams[i - 1], nb, cfg.seed + 1, k) for i in (1, 2, 3))
    s.check("green.boundary_samples", worst, 1e-4, nb)


SUITES: dict[str, Callable[[_Suite], None]] = {
    "theta": suite_theta,
    "wp": suite_wp,
    "hermitian": suite_hermitian,
    "groups": suite_groups,
    "invariants": suite_invariants,
    "dynamics": suite_dynamics,
    "orbits": suite_orbits,
    "green": suite_green,
}


def run_suite(name: str, cfg: RunConfig | None = None, timing: bool = False) -> VerificationReport:
    """Run one suite (or ``"all"``); unknown names raise ``KeyError``."""
    cfg = cfg or RunConfig()
    names = list(SUITES) if name == "all" else [name]
    for nm in names:
        if nm not in SUITES:
            raise KeyError(nm)
    report = VerificationReport(name)
    start = time.perf_counter()
    for nm in names:
        SUITES[nm](_Suite(cfg, report))
    if timing:
        report.wall_time = time.perf_counter() - start
    return report
