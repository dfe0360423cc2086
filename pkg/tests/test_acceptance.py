"""Acceptance criteria 1-8, one test each; every test records a PASS/FAIL
line shown in the pytest terminal summary."""

from __future__ import annotations

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from lattes import green as gr
from lattes import groups as grp
from lattes import hermitian as hm
from lattes import invariants as inv
from lattes import orbits
from lattes import quotient as qt
from lattes import special as sp
from lattes.maps import dilation, map_f, map_g, power_map

K = qt.gaussian_constants()


class Criterion:
    def __init__(self, number: int, title: str, budget: float | None = None):
        self.number, self.title, self.budget = number, title, budget
        self.facts: list[tuple[str, bool, str]] = []

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def expect(self, label: str, ok: bool, detail: str = "") -> None:
        self.facts.append((label, bool(ok), detail))

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        if self.budget is not None:
            self.expect("runtime", elapsed < self.budget, f"{elapsed:.2f}s < {self.budget}s")
        failed = [f"{l} ({d})" for l, ok, d in self.facts if not ok]
        ok = exc_type is None and not failed
        status = "PASS" if ok else "FAIL"
        note = "" if ok else " -- " + ("; ".join(failed) or repr(exc))
        ACCEPTANCE_LINES.append(f"criterion {self.number}: {status}  {self.title} [{elapsed:.2f}s]{note}")
        if exc_type is None:
            assert not failed, failed
        return False


def _points(n, seed, guard, avoid=()):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        z = complex(*rng.uniform(0, 1, 2))
        if all(sp.distance_to_lattice(z - a) >= guard for a in (0, *avoid)):
            out.append(z)
    return out


def test_criterion_1_special_functions():
    with Criterion(1, "special functions: theta, wp, lattice sum, ODE, addition", budget=10) as c:
        rng = np.random.default_rng(101)
        zs = rng.uniform(-2, 2, 50) + 1j * rng.uniform(-2, 2, 50)
        qp = max(sp.quasi_periodicity_residual(sp.ThetaChar.half(a, b), z)
                 for z in zs for a in (0, 1) for b in (0, 1))
        c.expect("quasi-periodicity <= 1e-10", qp <= 1e-10, f"{qp:.2e}")
        d11, d00 = abs(sp.theta(sp.THETA_11, 0)), abs(sp.theta(sp.THETA_00, (1 + 1j) / 2))
        c.expect("theta11(0) = 0", d11 < 1e-10, f"{d11:.2e}")
        c.expect("theta00((1+i)/2) = 0", d00 < 1e-10, f"{d00:.2e}")
        pts = _points(20, 102, 0.05, avoid=((1 + 1j) / 2,))
        rel = max(abs(sp.wp(z, K) - sp.wp_lattice_sum(z, radius=60)) / abs(sp.wp_lattice_sum(z, radius=60))
                  for z in pts)
        c.expect("wp vs lattice sum <= 1e-3 rel", rel <= 1e-3, f"{rel:.2e}")
        ode = 0.0
        for z in _points(20, 103, 0.05):
            p, dp = sp.wp(z, K), sp.wp_prime(z, K)
            ode = max(ode, abs(dp * dp - 4 * p * (p * p - K.alpha ** 2)) / (4 * abs(p) * (abs(p) ** 2 + abs(K.alpha) ** 2)))
        c.expect("wp'^2 = 4 wp (wp^2 - a^2) <= 1e-6", ode <= 1e-6, f"{ode:.2e}")
        pairs = qt._sample_pairs(50, 104, lambda x, y: qt._far_from_lattice([x, y, x + y, x - y], 0.05))
        add = max(qt.addition_formula_residual(x, y, K) for x, y in pairs)
        c.expect("addition formula <= 1e-6", add <= 1e-6, f"{add:.2e}")


def test_criterion_2_wp_identities():
    with Criterion(2, "wp identities 1-3 at 50 seeded samples", budget=5) as c:
        for n in (1, 2, 3):
            r = qt.max_wp_identity_residual(n, 50, seed=200 + n, consts=K)
            c.expect(f"identity {n} <= 1e-7", r <= 1e-7, f"{r:.2e}")


def test_criterion_3_semiconjugacy():
    with Criterion(3, "sigma o D_i = f_i o sigma, theta and wp forms of sigma agree", budget=30) as c:
        for i in (1, 2, 3):
            r = qt.check_semiconjugacy(i, 100, seed=300, consts=K)
            c.expect(f"f{i} <= 1e-6", r <= 1e-6, f"{r:.2e}")
        r = qt.check_sigma_forms(100, seed=301, consts=K)
        c.expect("sigma_theta = sigma_wp <= 1e-7", r <= 1e-7, f"{r:.2e}")


def test_criterion_4_types():
    with Criterion(4, "semicharacter law, Lattes condition, situation-5 invariance, q o D = q^2", budget=5) as c:
        T = qt.situation5_basin_type()
        law = hm.semicharacter_law_check(T)
        c.expect("semicharacter law <= 1e-10", law <= 1e-10, f"{law:.2e}")
        for i in (1, 2, 3):
            res = hm.check_lattes_condition(T, hm.AffineEndo(np.round(dilation(i), 12)), 2, tol=1e-9)
            c.expect(f"(H_D{i}, a_D{i}) = (2H, a^2)", res.ok, str(res))
        worst = 0.0
        for g in grp.situation5_group():
            P = hm.pullback_type(T, hm.AffineEndo(g.A, g.t))
            worst = max(worst, P.H.distance(T.H), hm.alpha_distance(P.alpha, T.alpha))
        c.expect("(H_g, a_g) = (H, a) for all 32 elements", worst <= 1e-9, f"{worst:.2e}")
        rng = np.random.default_rng(400)
        worst = 0.0
        for i in (1, 2, 3):
            D = hm.AffineEndo(np.round(dilation(i), 12))
            delta = hm.delta_normalization(T, D, 2)
            c.expect(f"delta = 1 for D{i}", delta == 1.0, str(delta))
            for _ in range(100):
                x = rng.uniform(-1, 1, 2) + 1j * rng.uniform(-1, 1, 2)
                u = complex(*rng.normal(size=2))
                y, v = hm.lift_morphism(T, D, 2, x, u)
                q2 = hm.metric_q(T, delta, x, u) ** 2
                worst = max(worst, abs(hm.metric_q(T, delta, y, v) - q2) / q2)
        c.expect("q o D = q^2 <= 1e-9", worst <= 1e-9, f"{worst:.2e}")


def test_criterion_5_green():
    with Criterion(5, "Green engine: oracle, homogeneity, calibration, profile, boundary", budget=120) as c:
        rng = np.random.default_rng(500)
        z = rng.normal(size=(3, 100)) + 1j * rng.normal(size=(3, 100))
        orc = float(np.max(np.abs(gr.green_batch(power_map(), z) - np.log(np.max(np.abs(z), axis=0)))))
        c.expect("power-map oracle <= 1e-12", orc <= 1e-12, f"{orc:.2e}")
        F = map_f(1)
        G = gr.green_batch(F, z)
        lam = rng.normal(size=100) + 1j * rng.normal(size=100)
        hom = float(np.max(np.abs(gr.green_batch(F, lam * z) - G - np.log(np.abs(lam)))))
        fe = float(np.max(np.abs(gr.green_batch(F, F(z)) - 2 * G)))
        c.expect("homogeneity <= 1e-9", hom <= 1e-9, f"{hom:.2e}")
        c.expect("G o F = 2 G <= 1e-9", fe <= 1e-9, f"{fe:.2e}")
        lams = []
        for i in (1, 2, 3):
            _, spread = gr.calibrate_lift(i, K, 50, seed=501)
            c.expect(f"calibration spread f{i} <= 1e-6", spread <= 1e-6, f"{spread:.2e}")
            fit = gr.green_profile_check(i, K, 100, seed=502, params=gr.GreenParams(p_max=40))
            c.expect(f"profile residual f{i} <= 1e-4", fit.residual <= 1e-4, f"{fit.residual:.2e}")
            c.expect(f"|C| f{i} <= 1e-4", abs(fit.C) <= 1e-4, f"{fit.C:.2e}")
            c.expect(f"lambda f{i} > 0", fit.lam > 0, f"{fit.lam}")
            lams.append(fit.lam)
        c.expect("lambda consistent within 1e-4", max(lams) - min(lams) <= 1e-4, str(lams))
        b = max(gr.boundary_residual(i, lams[i - 1], 50, seed=503, consts=K) for i in (1, 2, 3))
        c.expect("boundary |G| <= 1e-4", b <= 1e-4, f"{b:.2e}")


def test_criterion_6_groups_invariants():
    with Criterion(6, "group orders, S3, G(2,1,2) invariants, singularity identities", budget=5) as c:
        for (m, p), order in {(2, 1): 8, (4, 2): 16, (4, 1): 32}.items():
            n = len(grp.gmp2(m, p))
            c.expect(f"|G({m},{p},2)| = {order} = 2m^2/p", n == order == 2 * m * m // p, str(n))
        c.expect("|S3| = 6", len(grp.s3_rep()) == 6)
        B, G = inv.basis_g212(), grp.gmp2(2, 1)
        r = inv.check_invariance(B, G, 20, seed=600)
        c.expect("basis invariant <= 1e-10", r <= 1e-10, f"{r:.2e}")
        c.expect("degree product 8", B.degree_product() == 8)
        rng = np.random.default_rng(601)
        t = rng.normal(size=2) + 1j * rng.normal(size=2)
        c.expect("Jacobian nonzero", abs(inv.check_jacobian_nonzero(B, t)) > 1e-8)
        worst = 0.0
        for _ in range(50):
            t = rng.normal(size=2) + 1j * rng.normal(size=2)
            target = 2 * float(np.sum(np.abs(t) ** 2))
            worst = max(worst, abs(inv.singularity_lhs_g212(*inv.phi_eval(B, t)) - target) / target)
        c.expect("singularity pullback <= 1e-10", worst <= 1e-10, f"{worst:.2e}")
        worst = 0.0
        for m in (2, 3, 4, 6):
            for _ in range(20):
                t = complex(*rng.normal(size=2))
                worst = max(worst, abs(inv.singularity_lhs_1d(t ** m, m) - abs(t) ** 2) / abs(t) ** 2)
        c.expect("|t^m|^(2/m) = |t|^2", worst <= 1e-12, f"{worst:.2e}")


def test_criterion_7_orbits():
    with Criterion(7, "post-critical graph of g, line stabilizer, f_i critically finite", budget=10) as c:
        graph = orbits.post_critical_graph(map_g())
        arrows = set(graph.arrows())
        missing = set(orbits.EXPECTED_G_ARROWS) - arrows
        c.expect("all eight arrows", not missing and len(arrows) == 8, str(sorted(missing)))
        c.expect("6 post-critical lines", len(graph.post_critical) == 6, str(len(graph.post_critical)))
        G5 = grp.situation5_group()
        stab = grp.stabilizer_of_line(G5, grp.AffineLine(1j, grp.HALF_PERIOD))
        generator = grp.GroupElement(np.array([[0, -1j], [1j, 0]]), [grp.HALF_PERIOD, grp.HALF_PERIOD])
        c.expect("stabilizer order 2", len(stab) == 2, str(len(stab)))
        c.expect("generator generator in stabilizer", generator in stab)
        for i in (1, 2, 3):
            c.expect(f"f{i} graph closes", orbits.post_critical_graph(map_f(i)).closed)


def _cli(*args, cwd=None):
    return subprocess.run([sys.executable, "-m", "lattes", *args], capture_output=True, cwd=cwd)


def test_criterion_8_determinism(tmp_path):
    with Criterion(8, "byte-identical verify JSON and boundary CSV/PPM across runs") as c:
        runs = [_cli("verify", "--suite", "all", "--seed", "42", "--json") for _ in range(2)]
        c.expect("verify exit 0", all(r.returncode == 0 for r in runs), str([r.returncode for r in runs]))
        c.expect("verify JSON identical", runs[0].stdout == runs[1].stdout and len(runs[0].stdout) > 100)
        files = []
        for k in range(2):
            prefix = tmp_path / f"run{k}"
            r = _cli("boundary", "--map", "f1", "--slice", "z=(s,t,1)", "--res", "64", "--seed", "42",
                     "--out", str(prefix))
            c.expect(f"boundary run {k} exit 0", r.returncode == 0, r.stderr.decode())
            files.append(((tmp_path / f"run{k}.csv").read_bytes(), (tmp_path / f"run{k}.ppm").read_bytes()))
        c.expect("CSV identical", files[0][0] == files[1][0])
        c.expect("PPM identical", files[0][1] == files[1][1])
