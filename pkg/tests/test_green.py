from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lattes.errors import DegenerateOrbitError
from lattes.green import (
    GreenParams,
    SliceSpec,
    boundary_residual,
    boundary_sample,
    boundary_slice_grid,
    calibrate_lift,
    calibrated_map,
    grid_csv,
    grid_ppm,
    green,
    green_batch,
    green_profile_check,
    mean_gap_ratio,
    write_csv,
    write_ppm,
)
from lattes.maps import HomogeneousMap, map_f, power_map
from lattes.quotient import gaussian_constants, theta_lift

c = st.floats(-5, 5, allow_nan=False)


def test_params_validation():
    with pytest.raises(ValueError):
        GreenParams(degree=1)
    with pytest.raises(ValueError):
        GreenParams(p_max=4)


@given(c, c, c, c, c, c)
@settings(max_examples=60)
def test_power_map_oracle(a, b, d, e, f, g):
    z = np.array([complex(a, b), complex(d, e), complex(f, g)])
    if np.max(np.abs(z)) < 1e-6:
        return
    assert abs(green(power_map(), z).value - math.log(np.max(np.abs(z)))) < 1e-12


def test_power_map_large_and_tiny_inputs():
    for s in (1e-200, 1e200):
        z = s * np.array([1, 0.5, 0.2j])
        assert green(power_map(), z).value == pytest.approx(math.log(s), abs=1e-9)
        assert np.isfinite(green(map_f(1), z).value)


def test_cubic_power_map():
    F = power_map(3)
    assert green(F, [3, 1, 1]).value == pytest.approx(math.log(3), abs=1e-12)


@given(c, c, c, c, c, c, st.floats(0.1, 10), st.floats(-3, 3))
@settings(max_examples=40)
def test_homogeneity_and_functional_equation(a, b, d, e, f, g, r, phi):
    z = np.array([complex(a, b), complex(d, e), complex(f, g)])
    if np.max(np.abs(z)) < 1e-3:
        return
    F = map_f(1)
    G = green(F, z).value
    lam = r * complex(math.cos(phi), math.sin(phi))
    assert abs(green(F, lam * z).value - G - math.log(r)) < 1e-9
    assert abs(green(F, F(z)).value - 2 * G) < 1e-9


def test_zero_and_degenerate_orbits():
    with pytest.raises(DegenerateOrbitError):
        green(power_map(), [0, 0, 0])
    F = HomogeneousMap.from_squared_linear_forms([[1, 0, 0], [1, 0, 0], [0, 1, 0]], name="bad")
    with pytest.raises(DegenerateOrbitError):
        green(F, [0, 0, 1])
    vals = green_batch(F, np.array([[0, 1], [0, 0], [1, 0]], dtype=complex))
    assert math.isnan(vals[0]) and np.isfinite(vals[1])


def test_result_fields():
    r = green(map_f(1), [0.3 + 1j, 0.2, 1.1])
    assert r.iterations_used <= 40 and r.cauchy_gap < 1e-11


def test_gap_ratio_band():
    rng = np.random.default_rng(1)
    for _ in range(5):
        z = rng.normal(size=3) + 1j * rng.normal(size=3)
        assert 0.3 <= mean_gap_ratio(map_f(1), z) <= 0.7


@pytest.mark.parametrize("i", [1, 2, 3])
def test_calibration(i):
    k = gaussian_constants()
    cst, spread = calibrate_lift(i, k, 50, seed=0)
    assert spread < 1e-6
    c2, _ = calibrate_lift(i, k, 50, seed=9)
    assert abs(cst - c2) < 1e-9 * abs(cst)


def test_calibration_periodic():
    k = gaussian_constants()
    F = calibrated_map(1, k)
    from lattes.maps import dilation

    x = np.array([0.21 + 0.33j, 0.57 + 0.12j])
    for g in (np.array([1, 0]), np.array([0, 1j]), np.array([1j, 1])):
        y = x + g
        lhs = F(theta_lift(*y, k))
        rhs = theta_lift(*(dilation(1) @ y), k)
        assert np.max(np.abs(lhs - rhs)) <= 1e-6 * np.max(np.abs(rhs))


def test_profile_and_boundary():
    fits = [green_profile_check(i, samples=100, seed=0) for i in (1, 2, 3)]
    for f in fits:
        assert f.residual <= 1e-4 and abs(f.C) <= 1e-4 and f.lam > 0
    assert max(f.lam for f in fits) - min(f.lam for f in fits) <= 1e-4
    lam = fits[0].lam
    assert boundary_residual(1, lam, 50, seed=1) <= 1e-4
    F = calibrated_map(1)
    b = boundary_sample([0.3 + 0.2j, 0.1 + 0.7j], lam)
    assert abs(green(F, 2 * b).value - math.log(2)) <= 1e-4
    # lattice-equivalent points give samples on the same level
    b2 = boundary_sample([1.3 + 0.2j, 0.1 - 0.3j], lam)
    assert abs(green(F, b2).value) <= 1e-4


def test_slice_spec_parsing():
    s = SliceSpec("z=(s, t+2*i, 0.5)")
    z = s.evaluate(np.array([1.0]), np.array([2.0]))
    assert np.allclose(z[:, 0], [1, 2 + 2j, 0.5])
    for bad in ("z=(s,t)", "z=(s,t,__import__('os'))", "(s,t,u)", "z=(s,,1)", "z=s,t,1"):
        with pytest.raises(ValueError):
            SliceSpec(bad)


def test_grid_far_outside_basin_is_positive():
    g = boundary_slice_grid(map_f(1), SliceSpec("z=(s+10,t+10,10)", 1.0), 16)
    assert np.nanmin(g.values) > 0


def test_grid_through_boundary_sample_changes_sign():
    F = calibrated_map(1)
    lam = green_profile_check(1).lam
    b = boundary_sample([0.31 + 0.22j, 0.13 + 0.71j], lam)
    spec = "z=(" + ",".join(f"({float(v.real)!r}+{float(v.imag)!r}*i)*(1+0.5*s)+0.01*t" for v in b) + ")"
    g = boundary_slice_grid(F, SliceSpec(spec, 1.0), 33)
    assert g.zero_crossings() > 0
    row = g.values[16]
    assert row[0] < 0 < row[-1]


def test_zero_level_stable_under_refinement():
    F = map_f(1)
    spec = SliceSpec("z=(s,t,0.3)", 3.0)
    coarse = boundary_slice_grid(F, spec, 21)
    fine = boundary_slice_grid(F, spec, 41)
    # fine grid contains the coarse nodes; signs agree there
    assert np.array_equal(np.sign(fine.values[::2, ::2]), np.sign(coarse.values))


def test_resolution_bounds():
    with pytest.raises(ValueError):
        boundary_slice_grid(map_f(1), SliceSpec("z=(s,t,1)"), 0)
    with pytest.raises(ValueError):
        boundary_slice_grid(map_f(1), SliceSpec("z=(s,t,1)"), 5000)


def test_exports_are_deterministic(tmp_path):
    g = boundary_slice_grid(map_f(1), SliceSpec("z=(s,t,0.4)"), 12)
    csv = grid_csv(g).decode()
    lines = csv.splitlines()
    assert lines[0] == "row,col,re_param,im_param,green_value"
    assert len(lines) == 1 + 144
    ppm = grid_ppm(g)
    assert ppm.startswith(b"P6\n12 12\n255\n") and len(ppm) == len(b"P6\n12 12\n255\n") + 3 * 144
    write_csv(g, tmp_path / "a.csv")
    write_ppm(g, tmp_path / "a.ppm")
    assert (tmp_path / "a.csv").read_bytes() == grid_csv(boundary_slice_grid(map_f(1), SliceSpec("z=(s,t,0.4)"), 12))
    assert sorted(p.name for p in tmp_path.iterdir()) == ["a.csv", "a.ppm"]
