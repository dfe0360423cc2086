from __future__ import annotations

import numpy as np
import pytest

from lattes.maps import dilation, map_f, proj_distance
from lattes.quotient import (
    addition_formula_residual,
    check_f3_reduction,
    check_semiconjugacy,
    check_sigma_forms,
    gaussian_constants,
    max_wp_identity_residual,
    sigma_theta,
    sigma_wp,
    situation5_theta_type,
    theta_lift,
    wp_identity,
)
from lattes.groups import situation5_group

K = gaussian_constants()


@pytest.mark.parametrize("i", [1, 2, 3])
def test_semiconjugacy(i):
    assert check_semiconjugacy(i, 60, seed=3, consts=K) < 1e-6
    assert check_semiconjugacy(i, 30, seed=4, consts=K, form="wp") < 1e-6


def test_semiconjugacy_fails_for_wrong_map():
    # sigma o D_1 is not f_2 o sigma
    x, y = 0.23 + 0.31j, 0.41 - 0.17j
    X, Y = dilation(1) @ np.array([x, y])
    d = proj_distance(sigma_theta(X, Y, K), map_f(2).proj(sigma_theta(x, y, K)))
    assert d > 1e-3


def test_sigma_forms_agree():
    assert check_sigma_forms(40, seed=1, consts=K) < 1e-7


def test_f3_reduction():
    assert check_f3_reduction(30, seed=2, consts=K) < 1e-7


@pytest.mark.parametrize("n", [1, 2, 3])
def test_wp_identities(n):
    assert max_wp_identity_residual(n, 50, seed=n, consts=K) < 1e-7


def test_wp_identity_index():
    with pytest.raises(ValueError):
        wp_identity(4, 0.3, 0.2)


def test_addition_formula():
    rng = np.random.default_rng(5)
    for _ in range(30):
        x, y = rng.uniform(0.1, 0.9, 2) + 1j * rng.uniform(0.1, 0.9, 2)
        if abs(x - y) < 0.05 or min(abs((x + y) - np.round((x + y).real) - 1j * np.round((x + y).imag)), 1) < 0.05:
            continue
        assert addition_formula_residual(x, y, K) < 1e-6


def test_sigma_invariant_under_situation5_group():
    x = np.array([0.23 + 0.31j, 0.41 - 0.17j])
    base = sigma_theta(*x, K)
    for g in situation5_group():
        assert proj_distance(sigma_theta(*g(x), K), base) < 1e-9


def test_theta_lift_type():
    T = situation5_theta_type()
    assert max(abs(v - 1) for v in T.alpha.values) < 1e-9
    # classical and normalized lifts agree projectively
    x, y = 0.17 + 0.43j, 0.61 + 0.07j
    assert proj_distance(theta_lift(x, y, K, normalized=False), theta_lift(x, y, K)) < 1e-12
    assert proj_distance(sigma_wp(x, y, K), theta_lift(x, y, K)) < 1e-9
