import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given

from mcg_piston import _roots
from mcg_piston.eos import sound_speed
from mcg_piston.errors import ConcentrationRegime, DomainError
from mcg_piston.limits import gcg_limit_density
from mcg_piston.setup import make_problem
from mcg_piston.shock import (f_curve, f_curve_derivative, lax_check, rh_residual,
                              solve_shock)

from conftest import SQRT2, mcg_problems, mp_bisect, random_problems


def shock_oracle(problem, dps=40):
    """rho1 from mpmath bisection on (P(rho) - P(1))(rho - 1)/(2 rho) = 1."""
    with mp.workdps(dps):
        A, B, a = (mp.mpf(v) for v in (problem.gas.A, problem.gas.B, problem.gas.alpha))
        P = lambda r: A * r - B * r ** (-a)
        g = lambda r: (P(r) - P(1)) * (r - 1) / (2 * r) - 1
        hi = mp.mpf(2)
        while g(hi) < 0:
            hi *= 2
        return mp_bisect(g, 1, hi)


def test_reference_root_matches_oracle(reference_proceeding):
    sol = solve_shock(reference_proceeding)
    assert sol.rho1 == pytest.approx(3.092862542948540624, rel=1e-14)
    assert sol.rho1 == pytest.approx(float(shock_oracle(reference_proceeding)), rel=1e-14)


@pytest.mark.parametrize("seed", range(5))
def test_random_roots_match_oracle(seed):
    (problem,) = random_problems(1, "proceeding", seed)
    assert solve_shock(problem).rho1 == pytest.approx(float(shock_oracle(problem)), rel=1e-13)


@pytest.mark.parametrize("M0", [0.1, 0.25, 0.5, 0.75, 0.9])
def test_chaplygin_closed_form(M0):
    sol = solve_shock(make_problem(M0, "proceeding", 1.0, 0.0))
    assert sol.rho1 == pytest.approx(1.0 / (1.0 - M0), rel=1e-12)
    assert sol.lax_ok


def test_chaplygin_half_mach():
    sol = solve_shock(make_problem(0.5, "proceeding", 1.0, 0.0))
    assert sol.rho1 == 2.0
    assert sol.sigma == pytest.approx(-SQRT2, rel=1e-15)
    assert max(map(abs, rh_residual(sol.problem, 2.0, -SQRT2))) < 1e-15


@pytest.mark.parametrize("rho", [1.5, 2.0, 7.0, 100.0])
def test_chaplygin_f_reduction(rho):
    p = make_problem(1.0, "proceeding", 1.0, 0.0)  # B M0^2 = 2
    assert f_curve(p, rho) == pytest.approx((rho - 1.0) ** 2 / rho ** 2, rel=1e-14)


def test_f_near_one_vanishes(reference_proceeding):
    assert f_curve(reference_proceeding, 1.0 + 1e-12) < 1e-11


def test_f_rejects_rho_at_most_one(reference_proceeding):
    with pytest.raises(DomainError):
        f_curve(reference_proceeding, 1.0)
    with pytest.raises(DomainError):
        f_curve_derivative(reference_proceeding, 0.5)


@given(mcg_problems())
def test_f_derivative_matches_finite_difference(problem):
    for rho in (1.01, 1.5, 3.0, 40.0):
        h = 1e-6 * rho
        fd = (f_curve(problem, rho + h) - f_curve(problem, rho - h)) / (2.0 * h)
        assert f_curve_derivative(problem, rho) == pytest.approx(fd, rel=1e-5, abs=1e-12)


@given(mcg_problems())
def test_f_strictly_increasing(problem):
    rho = 1.0 + np.geomspace(1e-6, 1e6, 1000)
    f = f_curve(problem, rho)
    assert np.all(np.diff(f) > 0.0)
    assert np.all(f_curve_derivative(problem, rho) > 0.0)


@given(mcg_problems())
def test_shock_invariants(problem):
    sol = solve_shock(problem)
    assert sol.rho1 > 1.0
    assert sol.sigma < 0.0
    assert sol.sigma == pytest.approx(-SQRT2 / (sol.rho1 - 1.0), rel=1e-12)
    assert max(map(abs, sol.rh_residual)) < 1e-10
    assert sol.f_residual < 1e-12 * max(1.0, problem.M0 ** 2)
    assert sol.lax_ok
    c1 = float(sound_speed(problem.gas, sol.rho1))
    assert -c1 < sol.sigma < problem.u0 - float(sound_speed(problem.gas, 1.0))


def _newton_from(f, fp, x, lo, hi, steps=200):
    """Plain Newton with bracket clamping, started from a given end."""
    for _ in range(steps):
        x_new = min(max(x - f(x) / fp(x), lo), hi)
        if abs(x_new - x) <= 1e-15 * abs(x):
            return x_new
        x = x_new
    return x


@pytest.mark.parametrize("seed", range(10))
def test_uniqueness_bisection_and_newton_from_both_ends(seed):
    (problem,) = random_problems(1, "proceeding", 100 + seed)
    f = lambda r: f_curve(problem, r) - problem.M0 ** 2
    fp = lambda r: f_curve_derivative(problem, r)
    lo, hi = 1.0 + 1e-12, 2.0
    while f(hi) <= 0.0:
        hi *= 2.0
    bisected = _roots.find_root(f, lo, hi).x
    from_lo = _newton_from(f, fp, lo, lo, hi)
    from_hi = _newton_from(f, fp, hi, lo, hi)
    rho1 = solve_shock(problem).rho1
    for other in (bisected, from_lo, from_hi):
        assert abs(other - rho1) < 1e-10 * rho1


def test_rh_residual_detects_perturbation(reference_proceeding):
    sol = solve_shock(reference_proceeding)
    exact = rh_residual(reference_proceeding, sol.rho1, sol.sigma)
    assert max(map(abs, exact)) < 1e-10
    _, momentum = rh_residual(reference_proceeding, sol.rho1 + 1e-3, sol.sigma)
    assert abs(momentum) > 1e-6


def test_rh_residual_rejects_non_positive_density(reference_proceeding):
    with pytest.raises(DomainError):
        rh_residual(reference_proceeding, 0.0, -1.0)


def test_lax_rejects_non_physical_jump(reference_proceeding):
    assert not lax_check(reference_proceeding, 1.5, -SQRT2 / 0.5)


def test_determinism_and_theta_dependence():
    a = solve_shock(make_problem(1.3, "proceeding", 0.4, 0.3))
    b = solve_shock(make_problem(1.3, "proceeding", 0.4, 0.3))
    c = solve_shock(make_problem(1.3, "proceeding", 0.4, 0.6))
    assert a.rho1 == b.rho1
    assert a.rho1 != c.rho1


@pytest.mark.parametrize("alpha, M0", [(0.5, 2.0), (0.5, math.sqrt(2.0)), (1.0, 1.0), (0.2, 3.0)])
def test_concentration_regime_raises(alpha, M0):
    with pytest.raises(ConcentrationRegime):
        solve_shock(make_problem(M0, "proceeding", alpha, 0.0))


def test_gcg_path_solves_below_threshold():
    sol = solve_shock(make_problem(1.0, "proceeding", 0.5, 0.0))
    assert sol.rho1 == pytest.approx(6.1563251746586616935, rel=1e-13)
    assert sol.lax_ok


def test_receding_problem_rejected(reference_receding):
    with pytest.raises(DomainError):
        solve_shock(reference_receding)


@pytest.mark.parametrize("alpha, M0", [(0.5, 1.0), (0.3, 1.5), (0.9, 0.6)])
def test_small_theta_approaches_limit_root(alpha, M0):
    rho_theta = solve_shock(make_problem(M0, "proceeding", alpha, 1e-10)).rho1
    assert abs(rho_theta - gcg_limit_density(alpha, M0)) < 1e-6
