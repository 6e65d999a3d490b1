"""Shock ahead of a piston pushing into the gas.

Piston-frame states are V0 = (1, sqrt(2)) upstream and V1 = (rho1, 0) at
the wall.  Mass conservation gives sigma = -sqrt(2)/(rho1 - 1) and momentum
conservation reduces to the scalar equation ``f(rho1) = M0**2`` with

    f(rho) = [A M0^2 (rho - 1) - B M0^2 (rho^-alpha - 1)] (rho - 1) / (2 rho),

which is strictly increasing on (1, inf).  The solver works in the excess
density ``s = rho - 1`` so that weak shocks (``rho1`` close to 1) keep full
relative precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _roots
from .eos import SQRT2, pressure, sound_speed
from .errors import ConcentrationRegime, DomainError
from .setup import Direction, PistonProblem, WaveKind, WaveProfile, initial_pressure

# alpha*M0**2 at or above this is treated as the concentration threshold when A = 0.
CONCENTRATION_TOL = 1e-12
# Relative slack on the Lax equalities of the linearly degenerate (contact) case.
CONTACT_RTOL = 1e-10


@dataclass(frozen=True)
class ShockSolution:
    problem: PistonProblem
    rho1: float
    sigma: float
    p1: float
    rh_residual: tuple
    lax_ok: bool
    f_residual: float
    iterations: int

    def state_at(self, xi):
        """(rho, u) at similarity coordinates ``xi <= 0``."""
        xi = np.asarray(xi, dtype=float)
        behind = xi > self.sigma
        rho = np.where(behind, self.rho1, 1.0)
        u = np.where(behind, 0.0, self.problem.u0)
        return rho, u

    def profile(self, xi) -> WaveProfile:
        rho, u = self.state_at(xi)
        return WaveProfile.from_state(self.problem.gas, xi, rho, u, WaveKind.SHOCK,
                                      sigma=self.sigma)


def _require_proceeding(problem: PistonProblem):
    if problem.direction is not Direction.PROCEEDING:
        raise DomainError("the shock solver needs a proceeding piston")


def _excess(problem: PistonProblem, s):
    """F(s) = f(1 + s)/M0**2 - 1, with rho^-alpha - 1 evaluated via expm1."""
    gas = problem.gas
    d = gas.A * s - gas.B * np.expm1(-gas.alpha * np.log1p(s))
    return d * s / (2.0 * (1.0 + s)) - 1.0


def _excess_prime(problem: PistonProblem, s):
    gas = problem.gas
    rho = 1.0 + s
    d = gas.A * s - gas.B * np.expm1(-gas.alpha * np.log1p(s))
    c2 = gas.A + gas.B * gas.alpha * rho ** (-gas.alpha - 1.0)
    return c2 * s / (2.0 * rho) + d / (2.0 * rho * rho)


def f_curve(problem: PistonProblem, rho):
    """f(rho) for rho > 1; scalar or array."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 1.0):
        raise DomainError("f_curve needs rho > 1")
    m2 = problem.M0 ** 2
    out = m2 * (_excess(problem, rho - 1.0) + 1.0)
    return out if out.ndim else float(out)


def f_curve_derivative(problem: PistonProblem, rho):
    """f'(rho) in the expanded form that makes its positivity visible."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 1.0):
        raise DomainError("f_curve_derivative needs rho > 1")
    gas, m2 = problem.gas, problem.M0 ** 2
    a = gas.alpha
    out = 0.5 * (gas.A * m2 * (1.0 - rho ** -2.0)
                 + a * gas.B * m2 * (rho ** (-a - 1.0) - rho ** (-a - 2.0))
                 + gas.B * m2 * (rho ** -2.0 - rho ** (-a - 2.0)))
    return out if out.ndim else float(out)


def concentrates(problem: PistonProblem) -> bool:
    """True when A = 0 and alpha*M0**2 >= 1, i.e. f stays below M0**2."""
    return problem.gas.A == 0.0 and \
        problem.gas.alpha * problem.M0 ** 2 >= 1.0 - CONCENTRATION_TOL


def rh_residual(problem: PistonProblem, rho1: float, sigma: float):
    """Mass and momentum jump residuals between V0 = (1, u0) and V1 = (rho1, 0)."""
    if rho1 <= 0.0:
        raise DomainError("rho1 must be positive")
    u0 = problem.u0
    p0 = initial_pressure(problem)
    p1 = float(pressure(problem.gas, rho1))
    mass = sigma * (rho1 - 1.0) - (0.0 - u0)
    momentum = sigma * (0.0 - u0) - (p1 - u0 * u0 - p0)
    return mass, momentum


def lax_check(problem: PistonProblem, rho1: float, sigma: float) -> bool:
    """lambda1(V1) < sigma < lambda1(V0) and sigma < lambda2(V1).

    For the pure Chaplygin gas the first field is linearly degenerate and the
    jump is a contact, so the outer inequalities hold with equality; they
    are then checked to ``CONTACT_RTOL``.
    """
    c1 = float(sound_speed(problem.gas, rho1))
    lam1_v1, lam2_v1 = -c1, c1
    lam1_v0 = problem.u0 - float(sound_speed(problem.gas, 1.0))
    if problem.gas.genuinely_nonlinear:
        return lam1_v1 < sigma < lam1_v0 and sigma < lam2_v1
    tol = CONTACT_RTOL * max(1.0, abs(sigma))
    return (math.isclose(sigma, lam1_v1, rel_tol=0.0, abs_tol=tol)
            and math.isclose(sigma, lam1_v0, rel_tol=0.0, abs_tol=tol)
            and sigma < lam2_v1)


def solve_shock(problem: PistonProblem) -> ShockSolution:
    """Unique shock for a proceeding piston.

    Raises
    ------
    ConcentrationRegime
        A = 0 and alpha*M0**2 >= 1: f never reaches M0**2.
    ConvergenceError
        The root finder failed; diagnostics carry the bracket.
    """
    _require_proceeding(problem)
    gas = problem.gas
    if gas.nonlinearity_risk:
        raise DomainError("alpha = 1 with A > 0 is not supported by the shock solver")
    if concentrates(problem):
        raise ConcentrationRegime(
            f"A = 0 and alpha*M0^2 = {gas.alpha * problem.M0 ** 2!r} >= 1: "
            "mass concentrates on the piston, see mcg_piston.limits")

    F = lambda s: float(_excess(problem, s))
    Fp = lambda s: float(_excess_prime(problem, s))
    hi = _roots.expand_upper(F, 0.0, 1.0, sign=1.0)
    root = _roots.find_root(F, 0.0, hi, Fp)
    s = root.x
    rho1 = 1.0 + s
    sigma = -SQRT2 / s
    p1 = float(pressure(gas, rho1))
    return ShockSolution(
        problem=problem,
        rho1=rho1,
        sigma=sigma,
        p1=p1,
        rh_residual=rh_residual(problem, rho1, sigma),
        lax_ok=lax_check(problem, rho1, sigma),
        f_residual=abs(problem.M0 ** 2 * root.fx),
        iterations=root.bisections + root.newton_steps,
    )
