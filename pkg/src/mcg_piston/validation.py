"""Exact solutions against the finite-volume solver.

Errors are L1 norms in x at the comparison time.  The convergence order is
the least-squares slope of log(error) against log(n_cells) over the whole
grid ladder, measured on the "smooth" cells whose similarity coordinate is
more than ``SMOOTH_GAP`` away from every wave edge (shock, fan head, fan
tail).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import fvm
from .errors import ConcentrationRegime, DomainError
from .limits import chaplygin_receding_density, gcg_fan_bounds, gcg_rarefaction_state
from .rarefaction import solve_rarefaction
from .setup import Direction, PistonProblem
from .shock import concentrates, solve_shock

SMOOTH_GAP = 0.1
DOMAIN_MARGIN = 0.5
DEFAULT_LADDER = (500, 1000, 2000, 4000)

L1_LIMIT = 1e-2
SHOCK_POSITION_LIMIT = 0.02
ORDER_LIMIT = 0.8


@dataclass(frozen=True)
class ExactSolution:
    """Self-similar exact solution with the xi-locations of its wave edges."""

    problem: PistonProblem
    state_at: object
    edges: tuple
    sigma: float = None

    @property
    def leftmost_speed(self) -> float:
        return min(self.edges)


def exact_solution(problem: PistonProblem) -> ExactSolution:
    gas = problem.gas
    if problem.direction is Direction.PROCEEDING:
        if concentrates(problem):
            raise ConcentrationRegime("no bounded exact solution in the concentration regime")
        sol = solve_shock(problem)
        return ExactSolution(problem, sol.state_at, (sol.sigma,), sol.sigma)
    if gas.A > 0.0:
        sol = solve_rarefaction(problem)
        return ExactSolution(problem, sol.state_at, (sol.eta_head, sol.eta_tail))
    if gas.alpha < 1.0:
        head, tail = gcg_fan_bounds(gas.alpha, problem.M0)
        state = lambda xi: gcg_rarefaction_state(gas.alpha, problem.M0, xi)
        return ExactSolution(problem, state, (head, tail))
    rho1, sigma = chaplygin_receding_density(problem.M0)

    def contact(xi):
        xi = np.asarray(xi, dtype=float)
        behind = xi > sigma
        return np.where(behind, rho1, 1.0), np.where(behind, 0.0, problem.u0)

    return ExactSolution(problem, contact, (sigma,), sigma)


def domain_length(exact: ExactSolution, t_final: float, margin: float = DOMAIN_MARGIN) -> float:
    """|x_min| = 2 * (fastest wave speed) * t_final + margin."""
    return 2.0 * max(abs(e) for e in exact.edges) * t_final + margin


def l1_error(grid: fvm.Grid1D, numeric, exact, mask=None) -> float:
    diff = np.abs(np.asarray(numeric) - np.asarray(exact))
    if mask is not None:
        diff = diff[mask]
    return float(diff.sum() * grid.dx)


def shock_position(x: np.ndarray, rho: np.ndarray, rho_left: float, rho_right: float) -> float:
    """x where the profile first crosses the mean of the two side densities (linear interpolation)."""
    level = 0.5 * (rho_left + rho_right)
    above = (rho - level) * np.sign(rho_right - rho_left) > 0.0
    idx = np.flatnonzero(above)
    if idx.size == 0 or idx[0] == 0:
        raise DomainError("no density crossing found")
    i = idx[0]
    x0, x1, r0, r1 = x[i - 1], x[i], rho[i - 1], rho[i]
    return float(x0 + (level - r0) * (x1 - x0) / (r1 - r0))


def smooth_mask(xi: np.ndarray, edges: Sequence[float], gap: float = SMOOTH_GAP) -> np.ndarray:
    mask = np.ones_like(xi, dtype=bool)
    for e in edges:
        mask &= np.abs(xi - e) > gap
    return mask


def convergence_order(ns: Sequence[int], errors: Sequence[float]) -> float:
    """Minus the least-squares slope of log(error) against log(n)."""
    slope = np.polyfit(np.log(np.asarray(ns, dtype=float)), np.log(np.asarray(errors)), 1)[0]
    return float(-slope)


@dataclass(frozen=True)
class GridResult:
    n_cells: int
    l1: float
    l1_smooth: float
    shock_position_error: float
    wall_u: float
    floor_events: int


@dataclass(frozen=True)
class CaseReport:
    problem: PistonProblem
    t_final: float
    results: tuple
    order: float
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def finest(self) -> GridResult:
        return self.results[-1]


def compare(problem: PistonProblem, exact: ExactSolution, n_cells: int, t_final: float,
            cfl: float = 0.9) -> GridResult:
    grid = fvm.Grid1D(-domain_length(exact, t_final), n_cells)
    state = fvm.evolve(problem, grid, t_final, cfl)
    x = grid.centers
    xi = x / t_final
    rho_exact, _ = exact.state_at(xi)
    err = l1_error(grid, state.rho, rho_exact)
    err_smooth = l1_error(grid, state.rho, rho_exact, smooth_mask(xi, exact.edges))
    pos_err = math.nan
    if exact.sigma is not None and problem.direction is Direction.PROCEEDING:
        rho1 = float(np.asarray(exact.state_at(np.array([0.0]))[0])[0])
        x_num = shock_position(x, state.rho, 1.0, rho1)
        x_exact = exact.sigma * t_final
        pos_err = abs(x_num - x_exact) / abs(x_exact)
    return GridResult(n_cells=n_cells, l1=err, l1_smooth=err_smooth,
                      shock_position_error=pos_err, wall_u=float(abs(state.u[-1])),
                      floor_events=state.floor_events)


def validate_case(problem: PistonProblem, t_final: float = 0.5,
                  ladder: Sequence[int] = DEFAULT_LADDER, cfl: float = 0.9) -> CaseReport:
    """Run the grid ladder and apply the acceptance thresholds.

    Checks: L1 error on the finest grid, shock position (proceeding only) and
    smooth-region convergence order (needs at least two grids).
    """
    exact = exact_solution(problem)
    results = tuple(compare(problem, exact, n, t_final, cfl) for n in ladder)
    finest = results[-1]
    checks = {"l1": finest.l1 < L1_LIMIT}
    if problem.direction is Direction.PROCEEDING:
        checks["shock_position"] = finest.shock_position_error < SHOCK_POSITION_LIMIT
    order = math.nan
    if len(results) >= 2:
        order = convergence_order([r.n_cells for r in results], [r.l1_smooth for r in results])
        checks["order"] = order >= ORDER_LIMIT
    return CaseReport(problem=problem, t_final=t_final, results=results, order=order,
                      checks=checks)
