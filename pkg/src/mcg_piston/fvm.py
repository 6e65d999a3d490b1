"""First-order finite-volume solver used as an independent check.

Conserved variables (rho, rho*u) on x_min < x < 0 with a Rusanov (local
Lax-Friedrichs) flux.  The interface dissipation uses the larger of the two
neighbouring signal speeds |u| + c.  The wall at x = 0 is a mirror: ghost
cells copy rho and negate the momentum, so the mass flux through the wall
is exactly zero.  The left ghost cells hold the undisturbed far-field
state, which stays exact as long as no wave reaches x_min.

Nothing here uses the exact solvers.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from .eos import GasParams
from .errors import DomainError, SimulationError
from .setup import Direction, PistonProblem, WaveKind, WaveProfile

log = logging.getLogger(__name__)

DENSITY_FLOOR = 1e-12
GHOST = 2


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    n_cells: int

    def __post_init__(self):
        if not self.x_min < 0.0:
            raise DomainError("x_min must be negative")
        if int(self.n_cells) != self.n_cells or self.n_cells < 16:
            raise DomainError("n_cells must be an integer >= 16")

    @property
    def dx(self) -> float:
        return -self.x_min / self.n_cells

    @property
    def ghost(self) -> int:
        return GHOST

    @property
    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx


@dataclass(frozen=True)
class ConservedState:
    """Cell averages plus running totals of what crossed each boundary.

    ``left_mass`` / ``left_mom`` accumulate the time-integrated flux entering
    through x_min; ``wall_mass`` / ``wall_mom`` the flux leaving through x = 0.
    """

    rho: np.ndarray
    mom: np.ndarray
    grid: Grid1D
    far_rho: float
    far_mom: float
    t: float = 0.0
    steps: int = 0
    left_mass: float = 0.0
    left_mom: float = 0.0
    wall_mass: float = 0.0
    wall_mom: float = 0.0
    floor_events: int = 0

    @property
    def u(self) -> np.ndarray:
        return self.mom / self.rho

    def total_mass(self) -> float:
        return float(self.rho.sum() * self.grid.dx)

    def total_momentum(self) -> float:
        return float(self.mom.sum() * self.grid.dx)


def init(problem: PistonProblem, grid: Grid1D) -> ConservedState:
    """Uniform far-field state rho = 1, rho*u = -v0."""
    n = grid.n_cells
    return ConservedState(rho=np.ones(n), mom=np.full(n, problem.u0), grid=grid,
                          far_rho=1.0, far_mom=problem.u0)


def _with_ghosts(state: ConservedState):
    g = GHOST
    rho = np.concatenate((np.full(g, state.far_rho), state.rho, state.rho[::-1][:g]))
    mom = np.concatenate((np.full(g, state.far_mom), state.mom, -state.mom[::-1][:g]))
    return rho, mom


def _physical_flux(gas: GasParams, rho, mom):
    u = mom / rho
    return mom, mom * u + gas.A * rho - gas.B * rho ** (-gas.alpha)


def _signal_speed(gas: GasParams, rho, mom):
    return np.abs(mom / rho) + np.sqrt(gas.A + gas.B * gas.alpha * rho ** (-gas.alpha - 1.0))


def max_signal_speed(state: ConservedState, gas: GasParams) -> float:
    rho, mom = _with_ghosts(state)
    return float(_signal_speed(gas, rho, mom).max())


def step(state: ConservedState, gas: GasParams, cfl: float, *,
         dt_max: float = np.inf):
    """Advance one explicit step; returns (new_state, dt)."""
    if not 0.0 < cfl <= 1.0:
        raise DomainError("cfl must lie in (0, 1]")
    dx = state.grid.dx
    rho, mom = _with_ghosts(state)
    s = _signal_speed(gas, rho, mom)
    dt = min(cfl * dx / float(s.max()), dt_max)
    if not dt > 0.0:
        raise SimulationError(f"non-positive time step {dt!r}")

    f_rho, f_mom = _physical_flux(gas, rho, mom)
    a = np.maximum(s[:-1], s[1:])
    flux_rho = 0.5 * (f_rho[:-1] + f_rho[1:]) - 0.5 * a * (rho[1:] - rho[:-1])
    flux_mom = 0.5 * (f_mom[:-1] + f_mom[1:]) - 0.5 * a * (mom[1:] - mom[:-1])
    # Interfaces g-1 .. g-1+n bound the n interior cells.
    g, n = GHOST, state.grid.n_cells
    flux_rho = flux_rho[g - 1:g + n]
    flux_mom = flux_mom[g - 1:g + n]

    lam = dt / dx
    new_rho = state.rho - lam * (flux_rho[1:] - flux_rho[:-1])
    new_mom = state.mom - lam * (flux_mom[1:] - flux_mom[:-1])
    if not (np.all(np.isfinite(new_rho)) and np.all(np.isfinite(new_mom))):
        raise SimulationError(f"non-finite state at t={state.t + dt!r}")

    floor_events = state.floor_events
    low = new_rho < DENSITY_FLOOR
    if low.any():
        floor_events += int(low.sum())
        log.warning("density floor hit in %d cells at t=%g", int(low.sum()), state.t + dt)
        new_rho = np.where(low, DENSITY_FLOOR, new_rho)

    new = replace(
        state, rho=new_rho, mom=new_mom, t=state.t + dt, steps=state.steps + 1,
        left_mass=state.left_mass + dt * float(flux_rho[0]),
        left_mom=state.left_mom + dt * float(flux_mom[0]),
        wall_mass=state.wall_mass + dt * float(flux_rho[-1]),
        wall_mom=state.wall_mom + dt * float(flux_mom[-1]),
        floor_events=floor_events)
    return new, dt


def evolve(problem: PistonProblem, grid: Grid1D, t_final: float, cfl: float = 0.9,
           *, callback=None) -> ConservedState:
    """Run from the initial state to ``t_final``; the last step is clipped."""
    if not t_final > 0.0:
        raise DomainError("t_final must be positive")
    state = init(problem, grid)
    while state.t < t_final:
        state, _ = step(state, problem.gas, cfl, dt_max=t_final - state.t)
        if t_final - state.t <= 1e-14 * t_final:
            state = replace(state, t=t_final)
        if callback is not None:
            callback(state)
    return state


def run_to(problem: PistonProblem, grid: Grid1D, t_final: float,
           cfl: float = 0.9) -> WaveProfile:
    """Cell-centre samples at ``t_final`` as a similarity profile (xi = x/t)."""
    state = evolve(problem, grid, t_final, cfl)
    kind = WaveKind.SHOCK if problem.direction is Direction.PROCEEDING else WaveKind.RAREFACTION1
    return WaveProfile.from_state(problem.gas, grid.centers / t_final, state.rho, state.u,
                                  kind, t=t_final, n_cells=grid.n_cells, steps=state.steps,
                                  floor_events=state.floor_events)
