"""Normalized piston problems and the piecewise profiles solvers return.

The gas initially occupies x < 0 and the piston sits at x = 0.  In the
piston frame the far-field state is (rho, u) = (1, -v0) and the wall
imposes rho*u = 0 at x = 0.  ``v0 = -sqrt(2)`` means the piston pushes into
the gas; ``v0 = +sqrt(2)`` means it pulls away.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .eos import SQRT2, GasParams, from_mach, pressure
from .errors import DomainError

MACH_RTOL = 1e-12


class Direction(enum.Enum):
    PROCEEDING = "proceeding"
    RECEDING = "receding"

    @classmethod
    def parse(cls, value) -> "Direction":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"unknown direction {value!r}") from None


@dataclass(frozen=True)
class PistonProblem:
    M0: float
    direction: Direction
    gas: GasParams

    def __post_init__(self):
        if not (math.isfinite(self.M0) and self.M0 > 0.0):
            raise DomainError(f"M0 must be positive and finite, got {self.M0}")
        target = 2.0 / (self.M0 * self.M0)
        total = self.gas.A + self.gas.B * self.gas.alpha
        if abs(total - target) > MACH_RTOL * target:
            raise DomainError(
                f"gas violates A + B*alpha = 2/M0**2 ({total!r} vs {target!r})")

    @property
    def v0(self) -> float:
        return -SQRT2 if self.direction is Direction.PROCEEDING else SQRT2

    @property
    def u0(self) -> float:
        """Piston-frame velocity of the undisturbed gas."""
        return -self.v0

    @property
    def rho0(self) -> float:
        return 1.0


def make_problem(M0: float, direction, alpha: float, theta: float) -> PistonProblem:
    """Problem with A = 2*theta/M0**2 and B = 2*(1 - theta)/(alpha*M0**2).

    ``alpha = 1`` is only accepted together with ``theta = 0`` (pure
    Chaplygin gas).
    """
    if alpha == 1.0 and theta > 0.0:
        raise DomainError("alpha = 1 requires theta = 0 (A > 0 is not supported)")
    gas = from_mach(M0, alpha, theta)
    return PistonProblem(M0=float(M0), direction=Direction.parse(direction), gas=gas)


def initial_pressure(problem: PistonProblem) -> float:
    """P0 = A - B."""
    return problem.gas.A - problem.gas.B


class WaveKind(enum.Enum):
    SHOCK = "shock"
    RAREFACTION1 = "rarefaction1"
    MEASURE_LIMIT = "measure-limit"


@dataclass(frozen=True)
class WaveProfile:
    """Samples of a self-similar solution, xi = x/t strictly increasing and <= 0."""

    xi: np.ndarray
    rho: np.ndarray
    u: np.ndarray
    p: np.ndarray
    wave_kind: WaveKind
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        arrays = [np.asarray(a, dtype=float) for a in (self.xi, self.rho, self.u, self.p)]
        n = arrays[0].shape
        if any(a.ndim != 1 or a.shape != n for a in arrays):
            raise DomainError("profile columns must be 1-d arrays of equal length")
        for name, a in zip(("xi", "rho", "u", "p"), arrays):
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if n[0] > 1 and np.any(np.diff(self.xi) <= 0.0):
            raise DomainError("profile xi must be strictly increasing")
        if n[0] and self.xi[-1] > 0.0:
            raise DomainError("profile xi must be <= 0")

    @classmethod
    def from_state(cls, gas: GasParams, xi, rho, u, wave_kind: WaveKind,
                   **meta) -> "WaveProfile":
        rho = np.asarray(rho, dtype=float)
        return cls(np.asarray(xi, dtype=float), rho, np.asarray(u, dtype=float),
                   pressure(gas, rho), wave_kind, dict(meta))

    def __len__(self):
        return self.xi.shape[0]


def to_lab_frame(profile: WaveProfile, problem: PistonProblem, t: float):
    """Map a piston-frame profile at time ``t`` to lab coordinates.

    The piston moves with velocity ``v0`` in the lab frame, so the lab
    position is x + v0*t and the lab velocity is u + v0.  Returns arrays
    ``(x_lab, rho, u_lab, p)``.
    """
    if t <= 0.0:
        raise DomainError("t must be positive")
    v0 = problem.v0
    return profile.xi * t + v0 * t, profile.rho, profile.u + v0, profile.p
