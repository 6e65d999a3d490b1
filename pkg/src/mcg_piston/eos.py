"""Modified Chaplygin gas: P = A*rho - B/rho**alpha.

Everything here works in the normalized piston frame (rho0 = 1,
|v0| = sqrt(2)), where the Mach number fixes A + B*alpha = 2/M0**2 and a
single fraction ``theta`` decides how that sum is split between the linear
and the inverse-power term.  ``theta = 0`` is the generalized Chaplygin gas;
``theta = 0, alpha = 1`` is the pure Chaplygin gas.

The scalar functions accept floats or numpy arrays.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

SQRT2 = math.sqrt(2.0)


class Regime(enum.Enum):
    MCG = "mcg"
    GCG = "gcg"
    CHAPLYGIN = "chaplygin"
    # A > 0 with alpha = 1: the EOS is fine but the wave solvers refuse it.
    MCG_ALPHA_ONE = "mcg-alpha1"


@dataclass(frozen=True)
class GasParams:
    """EOS coefficients.  ``A >= 0``, ``B > 0``, ``0 < alpha <= 1``."""

    A: float
    B: float
    alpha: float

    def __post_init__(self):
        for name in ("A", "B", "alpha"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.B <= 0.0:
            raise DomainError(f"B must be positive, got {self.B}")
        if self.A < 0.0:
            raise DomainError(f"A must be non-negative, got {self.A}")
        if not 0.0 < self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha}")

    @property
    def regime(self) -> Regime:
        if self.A > 0.0:
            return Regime.MCG if self.alpha < 1.0 else Regime.MCG_ALPHA_ONE
        return Regime.GCG if self.alpha < 1.0 else Regime.CHAPLYGIN

    @property
    def genuinely_nonlinear(self) -> bool:
        """False only for the pure Chaplygin gas, whose fields are linearly degenerate."""
        return not (self.A == 0.0 and self.alpha == 1.0)

    @property
    def nonlinearity_risk(self) -> bool:
        """True for alpha = 1 with A > 0, which the wave solvers reject."""
        return self.regime is Regime.MCG_ALPHA_ONE


@dataclass(frozen=True)
class MachConstraint:
    """Mach number plus the share ``theta`` of 2/M0**2 carried by A."""

    M0: float
    theta: float

    def gas(self, alpha: float) -> GasParams:
        return from_mach(self.M0, alpha, self.theta)


def _check_rho(rho):
    if np.any(np.asarray(rho) <= 0.0):
        raise DomainError("density must be positive")


def pressure(gas: GasParams, rho):
    _check_rho(rho)
    return gas.A * rho - gas.B * rho ** (-gas.alpha)


def sound_speed(gas: GasParams, rho):
    """c = sqrt(P'(rho)) = sqrt(A + B*alpha/rho**(alpha+1))."""
    _check_rho(rho)
    return np.sqrt(gas.A + gas.B * gas.alpha * rho ** (-gas.alpha - 1.0))


def eigenvalues(gas: GasParams, rho, u):
    """Characteristic speeds (u - c, u + c)."""
    c = sound_speed(gas, rho)
    return u - c, u + c


def from_mach(M0: float, alpha: float, theta: float) -> GasParams:
    """Gas with A = 2*theta/M0**2 and B = 2*(1 - theta)/(alpha*M0**2)."""
    if not (math.isfinite(M0) and M0 > 0.0):
        raise DomainError(f"M0 must be positive and finite, got {M0}")
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    if not 0.0 <= theta < 1.0:
        raise DomainError(f"theta must lie in [0, 1), got {theta}")
    m2 = M0 * M0
    return GasParams(A=2.0 * theta / m2, B=2.0 * (1.0 - theta) / (alpha * m2),
                     alpha=alpha)


def mach_of(gas: GasParams, v0: float) -> float:
    """Mach number |v0|/c0 with c0 the sound speed at rho0 = 1."""
    return abs(v0) / float(sound_speed(gas, 1.0))
