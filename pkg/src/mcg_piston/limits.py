"""The A -> 0 limit: generalized and pure Chaplygin gas.

With A = 0 the Mach constraint fixes B = 2/(alpha M0^2) and the shock
relation becomes

    M0^2 = (1 - 1/rho1)(1 - rho1^-alpha) / alpha,

whose right side never reaches 1/alpha.  For alpha M0^2 >= 1 no shock
exists: the gas between shock and piston collapses onto the piston, and
the solution is the constant upstream state on x < 0 plus a Dirac measure
on x = 0 carrying mass sqrt(2) t and a pressure weight
2 - 2/(alpha M0^2).

This module also has the closed-form A = 0 receding fan and the pure
Chaplygin (alpha = 1) receding contact.

All data use the same normalization as the rest of the package
(rho0 = 1, |v0| = sqrt(2)), so the upstream pressure is -2/(alpha M0^2).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import _roots
from .eos import SQRT2
from .errors import DomainError
from .shock import CONCENTRATION_TOL


def _check_alpha(alpha: float, *, allow_one: bool):
    upper_ok = alpha <= 1.0 if allow_one else alpha < 1.0
    if not (0.0 < alpha and upper_ok):
        bound = "(0, 1]" if allow_one else "(0, 1)"
        raise DomainError(f"alpha must lie in {bound}, got {alpha}")


def _check_m0(M0: float):
    if not (math.isfinite(M0) and M0 > 0.0):
        raise DomainError(f"M0 must be positive and finite, got {M0}")


# ----------------------------------------------------------------------------
# Proceeding piston


def gcg_limit_relation(alpha: float, rho1):
    """M0^2 = (1 - 1/rho1)(1 - rho1^-alpha)/alpha for rho1 > 1."""
    _check_alpha(alpha, allow_one=True)
    rho1 = np.asarray(rho1, dtype=float)
    if np.any(rho1 <= 1.0):
        raise DomainError("rho1 must exceed 1")
    out = (1.0 - 1.0 / rho1) * -np.expm1(-alpha * np.log(rho1)) / alpha
    return out if out.ndim else float(out)


def gcg_limit_density(alpha: float, M0: float) -> float:
    """Root rho1 > 1 of ``gcg_limit_relation(alpha, rho1) = M0**2``."""
    _check_alpha(alpha, allow_one=True)
    _check_m0(M0)
    if classify_limit(alpha, M0) is LimitKind.CONCENTRATION:
        raise DomainError("no bounded shock for alpha*M0^2 >= 1")
    target = alpha * M0 * M0

    def F(s):
        return s / (1.0 + s) * -math.expm1(-alpha * math.log1p(s)) - target

    def Fp(s):
        rho = 1.0 + s
        return (-math.expm1(-alpha * math.log1p(s)) / (rho * rho)
                + s / rho * alpha * rho ** (-alpha - 1.0))

    hi = _roots.expand_upper(F, 0.0, 1.0, sign=1.0)
    return 1.0 + _roots.find_root(F, 0.0, hi, Fp).x


class LimitKind(enum.Enum):
    INTEGRAL_SHOCK = "integral-shock"
    CONCENTRATION = "concentration"


def classify_limit(alpha: float, M0: float) -> LimitKind:
    """Concentration iff alpha*M0^2 >= 1.

    The comparison carries a 1e-12 relative slack so that M0 = sqrt(1/alpha)
    typed in decimal lands on the concentration side.
    """
    _check_alpha(alpha, allow_one=True)
    _check_m0(M0)
    if alpha * M0 * M0 >= 1.0 - CONCENTRATION_TOL:
        return LimitKind.CONCENTRATION
    return LimitKind.INTEGRAL_SHOCK


@dataclass(frozen=True)
class MeasureSolution:
    """Constant upstream state on x < 0 plus Dirac weights on the piston."""

    w_rho_slope: float
    w_p_const: float
    M0: float
    alpha: float

    def w_rho(self, t):
        return self.w_rho_slope * np.asarray(t, dtype=float)

    def w_p(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.w_p_const)

    @property
    def rho(self) -> float:
        return 1.0

    @property
    def u(self) -> float:
        return SQRT2

    @property
    def pressure(self) -> float:
        return -2.0 / (self.alpha * self.M0 * self.M0)


def measure_solution(alpha: float, M0: float) -> MeasureSolution:
    if classify_limit(alpha, M0) is not LimitKind.CONCENTRATION:
        raise DomainError("alpha*M0^2 < 1: the limit is an ordinary shock")
    # Clip the rounding noise at the threshold; w_p is zero there.
    w_p = max(0.0, 2.0 - 2.0 / (alpha * M0 * M0))
    return MeasureSolution(w_rho_slope=SQRT2, w_p_const=w_p, M0=float(M0), alpha=float(alpha))


# ----------------------------------------------------------------------------
# Weak form


@dataclass(frozen=True)
class Bump:
    """phi(t, x) = b((t - tc)/rt) * b((x - xc)/rx) with b(s) = (1 - s^2)^power on |s| < 1.

    ``power >= 2`` keeps phi continuously differentiable.
    """

    tc: float
    xc: float
    rt: float
    rx: float
    power: int = 3

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.tc, self.xc, self.rt, self.rx)):
            raise DomainError("bump parameters must be finite")
        if self.rt <= 0.0 or self.rx <= 0.0:
            raise DomainError("bump radii must be positive")
        if int(self.power) != self.power or self.power < 2:
            raise DomainError("bump power must be an integer >= 2 for a C^1 test function")

    def _b(self, s):
        return np.where(np.abs(s) < 1.0, (1.0 - s * s) ** self.power, 0.0)

    def _db(self, s):
        k = self.power
        return np.where(np.abs(s) < 1.0, -2.0 * k * s * (1.0 - s * s) ** (k - 1), 0.0)

    def __call__(self, t, x):
        return self._b((t - self.tc) / self.rt) * self._b((x - self.xc) / self.rx)

    def dt(self, t, x):
        return self._db((t - self.tc) / self.rt) / self.rt * self._b((x - self.xc) / self.rx)

    def dx(self, t, x):
        return self._b((t - self.tc) / self.rt) * self._db((x - self.xc) / self.rx) / self.rx

    def support_in_domain(self):
        """(t0, t1, x0, x1) of the support clipped to t >= 0, x <= 0, or None."""
        t0, t1 = max(0.0, self.tc - self.rt), self.tc + self.rt
        x0, x1 = self.xc - self.rx, min(0.0, self.xc + self.rx)
        if t1 <= t0 or x1 <= x0:
            return None
        return t0, t1, x0, x1


DEFAULT_RADII = (0.2, 0.4, 0.6, 0.8, 1.0)


def default_bank() -> list:
    """Bumps centred on the corner (t, x) = (0, 0), where every term of the weak form is active."""
    return [Bump(0.0, 0.0, r, r) for r in DEFAULT_RADII]


def _midpoints(a: float, b: float, n: int):
    h = (b - a) / n
    return a + (np.arange(n) + 0.5) * h, h


def weak_form_residuals(ms: MeasureSolution, phi: Bump, resolution: int = 256):
    """(mass, momentum) residuals of the measure solution against ``phi``.

    Each 2-D integral over t > 0, x < 0 and each line integral (on x = 0 and
    on t = 0) is computed with the composite midpoint rule, using
    ``resolution`` cells per axis over the clipped support of ``phi``.
    """
    if not isinstance(phi, Bump):
        raise DomainError("test functions must be Bump instances")
    if int(resolution) != resolution or resolution < 1:
        raise DomainError("resolution must be a positive integer")
    box = phi.support_in_domain()
    if box is None:
        return 0.0, 0.0
    t0, t1, x0, x1 = box
    ts, ht = _midpoints(t0, t1, resolution)
    xs, hx = _midpoints(x0, x1, resolution)
    T, X = np.meshgrid(ts, xs, indexing="ij")
    area = ht * hx
    int_dt = phi.dt(T, X).sum() * area
    int_dx = phi.dx(T, X).sum() * area
    zeros_t = np.zeros_like(ts)
    wall_dt = (ms.w_rho(ts) * phi.dt(ts, zeros_t)).sum() * ht
    wall_p = (ms.w_p(ts) * phi(ts, zeros_t)).sum() * ht
    initial = phi(np.zeros_like(xs), xs).sum() * hx

    rho, u, p = ms.rho, ms.u, ms.pressure
    mass = rho * int_dt + wall_dt + rho * u * int_dx + rho * initial
    momentum = (rho * u * int_dt + rho * u * u * int_dx + p * int_dx
                - wall_p + rho * u * initial)
    return float(mass), float(momentum)


def verify_weak_form(ms: MeasureSolution, test_bank: Sequence[Bump] = None,
                     resolution: int = 256) -> float:
    """Largest absolute residual of either identity over the bank."""
    bank = default_bank() if test_bank is None else list(test_bank)
    worst = 0.0
    for phi in bank:
        worst = max(worst, *map(abs, weak_form_residuals(ms, phi, resolution)))
    return worst


# ----------------------------------------------------------------------------
# Receding piston


class ChaplyginContact(NamedTuple):
    rho1: float
    sigma: float


def chaplygin_receding_density(M0: float) -> ChaplyginContact:
    """Pure Chaplygin receding piston: rho1 = 1/(1 + M0), sigma = sqrt(2)/(rho1 - 1)."""
    _check_m0(M0)
    rho1 = 1.0 / (1.0 + M0)
    return ChaplyginContact(rho1, SQRT2 / (rho1 - 1.0))


def gcg_fan_bounds(alpha: float, M0: float):
    """(eta_head, eta_tail) of the A = 0 receding fan."""
    _check_alpha(alpha, allow_one=False)
    _check_m0(M0)
    c0 = SQRT2 / M0
    return -SQRT2 - c0, -(alpha + 1.0) / SQRT2 - c0


def gcg_rarefaction_profile(alpha: float, M0: float, eta):
    """(rho, u) inside the A = 0 receding fan.

    From eta = u - c and u - 2c/(alpha+1) = W, c = (alpha+1)(eta - W)/(1 - alpha);
    then rho = (c0/c)^(2/(alpha+1)) with c0 = sqrt(2)/M0.
    """
    head, tail = gcg_fan_bounds(alpha, M0)
    eta_arr = np.asarray(eta, dtype=float)
    slack = 1e-14 * abs(head)
    if np.any(eta_arr < head - slack) or np.any(eta_arr > tail + slack):
        raise DomainError("eta outside the fan")
    c0 = SQRT2 / M0
    w = -SQRT2 - 2.0 * c0 / (alpha + 1.0)
    c = (alpha + 1.0) * (eta_arr - w) / (1.0 - alpha)
    rho = (c0 / c) ** (2.0 / (alpha + 1.0))
    u = eta_arr + c
    if eta_arr.ndim == 0:
        return float(rho), float(u)
    return rho, u


def gcg_rarefaction_state(alpha: float, M0: float, xi):
    """(rho, u) at any xi <= 0 for the A = 0 receding piston."""
    head, tail = gcg_fan_bounds(alpha, M0)
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    rho = np.ones_like(xi)
    u = np.full_like(xi, -SQRT2)
    inside = (xi > head) & (xi < tail)
    rho[inside], u[inside] = gcg_rarefaction_profile(alpha, M0, xi[inside])
    rho1, _ = gcg_rarefaction_profile(alpha, M0, tail)
    behind = xi >= tail
    rho[behind], u[behind] = rho1, 0.0
    return rho, u
