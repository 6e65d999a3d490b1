"""First-family rarefaction behind a receding piston.

Upstream state V0 = (1, -sqrt(2)), wall state V1 = (rho1, 0).  Inside the
fan eta = x/t = u - c(rho) and the Riemann invariant

    u - 2c/(alpha+1) + sqrt(A)/(alpha+1) * ln(2 sqrt(A) rho^(alpha+1) (c + sqrt(A)) + B alpha)

keeps its upstream value W0.  Writing N = c(rho) and eliminating u turns
this into a scalar equation for N at each eta; the tail is where u = 0.

Notation: ``Q = eta/sqrt(A)`` for the tail equation and ``Q = xi/sqrt(A)``
for the second-family analysis.  Both use log forms of the exponential
equations so that nothing overflows when A is small.

Requires A > 0 and 0 < alpha < 1; the A = 0 fan is in :mod:`mcg_piston.limits`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _roots
from .eos import SQRT2, pressure, sound_speed
from .errors import ConvergenceError, DomainError
from .setup import Direction, PistonProblem, WaveKind, WaveProfile

DEGENERATE_TOL = 1e-12
_LN2 = math.log(2.0)
TAIL_POLE_GAP = 1e-9


def _require_receding_mcg(problem: PistonProblem):
    if problem.direction is not Direction.RECEDING:
        raise DomainError("the rarefaction solver needs a receding piston")
    gas = problem.gas
    if gas.A <= 0.0:
        raise DomainError("the rarefaction solver needs A > 0; use limits for A = 0")
    if gas.alpha >= 1.0:
        raise DomainError("the rarefaction solver needs alpha < 1")


def eta_head(problem: PistonProblem) -> float:
    """lambda1(V0) = -sqrt(2) * (1 + 1/M0)."""
    return -SQRT2 - SQRT2 / problem.M0


# ----------------------------------------------------------------------------
# Riemann invariant


def riemann_invariant(problem: PistonProblem, rho, u):
    """First-family invariant evaluated at (rho, u); scalar or array."""
    gas = problem.gas
    a1 = gas.alpha + 1.0
    sa = math.sqrt(gas.A)
    n = sound_speed(gas, rho)
    x = 2.0 * sa * np.asarray(rho, dtype=float) ** a1 * (n + sa) + gas.B * gas.alpha
    return u - 2.0 * n / a1 + sa / a1 * np.log(x)


def riemann_invariant_w0(problem: PistonProblem) -> float:
    """W0 in closed form, expressed through M0 and A only."""
    _require_receding_mcg(problem)
    gas, m = problem.gas, problem.M0
    a1 = gas.alpha + 1.0
    sa = math.sqrt(gas.A)
    arg = (2.0 * math.sqrt(2.0 * gas.A) * m + gas.A * m * m + 2.0) / (m * m)
    return -SQRT2 - 2.0 * SQRT2 / (a1 * m) + sa / a1 * math.log(arg)


def riemann_invariant_w0_direct(problem: PistonProblem) -> float:
    """W0 straight from the invariant at the upstream state."""
    _require_receding_mcg(problem)
    return float(riemann_invariant(problem, 1.0, problem.u0))


# ----------------------------------------------------------------------------
# Fan equation in N = c(rho)


def _fan_lhs(gas, n):
    """(alpha-1)N/(alpha+1) + sqrt(A)/(alpha+1) * ln((N+sqrt A)/(N-sqrt A))."""
    a1 = gas.alpha + 1.0
    sa = math.sqrt(gas.A)
    return (gas.alpha - 1.0) * n / a1 + sa / a1 * math.log1p(2.0 * sa / (n - sa))


def _fan_lhs_prime(gas, n):
    a1 = gas.alpha + 1.0
    return (gas.alpha - 1.0) / a1 - 2.0 * gas.A / (a1 * (n * n - gas.A))


def _fan_rhs(gas, w0, eta):
    sa = math.sqrt(gas.A)
    return w0 - eta - sa * math.log(gas.B * gas.alpha) / (gas.alpha + 1.0)


def fan_residual(problem: PistonProblem, w0: float, eta: float, n: float) -> float:
    gas = problem.gas
    return _fan_lhs(gas, n) - _fan_rhs(gas, w0, eta)


def rho_from_n(problem: PistonProblem, n):
    """Invert N = c(rho): rho = (B alpha / (N^2 - A))^(1/(alpha+1))."""
    gas = problem.gas
    sa = math.sqrt(gas.A)
    n = np.asarray(n, dtype=float)
    return (gas.B * gas.alpha / ((n - sa) * (n + sa))) ** (1.0 / (gas.alpha + 1.0))


def density_slope(problem: PistonProblem, rho, n):
    """rho'(eta) = -2 N rho / ((alpha+1) A + (1-alpha) N^2)."""
    gas = problem.gas
    n = np.asarray(n, dtype=float)
    return -2.0 * n * rho / ((gas.alpha + 1.0) * gas.A + (1.0 - gas.alpha) * n * n)


def _solve_n(problem: PistonProblem, w0: float, eta: float) -> float:
    gas = problem.gas
    rhs = _fan_rhs(gas, w0, eta)
    F = lambda n: _fan_lhs(gas, n) - rhs
    Fp = lambda n: _fan_lhs_prime(gas, n)
    # N grows from c(1) at the head; F is decreasing and F(c(1)) >= 0 inside the fan.
    lo = float(sound_speed(gas, 1.0))
    if F(lo) <= 0.0:
        return lo
    hi = _roots.expand_upper(F, lo, 2.0 * lo, sign=-1.0)
    return _roots.find_root(F, lo, hi, Fp).x


def rho_of_eta(problem: PistonProblem, w0: float, eta: float, *,
               eta_tail: Optional[float] = None):
    """(rho, u) inside the fan at ``eta``.

    ``eta_tail`` is solved for when not supplied; pass it when sampling many
    points.
    """
    _require_receding_mcg(problem)
    head = eta_head(problem)
    tail = solve_eta_tail(problem) if eta_tail is None else eta_tail
    slack = 1e-14 * abs(head)
    if not head - slack <= eta <= tail + slack:
        raise DomainError(f"eta={eta!r} lies outside the fan [{head!r}, {tail!r}]")
    n = _solve_n(problem, w0, eta)
    return float(rho_from_n(problem, n)), eta + n


# ----------------------------------------------------------------------------
# Tail speed


def log_c(problem: PistonProblem) -> float:
    """ln C for the tail equation (C itself overflows for small A)."""
    gas, m = problem.gas, problem.M0
    sa = math.sqrt(gas.A)
    k = sa * m / SQRT2
    return (-SQRT2 * (gas.alpha + 1.0) - 2.0 * SQRT2 / m) / sa + math.log((1.0 + k) / (1.0 - k))


def tail_function(problem: PistonProblem, q):
    """f(Q) = exp(-2Q) - 1/C + 2/(C(Q+1)); may overflow to inf for small A."""
    q = np.asarray(q, dtype=float)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        inv_c = np.exp(-log_c(problem))
        out = np.exp(-2.0 * q) - inv_c + 2.0 * inv_c / (q + 1.0)
    return out if out.ndim else float(out)


def tail_function_prime(problem: PistonProblem, q):
    q = np.asarray(q, dtype=float)
    with np.errstate(over="ignore"):
        inv_c = np.exp(-log_c(problem))
        out = -2.0 * (np.exp(-2.0 * q) + inv_c / (q + 1.0) ** 2)
    return out if out.ndim else float(out)


def tail_log_function(problem: PistonProblem, q: float, lnc: Optional[float] = None) -> float:
    """phi(Q) = -2Q + ln C - ln((Q-1)/(Q+1)) for Q < -1.

    Has the sign of f(Q) and is strictly decreasing; f = -exp(-2Q) * expm1(-phi).
    """
    if q >= -1.0:
        raise DomainError("the tail equation lives on Q < -1")
    lnc = log_c(problem) if lnc is None else lnc
    return -2.0 * q + lnc - math.log1p(2.0 / (-q - 1.0))


def _tail_log_prime(q: float) -> float:
    return -2.0 - 2.0 / (q * q - 1.0)


@dataclass(frozen=True)
class TailSolution:
    eta_tail: float
    q0: float
    log_c: float
    scaled_residual: float
    phi_head: float


def solve_tail(problem: PistonProblem) -> TailSolution:
    """Tail speed with diagnostics.

    ``scaled_residual`` is ``|f(Q0)| * exp(2 Q0)``, which is what f(Q0) measures
    relative to its own terms.
    """
    _require_receding_mcg(problem)
    sa = math.sqrt(problem.gas.A)
    lnc = log_c(problem)
    phi = lambda q: tail_log_function(problem, q, lnc)
    q_head = eta_head(problem) / sa
    phi_head = phi(q_head)
    lo = q_head
    if phi_head <= 0.0:
        # Never expected; push the lower end left until the sign is right.
        width = max(1.0, abs(q_head))
        for _ in range(200):
            lo -= width
            width *= 2.0
            if phi(lo) > 0.0:
                break
        else:
            raise ConvergenceError("tail bracket: phi stays non-positive to the left",
                                   q_head=q_head, phi_head=phi_head)
    gap = TAIL_POLE_GAP
    hi = -1.0 - gap
    while phi(hi) >= 0.0:
        gap *= 1e-3
        if gap < 1e-300 or -1.0 - gap == -1.0:
            raise ConvergenceError("tail bracket: phi stays non-negative at the pole",
                                   q_head=q_head, lo=lo)
        hi = -1.0 - gap
    root = _roots.find_root(phi, lo, hi, _tail_log_prime)
    q0 = root.x
    return TailSolution(eta_tail=sa * q0, q0=q0, log_c=lnc,
                        scaled_residual=abs(math.expm1(-root.fx)), phi_head=phi_head)


def solve_eta_tail(problem: PistonProblem) -> float:
    """eta_tail = sqrt(A) * Q0 with Q0 the root of the tail equation on (Q_head, -1)."""
    return solve_tail(problem).eta_tail


# ----------------------------------------------------------------------------
# Assembled fan


@dataclass(frozen=True)
class RarefactionSolution:
    problem: PistonProblem
    eta_head: float
    eta_tail: float
    rho1: float
    w0: float
    tail: TailSolution

    def fan(self, eta):
        """(rho, u, N) at fan coordinates; ``eta`` scalar or 1-d array."""
        etas = np.atleast_1d(np.asarray(eta, dtype=float))
        slack = 1e-14 * abs(self.eta_head)
        if np.any(etas < self.eta_head - slack) or np.any(etas > self.eta_tail + slack):
            raise DomainError("eta outside the fan")
        n = np.array([_solve_n(self.problem, self.w0, float(e)) for e in etas])
        rho = rho_from_n(self.problem, n)
        u = etas + n
        if np.ndim(eta) == 0:
            return float(rho[0]), float(u[0]), float(n[0])
        return rho, u, n

    def __call__(self, eta):
        """(rho, u, P) inside the fan."""
        rho, u, _ = self.fan(eta)
        return rho, u, pressure(self.problem.gas, rho)

    def state_at(self, xi):
        """(rho, u) at any xi <= 0, constant outside the fan."""
        xi = np.asarray(xi, dtype=float)
        flat = np.atleast_1d(xi)
        rho = np.ones_like(flat)
        u = np.full_like(flat, self.problem.u0)
        behind = flat >= self.eta_tail
        rho[behind], u[behind] = self.rho1, 0.0
        inside = (flat > self.eta_head) & ~behind
        if inside.any():
            r, v, _ = self.fan(flat[inside])
            rho[inside], u[inside] = r, v
        if xi.ndim == 0:
            return float(rho[0]), float(u[0])
        return rho, u

    def profile(self, xi) -> WaveProfile:
        rho, u = self.state_at(xi)
        return WaveProfile.from_state(self.problem.gas, xi, rho, u, WaveKind.RAREFACTION1,
                                      eta_head=self.eta_head, eta_tail=self.eta_tail)


def solve_rarefaction(problem: PistonProblem) -> RarefactionSolution:
    _require_receding_mcg(problem)
    w0 = riemann_invariant_w0(problem)
    tail = solve_tail(problem)
    head = eta_head(problem)
    if not head < tail.eta_tail < 0.0:
        raise ConvergenceError("fan ordering violated", eta_head=head, eta_tail=tail.eta_tail)
    # At the tail u = 0, so N = -eta_tail.
    rho1 = float(rho_from_n(problem, -tail.eta_tail))
    return RarefactionSolution(problem=problem, eta_head=head, eta_tail=tail.eta_tail,
                               rho1=rho1, w0=w0, tail=tail)


# ----------------------------------------------------------------------------
# Second family


class SecondFamilyBranch(enum.Enum):
    HEAD_ABOVE_TAIL = "head-above-tail"
    ORDERING_VIOLATED = "ordering-violated"
    DEGENERATE = "degenerate"


def log_c1(problem: PistonProblem) -> float:
    gas, m = problem.gas, problem.M0
    sa = math.sqrt(gas.A)
    num = (SQRT2 + sa * m) ** 2
    return (SQRT2 * (gas.alpha + 1.0) - 2.0 * SQRT2 / m) / sa + \
        math.log(num / (gas.alpha * gas.B * m * m))


def g_function(problem: PistonProblem, q):
    """g(Q) = exp(2Q) - 1/C1 - 2/(C1 (Q-1)); may overflow for small A."""
    q = np.asarray(q, dtype=float)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        inv_c1 = np.exp(-log_c1(problem))
        out = np.exp(2.0 * q) - inv_c1 - 2.0 * inv_c1 / (q - 1.0)
    return out if out.ndim else float(out)


def g_prime(problem: PistonProblem, q):
    q = np.asarray(q, dtype=float)
    with np.errstate(over="ignore"):
        inv_c1 = np.exp(-log_c1(problem))
        out = 2.0 * np.exp(2.0 * q) + 2.0 * inv_c1 / (q - 1.0) ** 2
    return out if out.ndim else float(out)


def g_log_margin(problem: PistonProblem, q: float, lnc1: Optional[float] = None) -> float:
    """psi(Q) = 2Q + ln C1 - ln((Q+1)/(Q-1)) for |Q| > 1.

    On |Q| > 1 the sign of psi is the sign of g, and psi is strictly increasing
    on each of the two branches.  (On -1 < Q < 1, g > 0 outright.)
    """
    if abs(q) <= 1.0:
        raise DomainError("the log form of g needs |Q| > 1")
    lnc1 = log_c1(problem) if lnc1 is None else lnc1
    if q > 1.0:
        ratio = math.log1p(2.0 / (q - 1.0))
    else:
        ratio = -math.log1p(2.0 / (-q - 1.0))
    return 2.0 * q + lnc1 - ratio


def _g_sign(problem: PistonProblem, q: float, lnc1: float):
    """(sign of g(Q), witness value) computed without overflow."""
    if -1.0 < q < 1.0:
        return 1.0, math.inf
    if q == 1.0:
        return -1.0, -math.inf  # pole, approached from the Q > 1 side
    if q == -1.0:
        return 1.0, math.exp(-2.0)
    margin = g_log_margin(problem, q, lnc1)
    return math.copysign(1.0, margin) if margin != 0.0 else 0.0, margin


def _g_value(problem: PistonProblem, q: float, lnc1: float) -> float:
    """g(Q) evaluated as -exp(2Q) * expm1(-psi) on |Q| > 1 to avoid inf - inf."""
    if abs(q) <= 1.0:
        return float(g_function(problem, q))
    psi = g_log_margin(problem, q, lnc1)
    with np.errstate(over="ignore"):
        scale = float(np.exp(2.0 * q))
    return -scale * math.expm1(-psi) if psi > -700.0 else -math.inf


@dataclass(frozen=True)
class SecondFamilyCertificate:
    """Outcome of the argument that rules out a second-family fan.

    ``branch`` follows the sign of ``d = sqrt(2)/M0 - sqrt(2) - sqrt(A)``.  The
    argument predicts g(Q_head) < 0 for d > 0 and g(Q_head) > 0 for d < 0;
    ``predicted_sign_holds`` records whether that prediction is true for this
    problem.  ``xi0`` is the second-family tail speed (root of g with
    Q > 1) and ``head_below_tail`` whether xi_head < xi0.
    """

    branch: SecondFamilyBranch
    d: float
    q_head: float
    g_head: float
    sign_witness: float
    g_head_sign: float
    predicted_sign_holds: bool
    xi_head: float
    xi0: float
    head_below_tail: bool

    @property
    def fired(self) -> bool:
        """True when the predicted contradiction is actually established."""
        return self.branch is not SecondFamilyBranch.DEGENERATE and self.predicted_sign_holds


def _solve_xi0(problem: PistonProblem, lnc1: float) -> float:
    """Second-family tail speed, the root of g on Q > 1.

    Solved for z = ln(Q - 1): for small A the root sits so close to the pole
    at Q = 1 that Q itself is not representable away from it.
    """
    sa = math.sqrt(problem.gas.A)
    psi = lambda z: 2.0 + 2.0 * math.exp(z) + lnc1 - float(np.logaddexp(0.0, _LN2 - z))
    psip = lambda z: 2.0 * math.exp(z) + 2.0 / (2.0 + math.exp(z))
    # For z -> -inf, psi ~ 2 + ln C1 - ln 2 + z, which places the root near -(2 + ln C1).
    lo = min(-1.0, -(2.0 + lnc1 - _LN2) - 10.0)
    while psi(lo) >= 0.0:
        lo = 2.0 * lo
    hi = _roots.expand_upper(psi, lo, lo + 1.0, sign=1.0)
    z = _roots.find_root(psi, lo, hi, psip).x
    return sa * (1.0 + math.exp(z))


def second_family_certificate(problem: PistonProblem) -> SecondFamilyCertificate:
    _require_receding_mcg(problem)
    sa = math.sqrt(problem.gas.A)
    q = SQRT2 / problem.M0 - SQRT2
    d = q - sa
    q_head = q / sa
    lnc1 = log_c1(problem)
    sign, witness = _g_sign(problem, q_head, lnc1)
    if abs(d) <= DEGENERATE_TOL:
        branch, holds = SecondFamilyBranch.DEGENERATE, False
    elif d > 0.0:
        branch, holds = SecondFamilyBranch.HEAD_ABOVE_TAIL, sign < 0.0
    else:
        branch, holds = SecondFamilyBranch.ORDERING_VIOLATED, sign > 0.0
    xi0 = _solve_xi0(problem, lnc1)
    return SecondFamilyCertificate(
        branch=branch, d=d, q_head=q_head, g_head=_g_value(problem, q_head, lnc1),
        sign_witness=witness, g_head_sign=sign, predicted_sign_holds=holds,
        xi_head=q, xi0=xi0, head_below_tail=q < xi0)
