"""Bracketed scalar root finding: bisection followed by safeguarded Newton.

Every equation solved in this package is monotone on a known interval, so a
sign-change bracket is always available.  Bisection makes the answer
correct; a handful of Newton steps on the analytic derivative makes it
accurate to a few ulps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import ConvergenceError

Func = Callable[[float], float]


@dataclass(frozen=True)
class Root:
    x: float
    fx: float
    lo: float
    hi: float
    bisections: int
    newton_steps: int


def expand_upper(f: Func, lo: float, hi: float, *, sign: float,
                 factor: float = 2.0, max_steps: int = 2000) -> float:
    """Grow ``hi`` geometrically until ``sign * f(hi) > 0``.

    ``sign`` is the sign ``f`` takes beyond the root (+1 for increasing
    functions).
    """
    x = hi
    for _ in range(max_steps):
        fx = f(x)
        if sign * fx > 0:
            return x
        if not math.isfinite(x * factor):
            break
        x = lo + (x - lo) * factor
    raise ConvergenceError("upper bracket not found", lo=lo, last=x,
                           f_last=f(x) if math.isfinite(x) else None)


def find_root(f: Func, lo: float, hi: float, fprime: Optional[Func] = None, *,
              bisect_rtol: float = 1e-8, newton_rtol: float = 1e-14,
              max_newton: int = 8, max_bisect: int = 2200) -> Root:
    """Root of ``f`` inside ``[lo, hi]`` where ``f(lo)`` and ``f(hi)`` differ in sign.

    Bisection shrinks the bracket to ``bisect_rtol`` relative width; Newton
    steps (when ``fprime`` is given) then polish until the step is below
    ``newton_rtol * |x|`` or ``max_newton`` steps were taken.  A Newton step
    that would leave the current bracket is replaced by a bisection step.
    Without ``fprime`` bisection runs to machine resolution.  ``max_bisect``
    covers the full double range, so a root at exactly zero still terminates.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return Root(lo, flo, lo, lo, 0, 0)
    if fhi == 0.0:
        return Root(hi, fhi, hi, hi, 0, 0)
    if not (flo < 0.0 < fhi or fhi < 0.0 < flo):
        raise ConvergenceError("no sign change on bracket",
                               lo=lo, hi=hi, f_lo=flo, f_hi=fhi)
    increasing = flo < 0.0
    target_rtol = bisect_rtol if fprime is not None else 0.0

    nb = 0
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if hi - lo <= target_rtol * max(abs(lo), abs(hi)):
            break
        if nb >= max_bisect:
            raise ConvergenceError("bisection did not converge",
                                   lo=lo, hi=hi, iterations=nb)
        fm = f(mid)
        nb += 1
        if fm == 0.0:
            return Root(mid, fm, mid, mid, nb, 0)
        if (fm < 0.0) == increasing:
            lo = mid
        else:
            hi = mid

    x = 0.5 * (lo + hi)
    fx = f(x)
    nn = 0
    if fprime is not None:
        for nn in range(1, max_newton + 1):
            if fx == 0.0:
                break
            if (fx < 0.0) == increasing:
                lo = x
            else:
                hi = x
            d = fprime(x)
            step = fx / d if d != 0.0 and math.isfinite(d) else math.inf
            x_new = x - step
            if not (lo <= x_new <= hi):
                x_new = 0.5 * (lo + hi)
            converged = abs(x_new - x) <= newton_rtol * abs(x)
            x = x_new
            fx = f(x)
            if converged:
                break
    return Root(x, fx, lo, hi, nb, nn)
