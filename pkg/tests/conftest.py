import math

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from mcg_piston.setup import Direction, make_problem

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

SQRT2 = math.sqrt(2.0)

alphas = st.floats(0.05, 0.95)
thetas = st.floats(0.01, 0.99)
machs = st.floats(0.05, 20.0)


@st.composite
def mcg_problems(draw, direction=Direction.PROCEEDING):
    return make_problem(draw(machs), direction, draw(alphas), draw(thetas))


def random_problems(n, direction, seed):
    """The acceptance-suite draw: alpha in (0.05, 0.95), theta in (0.01, 0.99), M0 in (0.05, 20)."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        alpha = float(rng.uniform(0.05, 0.95))
        theta = float(rng.uniform(0.01, 0.99))
        m0 = float(rng.uniform(0.05, 20.0))
        out.append(make_problem(m0, direction, alpha, theta))
    return out


@pytest.fixture
def reference_proceeding():
    return make_problem(1.0, Direction.PROCEEDING, 0.5, 0.5)


@pytest.fixture
def reference_receding():
    return make_problem(1.0, Direction.RECEDING, 0.5, 0.5)


def mp_bisect(f, lo, hi, iterations=400):
    """Plain bisection at the current mpmath precision; f(lo) and f(hi) must differ in sign."""
    import mpmath as mp

    lo, hi = mp.mpf(lo), mp.mpf(hi)
    f_lo = f(lo)
    if f_lo * f(hi) > 0:
        raise ValueError("bracket does not change sign")
    for _ in range(iterations):
        mid = (lo + hi) / 2
        f_mid = f(mid)
        if f_mid == 0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return (lo + hi) / 2
