from __future__ import annotations

from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from latticesampling.lattice_core import LatticeSystem, ShiftedLattice
from latticesampling.rational_geometry import Band, Box, RatMatrix

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def rationals(lo=-3, hi=3, denominators=(1, 2, 3, 4)):
    return st.builds(lambda d, n: Fraction(n, d), st.sampled_from(denominators),
                     st.integers(lo * 4, hi * 4)).filter(lambda x: lo <= x <= hi)


@st.composite
def boxes(draw, dim, lo=-2, hi=2):
    lower, upper = [], []
    for _ in range(dim):
        a = draw(rationals(lo, hi))
        w = draw(st.sampled_from([Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(1),
                                  Fraction(3, 2)]))
        lower.append(a)
        upper.append(a + w)
    return Box(tuple(lower), tuple(upper))


@st.composite
def bands(draw, dim, max_boxes=3):
    n = draw(st.integers(1, max_boxes))
    return Band([draw(boxes(dim)) for _ in range(n)], dim)


OFF_DIAGONAL = (0, 1, -1, Fraction(1, 2), 2, -2, 3)
DIAGONAL = (1, 2, -1, Fraction(1, 2), 3, -2, Fraction(3, 2))


@st.composite
def matrices(draw, dim, diagonal=False):
    # the simplest draw is the identity, so shrinking stays inside the nonsingular set
    while True:
        rows = [[draw(st.sampled_from(DIAGONAL)) if i == j
                 else 0 if diagonal else draw(st.sampled_from(OFF_DIAGONAL))
                 for j in range(dim)] for i in range(dim)]
        M = RatMatrix.of(rows)
        if M.det != 0:
            return M


@st.composite
def systems(draw, dim, n_max=3, shifted=False, single_matrix=False):
    n = draw(st.integers(1, n_max))
    A = draw(matrices(dim))
    lats = []
    for _ in range(n):
        M = A if single_matrix else draw(matrices(dim))
        beta = tuple(draw(rationals(0, 1, (1, 2, 3, 4))) for _ in range(dim)) if shifted else None
        lats.append(ShiftedLattice(M, beta))
    return LatticeSystem(lats)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS):
            terminalreporter.write_line(line)
