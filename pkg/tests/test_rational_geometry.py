from __future__ import annotations

import math
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import bands, boxes, matrices, rationals
from latticesampling.rational_geometry import (Band, Box, GeometryError, Parallelotope, RatMatrix,
                                               as_rational, interior_nonempty, interior_overlap,
                                               linear_image, normalize_halfspaces,
                                               overlap_translates, polytope_volume, vector_order)
from latticesampling.simplex import Infeasible, Unbounded, linprog_max

F = Fraction


# -- independent oracle: Fourier-Motzkin on the strict system a.x < b ----------

def fm_strict_feasible(halfspaces, dim):
    rows = [(list(map(F, a)), F(b)) for a, b in halfspaces]
    for k in range(dim):
        pos = [r for r in rows if r[0][k] > 0]
        neg = [r for r in rows if r[0][k] < 0]
        rest = [r for r in rows if r[0][k] == 0]
        for (ap, bp), (an, bn) in product(pos, neg):
            lp, ln = -an[k], ap[k]
            rest.append(([lp * x + ln * y for x, y in zip(ap, an)], lp * bp + ln * bn))
        rows = rest
    return all(b > 0 for _, b in rows)


def random_halfspaces(draw, dim, n):
    hs = []
    for _ in range(n):
        a = tuple(draw(st.sampled_from([-2, -1, 0, 1, 2])) for _ in range(dim))
        b = draw(rationals(-2, 2))
        hs.append((tuple(map(F, a)), b))
    return hs


# -- rationals and matrices ---------------------------------------------------

@pytest.mark.parametrize("text,expected", [
    ("3/4", F(3, 4)), ("-1/2", F(-1, 2)), ("7", F(7)), (5, F(5)), (F(2, 6), F(1, 3)),
])
def test_as_rational_accepts_exact_input(text, expected):
    assert as_rational(text) == expected


def test_as_rational_rejects_floats_and_zero_denominators():
    with pytest.raises(TypeError):
        as_rational(0.5)
    with pytest.raises(TypeError):
        as_rational(True)
    with pytest.raises(ZeroDivisionError):
        as_rational("1/0")
    with pytest.raises(ValueError):
        as_rational("one half")


def test_matrix_dual_and_singularity():
    A = RatMatrix.of([[2, 1], [0, 3]])
    assert A.det == 6
    assert A.dual == RatMatrix.of([[F(1, 2), 0], [F(-1, 6), F(1, 3)]])
    with pytest.raises(GeometryError, match="singular"):
        RatMatrix.of([[1, 2], [2, 4]]).inverse


@given(matrices(2))
def test_dual_is_inverse_transpose(A):
    I = RatMatrix.identity(2)
    assert A.T @ A.dual == I
    assert A.dual.dual == A


def test_vector_order_prefers_small_then_positive():
    vs = [(-1,), (2,), (1,), (0,)]
    assert sorted(vs, key=vector_order) == [(0,), (1,), (-1,), (2,)]


# -- boxes and bands ----------------------------------------------------------

def test_degenerate_box_rejected():
    with pytest.raises(GeometryError):
        Box((F(1),), (F(1),))


def test_band_canonical_form_merges_adjacent_pieces():
    a = Band([Box.of(["0"], ["1/2"]), Box.of(["1/2"], ["1"])])
    assert a == Band.interval(0, 1)
    assert a.measure == 1
    sq = Band([Box.of([0, 0], [1, "1/2"]), Box.of([0, "1/2"], [1, 1])])
    assert sq == Band.unit_cube(2)


def test_band_half_open_semantics():
    E = Band.interval("-1/2", "1/2")
    assert E.contains([F(-1, 2)])
    assert not E.contains([F(1, 2)])
    assert E.intersect(E.translate([1])).is_empty


@given(bands(2), bands(2))
def test_inclusion_exclusion(E, G):
    assert E.union(G).measure == E.measure + G.measure - E.intersect(G).measure


@given(bands(2), st.tuples(rationals(), rationals()))
def test_translation_preserves_measure(E, v):
    assert E.translate(v).measure == E.measure
    assert E.translate(v).translate([-x for x in v]) == E


@given(bands(1), bands(1))
def test_intersection_is_commutative_and_canonical(E, G):
    assert E.intersect(G) == G.intersect(E)
    assert E.intersect(E) == E


@given(bands(2))
def test_measure_matches_grid_count(E):
    # every endpoint has denominator dividing 12, so a 1/24 midpoint grid is exact
    bb = E.bbox()
    h = F(1, 24)
    counts = 0
    ranges = [range(math.floor(l / h), math.ceil(u / h)) for l, u in zip(bb.lower, bb.upper)]
    for idx in product(*ranges):
        if E.contains([(i + F(1, 2)) * h for i in idx]):
            counts += 1
    assert counts * h * h == E.measure


# -- LP and interiors -----------------------------------------------------------

def test_linprog_small_problem():
    # max x + y s.t. x + 2y <= 4, 3x + y <= 6
    opt, y = linprog_max([1, 1], [[1, 2], [3, 1]], [4, 6])
    assert opt == F(14, 5)
    assert y == [F(8, 5), F(6, 5)]


def test_linprog_infeasible_and_unbounded():
    with pytest.raises(Infeasible):
        linprog_max([1], [[1], [-1]], [F(1), F(-2)])
    with pytest.raises(Unbounded):
        linprog_max([1, 0], [[-1, 1]], [F(1)])


@given(st.data())
def test_interior_matches_fourier_motzkin(data):
    dim = data.draw(st.integers(1, 3))
    n = data.draw(st.integers(1, 6))
    hs = random_halfspaces(data.draw, dim, n)
    assert interior_nonempty(hs, dim) == fm_strict_feasible(hs, dim)


@given(st.data())
def test_normalization_preserves_interior(data):
    hs = random_halfspaces(data.draw, 2, 5)
    norm = normalize_halfspaces(hs)
    # normalization treats 0.x <= b as a closed constraint: dropped when b >= 0
    if any(b < 0 and not any(a) for a, b in hs):
        assert norm is None
        return
    proper = [(a, b) for a, b in hs if any(a)]
    assert fm_strict_feasible(norm, 2) == fm_strict_feasible(proper, 2)


def test_parallelotope_overlap_touching_is_not_overlap():
    p = Parallelotope(RatMatrix.identity(2), Box.of([0, 0], [1, 1]), (F(0), F(0)))
    assert not interior_overlap(p, p.translate([1, 0]))
    assert interior_overlap(p, p.translate([F(1, 2), F(1, 2)]))


@given(boxes(1), boxes(1), matrices(1), matrices(1))
def test_overlap_translates_against_interval_arithmetic(b1, b2, M, N):
    p = linear_image(Band([b1]), M)[0]
    q = linear_image(Band([b2]), N)[0]
    (pl,), (pu,) = p.bbox
    (ql,), (qu,) = q.bbox
    expected = [(k,) for k in range(math.floor(pl - qu) - 1, math.ceil(pu - ql) + 2)
                if min(pu, qu + k) > max(pl, ql + k)]
    assert sorted(overlap_translates(p, q)) == expected


@given(boxes(2), boxes(2), matrices(2))
def test_overlap_translates_brute_force_2d(b1, b2, M):
    p = linear_image(Band([b1]), M)[0]
    q = Parallelotope(RatMatrix.identity(2), b2, (F(0), F(0)))
    got = set(overlap_translates(p, q))
    for k in product(range(-8, 9), repeat=2):
        hs = p.halfspaces + q.translate(k).halfspaces
        assert (k in got) == fm_strict_feasible(hs, 2)


# -- volumes ----------------------------------------------------------------------

def test_polytope_volume_known_shapes():
    cube = Box.of([0, 0, 0], [1, 2, 3]).halfspaces()
    assert polytope_volume(cube, 3) == 6
    simplex = [((F(-1), F(0)), F(0)), ((F(0), F(-1)), F(0)), ((F(1), F(1)), F(1))]
    assert polytope_volume(simplex, 2) == F(1, 2)
    simplex3 = [((F(-1), 0, 0), F(0)), ((0, F(-1), 0), F(0)), ((0, 0, F(-1)), F(0)),
                ((F(1), F(1), F(1)), F(1))]
    assert polytope_volume(simplex3, 3) == F(1, 6)
    assert polytope_volume([((F(1),), F(0)), ((F(-1),), F(1))], 1) == 1
    assert polytope_volume([((F(1),), F(0)), ((F(-1),), F(-1))], 1) == 0


@given(boxes(2), matrices(2))
def test_parallelotope_volume_is_det_times_box(b, M):
    p = linear_image(Band([b]), M)[0]
    assert polytope_volume(p.halfspaces, 2) == M.absdet * b.volume == p.volume


def test_band_string_form():
    assert str(Band.interval(0, "1/2")) == "[0,1/2)"
