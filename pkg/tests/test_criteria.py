from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import bands, matrices, rationals, systems
from latticesampling.criteria import (CriterionError, NoCriterionError, Witness, check_bounded,
                                      check_orthogonal, check_orthogonal_shifted_pair,
                                      check_orthogonal_shifted_shared, check_orthogonal_unshifted,
                                      check_tight, check_tight_shifted, check_tight_unshifted,
                                      multiplier_symbol, witness_violates)
from latticesampling.lattice_core import LatticeSystem, ShiftedLattice, enumerate_lambda
from latticesampling.rational_geometry import Band, Box, RatMatrix

F = Fraction
HALF = Band.interval("-1/2", "1/2")
UNIT = Band.interval(0, 1)


def lats(*pairs):
    return LatticeSystem([ShiftedLattice([[a]], [b]) for a, b in pairs])


EXAMPLE_A = lats((1, 0), (1, F(1, 2)))
EXAMPLE_B = lats((1, F(1, 2)), (1, 0))
MODIFIED_B = lats((1, F(1, 2)), (1, 1))
NEG_UNIT = Band.interval(-1, 0)


# -- tightness -------------------------------------------------------------------

def test_single_lattice_witness():
    v = check_tight_unshifted(HALF, LatticeSystem.unshifted([[[2]]]))
    assert not v.tight and v.K is None
    assert v.witness.kind == "z" and v.witness.shift == (1,)
    assert str(v.witness.overlap) == "[0,1/2)"


def test_integer_lattice_tight_on_unit_band():
    v = check_tight(UNIT, LatticeSystem.unshifted([[[1]]]))
    assert v.tight and v.K == 1 and v.mode == "exact"


def test_shannon_union_is_tight():
    sys = lats((2, 0), (2, 1))
    v = check_tight_shifted(HALF, sys)
    assert v.tight and v.K == 1 and v.mode == "exact"
    assert [p.tight for p in v.per_lattice] == [False, False]
    for j in range(2):
        alone = check_tight(HALF, LatticeSystem([sys[j]]))
        assert not alone.tight and alone.witness is not None


def test_equal_shifts_do_not_cancel():
    v = check_tight_shifted(HALF, lats((2, F(1, 3)), (2, F(1, 3))))
    assert not v.tight
    assert v.witness.shift == (F(1, 2),) and v.witness.members == (0, 1)
    assert abs(v.witness.sum.value()) == pytest.approx(1.0)


def test_unshifted_checker_refuses_shifts():
    with pytest.raises(CriterionError):
        check_tight_unshifted(HALF, lats((2, 1)))


def test_check_bounded_reports_sup():
    assert check_bounded(HALF, lats((2, 0), (2, 1))) == [2, 2]
    assert check_bounded(Band.interval(0, 2), LatticeSystem.unshifted([[[1]]])) == [2]


def test_irrational_shift_demotes_to_numeric():
    sys = LatticeSystem([ShiftedLattice([[2]], [0]), ShiftedLattice([[2]], [1.0])])
    v = check_tight(HALF, sys)
    assert v.tight and v.mode == "numeric"
    sys = LatticeSystem([ShiftedLattice([[2]], [0]), ShiftedLattice([[2]], [math.sqrt(2)])])
    v = check_tight(HALF, sys)
    assert not v.tight and v.mode == "numeric"


# -- orthogonality -----------------------------------------------------------------

def test_adjacent_unit_bands_not_orthogonal():
    v = check_orthogonal_unshifted(UNIT, Band.interval(1, 2), lats((1, 0)), lats((1, 0)))
    assert not v.orthogonal and v.witness.kind == "k" and v.witness.shift == (1,)


def test_complementary_halves_orthogonal():
    v = check_orthogonal(Band.interval(0, "1/2"), Band.interval("1/2", 1), lats((1, 0)), lats((1, 0)))
    assert v.orthogonal and v.per_index == [True]


def test_example_as_printed_has_witness():
    v = check_orthogonal_shifted_shared(UNIT, NEG_UNIT, EXAMPLE_A, EXAMPLE_B)
    assert not v.orthogonal
    w = v.witness
    assert (w.kind, w.shift, w.q, w.members) == ("alpha", (F(1),), (F(1, 2),), (0,))
    assert w.sum.value() == pytest.approx(-1)
    assert witness_violates(w, UNIT, EXAMPLE_A, NEG_UNIT, EXAMPLE_B)
    # the single-matrix criterion agrees
    assert not check_orthogonal_shifted_pair(UNIT, NEG_UNIT, EXAMPLE_A, EXAMPLE_B).orthogonal


def test_modified_example_orthogonal_under_both_criteria():
    assert check_orthogonal_shifted_shared(UNIT, NEG_UNIT, EXAMPLE_A, MODIFIED_B).orthogonal
    assert check_orthogonal_shifted_pair(UNIT, NEG_UNIT, EXAMPLE_A, MODIFIED_B).orthogonal


def test_single_matrix_pair_witness():
    E = Band.interval(0, "1/2")
    v = check_orthogonal(E, E, lats((1, 0), (1, F(1, 2))), lats((2, 0), (2, 1)))
    assert v.criterion == "single matrix pair"
    assert not v.orthogonal and v.witness.kind == "m" and v.witness.shift == (0,)
    v = check_orthogonal(E, Band.interval("1/2", 1), lats((1, 0), (1, F(1, 2))), lats((2, 0), (2, 1)))
    assert v.orthogonal


def test_mixed_system_has_no_criterion():
    with pytest.raises(NoCriterionError, match="no criterion"):
        check_orthogonal(UNIT, UNIT, lats((1, 0), (2, F(1, 2))), lats((1, F(1, 2)), (3, 0)))
    with pytest.raises(CriterionError):
        check_orthogonal(UNIT, UNIT, lats((1, 0)), lats((1, 0), (1, 0)))


def test_multiplier_symbol_values():
    s = multiplier_symbol(UNIT, UNIT, lats((1, 0)), lats((1, 0)))
    assert s((F(1, 2),)) == 1
    s = multiplier_symbol(UNIT, UNIT, lats((1, 0)), lats((1, F(1, 2))))
    assert s((F(1, 2),)) == pytest.approx(-1j)
    assert s((F(3, 2),)) == 0
    s = multiplier_symbol(UNIT, UNIT, lats((1, F(1, 4))), lats((1, 0)))
    assert s((F(1, 2),)) == pytest.approx(complex(math.cos(math.pi / 4), math.sin(math.pi / 4)))
    assert s.exponential_sum((F(1, 2),)).value() == pytest.approx(s((F(1, 2),)))


# -- properties ----------------------------------------------------------------------

@given(bands(2, max_boxes=2), systems(2, n_max=3))
def test_degeneration_with_zero_shifts(E, sys):
    a = check_tight_unshifted(E, sys)
    b = check_tight_shifted(E, sys)
    assert a.tight == b.tight and a.K == b.K


@given(bands(1, max_boxes=2), systems(1, n_max=3, shifted=True))
def test_tightness_witness_revalidates(E, sys):
    v = check_tight(E, sys)
    if v.tight:
        assert v.K == sys.frame_constant()
    else:
        assert witness_violates(v.witness, E, sys)


@given(bands(1, max_boxes=2), bands(1, max_boxes=2), systems(1, n_max=3), systems(1, n_max=3))
def test_unshifted_orthogonality_is_conjunction(E, G, sysA, sysB):
    n = min(len(sysA), len(sysB))
    sysA, sysB = LatticeSystem(sysA.lattices[:n]), LatticeSystem(sysB.lattices[:n])
    joint = check_orthogonal_unshifted(E, G, sysA, sysB)
    per = [check_orthogonal_unshifted(E, G, LatticeSystem([a]), LatticeSystem([b])).orthogonal
           for a, b in zip(sysA, sysB)]
    assert joint.orthogonal == all(per) and joint.per_index == per
    if joint.witness:
        assert witness_violates(joint.witness, E, sysA, G, sysB)


@st.composite
def single_matrix_pairs(draw, dim=1):
    n = draw(st.integers(1, 3))
    A = draw(matrices(dim))
    shift = lambda: tuple(draw(rationals(0, 1, (1, 2, 4))) for _ in range(dim))
    sysA = LatticeSystem([ShiftedLattice(A, shift()) for _ in range(n)])
    sysB = LatticeSystem([ShiftedLattice(A, shift()) for _ in range(n)])
    return sysA, sysB


@given(bands(1, max_boxes=2), bands(1, max_boxes=2), single_matrix_pairs())
def test_shared_and_pair_criteria_agree(E, G, pair):
    sysA, sysB = pair
    a = check_orthogonal_shifted_shared(E, G, sysA, sysB)
    b = check_orthogonal_shifted_pair(E, G, sysA, sysB)
    assert a.orthogonal == b.orthogonal
    for w in (a.witness, b.witness):
        if w is not None:
            assert witness_violates(w, E, sysA, G, sysB)


@given(bands(2, max_boxes=2), single_matrix_pairs(dim=2))
def test_shared_and_pair_criteria_agree_2d(E, pair):
    sysA, sysB = pair
    G = E.translate((F(1, 2), 0))
    assert (check_orthogonal_shifted_shared(E, G, sysA, sysB).orthogonal
            == check_orthogonal_shifted_pair(E, G, sysA, sysB).orthogonal)


@st.composite
def monomial_matrices(draw, dim):
    perm = draw(st.permutations(range(dim)))
    rows = [[0] * dim for _ in range(dim)]
    for i, p in enumerate(perm):
        rows[i][p] = draw(st.sampled_from([1, -1, 2, -2, F(1, 2), F(-3, 2), 3]))
    return RatMatrix.of(rows)


def transform_band(E: Band, M: RatMatrix) -> Band:
    out = []
    for b in E.boxes:
        c1, c2 = M @ b.lower, M @ b.upper
        out.append(Box(tuple(map(min, c1, c2)), tuple(map(max, c1, c2))))
    return Band(out, E.dim)


@given(bands(2, max_boxes=2), systems(2, n_max=2, shifted=True), monomial_matrices(2))
def test_dilation_covariance(E, sys, S):
    moved = LatticeSystem([ShiftedLattice(S @ lat.A, S @ lat.beta) for lat in sys])
    SE = transform_band(E, S.dual)
    a, b = check_tight(E, sys), check_tight(SE, moved)
    assert a.tight == b.tight
    if a.tight:
        assert b.K == a.K / S.absdet


@given(systems(2, n_max=3), matrices(2))
def test_membership_covariance(sys, S):
    moved = LatticeSystem([ShiftedLattice(S @ lat.A) for lat in sys])
    for info in enumerate_lambda(sys, ((-1, -1), (1, 1))):
        beta = S.dual @ info.alpha
        assert tuple(j for j, lat in enumerate(moved) if lat.contains_dual(beta)) == info.members
