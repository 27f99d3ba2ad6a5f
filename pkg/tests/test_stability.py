from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from posetunit.errors import DimensionMismatch, EmptyList, NotStable, ZeroSubspace
from posetunit.linalg import full, span, zero
from posetunit.poset import primitive
from posetunit.reps import make_rep
from posetunit.stability import (Membership, Status, StabilityMatrix, SubdimVector, Weight,
                                 build_A_matrix, cone_membership, extend_weight, extremal_rays,
                                 is_stable, lambda_chi, maximal_vectors, restrict, search_subdims,
                                 verify_witness, weight_cone)

H = Fraction(1, 2)


def three_lines():
    return make_rep(primitive(1, 1, 1), 2,
                    [span(2, [(1, 0)]), span(2, [(0, 1)]), span(2, [(1, 1)])])


def test_weight_must_be_positive():
    with pytest.raises(ValueError):
        Weight((1, 0, 1))
    assert Weight.of((1, "1/10", 2)).alphas == (1, Fraction(1, 10), 2)


def test_lambda_chi_examples(catalog):
    pi = three_lines()
    assert lambda_chi(pi, (1, 1, 1)) == Fraction(3, 2)
    assert lambda_chi(catalog["(2,2,2)"].rep(2), (1,) * 6) == 3
    assert lambda_chi(pi, (3, 3, 3)) == 3 * lambda_chi(pi, (1, 1, 1))


def test_restrict_examples(catalog):
    rep = catalog["(2,2,2)"].rep(2)
    assert restrict(rep, span(3, [(0, 0, 1)])).as_tuple() == (1, 0, 0, 0, 0, 1, 1)
    assert restrict(rep, full(3)).as_tuple() == (3,) + rep.raw_dims
    rep = catalog["(N,4)"].rep(2)
    e5 = tuple(int(i == 4) for i in range(5))
    assert restrict(rep, span(5, [e5])).as_tuple() == (1, 0, 1, 1, 1, 0, 0, 0, 0)
    with pytest.raises(ZeroSubspace):
        restrict(rep, zero(5))


def test_is_stable_examples(catalog, subdims):
    pi = three_lines()
    sd = search_subdims(pi)
    assert is_stable(pi, (1, 1, 1), sd).status is Status.STABLE
    v = is_stable(pi, (2, 1, 1), sd)
    assert v.status is Status.STRICTLY_SEMISTABLE
    assert v.vector.as_tuple() == (1, 1, 0, 0)
    assert is_stable(pi, (3, 1, 1), sd).status is Status.UNSTABLE
    p1 = catalog["P1"].rep()
    assert is_stable(p1, (1,) * 6, subdims("P1")).status is Status.STRICTLY_SEMISTABLE
    with pytest.raises(EmptyList):
        is_stable(pi, (1, 1, 1), [])


def test_search_examples(catalog, subdims):
    assert [v.as_tuple() for v in search_subdims(three_lines())] == [
        (1, 0, 0, 1), (1, 0, 1, 0), (1, 1, 0, 0)]
    listed = {r.vector for r in catalog.tables["(1,1,1,1)"].rows}
    assert {v.as_tuple() for v in subdims("(1,1,1,1)", 2)} == listed
    z = make_rep(primitive(1, 1), 3, [zero(3), zero(3)])
    assert [v.as_tuple() for v in search_subdims(z)] == [(1, 0, 0)]


def test_search_witnesses_verify(catalog, subdims):
    for key in ("P1", "(1,2,3)#1"):
        rep = catalog[key].rep()
        assert all(verify_witness(rep, v) for v in subdims(key))


def test_maximal_vectors_drop_dominated():
    vs = [SubdimVector(1, (1, 0)), SubdimVector(2, (1, 0)), SubdimVector(1, (0, 0)),
          SubdimVector(2, (1, 1))]
    assert [v.as_tuple() for v in maximal_vectors(vs)] == [(1, 1, 0), (2, 1, 1)]


def test_A_matrix_for_three_lines():
    pi = three_lines()
    A = build_A_matrix(pi, search_subdims(pi))
    assert A.m == 3
    assert set(A.subdim_rows()) == {(H, -H, -H), (-H, H, -H), (-H, -H, H)}
    assert A.rows[3:] == ((-1, 0, 0), (0, -1, 0), (0, 0, -1))
    with pytest.raises(EmptyList):
        build_A_matrix(pi, [])


def test_A_matrix_zero_row_for_the_whole_space():
    pi = three_lines()
    A = build_A_matrix(pi, [SubdimVector(2, (1, 1, 1))])
    assert A.rows[0] == (0, 0, 0)


def test_rays_for_three_lines():
    pi = three_lines()
    A = build_A_matrix(pi, search_subdims(pi))
    for method in ("dd", "brute"):
        assert set(extremal_rays(A, method).rays) == {(1, 1, 0), (1, 0, 1), (0, 1, 1)}


def test_rays_of_the_orthant():
    A = StabilityMatrix(tuple(tuple(Fraction(-int(i == j)) for j in range(3)) for i in range(3)), 0)
    assert set(extremal_rays(A).rays) == {(1, 0, 0), (0, 1, 0), (0, 0, 1)}
    assert extremal_rays(A).extreme_points() == ((0, 0, 0),)


@pytest.mark.parametrize("entry", ["P1", "(1,2,2)#1", "(1,2,2)#2"])
def test_double_description_matches_brute_force(catalog, subdims, entry):
    A = build_A_matrix(catalog[entry].rep(), subdims(entry))
    assert extremal_rays(A, "dd").rays == extremal_rays(A, "brute").rays


@st.composite
def cone_rows(draw):
    n = draw(st.integers(min_value=2, max_value=4))
    m = draw(st.integers(min_value=1, max_value=5))
    ent = st.integers(min_value=-3, max_value=3)
    return n, [tuple(Fraction(draw(ent)) for _ in range(n)) for _ in range(m)]


@settings(max_examples=150, deadline=None)
@given(cone_rows())
def test_double_description_matches_brute_force_on_random_cones(data):
    n, rows = data
    A = StabilityMatrix(tuple(rows) + tuple(tuple(Fraction(-int(i == j)) for j in range(n))
                                            for i in range(n)), len(rows))
    assert extremal_rays(A, "dd").rays == extremal_rays(A, "brute").rays


def test_membership_examples(catalog, subdims):
    pi = three_lines()
    cone = weight_cone(pi)
    assert cone_membership(cone, (1, 1, 1)) is Membership.INTERIOR
    assert cone.matrix.apply((1, 1, 1))[:3] == (-H, -H, -H)
    assert cone_membership(cone, (2, 1, 1)) is Membership.BOUNDARY
    assert cone_membership(cone, (1, 1, 0)) is Membership.OUTSIDE
    assert cone_membership(cone, (3, 1, 1)) is Membership.OUTSIDE
    with pytest.raises(DimensionMismatch):
        cone_membership(cone, (1, 1))
    p1 = catalog["P1"].rep()
    cone = extremal_rays(build_A_matrix(p1, subdims("P1")))
    assert cone_membership(cone, (1,) * 6) is Membership.BOUNDARY
    for r in cone.rays:
        assert cone_membership(cone, r) in (Membership.BOUNDARY, Membership.OUTSIDE)
        assert all(v <= 0 for v in cone.matrix.apply(r))


def test_extend_weight_example():
    pi = three_lines()
    ext = extend_weight(pi, (1, 1, 1), span(2, [(1, 0)]))
    assert ext.gap == H
    assert ext.weight.alphas == (1, 1, 1, Fraction(1, 4))
    assert ext.verdict.stable
    with pytest.raises(ValueError):
        extend_weight(pi, (1, 1, 1), full(2))
    with pytest.raises(NotStable):
        extend_weight(pi, (2, 1, 1), span(2, [(1, 0)]))


def test_extend_weight_iterates():
    pi = three_lines()
    chi = Weight((1, 1, 1))
    for v in [(1, 0), (1, 2), (3, -1)]:
        ext = extend_weight(pi, chi, span(2, [v]))
        assert ext.verdict.stable
        pi, chi = ext.rep, ext.weight
    assert len(pi.poset) == 6


@pytest.mark.parametrize("family", ["(1,1,1,1)", "(2,2,2)", "(1,3,3)", "(1,2,5)", "(N,4)"])
def test_search_covers_the_reference_tables(catalog, subdims, family):
    found = subdims(family, 2)
    listed = [SubdimVector(r.vector[0], tuple(r.vector[1:])) for r in catalog.tables[family].rows]
    for v in listed:
        assert any(f.as_tuple() == v.as_tuple() or f.dominates(v) for f in found), v
    if family in ("(1,1,1,1)", "(2,2,2)", "(1,3,3)"):
        assert {f.as_tuple() for f in found} == {v.as_tuple() for v in listed}
