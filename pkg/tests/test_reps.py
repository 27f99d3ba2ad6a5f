from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from posetunit.errors import (DependentVectors, DimensionMismatch, NestingViolation,
                              NotAComplement, PosetMismatch)
from posetunit.linalg import RationalMatrix, full, span, zero
from posetunit.poset import make_poset, primitive
from posetunit.reps import (Kind, Verdict, classify, dim_vector, direct_sum, dual_rep,
                            extended_rep, hom_space, is_morphism, is_quite_sincere,
                            linearly_equivalent, make_rep, raw_profile, split_by_idempotent,
                            zero_rep)


def three_lines():
    return make_rep(primitive(1, 1, 1), 2,
                    [span(2, [(1, 0)]), span(2, [(0, 1)]), span(2, [(1, 1)])])


def test_make_rep_valid_and_nesting():
    assert three_lines().raw_dims == (1, 1, 1)
    chain = make_poset("xy", [("x", "y")])
    with pytest.raises(NestingViolation) as exc:
        make_rep(chain, 2, [span(2, [(1, 0)]), span(2, [(0, 1)])])
    assert (exc.value.lower, exc.value.upper) == ("x", "y")
    assert make_rep(chain, 3, [full(3), full(3)]).raw_dims == (3, 3)
    with pytest.raises(DimensionMismatch):
        make_rep(chain, 3, [full(2), full(3)])


def test_dim_vector_and_raw_profile(catalog):
    assert dim_vector(catalog["(2,2,2)"].rep(2)).as_tuple() == (3, 1, 1, 1, 1, 1, 1)
    assert dim_vector(catalog["(1,2,5)"].rep(2)).as_tuple() == (6, 3, 2, 2, 1, 1, 1, 1, 1)
    z = zero_rep(primitive(1, 2), 3)
    assert dim_vector(z).as_tuple() == (3, 0, 0, 0)
    assert raw_profile(three_lines()).as_tuple() == (2, 1, 1, 1)


def test_direct_sum():
    pi = three_lines()
    assert direct_sum(pi, zero_rep(pi.poset, 0)).spaces == pi.spaces
    assert raw_profile(direct_sum(pi, pi)).as_tuple() == (4, 2, 2, 2)
    with pytest.raises(PosetMismatch):
        direct_sum(pi, zero_rep(primitive(1, 2), 1))


def test_pi_alpha_is_not_the_visible_direct_sum(catalog):
    pi = catalog["pi_alpha"].rep(1)
    blocks = make_rep(pi.poset, 2, [span(2, [(1, 0)]), span(2, [(0, 1)]),
                                    span(2, [(1, 1)]), span(2, [(1, 1)])])
    assert linearly_equivalent(pi, direct_sum(blocks, blocks)).verdict is not Verdict.EQUIVALENT


def _hom_oracle_dim(r1, r2) -> int:
    """dim Hom via sympy: C maps each basis vector of V_i into W_i."""
    n, m = r1.ambient_dim, r2.ambient_dim
    unknowns = sympy.symbols(f"c0:{m * n}")
    C = sympy.Matrix(m, n, unknowns)
    eqs = []
    for v, w in zip(r1.spaces, r2.spaces):
        ann = sympy.Matrix([list(r) for r in w.perp().rows]) if w.dim < m else None
        if ann is None:
            continue
        for b in v.rows:
            eqs += list(ann * (C * sympy.Matrix(list(b))))
    if not eqs:
        return m * n
    A, _ = sympy.linear_eq_to_matrix(eqs, unknowns)
    return m * n - A.rank()


def test_hom_examples(catalog):
    pi = three_lines()
    assert hom_space(pi, pi).dim == 1
    alpha = catalog["pi_alpha"].rep(1)
    assert hom_space(alpha, alpha).dim >= 2
    assert hom_space(pi, zero_rep(pi.poset, 0)).dim == 0


@pytest.mark.parametrize("entry", ["(1,1,1)", "(1,2,2)#1", "P1", "(1,2,3)#2", "P5"])
def test_hom_matches_oracle(catalog, entry):
    rep = catalog[entry].rep()
    H = hom_space(rep, rep)
    assert H.dim == _hom_oracle_dim(rep, rep)
    assert all(is_morphism(C, rep, rep) for C in H.basis)


def test_hom_matches_oracle_on_pi_alpha(catalog):
    rep = catalog["pi_alpha"].rep(1)
    assert hom_space(rep, rep).dim == _hom_oracle_dim(rep, rep) == 2


def test_classify_examples(catalog):
    assert classify(three_lines()).kind is Kind.BRICK
    assert classify(catalog["pi_alpha"].rep(1)).kind is Kind.INDECOMPOSABLE
    c = classify(catalog["pi_alpha"].rep(0))
    assert c.kind is Kind.DECOMPOSABLE
    e = c.witness
    assert e @ e == e and not e.is_zero() and e != RationalMatrix.identity(4)
    a, b = split_by_idempotent(catalog["pi_alpha"].rep(0), e)
    assert a.ambient_dim + b.ambient_dim == 4


def test_linear_equivalence_examples(catalog):
    pi = three_lines()
    res = linearly_equivalent(pi, pi)
    assert res.equivalent and is_morphism(res.witness, pi, pi)
    fam = catalog["(1,1,1,1)"]
    assert not linearly_equivalent(fam.rep(2), fam.rep(3)).equivalent
    other = make_rep(pi.poset, 3, [span(3, [(1, 0, 0)])] * 3)
    assert linearly_equivalent(pi, other).verdict is Verdict.INEQUIVALENT


def test_equivalence_finds_transformed_copy():
    pi = three_lines()
    C = RationalMatrix.from_rows([[2, 1], [1, 1]])
    res = linearly_equivalent(pi, pi.transform(C))
    assert res.equivalent
    assert all(v.image(res.witness) == w for v, w in zip(pi.spaces, pi.transform(C).spaces))


def test_quite_sincere(catalog):
    assert is_quite_sincere(catalog["P1"].rep())
    pi = three_lines()
    bad = make_rep(pi.poset, 2, [full(2), pi.spaces[1], pi.spaces[2]])
    assert is_quite_sincere(bad).clause == "proper"
    bad = make_rep(pi.poset, 2, [zero(2), pi.spaces[1], pi.spaces[2]])
    assert is_quite_sincere(bad).clause == "nonzero"


def test_dual_examples(catalog):
    one = make_rep(primitive(1), 1, [zero(1)])
    assert dual_rep(one).spaces == (full(1),)
    pi = catalog["P1"].rep()
    d = dual_rep(pi)
    assert d.raw_dims == tuple(pi.ambient_dim - k for k in pi.raw_dims)
    assert linearly_equivalent(dual_rep(d).relabel(pi.poset), pi).equivalent


def test_dual_with_bad_complement():
    pi = three_lines()
    comps = {"a1": span(2, [(1, 0)]), "b1": span(2, [(1, 0)]), "c1": span(2, [(1, -1)])}
    with pytest.raises(NotAComplement):
        dual_rep(pi, comps)


def test_extended_rep_examples(catalog):
    pi = three_lines()
    ext = extended_rep(pi, [], (1, 0), (0, 1), 5)
    assert ext["p~"] == span(2, [(1, 5)])
    base = catalog["(1,2,2)#1"].rep()
    ext = extended_rep(base, ["a1"], (1, 0, 0), (0, 0, 1), 2)
    assert ext["p~"] == span(3, [(1, 1, 1), (1, 0, 2)])
    with pytest.raises(DependentVectors):
        extended_rep(pi, [], (1, 0), (1, 0), 2)


# random reps on small posets for the direct-sum additivity property

@st.composite
def small_reps(draw):
    n = draw(st.integers(min_value=1, max_value=3))
    p = primitive(1, 2)
    ent = st.integers(min_value=-2, max_value=2)
    a = span(n, [tuple(draw(ent) for _ in range(n)) for _ in range(draw(st.integers(0, n)))])
    b1 = span(n, [tuple(draw(ent) for _ in range(n)) for _ in range(draw(st.integers(0, n)))])
    b2 = b1 + span(n, [tuple(draw(ent) for _ in range(n))])
    return make_rep(p, n, [a, b1, b2])


@settings(max_examples=60, deadline=None)
@given(small_reps(), small_reps())
def test_dim_vectors_add_under_direct_sum(r1, r2):
    s = direct_sum(r1, r2)
    d1, d2, ds = dim_vector(r1).as_tuple(), dim_vector(r2).as_tuple(), dim_vector(s).as_tuple()
    assert ds == tuple(a + b for a, b in zip(d1, d2))


@settings(max_examples=40, deadline=None)
@given(small_reps())
def test_hom_dim_matches_oracle_on_random_reps(r):
    assert hom_space(r, r).dim == _hom_oracle_dim(r, r)
