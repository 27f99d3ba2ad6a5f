import pytest

from posetunit.errors import CycleError, DimensionMismatch, DuplicateElement, EmptyPoset
from posetunit.poset import (CRITICAL_NAMES, contains_critical, critical_poset, extend_poset,
                             find_isomorphism, is_finite_type, is_primitive, make_poset, n_poset,
                             primitive, quadratic_form, width)

FAMILY_VECTORS = {
    "(1,1,1,1)": (2, 1, 1, 1, 1),
    "(2,2,2)": (3, 1, 1, 1, 1, 1, 1),
    "(1,3,3)": (4, 2, 1, 1, 1, 1, 1, 1),
    "(1,2,5)": (6, 3, 2, 2, 1, 1, 1, 1, 1),
    "(N,4)": (5, 2, 1, 1, 2, 1, 1, 1, 1),
}


def test_hasse_edges_of_n2():
    p = make_poset(["a1", "a2", "b1", "b2", "c1", "c2"],
                   [("a1", "a2"), ("b1", "b2"), ("b1", "a2"), ("c1", "c2")])
    assert p.hasse_edges == {("a1", "a2"), ("b1", "b2"), ("b1", "a2"), ("c1", "c2")}


def test_singleton_and_transitivity():
    assert make_poset(["x"]).hasse_edges == frozenset()
    p = make_poset("xyz", [("x", "y"), ("y", "z")])
    assert p.lt("x", "z")
    assert p.hasse_edges == {("x", "y"), ("y", "z")}


def test_construction_errors():
    with pytest.raises(CycleError):
        make_poset("xy", [("x", "y"), ("y", "x")])
    with pytest.raises(DuplicateElement):
        make_poset(["x", "x"])


def test_width():
    assert width(primitive(4)) == 1
    assert width(primitive(1, 1, 1, 1)) == 4
    assert width(n_poset(4)) == 3
    with pytest.raises(EmptyPoset):
        width(make_poset([]))


def test_is_primitive():
    assert is_primitive(primitive(1, 2, 5)) == (True, (1, 2, 5))
    assert is_primitive(n_poset(2))[0] is False
    assert is_primitive(primitive(1)) == (True, (1,))


def test_contains_critical():
    name, emb = contains_critical(primitive(1, 1, 1, 1, 1))
    assert name == "(1,1,1,1)"
    assert contains_critical(primitive(1, 2, 4)) is None
    name, emb = contains_critical(n_poset(4))
    assert name == "(N,4)"
    assert all(k == v for k, v in emb.items())


def test_finite_type_basics():
    assert is_finite_type(primitive(10))
    assert is_finite_type(primitive(1, 2, 4))
    for name in CRITICAL_NAMES:
        assert not is_finite_type(critical_poset(name))


@pytest.mark.parametrize("name", CRITICAL_NAMES)
def test_family_vectors_are_imaginary_roots(name):
    assert quadratic_form(critical_poset(name), FAMILY_VECTORS[name]) == 0


def test_quadratic_form_small_values():
    for p in (primitive(1, 2), n_poset(4)):
        assert quadratic_form(p, (1,) + (0,) * len(p)) == 1
    with pytest.raises(DimensionMismatch):
        quadratic_form(primitive(1, 1), (1, 0))


def test_quadratic_form_symmetric_in_incomparable_elements():
    p = primitive(1, 1, 1)
    x = (3, 1, 2, 0)
    swapped = (3, 2, 1, 0)
    assert quadratic_form(p, x) == quadratic_form(p, swapped)


def test_extend_poset_examples():
    assert find_isomorphism(extend_poset(primitive(1, 1, 1), []), primitive(1, 1, 1, 1))
    assert find_isomorphism(extend_poset(primitive(1, 2, 4), ["a1", "b1"]), n_poset(4))
    assert find_isomorphism(extend_poset(primitive(1, 2, 2), ["a1"]), primitive(2, 2, 2))


def test_extend_poset_keeps_old_order():
    p = primitive(1, 2, 4)
    q = extend_poset(p, ["a1", "b1"])
    assert len(q) == len(p) + 1
    assert q.induced(p.elements) == p


def test_opposite_and_describe():
    p = n_poset(2)
    assert p.opposite().opposite() == p
    assert p.opposite().lt("a2", "b1")
    assert "b1 < a2" in p.describe()
