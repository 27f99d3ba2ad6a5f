from fractions import Fraction

import pytest

from posetunit.errors import IndexOutOfRange, ParseError
from posetunit.linalg import span
from posetunit.notation import (parse_document, parse_poset, parse_rep, parse_row, parse_space,
                                render_poset, render_rep, render_space)
from posetunit.poset import primitive


def test_digit_groups():
    assert parse_space("V_{123,24}", 4) == span(4, [(1, 1, 1, 0), (0, 1, 0, 1)])
    assert parse_space("V_1", 3) == span(3, [(1, 0, 0)])
    assert parse_space("V_{1,2}", 3) == span(3, [(1, 0, 0), (0, 1, 0)])


def test_lambda_coefficients():
    assert parse_space("⟨e_1+λ e_2⟩", 2, 2) == span(2, [(1, 2)])
    assert parse_space("<e1 + lambda e2>", 2, Fraction(1, 3)) == span(2, [(3, 1)])
    assert parse_space("<(λ-1)e1 + λ e2>", 2, 3) == span(2, [(2, 3)])
    assert parse_space("<e13, e2 + α e3 + e4>", 4, 5) == span(4, [(1, 0, 1, 0), (0, 1, 5, 1)])


def test_rational_coefficients_and_specials():
    assert parse_space("<e1 - 1/2 e3>", 3) == span(3, [(2, 0, -1)])
    assert parse_space("<0.5e1 + e2>", 2) == span(2, [(1, 2)])
    assert parse_space("0", 3).is_zero()
    assert parse_space("V", 3).is_full()


def test_index_out_of_range():
    with pytest.raises(IndexOutOfRange):
        parse_space("V_{9}", 4)
    with pytest.raises(IndexOutOfRange):
        parse_space("<e5>", 4)


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as exc:
        parse_space("<e1 + * e2>", 3)
    assert exc.value.position is not None
    with pytest.raises(ParseError):
        parse_space("<e1 + λ e2>", 2)          # λ unbound
    with pytest.raises(ParseError):
        parse_space("<λ λ e1>", 2, 2)          # nonlinear in λ


@pytest.mark.parametrize("text", ["<e123, e24>", "<e1 - 1/2 e3, e2>", "V_{13,2}", "<3e1 + 6e2>"])
def test_render_round_trip(text):
    s = parse_space(text, 4)
    assert parse_space(render_space(s), 4) == s


def test_row_literal():
    p = primitive(1, 1, 1)
    rep = parse_row("(C^2; <e1>; <e2>; <e12>)", p)
    assert rep.raw_dims == (1, 1, 1)
    rep = parse_row("(ℂ³; V_{123}; V_1; V_2)*", p)
    assert rep.ambient_dim == 3


def test_row_literal_errors():
    p = primitive(1, 1, 1)
    with pytest.raises(ParseError):
        parse_row("(C^2; <e1>; <e2>)", p)
    with pytest.raises(ParseError):
        parse_row("C^2; <e1>; <e2>; <e12>", p)


def test_poset_literal_round_trip():
    p = parse_poset("poset N2 { a1 < a2; b1 < b2; b1 < a2; c1 < c2 }")
    assert p.lt("b1", "a2") and not p.lt("a1", "b2")
    assert parse_poset(render_poset(p)) == p
    chain = parse_poset("poset C { x < y < z }")
    assert chain.lt("x", "z")


def test_rep_literal_round_trip():
    p = parse_poset("poset T { a; b; c }")
    rep = parse_rep("rep pi on T dim 2 { a = <e1>; b = <e2>; c = <e12> }", {"T": p})
    again = parse_rep(render_rep(rep), {"T": p})
    assert again.spaces == rep.spaces


def test_document_with_comments():
    text = """
    # two posets and a rep
    poset T { a; b; c }
    rep pi on T dim 2 { a = <e1>; b = <e2>; c = <e1 + λ e2> }
    """
    posets, reps = parse_document(text, lam=4)
    assert [p.name for p in posets] == ["T"]
    assert reps[0]["c"] == span(2, [(1, 4)])
