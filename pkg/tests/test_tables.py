from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tdcheck.fields import Rationals
from tdcheck.tables import (
    Add,
    Div,
    EvaluationError,
    Mul,
    Name,
    Neg,
    Num,
    ParseError,
    Pow,
    Sub,
    TableError,
    bundled_table_text,
    evaluate,
    format_expr,
    load_table,
    parse_label,
    parse_table,
    serialize_table,
)

QQ = Rationals()


# ---------------------------------------------------------------------------
# labels


def test_label_parse_and_canonical_text():
    for text in ("phi", "r", "lr2", "l2r3", "rl2r3l4r5", "lr2l3r4"):
        assert str(parse_label(text)) == text


def test_label_row_index():
    assert parse_label("phi").row_index == 0
    assert parse_label("r").row_index == 1
    assert parse_label("lr2").row_index == 1
    assert parse_label("rl2r3").row_index == 2
    assert parse_label("lr2l3r4").row_index == 2
    assert parse_label("rl2r3l4r5").row_index == 3


def test_label_rejects_noncanonical_forms():
    for bad in ("l1", "r0", "", "xyz", "phi2", "ll", "l2l3"):
        with pytest.raises(TableError):
            parse_label(bad)


# ---------------------------------------------------------------------------
# bundled assets


def test_d1_table_matches_hand_content():
    t = load_table(1)
    assert [str(l) for l in t.basis] == ["phi", "r"]
    phi, r = t.basis
    assert t.a_action[phi] == [(Name("th0"), phi), (Num(1), r)]
    assert t.a_action[r] == [(Name("th1"), r)]
    assert t.astar_action[r] == [(Name("ths1"), r), (Name("y1"), phi)]


def test_d2_lr2_entry_matches_hand_content():
    t = load_table(2)
    lr2 = parse_label("lr2")
    r2 = parse_label("r2")
    coeffs = t.a_action[lr2]
    assert coeffs[0] == (Name("th1"), lr2)
    assert coeffs[1] == (Sub(Name("y1"), Name("eps0")), r2)


@pytest.mark.parametrize("d", range(6))
def test_bundled_tables_roundtrip_byte_identical(d):
    text = bundled_table_text(d)
    table = parse_table(text)
    assert serialize_table(table) == text
    assert len(table.basis) == 2**d
    assert len(table.basis_rows) == d + 1


@pytest.mark.parametrize("d", range(6))
def test_bundled_tables_block_structure(d):
    table = load_table(d)
    for j, row in enumerate(table.basis_rows):
        for label in row:
            assert label.row_index == j
            assert table.a_action[label][0] == (Name(f"th{j}"), label)
            assert table.astar_action[label][0] == (Name(f"ths{j}"), label)


def test_unknown_scalar_name_is_rejected_with_position():
    text = bundled_table_text(5).replace("y4*beta^-1*lr2", "y6*beta^-1*lr2", 1)
    with pytest.raises(ParseError, match="y6"):
        parse_table(text)


def test_label_not_in_basis_is_rejected():
    text = bundled_table_text(1).replace("th1*r", "th1*lr2", 1)
    with pytest.raises(ParseError, match="not in basis"):
        parse_table(text)


def test_syntax_error_reports_line():
    text = bundled_table_text(1).replace("r : th1*r", "r : th1*&r", 1)
    with pytest.raises(ParseError, match="line"):
        parse_table(text)


def test_missing_header_is_rejected():
    with pytest.raises(ParseError, match="header"):
        parse_table("d = 1\n[basis]\nphi\n")


def test_entry_must_end_with_label():
    text = bundled_table_text(1).replace("r : th1*r", "r : th1*th0", 1)
    with pytest.raises(ParseError):
        parse_table(text)


def test_mutation_flips_exactly_one_coefficient():
    table = load_table(2)
    slots = table.coefficient_slots()
    assert len(slots) == 14  # 7 entries per action for the 4 basis labels
    action, src, k = slots[3]
    mutated = table.with_negated_coefficient(action, src, k)
    orig = (table.a_action if action == "a" else table.astar_action)[src][k]
    new = (mutated.a_action if action == "a" else mutated.astar_action)[src][k]
    assert new[0] == Neg(orig[0]) and new[1] == orig[1]
    assert serialize_table(mutated) != serialize_table(table)


# ---------------------------------------------------------------------------
# expressions


def test_evaluate_simple_tree():
    env = {"beta": Fraction(3), "y1": Fraction(5)}
    expr = Add(Mul(Name("y1"), Pow(Add(Name("beta"), Num(1)), -1)), Num(2))
    assert evaluate(expr, env, QQ) == Fraction(5, 4) + 2


def test_evaluate_reports_missing_name_and_zero_division():
    with pytest.raises(EvaluationError):
        evaluate(Name("y1"), {}, QQ)
    with pytest.raises(EvaluationError):
        evaluate(Div(Num(1), Name("beta")), {"beta": Fraction(0)}, QQ)
    with pytest.raises(EvaluationError):
        evaluate(Pow(Name("beta"), -2), {"beta": Fraction(0)}, QQ)


def test_format_expr_minimal_parentheses():
    assert format_expr(Pow(Add(Name("beta"), Num(1)), -1)) == "(beta+1)^-1"
    assert format_expr(Mul(Neg(Add(Name("beta"), Num(1))), Name("eps0"))) == "-(beta+1)*eps0"
    assert (
        format_expr(Div(Name("y5"), Mul(Name("beta"), Name("eps0"))))
        == "y5/(beta*eps0)"
    )
    assert format_expr(Sub(Num(1), Add(Num(2), Num(3)))) == "1-(2+3)"


# random canonical expression trees: parse(format(tree)) == tree

_names = st.sampled_from(["beta", "eps0", "eps1", "y1", "y5", "th0", "ths3"])


def _atoms():
    return st.one_of(st.integers(min_value=0, max_value=99).map(Num), _names.map(Name))


def _exprs(depth: int):
    if depth == 0:
        return _atoms()
    sub = _exprs(depth - 1)
    pow_base = st.one_of(_atoms(), sub.map(lambda e: e))
    return st.one_of(
        _atoms(),
        st.tuples(sub, sub).map(lambda t: Add(*t)),
        # canonical sums never carry a Neg right operand
        st.tuples(sub, sub).filter(lambda t: not isinstance(t[1], Neg)).map(
            lambda t: Sub(*t)
        ),
        st.tuples(sub, sub).filter(lambda t: not isinstance(t[1], Neg)).map(
            lambda t: Mul(*t)
        ),
        st.tuples(sub, sub).filter(lambda t: not isinstance(t[1], Neg)).map(
            lambda t: Div(*t)
        ),
        st.tuples(pow_base, st.sampled_from([-3, -1, 2, 3, 4])).map(
            lambda t: Pow(*t)
        ),
        sub.filter(lambda e: not isinstance(e, Neg)).map(Neg),
    )


@settings(max_examples=300, deadline=None)
@given(_exprs(3))
def test_expression_print_parse_roundtrip(tree):
    from tdcheck.tables import _ExprParser, _Tokens

    text = format_expr(tree)
    parser = _ExprParser(_Tokens(text, 1), 5)
    back = parser.expr()
    assert parser.t.peek() is None
    assert back == tree
