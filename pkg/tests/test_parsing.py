"""Printer/parser round trips and the golden text format."""

import pytest

from mepack.algebra import (
    ParseError,
    format_expression,
    format_ladder,
    format_phase,
    format_weyl,
    parse_expression,
    parse_ladder,
    parse_phase,
    parse_weyl,
)


GOLDEN_WEYL = [
    "(3/2)*V3*q^2*p + i*hbar*q",
    "q*p",
    "-q^2 + 2*p",
    "Q*P + (1/2)*i*hbar",
    "i*hbar*(12*p*q^2*p - 6*hbar^2)",
    "p^2/(2*m) + V0 + V1*q + (1/2)*V2*q^2 + (1/6)*V3*q^3 + (1/24)*V4*q^4",
]


@pytest.mark.parametrize("text", GOLDEN_WEYL)
def test_weyl_round_trip(text):
    poly = parse_weyl(text)
    assert parse_weyl(format_weyl(poly)) == poly


GOLDEN_EXPR = [
    "Q^2*P^2 + Q^2*dP^2 + P^2*dQ^2 + dQ^2*dP^2",
    "-V1 - V2*Q - (1/2)*V3*Q^2",
    "3*i*dQ^3*dP*nu^-1",
    "(1/2+3/2*i)*t + 5",
    "21 - 2*nu^-2",
]


@pytest.mark.parametrize("text", GOLDEN_EXPR)
def test_expression_round_trip(text):
    expr = parse_expression(text)
    assert parse_expression(format_expression(expr)) == expr


def test_ladder_round_trip():
    poly = parse_ladder("2*Ad^2*A - i*A + (1/3)*Ad")
    assert parse_ladder(format_ladder(poly)) == poly


def test_phase_round_trip():
    poly = parse_phase("q^2*p - (5/7)*p^3 + m*q")
    assert parse_phase(format_phase(poly)) == poly


def test_word_order_is_respected():
    assert parse_weyl("q*p") != parse_weyl("p*q")
    assert parse_weyl("p*q") == parse_weyl("q*p - i*hbar")


def test_rational_literals_and_negative_powers():
    expr = parse_expression("3/2*nu^-2")
    assert expr == parse_expression("(3/2)/nu^2")


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_expression("q +")
    with pytest.raises(ParseError):
        parse_expression("2 ** 3")
    with pytest.raises(ParseError):
        parse_expression("unknown_symbol")
    with pytest.raises(ParseError):
        parse_expression("q*p")  # operator letters are not scalars
    with pytest.raises(ParseError):
        parse_weyl("A*q")  # mixed algebras
    with pytest.raises(ParseError):
        parse_weyl("q/(q+1)")  # only scalar monomial divisors


def test_scalar_coefficient_forms():
    assert format_expression(parse_expression("-i")) == "-i"
    assert format_expression(parse_expression("(1/2)*i*hbar")) == "(1/2)*i*hbar"
    mixed = parse_expression("(1/2 - 3*i)*Q")
    assert parse_expression(format_expression(mixed)) == mixed
