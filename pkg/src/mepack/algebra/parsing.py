"""Plain-text printer and parser for expressions and operator polynomials.

Grammar (round-trips with the printers):

    sum     := product (('+' | '-') product)*
    product := factor (('*' | '/') factor)*
    factor  := atom ('^' ['-'] INT)?
    atom    := INT | 'i' | SYMBOL | 'q' | 'p' | 'A' | 'Ad' | '(' sum ')' | '-' atom

Scalar parts commute; the operator letters q, p (Weyl) and A, Ad (ladder)
keep their written order.  Example: `(3/2)*V3*q^2*p + i*hbar*q`.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, List, Tuple

from .expression import Expr, _symbol_rank, is_known_symbol
from .ladder import LadderPolynomial
from .phase import PhasePolynomial
from .scalar import Scalar
from .weyl import WeylPolynomial

Word = Tuple[str, ...]
TermList = List[Tuple[Expr, Word]]

_OPERATOR_LETTERS = ("q", "p", "A", "Ad")


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------

def _format_fraction(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _format_scalar(c: Scalar, *, bare: bool = False) -> str:
    """Token for a scalar; parenthesized where needed for re-parsing."""
    if c.im == 0:
        s = _format_fraction(c.re)
        if c.re.denominator != 1 and not bare:
            return f"({s})"
        return s
    if c.re == 0:
        if c.im == 1:
            return "i"
        if c.im == -1:
            return "-i"
        mag = _format_fraction(abs(c.im))
        mag = f"({mag})" if abs(c.im).denominator != 1 else mag
        return f"{'-' if c.im < 0 else ''}{mag}*i"
    re_part = _format_fraction(c.re)
    im_mag = "i" if abs(c.im) == 1 else f"{_format_fraction(abs(c.im))}*i"
    return f"({re_part}{'+' if c.im > 0 else '-'}{im_mag})"


def _format_mono(mono) -> str:
    parts = []
    for sym, exp in sorted(mono, key=lambda it: _symbol_rank(it[0])):
        parts.append(sym if exp == 1 else f"{sym}^{exp}")
    return "*".join(parts)


def _format_term(coeff: Scalar, mono_str: str) -> str:
    if not mono_str:
        return _format_scalar(coeff)
    if coeff == Scalar(1):
        return mono_str
    if coeff == Scalar(-1):
        return f"-{mono_str}"
    return f"{_format_scalar(coeff)}*{mono_str}"


def _join_terms(terms: List[str]) -> str:
    if not terms:
        return "0"
    out = terms[0]
    for t in terms[1:]:
        if t.startswith("-"):
            out += f" - {t[1:]}"
        else:
            out += f" + {t}"
    return out


def format_expression(expr: Expr) -> str:
    return _join_terms([_format_term(c, _format_mono(m)) for m, c in expr.terms()])


def _format_operator(terms, word_of) -> str:
    rendered = []
    for key, coeff in terms:
        word = word_of(key)
        for mono, scalar in coeff.terms():
            sym = _format_mono(mono)
            tail = "*".join(x for x in (sym, word) if x)
            rendered.append(_format_term(scalar, tail))
    return _join_terms(rendered)


def _power_word(letter: str, exp: int) -> str:
    if exp == 0:
        return ""
    return letter if exp == 1 else f"{letter}^{exp}"


def format_weyl(poly: WeylPolynomial) -> str:
    return _format_operator(
        poly.terms(),
        lambda ab: "*".join(x for x in (_power_word("q", ab[0]), _power_word("p", ab[1])) if x),
    )


def format_phase(poly: PhasePolynomial) -> str:
    return _format_operator(
        poly.terms(),
        lambda ab: "*".join(x for x in (_power_word("q", ab[0]), _power_word("p", ab[1])) if x),
    )


def format_ladder(poly: LadderPolynomial) -> str:
    return _format_operator(
        poly.terms(),
        lambda mn: "*".join(x for x in (_power_word("Ad", mn[0]), _power_word("A", mn[1])) if x),
    )


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9]*)|([+\-*/^()]))")


class ParseError(ValueError):
    pass


def _tokenize(text: str) -> List[str]:
    tokens, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos and not text[pos:].strip():
            break
        if not m:
            raise ParseError(f"bad character at {text[pos:]!r}")
        tokens.append(m.group(m.lastindex))
        pos = m.end()
    if text[pos:].strip():
        raise ParseError(f"bad character at {text[pos:]!r}")
    return tokens


def _merge(terms: TermList) -> TermList:
    acc: Dict[Word, Expr] = {}
    for coeff, word in terms:
        total = acc.get(word, Expr()) + coeff
        if total.is_zero():
            acc.pop(word, None)
        else:
            acc[word] = total
    return [(c, w) for w, c in acc.items()]


def _mul_terms(a: TermList, b: TermList) -> TermList:
    return _merge([(c1 * c2, w1 + w2) for c1, w1 in a for c2, w2 in b])


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, tok):
        got = self.take()
        if got != tok:
            raise ParseError(f"expected {tok!r}, got {got!r}")

    def parse(self) -> TermList:
        out = self.sum()
        if self.peek() is not None:
            raise ParseError(f"trailing input at {self.peek()!r}")
        return out

    def sum(self) -> TermList:
        terms = self.product()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.product()
            if op == "-":
                rhs = [(-c, w) for c, w in rhs]
            terms = _merge(terms + rhs)
        return terms

    def product(self) -> TermList:
        terms = self.factor()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.factor()
            if op == "/":
                if len(rhs) != 1 or rhs[0][1]:
                    raise ParseError("can only divide by a scalar monomial")
                rhs = [(rhs[0][0].inverse(), ())]
            terms = _mul_terms(terms, rhs)
        return terms

    def factor(self) -> TermList:
        if self.peek() == "-":
            self.take()
            return [(-c, w) for c, w in self.factor()]
        base = self.atom()
        if self.peek() == "^":
            self.take()
            sign = 1
            if self.peek() == "-":
                self.take()
                sign = -1
            tok = self.take()
            if tok is None or not tok.isdigit():
                raise ParseError(f"bad exponent {tok!r}")
            exp = sign * int(tok)
            if exp < 0:
                if len(base) != 1 or base[0][1]:
                    raise ParseError("negative power of a non-scalar")
                return [(base[0][0].inverse() ** (-exp), ())]
            out: TermList = [(Expr.number(1), ())]
            for _ in range(exp):
                out = _mul_terms(out, base)
            return out
        return base

    def atom(self) -> TermList:
        tok = self.take()
        if tok is None:
            raise ParseError("unexpected end of input")
        if tok == "(":
            inner = self.sum()
            self.expect(")")
            return inner
        if tok.isdigit():
            return [(Expr.number(int(tok)), ())]
        if tok == "i":
            return [(Expr.i(), ())]
        if tok in _OPERATOR_LETTERS:
            return [(Expr.number(1), (tok,))]
        if is_known_symbol(tok):
            return [(Expr.symbol(tok), ())]
        raise ParseError(f"unknown name {tok!r}")


def _parse_terms(text: str) -> TermList:
    return _Parser(text).parse()


def parse_expression(text: str) -> Expr:
    out = Expr()
    for coeff, word in _parse_terms(text):
        if word:
            raise ParseError(f"operator letters not allowed here: {'*'.join(word)}")
        out = out + coeff
    return out


def parse_weyl(text: str) -> WeylPolynomial:
    out = WeylPolynomial()
    for coeff, word in _parse_terms(text):
        if any(l not in ("q", "p") for l in word):
            raise ParseError("ladder letters in a Weyl expression")
        out = out + WeylPolynomial.from_word(word, coeff)
    return out


def parse_phase(text: str) -> PhasePolynomial:
    out = PhasePolynomial()
    for coeff, word in _parse_terms(text):
        if any(l not in ("q", "p") for l in word):
            raise ParseError("ladder letters in a phase-space expression")
        a, b = word.count("q"), word.count("p")
        out = out + PhasePolynomial({(a, b): coeff})
    return out


def parse_ladder(text: str) -> LadderPolynomial:
    out = LadderPolynomial()
    for coeff, word in _parse_terms(text):
        if any(l not in ("A", "Ad") for l in word):
            raise ParseError("Weyl letters in a ladder expression")
        term = LadderPolynomial.constant(coeff)
        for letter in word:
            term = term * (LadderPolynomial.lower() if letter == "A" else LadderPolynomial.raise_())
        out = out + term
    return out
