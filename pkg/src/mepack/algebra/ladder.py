"""Noncommutative polynomials in ladder operators with A Ad - Ad A = 1.

Normal form keeps every Ad (creation) left of every A (annihilation):
terms are (m, n) -> coefficient for Ad^m A^n.  The `to_ladder` substitution
realizes position and momentum on the packet-adapted oscillator,

    q = Q + dQ*s*(A + Ad),   p = P - i*dP*s*(A - Ad),

with s the symbol for 1/sqrt(nu) (s^2 -> 1/nu is enforced by the
expression layer).  Any hbar in incoming coefficients is rewritten as
2*dQ*dP/nu so the image algebra closes exactly.
"""

from __future__ import annotations

from typing import Dict, Mapping, Tuple

from .expression import Expr
from .numberpoly import NumberPolynomial
from .weyl import WeylPolynomial
from .words import swap_counts

Key = Tuple[int, int]  # exponents of Ad^m A^n

HBAR_AS_NU = (
    Expr.number(2) * Expr.symbol("dQ") * Expr.symbol("dP") / Expr.symbol("nu")
)


class LadderPolynomial:
    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Key, Expr] = ()):
        cleaned = {}
        for key, coeff in dict(terms).items():
            coeff = Expr.coerce(coeff)
            if not coeff.is_zero():
                cleaned[key] = coeff
        object.__setattr__(self, "_terms", cleaned)

    def __setattr__(self, *_):
        raise AttributeError("LadderPolynomial is immutable")

    # -- constructors -------------------------------------------------------------

    @classmethod
    def lower(cls, exponent: int = 1) -> "LadderPolynomial":
        return cls({(0, exponent): Expr.number(1)})

    @classmethod
    def raise_(cls, exponent: int = 1) -> "LadderPolynomial":
        return cls({(exponent, 0): Expr.number(1)})

    @classmethod
    def constant(cls, value) -> "LadderPolynomial":
        return cls({(0, 0): Expr.coerce(value)})

    @classmethod
    def coerce(cls, value) -> "LadderPolynomial":
        if isinstance(value, LadderPolynomial):
            return value
        return cls.constant(value)

    # -- queries ---------------------------------------------------------------------

    def terms(self):
        return sorted(self._terms.items())

    def coefficient(self, m: int, n: int) -> Expr:
        return self._terms.get((m, n), Expr())

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((m + n for m, n in self._terms), default=0)

    # -- ring operations ------------------------------------------------------------------

    def __add__(self, other):
        other = LadderPolynomial.coerce(other)
        terms = dict(self._terms)
        for key, coeff in other._terms.items():
            acc = terms.get(key, Expr()) + coeff
            if acc.is_zero():
                terms.pop(key, None)
            else:
                terms[key] = acc
        return LadderPolynomial(terms)

    __radd__ = __add__

    def __neg__(self):
        return LadderPolynomial({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-LadderPolynomial.coerce(other))

    def __rsub__(self, other):
        return LadderPolynomial.coerce(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, LadderPolynomial):
            other = LadderPolynomial.constant(other)
        terms: Dict[Key, Expr] = {}
        for (m1, n1), c1 in self._terms.items():
            for (m2, n2), c2 in other._terms.items():
                # reduce Ad^m1 A^n1 Ad^m2 A^n2; contraction factor is +1
                coeff = c1 * c2
                for j, count in swap_counts(n1, m2).items():
                    key = (m1 + m2 - j, n1 + n2 - j)
                    acc = terms.get(key, Expr()) + coeff * count
                    if acc.is_zero():
                        terms.pop(key, None)
                    else:
                        terms[key] = acc
        return LadderPolynomial(terms)

    def __rmul__(self, other):
        return LadderPolynomial.coerce(other) * self

    def __pow__(self, n: int):
        out = LadderPolynomial.constant(1)
        for _ in range(n):
            out = out * self
        return out

    def adjoint(self) -> "LadderPolynomial":
        return LadderPolynomial(
            {(n, m): c.conjugate() for (m, n), c in self._terms.items()}
        )

    def __eq__(self, other):
        if isinstance(other, LadderPolynomial):
            return self._terms == other._terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        from .parsing import format_ladder

        return format_ladder(self)


def ladder_q() -> LadderPolynomial:
    """Position operator image: Q + dQ*s*(A + Ad)."""
    amp = Expr.symbol("dQ") * Expr.symbol("s")
    return LadderPolynomial(
        {(0, 0): Expr.symbol("Q"), (0, 1): amp, (1, 0): amp}
    )


def ladder_p() -> LadderPolynomial:
    """Momentum operator image: P - i*dP*s*(A - Ad)."""
    amp = Expr.i() * Expr.symbol("dP") * Expr.symbol("s")
    return LadderPolynomial(
        {(0, 0): Expr.symbol("P"), (0, 1): -amp, (1, 0): amp}
    )


def to_ladder(x: WeylPolynomial, packet=None) -> LadderPolynomial:
    """Rewrite a Weyl polynomial on the packet-adapted ladder operators.

    `packet` is only consulted for its validity (numeric packets must have
    nu > 1); the substitution itself is purely symbolic, as are the
    returned coefficients.
    """
    if packet is not None:
        packet.require_quantum(strict=True)
    lq, lp = ladder_q(), ladder_p()
    out = LadderPolynomial()
    # cache powers; typical inputs reuse many exponents
    qpow = {0: LadderPolynomial.constant(1)}
    ppow = {0: LadderPolynomial.constant(1)}
    for (a, b), coeff in x.terms():
        for e, cache, base in ((a, qpow, lq), (b, ppow, lp)):
            while e not in cache:
                top = max(cache)
                cache[top + 1] = cache[top] * base
        c = coeff.substitute({"hbar": HBAR_AS_NU})
        out = out + c * (qpow[a] * ppow[b])
    return out


def diagonal_part(x: LadderPolynomial) -> NumberPolynomial:
    """Keep the balanced words Ad^m A^m; in the number basis these act as
    falling factorials k(k-1)...(k-m+1)."""
    return NumberPolynomial(
        {m: c for (m, n), c in x._terms.items() if m == n}
    )
