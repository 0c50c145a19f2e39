"""Commutative Poisson layer and the noncommutative Weyl algebra."""

import random
from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from mepack.algebra import (
    Expr,
    PhasePolynomial,
    WeylPolynomial,
    commutator,
    parse_phase,
    parse_weyl,
    poisson_bracket,
)
from mepack.algebra.words import swap_counts


# ---------------------------------------------------------------------------
# Poisson bracket
# ---------------------------------------------------------------------------


def test_poisson_q_with_free_hamiltonian():
    h = parse_phase("p^2/(2*m) + V0 + V1*q + (1/2)*V2*q^2")
    assert poisson_bracket(PhasePolynomial.q(), h) == parse_phase("p/m")


def test_poisson_antisymmetry_trivial():
    q = PhasePolynomial.q()
    assert poisson_bracket(q, q).is_zero()


def test_poisson_cubic_potential_term():
    f = parse_phase("(1/6)*V3*q^3")
    assert poisson_bracket(PhasePolynomial.p(), f) == parse_phase("-(1/2)*V3*q^2")


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))
def test_poisson_leibniz(a, b, c, d):
    f = PhasePolynomial({(a, b): Expr.number(1)})
    g = PhasePolynomial({(c, d): Expr.number(2)})
    h = parse_phase("q^2*p + 3*p^2")
    assert poisson_bracket(f * g, h) == f * poisson_bracket(g, h) + poisson_bracket(f, h) * g


# ---------------------------------------------------------------------------
# Weyl normal ordering
# ---------------------------------------------------------------------------


def test_defining_commutator():
    assert commutator(WeylPolynomial.q(), WeylPolynomial.p()) == parse_weyl("i*hbar")


def test_commutator_p_q2_brute_force_and_matrix():
    got = commutator(WeylPolynomial.p(), parse_weyl("q^2"))
    assert got == parse_weyl("-2*i*hbar*q")
    # independent check on a small truncated matrix representation
    n = 4
    a = np.diag(np.sqrt(np.arange(1, n)), 1)
    q = (a + a.T) / np.sqrt(2)
    p = -1j * (a - a.T) / np.sqrt(2)
    lhs = p @ (q @ q) - (q @ q) @ p
    rhs = -2j * q
    assert np.allclose(lhs[: n - 2, : n - 2], rhs[: n - 2, : n - 2], atol=1e-12)


def test_fifth_derivative_commutator_identity():
    lhs = commutator(parse_weyl("(3/2)*V3*V4/m^2*(q^3*p + p*q^3)"), parse_weyl("p^2/(2*m)")) \
        + commutator(parse_weyl("(1/2)*V3*V4/m^3*(1/3)*q^3"), parse_weyl("p^3"))
    rhs = parse_weyl("i*hbar*(1/2)*V3*V4/m^3*(21*p*q^2*p - 11*hbar^2)")
    assert lhs == rhs


def test_swap_counts_match_closed_form():
    # p^b q^c = sum_j j! C(b,j) C(c,j) (-i hbar)^j q^(c-j) p^(b-j)
    import math

    for b in range(6):
        for c in range(6):
            counts = swap_counts(b, c)
            for j, count in counts.items():
                assert count == math.factorial(j) * math.comb(b, j) * math.comb(c, j)


def test_normal_ordering_idempotent():
    w = parse_weyl("q^2*p^3 + i*hbar*q*p + 5")
    rebuilt = WeylPolynomial(dict(w.terms()))
    assert rebuilt == w
    # re-reducing each canonical word changes nothing
    total = WeylPolynomial()
    for (a, b), c in w.terms():
        total = total + WeylPolynomial.from_word("q" * a + "p" * b, c)
    assert total == w


def _random_weyl(rng, degree=3):
    terms = {}
    for _ in range(rng.randint(1, 4)):
        a = rng.randint(0, degree)
        b = rng.randint(0, degree - a) if degree - a > 0 else 0
        terms[(a, b)] = Expr.number(Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
    return WeylPolynomial(terms)


def test_ring_distributivity_and_jacobi():
    rng = random.Random(7)
    for _ in range(12):
        x, y, z = (_random_weyl(rng) for _ in range(3))
        assert (x + y) * z == x * z + y * z
        assert commutator(x, y + z) == commutator(x, y) + commutator(x, z)
        jacobi = (
            commutator(commutator(x, y), z)
            + commutator(commutator(y, z), x)
            + commutator(commutator(z, x), y)
        )
        assert jacobi.is_zero()


def test_classical_shadow_of_commutator():
    # dropping hbar from [X, Y]/(i hbar) reproduces the Poisson bracket
    rng = random.Random(21)
    inv_ihbar = Expr.number(1) / (Expr.i() * Expr.symbol("hbar"))
    for _ in range(10):
        x, y = _random_weyl(rng, 4), _random_weyl(rng, 4)
        shadow = commutator(x, y).map_coefficients(
            lambda c: (c * inv_ihbar).drop_symbol("hbar")
        ).classical()
        classical = poisson_bracket(
            x.classical().map_coefficients(lambda c: c.drop_symbol("hbar")),
            y.classical().map_coefficients(lambda c: c.drop_symbol("hbar")),
        )
        assert shadow == classical


def test_matrix_faithfulness_of_canonical_form():
    # canonical form evaluated with Fock matrices (hbar = 1) must agree with
    # literal word-by-word multiplication of the original words
    rng = random.Random(5)
    n = 4 + 8
    a = np.diag(np.sqrt(np.arange(1, n)), 1)
    qm = (a + a.T) / np.sqrt(2)
    pm = -1j * (a - a.T) / np.sqrt(2)

    def word_matrix(word):
        out = np.eye(n, dtype=complex)
        for letter in word:
            out = out @ (qm if letter == "q" else pm)
        return out

    for _ in range(20):
        word = "".join(rng.choice("qp") for _ in range(rng.randint(1, 4)))
        canon = WeylPolynomial.from_word(word)
        direct = word_matrix(word)
        reduced = np.zeros((n, n), dtype=complex)
        for (x, y), c in canon.terms():
            reduced += c.evaluate({"hbar": 1.0}) * word_matrix("q" * x + "p" * y)
        block = slice(0, n - 6)
        assert np.max(np.abs(direct[block, block] - reduced[block, block])) < 1e-10


def test_adjoint_involution_and_products():
    rng = random.Random(3)
    for _ in range(8):
        x, y = _random_weyl(rng), _random_weyl(rng)
        assert x.adjoint().adjoint() == x
        assert (x * y).adjoint() == y.adjoint() * x.adjoint()
