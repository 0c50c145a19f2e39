"""Quantum ME packets: multipliers, partition, weights, moments, entropy."""

import math
import random
from fractions import Fraction

import pytest

from mepack.algebra import Expr, WeylPolynomial, parse_expression, parse_weyl
from mepack.classical import ClassicalMultipliers, moment_classical, partition_classical
from mepack.errors import DomainError, PureStateLimitError
from mepack.oracle import fock_expectation, fock_state
from mepack.packets import PacketMoments
from mepack.quantum import (
    QuantumMultipliers,
    entropy_from_multipliers,
    entropy_quantum,
    entropy_weight_sum,
    expectation_quantum,
    expectation_value,
    fock_weight,
    ground_wavefunction,
    log_ratio_factor,
    partition_quantum,
    restore_hbar,
    solve_multipliers_quantum,
    stationarity_defect,
    weyl_monomial_expectation,
)


# ---------------------------------------------------------------------------
# multipliers
# ---------------------------------------------------------------------------


def test_multipliers_symbolic_match_closed_form(sym_packet):
    mult = solve_multipliers_quantum(sym_packet)
    factor = parse_expression("(1/2)*nu*Lnu")
    assert mult.lam1 == parse_expression("-Q/dQ^2") * factor
    assert mult.lam2 == parse_expression("-P/dP^2") * factor
    assert mult.lam3 == parse_expression("1/(2*dQ^2)") * factor
    assert mult.lam4 == parse_expression("1/(2*dP^2)") * factor


def test_multiplier_factor_tends_to_one():
    # (nu/2) ln((nu+1)/(nu-1)) -> 1, so the classical multipliers reappear
    for nu, tol in ((10.0, 1e-2), (1e3, 1e-5), (1e6, 1e-6)):
        factor = log_ratio_factor().evaluate(
            {"nu": nu, "Lnu": math.log((nu + 1) / (nu - 1))}
        ).real
        assert abs(factor - 1.0) < tol


def test_multipliers_diverge_at_pure_state_limit():
    # the common factor grows like ln(1/(nu-1)) as nu -> 1+
    values = []
    for eps in (1e-1, 1e-4, 1e-7, 1e-10):
        nu = 1.0 + eps
        values.append(
            log_ratio_factor().evaluate({"nu": nu, "Lnu": math.log((nu + 1) / (nu - 1))}).real
        )
    assert values == sorted(values)
    assert values[-1] > 10.0
    # and the packet multipliers inherit the divergence
    pk_far = PacketMoments(1.0, 0.0, 1.0, 1.0, hbar=1.0)          # nu = 2
    pk_near = PacketMoments(1.0, 0.0, 1.0, 0.5 + 5e-11, hbar=1.0)  # nu -> 1+
    lam3_far = solve_multipliers_quantum(pk_far).lam3.evaluate({}).real
    lam3_near = solve_multipliers_quantum(pk_near).lam3.evaluate({}).real
    assert lam3_near > 10 * lam3_far


def test_multipliers_domain_errors():
    with pytest.raises(PureStateLimitError):
        solve_multipliers_quantum(PacketMoments(0, 0, 1.0, 0.5, hbar=1.0))
    with pytest.raises(DomainError):
        solve_multipliers_quantum(PacketMoments(0, 0, 0.5, 0.5, hbar=1.0))


# ---------------------------------------------------------------------------
# partition function
# ---------------------------------------------------------------------------


def _symbol_multipliers():
    return QuantumMultipliers(
        Expr.symbol("lam1"), Expr.symbol("lam2"), Expr.symbol("lam3"), Expr.symbol("lam4")
    )


def test_partition_quantum_form_and_centered_case():
    z = partition_quantum(_symbol_multipliers())
    assert z.exponent() == parse_expression("lam1^2/(4*lam3) + lam2^2/(4*lam4)")
    centered = partition_quantum(
        QuantumMultipliers(Expr(), Expr(), Expr.symbol("lam3"), Expr.symbol("lam4"))
    )
    assert centered.exponent().is_zero()
    b = {"lam3": 0.7, "lam4": 1.3, "hbar": 1.0, "pi": math.pi}
    x = math.sqrt(0.7 * 1.3)
    assert centered.evaluate(b) == pytest.approx(1.0 / (2 * math.sinh(x)), rel=1e-12)


def test_partition_quantum_rejects_nonpositive():
    with pytest.raises(DomainError):
        partition_quantum(
            QuantumMultipliers(Expr(), Expr(), Expr.number(-2), Expr.number(1))
        )


def test_partition_small_hbar_leading_term_is_classical_with_v_h():
    z_quantum = partition_quantum(_symbol_multipliers())
    leading = z_quantum.leading_small_hbar()
    v_h = Expr.number(2) * Expr.symbol("pi") * Expr.symbol("hbar")
    z_classical = partition_classical(ClassicalMultipliers.symbols(volume=v_h))
    assert leading == z_classical


def test_partition_quantum_vs_classical_numeric_ratio():
    # for small hbar sqrt(lam3 lam4) the two partition functions converge
    b = {"lam1": 0.3, "lam2": -0.2, "lam3": 0.9, "lam4": 1.8, "pi": math.pi}
    zq = partition_quantum(_symbol_multipliers())
    zc = partition_classical(ClassicalMultipliers.symbols())
    for hbar, tol in ((1e-2, 1e-4), (1e-4, 1e-8)):
        bq = dict(b, hbar=hbar)
        bc = dict(b, v=2 * math.pi * hbar)
        assert zq.evaluate(bq) / zc.evaluate(bc).real == pytest.approx(1.0, abs=3 * tol)


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------


def test_fock_weight_pure_state():
    assert fock_weight(1, 0) == 1
    assert fock_weight(1, 5) == 0


def test_fock_weight_nu_3_halving():
    for k in range(6):
        assert fock_weight(Fraction(3), k) == Fraction(1, 2 ** (k + 1))


def test_fock_weight_sums_to_one_exactly():
    # partial sum plus the exact geometric tail is identically 1
    for nu in (Fraction(3), Fraction(7, 2), Fraction(100)):
        n = 40
        partial = sum(fock_weight(nu, k) for k in range(n + 1))
        tail = ((nu - 1) / (nu + 1)) ** (n + 1)
        assert partial + tail == 1


def test_fock_weight_monotone_and_domain():
    ws = [fock_weight(5.0, k) for k in range(10)]
    assert all(a >= b for a, b in zip(ws, ws[1:]))
    with pytest.raises(DomainError):
        fock_weight(0.5, 0)
    with pytest.raises(DomainError):
        fock_weight(2.0, -1)


def test_fock_weights_view():
    from mepack.quantum import FockWeights

    w = FockWeights(Fraction(3))
    assert w[1] == Fraction(1, 4)
    assert w.partial_sum(10) + w.tail(10) == 1
    n = w.cutoff_for(1e-12)
    assert float(w.tail(n - 1)) < 1e-12 <= float(w.tail(n - 2))
    pure = FockWeights(1)
    assert pure[0] == 1 and pure.tail(0) == 0
    with pytest.raises(DomainError):
        FockWeights(0.2)


# ---------------------------------------------------------------------------
# the moment engine
# ---------------------------------------------------------------------------


def test_expectation_qp(sym_packet):
    got = expectation_quantum(sym_packet, parse_weyl("q*p"))
    assert restore_hbar(got) == parse_expression("Q*P + (1/2)*i*hbar")


def test_expectation_q3p(sym_packet):
    got = expectation_quantum(sym_packet, parse_weyl("q^3*p"))
    assert got == parse_expression(
        "Q^3*P + 3*Q*P*dQ^2 + 3*i*Q^2*dQ*dP/nu + 3*i*dQ^3*dP/nu"
    )


def test_expectation_pq2p_second_order_correction(sym_packet):
    got = expectation_quantum(sym_packet, parse_weyl("p*q^2*p"))
    classical = moment_classical(sym_packet, parse_weyl("q^2*p^2").classical())
    assert got - classical == parse_expression("2*dQ^2*dP^2/nu^2")


def test_expectation_symmetrized_qp(sym_packet):
    got = expectation_quantum(sym_packet, parse_weyl("q*p + p*q"))
    assert got == parse_expression("2*Q*P")


def test_constraint_closure(sym_packet):
    q, p = Expr.symbol("Q"), Expr.symbol("P")
    assert expectation_quantum(sym_packet, parse_weyl("q")) == q
    assert expectation_quantum(sym_packet, parse_weyl("p")) == p
    assert expectation_quantum(sym_packet, parse_weyl("q^2")) == parse_expression("Q^2 + dQ^2")
    assert expectation_quantum(sym_packet, parse_weyl("p^2")) == parse_expression("P^2 + dP^2")
    centered = parse_weyl("q^2 - 2*Q*q + Q^2")
    assert expectation_quantum(sym_packet, centered) == parse_expression("dQ^2")


def test_hermiticity(sym_packet):
    rng = random.Random(17)
    for _ in range(10):
        word = "".join(rng.choice("qp") for _ in range(rng.randint(1, 5)))
        x = WeylPolynomial.from_word(word)
        lhs = expectation_quantum(sym_packet, x.adjoint())
        rhs = expectation_quantum(sym_packet, x).conjugate()
        assert lhs == rhs


def test_symmetric_orderings_are_real(sym_packet):
    for text in ("q*p + p*q", "q^3*p + p*q^3", "q^2*p*q^2", "p*q^2*p", "q*p^2*q"):
        e = expectation_quantum(sym_packet, parse_weyl(text))
        assert e == e.conjugate()


def test_classical_limit_of_moments(sym_packet):
    # the nu-independent part of <q^a p^b> is the classical Gaussian moment
    for a in range(7):
        for b in range(7 - a):
            quantum = weyl_monomial_expectation(a, b)
            classical_part = quantum.coefficient_of("nu", 0)
            classical = moment_classical(
                sym_packet, parse_weyl("q").classical() ** a * parse_weyl("p").classical() ** b
            )
            assert classical_part == classical


def test_expectation_routes_disagree_never():
    # building the cache up to degree 6 exercises the internal route check
    for a in range(7):
        for b in range(7 - a):
            weyl_monomial_expectation(a, b)


def test_expectation_matches_fock_oracle(numeric_packet):
    state = fock_state(numeric_packet, degree=6)
    rng = random.Random(99)
    for _ in range(12):
        word = "".join(rng.choice("qp") for _ in range(rng.randint(1, 6)))
        engine = expectation_value(numeric_packet, WeylPolynomial.from_word(word))
        oracle = fock_expectation(state, [(1.0, word)])
        assert engine == pytest.approx(oracle, rel=1e-9, abs=1e-9)


# ---------------------------------------------------------------------------
# entropy
# ---------------------------------------------------------------------------


def test_entropy_pure_state_and_domain():
    assert entropy_quantum(1.0) == 0.0
    with pytest.raises(DomainError):
        entropy_quantum(0.99)


def test_entropy_asymptote():
    nu = 1e3
    assert entropy_quantum(nu) == pytest.approx(math.log(nu) + 1 - math.log(2), rel=1e-2)


def test_entropy_derivative():
    for nu in (2.0, 5.0, 50.0):
        h = 1e-5
        numeric = (entropy_quantum(nu + h) - entropy_quantum(nu - h)) / (2 * h)
        assert numeric == pytest.approx(0.5 * math.log((nu + 1) / (nu - 1)), abs=1e-8)
        assert numeric > 0


def test_entropy_equals_weight_sum():
    for nu in (2.0, 5.0, 20.0):
        assert entropy_weight_sum(nu) == pytest.approx(entropy_quantum(nu), abs=1e-9)


def test_entropy_legendre_cross_check(numeric_packet):
    assert entropy_from_multipliers(numeric_packet) == pytest.approx(
        entropy_quantum(numeric_packet.nu_value()), abs=1e-10
    )


def test_stationarity_identity(sym_packet):
    from mepack.classical import solve_multipliers_classical

    assert stationarity_defect(solve_multipliers_quantum(sym_packet)).is_zero()
    assert stationarity_defect(solve_multipliers_classical(sym_packet)).is_zero()


# ---------------------------------------------------------------------------
# ground wavefunction
# ---------------------------------------------------------------------------


def test_ground_wavefunction_normalized(numeric_packet):
    from numpy.polynomial.legendre import leggauss

    b = numeric_packet.bindings()
    x, w = leggauss(400)
    half = 12 * b["dQ"]
    total = sum(
        wi * abs(ground_wavefunction(numeric_packet, b["Q"] + half * xi)) ** 2
        for xi, wi in zip(x, w)
    ) * half
    assert total == pytest.approx(1.0, abs=1e-10)


def test_ground_wavefunction_variance(numeric_packet):
    from numpy.polynomial.legendre import leggauss

    b = numeric_packet.bindings()
    x, w = leggauss(400)
    half = 12 * b["dQ"]
    mean_sq = sum(
        wi * (half * xi) ** 2 * abs(ground_wavefunction(numeric_packet, b["Q"] + half * xi)) ** 2
        for xi, wi in zip(x, w)
    ) * half
    assert mean_sq == pytest.approx(b["dQ"] ** 2 / b["nu"], rel=1e-10)


def test_ground_wavefunction_minimal_packet_matches_fock():
    # at nu = 1 the packet is |0><0|; <q^2> from the Fock oracle equals Q^2 + dQ^2
    pk = PacketMoments(0.8, -0.1, 1.3, 1.0 / (2 * 1.3), hbar=1.0)
    assert pk.nu_value() == pytest.approx(1.0)
    state = fock_state(pk, degree=2, cutoff=64)
    got = fock_expectation(state, parse_weyl("q^2"))
    assert got.real == pytest.approx(0.8 ** 2 + 1.3 ** 2, rel=1e-12)
    # the wavefunction's |psi|^2 variance at nu = 1 is dQ^2 itself
    b = pk.bindings()
    from numpy.polynomial.legendre import leggauss

    x, w = leggauss(400)
    half = 12 * b["dQ"]
    mean_sq = sum(
        wi * (half * xi) ** 2 * abs(ground_wavefunction(pk, b["Q"] + half * xi)) ** 2
        for xi, wi in zip(x, w)
    ) * half
    assert mean_sq == pytest.approx(b["dQ"] ** 2, rel=1e-10)
