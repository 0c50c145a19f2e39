"""Quadratic flows, derivative tables, averaged equations, corrections,
and Taylor propagation."""

import math

import numpy as np
import pytest

from mepack.algebra import Expr, parse_expression, parse_phase, parse_weyl
from mepack.dynamics import (
    PolynomialPotential,
    averaged_derivatives,
    derivatives_classical,
    derivatives_quantum,
    evolve_quadratic,
    nu_power_profile,
    propagate,
    quadratic_flow,
    quantum_correction,
    trajectory_quadratic,
)
from mepack.errors import DomainError
from mepack.oracle import fock_evolve, fock_state, state_moments
from mepack.packets import PacketMoments

# the printed closed forms for a quartic truncation (degree K = 4)
EQ_DP = {
    1: "-V1 - V2*q - (1/2)*V3*q^2 - (1/6)*V4*q^3",
    2: "-V2/m*p - V3/m*q*p - V4/(2*m)*q^2*p",
    3: "-V3/m^2*p^2 - V4/m^2*q*p^2 + V1*V2/m + (V1*V3+V2^2)/m*q"
       " + (3*V2*V3+V1*V4)/(2*m)*q^2 + (4*V2*V4+3*V3^2)/(6*m)*q^3"
       " + 5*V3*V4/(12*m)*q^4 + V4^2/(12*m)*q^5",
    4: "-V4/m^3*p^3 + (3*V1*V3+V2^2)/m^2*p + (3*V1*V4+5*V2*V3)/m^2*q*p"
       " + (5*V3^2+8*V2*V4)/(2*m^2)*q^2*p + 3*V3*V4/m^2*q^3*p"
       " + 3*V4^2/(4*m^2)*q^4*p",
}

EQ_DP_QUANTUM = {
    1: EQ_DP[1],
    2: "-V2/m*p - V3/(2*m)*(q*p + p*q) - V4/(2*m)*q*p*q",
    3: "-V3/m^2*p^2 - V4/m^2*p*q*p + V1*V2/m + (V1*V3+V2^2)/m*q"
       " + (3*V2*V3+V1*V4)/(2*m)*q^2 + (4*V2*V4+3*V3^2)/(6*m)*q^3"
       " + 5*V3*V4/(12*m)*q^4 + V4^2/(12*m)*q^5",
    4: "-V4/m^3*p^3 + (3*V1*V3+V2^2)/m^2*p + (3*V1*V4+5*V2*V3)/(2*m^2)*(q*p + p*q)"
       " + (5*V3^2+8*V2*V4)/(2*m^2)*q*p*q + 3*V3*V4/(2*m^2)*(q^3*p + p*q^3)"
       " + 3*V4^2/(4*m^2)*q^2*p*q^2",
}

EQ_AVG = {
    1: "-V1 - V2*Q - (1/2)*V3*Q^2 - (1/6)*V4*Q^3 - (V3+V4*Q)/2*dQ^2",
    # sign-corrected second order: all terms follow the first with minus signs
    2: "-V2/m*P - V3/m*Q*P - V4/(2*m)*Q^2*P - V4/(2*m)*P*dQ^2",
    3: "-V3/m^2*P^2 - V4/m^2*Q*P^2 + V1*V2/m + (V1*V3+V2^2)/m*Q"
       " + (3*V2*V3+V1*V4)/(2*m)*Q^2 + (4*V2*V4+3*V3^2)/(6*m)*Q^3"
       " + 5*V3*V4/(12*m)*Q^4 + V4^2/(12*m)*Q^5 - (V3/m^2 + V4/m^2*Q)*dP^2"
       " + ((3*V2*V3+V1*V4)/(2*m) + (4*V2*V4+3*V3^2)/(2*m)*Q + 5*V3*V4/(2*m)*Q^2"
       " + 5*V3*V4/(4*m)*dQ^2 + 5*V4^2/(6*m)*Q^3 + 5*V4^2/(4*m)*Q*dQ^2)*dQ^2",
    4: "-V4/m^3*P^3 + (3*V1*V3+V2^2)/m^2*P + (3*V1*V4+5*V2*V3)/m^2*Q*P"
       " + (5*V3^2+8*V2*V4)/(2*m^2)*Q^2*P + 3*V3*V4/m^2*Q^3*P"
       " + 3*V4^2/(4*m^2)*Q^4*P - 3*V4/m^3*P*dP^2"
       " + ((5*V3^2+8*V2*V4)/(2*m^2)*P + 9*V3*V4/m^2*Q*P + 9*V4^2/(2*m^2)*Q^2*P"
       " + 9*V4^2/(4*m^2)*P*dQ^2)*dQ^2",
}


@pytest.fixture(scope="module")
def quartic():
    return PolynomialPotential.symbolic(4)


@pytest.fixture(scope="module")
def classical_table(quartic):
    return derivatives_classical(quartic, 4)


@pytest.fixture(scope="module")
def quantum_table(quartic):
    return derivatives_quantum(quartic, 4)


# ---------------------------------------------------------------------------
# derivative tables against the printed forms
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_classical_p_derivatives(classical_table, order):
    assert classical_table.p[order - 1] == parse_phase(EQ_DP[order])


def test_q_derivatives_follow_p(classical_table):
    inv_m = parse_expression("m^-1")
    assert classical_table.q[0] == parse_phase("p/m")
    for n in range(1, 4):
        assert classical_table.q[n] == classical_table.p[n - 1] * inv_m


@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_quantum_p_derivatives(quantum_table, order):
    assert quantum_table.p[order - 1] == parse_weyl(EQ_DP_QUANTUM[order])


def test_order_must_be_positive(quartic):
    with pytest.raises(DomainError):
        derivatives_classical(quartic, 0)
    with pytest.raises(DomainError):
        derivatives_quantum(quartic, 0)


def test_fifth_derivative_contains_printed_commutator(quartic):
    # the q^2 p^2 - type contributions entering d^5p/dt^5
    from mepack.algebra import commutator

    lhs = commutator(parse_weyl("(3/2)*V3*V4/m^2*(q^3*p + p*q^3)"), parse_weyl("p^2/(2*m)")) \
        + commutator(parse_weyl("(1/2)*V3*V4/m^3*(1/3)*q^3"), parse_weyl("p^3"))
    assert lhs == parse_weyl("i*hbar*(1/2)*V3*V4/m^3*(21*p*q^2*p - 11*hbar^2)")


# ---------------------------------------------------------------------------
# averaged equations
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_classical_averaged_equations(classical_table, sym_packet, order):
    avg = averaged_derivatives(classical_table, sym_packet)
    assert avg.p[order - 1] == parse_expression(EQ_AVG[order])


@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_quantum_averages_coincide_with_classical(
    classical_table, quantum_table, sym_packet, order
):
    classical = averaged_derivatives(classical_table, sym_packet)
    quantum = averaged_derivatives(quantum_table, sym_packet)
    assert quantum.p[order - 1] == classical.p[order - 1]
    assert quantum.q[order - 1] == classical.q[order - 1]


def test_sharp_limit_recovers_pointlike_equations(classical_table, sym_packet):
    # dQ -> 0, dP -> 0 with q -> Q, p -> P reproduces the phase-space equations
    avg = averaged_derivatives(classical_table, sym_packet)
    for n in range(4):
        sharp = avg.p[n].substitute({"dQ": Expr(), "dP": Expr()})
        expected = Expr()
        for (a, b), c in classical_table.p[n].terms():
            expected = expected + c * Expr.symbol("Q") ** a * Expr.symbol("P") ** b
        assert sharp == expected


@pytest.mark.parametrize("degree", [2, 3, 4, 5])
def test_factor_ordering_shadow(degree):
    # dropping hbar from the quantum table entries gives the classical table
    pot = PolynomialPotential.symbolic(degree)
    ct = derivatives_classical(pot, 5)
    qt = derivatives_quantum(pot, 5)
    for n in range(5):
        shadow = qt.p[n].map_coefficients(lambda c: c.drop_symbol("hbar")).classical()
        assert shadow == ct.p[n]


@pytest.mark.parametrize("degree", [4, 5])
def test_averaged_quantum_derivatives_are_real(degree, sym_packet):
    qt = derivatives_quantum(PolynomialPotential.symbolic(degree), 5)
    avg = averaged_derivatives(qt, sym_packet)
    for e in avg.p:
        assert e == e.conjugate()


# ---------------------------------------------------------------------------
# quantum corrections
# ---------------------------------------------------------------------------


def test_corrections_vanish_through_fourth_order(quartic):
    for order in (1, 2, 3, 4):
        assert quantum_correction(quartic, order).is_zero()


def test_order5_v3v4_component(quartic):
    corr = quantum_correction(quartic, 5)
    v3v4 = corr.coefficient_of("V3", 1).coefficient_of("V4", 1)
    assert v3v4 == parse_expression("-dQ^2*dP^2/(m^3*nu^2)").coefficient_of("V3", 0)


def test_order5_correction_is_second_order_in_inverse_nu(quartic):
    profile = nu_power_profile(quantum_correction(quartic, 5))
    assert set(profile) == {-2}
    assert -1 not in profile


@pytest.mark.parametrize("degree", [2, 3, 4, 5])
def test_corrections_have_no_first_order_term(degree):
    # corrections are O(1/nu^2) for every truncation degree and order <= 5
    pot = PolynomialPotential.symbolic(degree)
    for order in range(1, 6):
        profile = nu_power_profile(quantum_correction(pot, order))
        assert -1 not in profile
        assert all(e <= -2 for e in profile)


def test_order5_21_minus_2_over_nu2_factor(quartic, sym_packet):
    fifth = averaged_derivatives(derivatives_quantum(quartic, 5), sym_packet).p[-1]
    group = fifth
    for name, power in (("V3", 1), ("V4", 1), ("dQ", 2), ("dP", 2), ("Q", 0), ("P", 0)):
        group = group.coefficient_of(name, power)
    assert group * Expr.number(2) * Expr.symbol("m") ** 3 == parse_expression("21 - 2*nu^-2")


def test_order3_quintic_correction_is_zero_and_oracle_agrees():
    # The third-derivative V5 commutator is [.,p^2/2m] of a symmetrized q^3 p
    # term; its hbar^2 piece exactly cancels the pq2p reordering shift, so the
    # net correction vanishes.  The independent Fock oracle confirms.
    quintic = PolynomialPotential.symbolic(5)
    assert quantum_correction(quintic, 3).is_zero()

    pk = PacketMoments(0.4, 0.1, 1.1, 1.3, hbar=1.0)
    pot = PolynomialPotential(1.0, (0.0, 0.0, 0.0, 0.0, 0.0, 0.8))
    table = derivatives_quantum(pot, 3)
    state = fock_state(pk, degree=table.p[-1].degree())
    oracle = fock_expectation_of(state, table.p[-1], pk)
    classical = averaged_derivatives(derivatives_classical(pot, 3), pk).p[-1]
    classical_value = classical.evaluate(pk.bindings()).real
    assert oracle.imag == pytest.approx(0.0, abs=1e-10)
    assert oracle.real == pytest.approx(classical_value, rel=1e-10)


def fock_expectation_of(state, weyl, packet):
    from mepack.oracle import fock_expectation

    return fock_expectation(state, weyl)


def test_quintic_corrections_through_fourth_order_vanish():
    quintic = PolynomialPotential.symbolic(5)
    for order in (1, 2, 4):
        assert quantum_correction(quintic, order).is_zero()


def test_numeric_packet_correction_evaluates(quartic):
    pk = PacketMoments(0.5, -0.25, 1.0, 1.5, hbar=1.0)
    corr = quantum_correction(quartic, 5, pk)
    b = {"m": 1.0, "V3": 1.0, "V4": 1.0}
    value = corr.evaluate(b).real
    nu = pk.nu_value()
    expected = -(1.0 * 1.0 + 1.0 * 1.0 * 0.5) * 1.0 ** 2 * 1.5 ** 2 / nu ** 2
    assert value == pytest.approx(expected, rel=1e-12)


# ---------------------------------------------------------------------------
# quadratic flows and closed-form evolution
# ---------------------------------------------------------------------------


def test_flow_initial_conditions():
    pot = PolynomialPotential(2.0, (0.3, 1.5, 0.7))
    f = quadratic_flow(pot, 0.0)
    assert (f.f0, f.f2, f.g0, f.g1) == (0.0, 0.0, 0.0, 0.0)
    assert (f.f1, f.g2) == (1.0, 1.0)


def test_flow_oscillatory_branch():
    m, v2 = 1.5, 2.0
    pot = PolynomialPotential(m, (0.0, 0.0, v2))
    t = 0.8
    f = quadratic_flow(pot, t)
    omega, xi = math.sqrt(v2 / m), math.sqrt(m * v2)
    assert f.branch == "oscillatory" and f.bounded
    assert f.f1 == pytest.approx(math.cos(omega * t))
    assert f.f2 == pytest.approx(math.sin(omega * t) / xi)
    assert f.g1 == pytest.approx(-xi * math.sin(omega * t))


def test_flow_uniform_branch():
    pot = PolynomialPotential(2.0, (0.0, 3.0))
    f = quadratic_flow(pot, 0.5)
    assert f.branch == "uniform"
    assert f.f2 == pytest.approx(0.25)    # t/m
    assert f.g0 == pytest.approx(-1.5)    # -V1 t
    assert f.f0 == pytest.approx(-3.0 * 0.5 ** 2 / (2.0 * 2.0))  # -V1 t^2 / 2m


def test_flow_hyperbolic_branch_solves_equations_of_motion():
    m, v1, v2 = 1.3, 0.4, -0.9
    pot = PolynomialPotential(m, (0.0, v1, v2))
    t, h = 0.7, 1e-6
    f, fp, fm = (quadratic_flow(pot, s) for s in (t, t + h, t - h))
    assert f.branch == "hyperbolic" and not f.bounded
    for q0, p0 in ((1.0, 0.0), (0.0, 1.0), (0.3, -0.8)):
        def q_at(fl):
            return fl.f0 + q0 * fl.f1 + p0 * fl.f2

        def p_at(fl):
            return fl.g0 + q0 * fl.g1 + p0 * fl.g2

        qdot = (q_at(fp) - q_at(fm)) / (2 * h)
        pdot = (p_at(fp) - p_at(fm)) / (2 * h)
        assert qdot == pytest.approx(p_at(f) / m, rel=1e-6)
        assert pdot == pytest.approx(-v1 - v2 * q_at(f), rel=1e-6)


def test_flow_rejects_cubic():
    with pytest.raises(DomainError):
        quadratic_flow(PolynomialPotential(1.0, (0.0, 0.0, 0.0, 1.0)), 0.1)


def test_evolve_free_particle_spreading():
    pk = PacketMoments(0.0, 0.0, 1.0, 1.0, hbar=1.0)
    pot = PolynomialPotential(1.0, (0.0,))
    out = evolve_quadratic(pk, pot, 1.0)
    assert float(out.dQ) == pytest.approx(math.sqrt(2.0), rel=1e-12)
    assert float(out.dP) == pytest.approx(1.0, rel=1e-12)


def test_evolve_identity_at_t0(numeric_packet):
    pot = PolynomialPotential(1.0, (0.0, 0.0, 1.0))
    out = evolve_quadratic(numeric_packet, pot, 0.0)
    for name in ("Q", "P", "dQ", "dP"):
        assert float(getattr(out, name)) == pytest.approx(float(getattr(numeric_packet, name)))


def test_evolve_harmonic_variances_bounded():
    pk = PacketMoments(1.0, 0.0, 2.0, 0.5, hbar=1.0)
    pot = PolynomialPotential(1.0, (0.0, 0.0, 1.0))
    for t in np.linspace(0, 20, 81):
        out = evolve_quadratic(pk, pot, float(t))
        dq = float(out.dQ)
        assert dq == pytest.approx(
            math.sqrt(math.cos(t) ** 2 * 4.0 + math.sin(t) ** 2 * 0.25), rel=1e-9
        )
        assert 0.5 - 1e-9 <= dq <= 2.0 + 1e-9


def test_variance_derivative_at_origin_nonnegative():
    pk = PacketMoments(0.3, -0.2, 1.1, 0.9, hbar=1.0)
    pot = PolynomialPotential(1.0, (0.0, 0.5, 2.0))
    h = 1e-6
    hi = float(evolve_quadratic(pk, pot, h).dQ) ** 2
    lo = float(evolve_quadratic(pk, pot, -h).dQ) ** 2
    assert (hi - lo) / (2 * h) >= -1e-8


# ---------------------------------------------------------------------------
# propagation
# ---------------------------------------------------------------------------


def test_propagate_trivial_at_origin(numeric_packet):
    pot = PolynomialPotential(1.0, (0.0, 0.0, 0.0, 0.6))
    for mode in ("taylor-origin", "repacketized-stepping"):
        traj = propagate(numeric_packet, pot, [0.0], order=3, mode=mode)
        row = next(traj.rows())
        assert row[1] == pytest.approx(0.7) and row[3] == pytest.approx(1.2)


def test_propagate_grid_validation(numeric_packet):
    pot = PolynomialPotential(1.0, (0.0,))
    with pytest.raises(DomainError):
        propagate(numeric_packet, pot, [0.0, 0.2, 0.1], order=4)
    with pytest.raises(DomainError):
        propagate(numeric_packet, pot, [0.1, 0.2], order=4)
    with pytest.raises(DomainError):
        propagate(numeric_packet, pot, [0.0, 0.1], order=1)
    with pytest.raises(DomainError):
        propagate(numeric_packet, pot, [0.0, 0.1], order=4, mode="leapfrog")


def test_taylor_matches_quadratic_closed_form():
    pk = PacketMoments(1.0, 0.0, 1.0, 0.5, hbar=1.0)
    pot = PolynomialPotential(1.0, (0.0, 0.3, 1.0))
    grid = [0.0, 0.025, 0.05, 0.075, 0.1]
    traj = propagate(pk, pot, grid, order=6, mode="taylor-origin")
    for t, row in zip(grid, traj.rows()):
        exact = evolve_quadratic(pk, pot, t)
        assert row[1] == pytest.approx(float(exact.Q), abs=1e-8)
        assert row[2] == pytest.approx(float(exact.P), abs=1e-8)
        assert row[3] == pytest.approx(float(exact.dQ), abs=1e-8)
        assert row[4] == pytest.approx(float(exact.dP), abs=1e-8)


def test_repacketized_stepping_tracks_quadratic():
    pk = PacketMoments(1.0, 0.0, 1.0, 0.5, hbar=1.0)
    pot = PolynomialPotential(1.0, (0.0, 0.3, 1.0))
    grid = [0.0, 0.05, 0.1, 0.15, 0.2]
    traj = propagate(pk, pot, grid, order=6, mode="repacketized-stepping")
    exact = evolve_quadratic(pk, pot, 0.2)
    last = list(traj.rows())[-1]
    assert last[1] == pytest.approx(float(exact.Q), abs=1e-6)
    assert traj.provenance == "repacketized-stepping"


def test_quartic_quantum_taylor_matches_fock_oracle():
    # nu = 10 via hbar = 0.02; horizon where the remainder proxy < 1e-6
    pk = PacketMoments(0.4, 0.2, math.sqrt(0.1), math.sqrt(0.1), hbar=0.02)
    assert pk.nu_value() == pytest.approx(10.0)
    pot = PolynomialPotential(1.0, (0.0, 0.0, 0.0, 0.0, 1.0))
    grid = [0.0, 0.1, 0.2, 0.3]
    traj = propagate(pk, pot, grid, order=6, kind="quantum")
    assert traj.remainder_estimate < 1e-6
    state = fock_state(pk, degree=4, cutoff=220)
    for t, row in zip(grid, traj.rows()):
        moments = state_moments(fock_evolve(state, pot, t, leak_tol=1e-6))
        assert row[1] == pytest.approx(float(moments.Q), rel=1e-4)
        assert row[2] == pytest.approx(float(moments.P), rel=1e-4)


def test_trajectory_quadratic_entropy_constant_for_harmonic_matched_packet():
    # dQ = dP/xi keeps dQ dP constant under the harmonic flow
    pot = PolynomialPotential(1.0, (0.0, 0.0, 1.0))
    pk = PacketMoments(1.0, 0.0, 1.3, 1.3, hbar=1.0)
    traj = trajectory_quadratic(pk, pot, [0.0, 0.5, 1.0, 1.5], kind="quantum")
    assert max(traj.nus) - min(traj.nus) < 1e-12
    assert max(traj.entropies) - min(traj.entropies) < 1e-12


def test_trajectory_records_nu_drift_for_unmatched_packet():
    pot = PolynomialPotential(1.0, (0.0, 0.0, 1.0))
    pk = PacketMoments(1.0, 0.0, 2.0, 0.5, hbar=1.0)
    traj = trajectory_quadratic(pk, pot, [0.0, 0.4, 0.8], kind="quantum")
    assert traj.nus[0] == pytest.approx(2.0)
    assert max(traj.nus) > min(traj.nus)
