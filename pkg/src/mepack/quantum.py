"""Quantum maximum-entropy packets.

The entropy-maximizing density operator for prescribed (Q, P, dQ, dP) is
diagonal on a packet-adapted oscillator basis with geometric weights
R_k = 2 (nu-1)^k / (nu+1)^(k+1).  Averages of operator polynomials reduce
to the diagonal representation: rewrite the operator on ladder operators,
keep the balanced words, and sum the resulting number polynomial against
the weights.  Two independent summation routes are evaluated and must
agree:

  (a) the operator formula  <k^n> = (2/(nu+1)) D^n (nu+1)/2  with
      D = ((nu^2-1)/2) d/dnu, applied in the monomial basis;
  (b) the closed falling-factorial sums  <Ad^m A^m> = m! ((nu-1)/2)^m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

from .algebra.expression import Expr
from .algebra.ladder import HBAR_AS_NU, diagonal_part, to_ladder
from .algebra.weyl import WeylPolynomial
from .errors import DomainError
from .packets import PacketMoments
from .partition import QuantumPartition

_NU = Expr.symbol("nu")
_HALF = Expr.number(Fraction(1, 2))


@dataclass(frozen=True)
class QuantumMultipliers:
    """Classical multipliers times the common factor (nu/2) ln((nu+1)/(nu-1))."""

    lam1: Expr
    lam2: Expr
    lam3: Expr
    lam4: Expr


def log_ratio_factor() -> Expr:
    """(nu/2) * ln((nu+1)/(nu-1)), with the log kept as the symbol Lnu."""
    return _HALF * _NU * Expr.symbol("Lnu")


def solve_multipliers_quantum(packet: PacketMoments) -> QuantumMultipliers:
    """Closed-form multipliers; defined only for nu > 1."""
    packet.require_quantum(strict=True)
    from .classical import multiplier_expressions

    factor = log_ratio_factor()
    exprs = {k: e * factor for k, e in multiplier_expressions().items()}
    if not packet.is_symbolic:
        sub = packet.expr_fields()
        b = packet.bindings()
        sub["nu"] = Expr.number(Fraction(b["nu"]))
        sub["Lnu"] = Expr.number(Fraction(math.log((b["nu"] + 1) / (b["nu"] - 1))))
        exprs = {k: e.substitute(sub) for k, e in exprs.items()}
    return QuantumMultipliers(exprs["lam1"], exprs["lam2"], exprs["lam3"], exprs["lam4"])


def partition_quantum(mult: QuantumMultipliers) -> QuantumPartition:
    """exp(lam1^2/4lam3 + lam2^2/4lam4) / (2 sinh(hbar sqrt(lam3 lam4)))."""
    for name in ("lam3", "lam4"):
        value = getattr(mult, name)
        if value.is_constant():
            c = value.constant_value()
            if not c.is_real() or c.re <= 0:
                raise DomainError(f"{name} must be positive for a normalizable state")
    return QuantumPartition(mult.lam1, mult.lam2, mult.lam3, mult.lam4)


def fock_weight(nu: Union[int, float, Fraction], k: int):
    """R_k = 2 (nu-1)^k / (nu+1)^(k+1); exact for exact input."""
    if k < 0:
        raise DomainError(f"weight index must be non-negative, got {k}")
    if nu < 1:
        raise DomainError(f"fock weights need nu >= 1, got {nu}")
    if nu == 1:
        one = Fraction(1) if isinstance(nu, (int, Fraction)) else 1.0
        return one if k == 0 else one * 0
    if isinstance(nu, (int, Fraction)):
        nu = Fraction(nu)
        return 2 * (nu - 1) ** k / (nu + 1) ** (k + 1)
    return 2.0 * (nu - 1.0) ** k / (nu + 1.0) ** (k + 1)


class FockWeights:
    """Lazy view of the geometric weight sequence for one packet.

    Indexing gives R_k (exact when nu is exact); `tail(n)` is the weight
    above level n, and `cutoff_for(tol)` the smallest level count whose
    tail is below tol.
    """

    def __init__(self, nu):
        if nu < 1:
            raise DomainError(f"fock weights need nu >= 1, got {nu}")
        self.nu = nu

    def __getitem__(self, k: int):
        return fock_weight(self.nu, k)

    def tail(self, n: int):
        if self.nu == 1:
            return 0 * fock_weight(self.nu, 0)
        return ((self.nu - 1) / (self.nu + 1)) ** (n + 1)

    def partial_sum(self, n: int):
        return sum(fock_weight(self.nu, k) for k in range(n + 1))

    def cutoff_for(self, tol: float = 1e-12) -> int:
        n = 0
        while float(self.tail(n)) > tol:
            n += 1
        return n + 1


# ---------------------------------------------------------------------------
# diagonal-representation moment engine
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _falling_weight_sum(m: int) -> Expr:
    """<k(k-1)...(k-m+1)> over the geometric weights: m! ((nu-1)/2)^m."""
    return Expr.number(math.factorial(m)) * (_HALF * (_NU - 1)) ** m


@lru_cache(maxsize=None)
def _monomial_weight_sum(n: int) -> Expr:
    """<k^n> via the derivative operator D = ((nu^2-1)/2) d/dnu."""
    u = _HALF * (_NU + 1)
    for _ in range(n):
        u = _HALF * (_NU * _NU - 1) * u.diff("nu")
    return (Expr.number(2) * u).div_exact(_NU + 1)


@lru_cache(maxsize=None)
def weyl_monomial_expectation(a: int, b: int) -> Expr:
    """<q^a p^b> in packet symbols (hbar eliminated via nu)."""
    ladder = to_ladder(WeylPolynomial({(a, b): Expr.number(1)}))
    number_poly = diagonal_part(ladder)

    route_b = Expr()
    for m, coeff in number_poly.falling_coefficients().items():
        if "s" in coeff.symbols():
            raise AssertionError(
                f"odd power of s survived in the diagonal part of q^{a} p^{b}"
            )
        route_b = route_b + coeff * _falling_weight_sum(m)

    route_a = Expr()
    for n, coeff in number_poly.monomial_coefficients().items():
        route_a = route_a + coeff * _monomial_weight_sum(n)

    if route_a != route_b:
        raise AssertionError(
            f"summation routes disagree for q^{a} p^{b}: {route_a} vs {route_b}"
        )
    return route_b


def expectation_quantum(packet: PacketMoments, x: WeylPolynomial) -> Expr:
    """Tr(rho X) in packet symbols: Q, P, dQ, dP and nu (s^2 -> 1/nu applied)."""
    packet.require_quantum()
    total = Expr()
    for (a, b), coeff in x.terms():
        total = total + coeff.substitute({"hbar": HBAR_AS_NU}) * weyl_monomial_expectation(a, b)
    return total


def expectation_value(packet: PacketMoments, x: WeylPolynomial, default_hbar: float = 1.0) -> complex:
    """Numeric expectation for a numeric packet."""
    return expectation_quantum(packet, x).evaluate(packet.bindings(default_hbar))


def restore_hbar(expr: Expr) -> Expr:
    """Rewrite nu -> 2 dQ dP / hbar, the display form used for printed moments."""
    nu_of_hbar = Expr.number(2) * Expr.symbol("dQ") * Expr.symbol("dP") / Expr.symbol("hbar")
    return expr.substitute({"nu": nu_of_hbar})


# ---------------------------------------------------------------------------
# entropy and the ground wavefunction
# ---------------------------------------------------------------------------


def entropy_quantum(nu: float) -> float:
    """-ln 2 + ((nu+1)/2) ln(nu+1) - ((nu-1)/2) ln(nu-1); zero at nu = 1."""
    nu = float(nu)
    if nu < 1:
        raise DomainError(f"entropy needs nu >= 1, got {nu}")
    if nu == 1:
        return 0.0
    return (
        -math.log(2.0)
        + (nu + 1.0) / 2.0 * math.log(nu + 1.0)
        - (nu - 1.0) / 2.0 * math.log(nu - 1.0)
    )


def entropy_from_multipliers(packet: PacketMoments) -> float:
    """Legendre-form cross-check: ln Z + sum(lam_i * constraint_i).

    Must reproduce `entropy_quantum`; kept separate because the direct
    formula avoids the cancellation between diverging multipliers.
    """
    b = packet.bindings()
    mult = solve_multipliers_quantum(packet)
    z = partition_quantum(mult)
    lam = [getattr(mult, f"lam{i}").evaluate(b).real for i in (1, 2, 3, 4)]
    constraints = [
        b["Q"],
        b["P"],
        b["Q"] ** 2 + b["dQ"] ** 2,
        b["P"] ** 2 + b["dP"] ** 2,
    ]
    return z.log_evaluate(b) + sum(l * c for l, c in zip(lam, constraints))


def entropy_weight_sum(nu: float, tail_tol: float = 1e-16) -> float:
    """-sum_k R_k ln R_k, summed to a geometric-tail cutoff (oracle-style)."""
    if nu == 1:
        return 0.0
    x = (nu - 1.0) / (nu + 1.0)
    total, k, rk = 0.0, 0, 2.0 / (nu + 1.0)
    while rk > tail_tol:
        total -= rk * math.log(rk)
        rk *= x
        k += 1
        if k > 10_000_000:
            break
    return total


def ground_wavefunction(packet: PacketMoments, q: float) -> complex:
    """Number-basis ground state in the position representation:
    (nu/(2 pi dQ^2))^(1/4) exp(-nu (q-Q)^2 / (4 dQ^2) + i P q / hbar)."""
    import cmath

    b = packet.bindings()
    packet.require_quantum()
    nu, dq = b["nu"], b["dQ"]
    norm = (nu / (2.0 * math.pi * dq * dq)) ** 0.25
    phase = 1j * b["P"] * q / b["hbar"]
    return norm * cmath.exp(-nu * (q - b["Q"]) ** 2 / (4.0 * dq * dq) + phase)


def stationarity_defect(mult) -> Expr:
    """lam1 + 2 lam3 Q: vanishes identically for ME multipliers, which is
    the statement that entropy does not depend on the centre Q."""
    q = Expr.symbol("Q")
    return mult.lam1 + Expr.number(2) * mult.lam3 * q
