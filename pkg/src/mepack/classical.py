"""Classical maximum-entropy packets on phase space.

The state maximizing -int (dq dp / v) rho ln(rho) under prescribed first
and second moments is the product Gaussian; the Lagrange multipliers and
the partition function are in closed form, and every polynomial moment
follows either by differentiating the partition function or from the
central Gaussian moments.  Both routes are computed and checked against
each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Union

from .algebra.expression import Expr
from .algebra.phase import PhasePolynomial
from .errors import DomainError
from .packets import PacketMoments
from .partition import GaussianPartition

_LAM = {name: Expr.symbol(name) for name in ("lam1", "lam2", "lam3", "lam4")}


@dataclass(frozen=True)
class ClassicalMultipliers:
    lam1: Expr
    lam2: Expr
    lam3: Expr
    lam4: Expr
    volume: Expr

    @classmethod
    def symbols(cls, volume=None) -> "ClassicalMultipliers":
        v = Expr.symbol("v") if volume is None else Expr.coerce(volume)
        return cls(_LAM["lam1"], _LAM["lam2"], _LAM["lam3"], _LAM["lam4"], v)


def multiplier_expressions() -> dict:
    """The closed-form multipliers in packet symbols."""
    Q, P = Expr.symbol("Q"), Expr.symbol("P")
    dQ2 = Expr.symbol("dQ") ** 2
    dP2 = Expr.symbol("dP") ** 2
    half = Expr.number(Fraction(1, 2))
    return {
        "lam1": -Q / dQ2,
        "lam2": -P / dP2,
        "lam3": half / dQ2,
        "lam4": half / dP2,
    }


def solve_multipliers_classical(packet: PacketMoments, volume=None) -> ClassicalMultipliers:
    """lam1 = -Q/dQ^2, lam3 = 1/(2 dQ^2) and the momentum companions."""
    fields = packet.expr_fields()
    sub = {"Q": fields["Q"], "P": fields["P"], "dQ": fields["dQ"], "dP": fields["dP"]}
    exprs = {k: e.substitute(sub) for k, e in multiplier_expressions().items()}
    v = Expr.symbol("v") if volume is None else Expr.coerce(volume)
    return ClassicalMultipliers(exprs["lam1"], exprs["lam2"], exprs["lam3"], exprs["lam4"], v)


def partition_classical(mult: ClassicalMultipliers) -> GaussianPartition:
    """(pi/v) (lam3 lam4)^(-1/2) exp(lam1^2/4lam3 + lam2^2/4lam4)."""
    return GaussianPartition.from_multipliers(
        mult.lam1, mult.lam2, mult.lam3, mult.lam4, mult.volume
    )


def density_at(
    packet: Union[PacketMoments, Sequence[PacketMoments]],
    q: Union[float, Sequence[float]],
    p: Union[float, Sequence[float]],
    v: float,
) -> float:
    """Phase-space density of the packet; the several-degrees-of-freedom
    version is the product over independent factors."""
    if v <= 0:
        raise DomainError(f"reference volume must be positive, got {v}")
    if isinstance(packet, PacketMoments):
        packets, qs, ps = [packet], [float(q)], [float(p)]
    else:
        packets, qs, ps = list(packet), list(q), list(p)
        if not (len(packets) == len(qs) == len(ps)):
            raise DomainError("packet/coordinate lists must have matching lengths")
    density = 1.0
    for pk, qi, pi_ in zip(packets, qs, ps):
        b = pk.bindings()
        dq, dp = b["dQ"], b["dP"]
        density *= (
            v
            / (2.0 * math.pi * dq * dp)
            * math.exp(
                -((qi - b["Q"]) ** 2) / (2.0 * dq * dq)
                - ((pi_ - b["P"]) ** 2) / (2.0 * dp * dp)
            )
        )
    return density


def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


@lru_cache(maxsize=None)
def central_moment_q(exponent: int) -> Expr:
    """< (q-Q)^n > = (n-1)!! dQ^n for even n, zero for odd."""
    if exponent % 2:
        return Expr()
    return Expr.number(_double_factorial(exponent - 1)) * Expr.symbol("dQ") ** exponent


@lru_cache(maxsize=None)
def central_moment_p(exponent: int) -> Expr:
    if exponent % 2:
        return Expr()
    return Expr.number(_double_factorial(exponent - 1)) * Expr.symbol("dP") ** exponent


@lru_cache(maxsize=None)
def _moment_gaussian_route(a: int, b: int) -> Expr:
    Q, P = Expr.symbol("Q"), Expr.symbol("P")
    total = Expr()
    for j in range(a + 1):
        cq = central_moment_q(j)
        if cq.is_zero():
            continue
        for k in range(b + 1):
            cp = central_moment_p(k)
            if cp.is_zero():
                continue
            total = total + (
                Expr.number(math.comb(a, j) * math.comb(b, k))
                * Q ** (a - j)
                * P ** (b - k)
                * cq
                * cp
            )
    return total


@lru_cache(maxsize=None)
def _moment_partition_route(a: int, b: int) -> Expr:
    z = GaussianPartition.from_multipliers(
        _LAM["lam1"], _LAM["lam2"], _LAM["lam3"], _LAM["lam4"], Expr.symbol("v")
    )
    d = z
    for _ in range(a):
        d = d.diff("lam1")
    for _ in range(b):
        d = d.diff("lam2")
    ratio = d.ratio(z) * Expr.number((-1) ** (a + b))
    return ratio.substitute(multiplier_expressions())


@lru_cache(maxsize=None)
def moment_monomial_classical(a: int, b: int) -> Expr:
    """< q^a p^b > in packet symbols; both computation routes must agree."""
    gauss = _moment_gaussian_route(a, b)
    partition = _moment_partition_route(a, b)
    if gauss != partition:
        raise AssertionError(
            f"moment routes disagree for q^{a} p^{b}: {gauss} vs {partition}"
        )
    return gauss


def moment_classical(packet: PacketMoments, monomial) -> Expr:
    """Average of a phase-space polynomial over the packet Gaussian."""
    poly = monomial if isinstance(monomial, PhasePolynomial) else PhasePolynomial.coerce(monomial)
    total = Expr()
    for (a, b), coeff in poly.terms():
        total = total + coeff * moment_monomial_classical(a, b)
    if packet.is_symbolic:
        return total
    return total.substitute(packet.expr_fields())


def entropy_classical(packet: PacketMoments, v: Optional[float] = None) -> float:
    """1 + ln(2 pi dQ dP / v); v defaults to h = 2 pi hbar."""
    b = packet.bindings()
    if v is None:
        v = 2.0 * math.pi * b["hbar"]
    if v <= 0:
        raise DomainError(f"reference volume must be positive, got {v}")
    return 1.0 + math.log(2.0 * math.pi * b["dQ"] * b["dP"] / v)
