"""Packet data: prescribed averages and spreads of position and momentum.

A packet is the tuple (Q, P, dQ, dP) per degree of freedom; everything
else about the state is derived.  Fields may be numbers (exact rationals
preferred, floats accepted) or symbolic expressions; `PacketMoments.symbolic()`
gives the canonical all-symbol packet that the algebraic pipelines use.

The uncertainty ratio nu = 2*dQ*dP/hbar measures the phase-space area of
the packet in units of hbar/2; nu = 1 is the quantum minimum.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Union

from .algebra.expression import Expr
from .errors import DomainError, PureStateLimitError

Number = Union[int, float, Fraction]
FieldValue = Union[Number, Expr]


def _as_expr(value: FieldValue) -> Expr:
    if isinstance(value, Expr):
        return value
    return Expr.number(Fraction(value))


def _numeric(value: FieldValue) -> Optional[float]:
    if isinstance(value, Expr):
        if value.is_constant():
            c = value.constant_value()
            return float(c.re) if c.is_real() else None
        return None
    return float(value)


@dataclass(frozen=True)
class PacketMoments:
    Q: FieldValue
    P: FieldValue
    dQ: FieldValue
    dP: FieldValue
    hbar: Optional[Number] = None

    def __post_init__(self):
        for name in ("dQ", "dP"):
            value = _numeric(getattr(self, name))
            if value is not None and value <= 0:
                raise DomainError(f"{name} must be positive, got {value}")
        if self.hbar is not None and float(self.hbar) <= 0:
            raise DomainError(f"hbar must be positive, got {self.hbar}")

    @classmethod
    def symbolic(cls) -> "PacketMoments":
        return cls(
            Expr.symbol("Q"), Expr.symbol("P"), Expr.symbol("dQ"), Expr.symbol("dP")
        )

    @property
    def is_symbolic(self) -> bool:
        return any(
            _numeric(getattr(self, name)) is None for name in ("Q", "P", "dQ", "dP")
        )

    # -- derived quantities ---------------------------------------------------

    @property
    def nu(self) -> FieldValue:
        """Uncertainty ratio 2*dQ*dP/hbar."""
        if self.is_symbolic:
            return Expr.symbol("nu")
        hbar = self.hbar if self.hbar is not None else 1
        if isinstance(self.dQ, (int, Fraction)) and isinstance(self.dP, (int, Fraction)) \
                and isinstance(hbar, (int, Fraction)):
            return Fraction(2) * Fraction(self.dQ) * Fraction(self.dP) / Fraction(hbar)
        return 2.0 * _numeric(self.dQ) * _numeric(self.dP) / float(hbar)

    def nu_value(self) -> float:
        nu = self.nu
        if isinstance(nu, Expr):
            raise DomainError("symbolic packet has no numeric uncertainty ratio")
        return float(nu)

    def expr_fields(self) -> dict:
        return {name: _as_expr(getattr(self, name)) for name in ("Q", "P", "dQ", "dP")}

    def bindings(self, default_hbar: float = 1.0) -> dict:
        """Numeric bindings for Expr.evaluate; symbolic packets refuse."""
        if self.is_symbolic:
            raise DomainError("symbolic packet cannot be bound numerically")
        import math

        hbar = float(self.hbar) if self.hbar is not None else float(default_hbar)
        out = {
            "Q": _numeric(self.Q),
            "P": _numeric(self.P),
            "dQ": _numeric(self.dQ),
            "dP": _numeric(self.dP),
            "hbar": hbar,
            "pi": math.pi,
        }
        out["nu"] = 2.0 * out["dQ"] * out["dP"] / hbar
        out["Lnu"] = (
            math.log((out["nu"] + 1.0) / (out["nu"] - 1.0)) if out["nu"] > 1 else math.inf
        )
        return out

    def require_quantum(self, strict: bool = False):
        """Enforce nu >= 1 (or > 1) for numeric packets; symbolic ones pass."""
        if self.is_symbolic:
            return
        nu = self.nu_value()
        if nu < 1:
            raise DomainError(
                f"uncertainty ratio nu = {nu} violates the bound 2*dQ*dP >= hbar"
            )
        if strict and nu == 1:
            raise PureStateLimitError(
                "nu = 1 packet is the pure Gaussian state; multipliers diverge there"
            )

    def with_moments(self, Q=None, P=None, dQ=None, dP=None) -> "PacketMoments":
        return replace(
            self,
            Q=self.Q if Q is None else Q,
            P=self.P if P is None else P,
            dQ=self.dQ if dQ is None else dQ,
            dP=self.dP if dP is None else dP,
        )
