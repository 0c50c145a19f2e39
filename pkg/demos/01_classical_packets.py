"""Classical maximum-entropy packets from prescribed moments.

Given averages (Q, P) and spreads (dQ, dP), the entropy-maximizing
phase-space density is a product Gaussian.  This script walks through the
closed-form Lagrange multipliers, the partition function, exact moments,
and the entropy, cross-checking against numeric quadrature.
"""

import math

from mepack import (
    ClassicalMultipliers,
    PacketMoments,
    PhasePolynomial,
    density_at,
    entropy_classical,
    gaussian_moment_numeric,
    moment_classical,
    partition_classical,
    solve_multipliers_classical,
)
from mepack.algebra import parse_phase

print(__doc__)

sym = PacketMoments.symbolic()
mult = solve_multipliers_classical(sym)
print("closed-form multipliers (symbolic packet):")
for name in ("lam1", "lam2", "lam3", "lam4"):
    print(f"  {name} = {getattr(mult, name)}")

z = partition_classical(ClassicalMultipliers.symbols())
print("\npartition function in multiplier variables:")
print(f"  Z = {z.coeff} * lam3^{z.e3} * lam4^{z.e4} * exp({z.exponent})")
d11 = z.diff("lam1").diff("lam1")
d3 = z.diff("lam3")
print(f"  identity d2Z/dlam1^2 + dZ/dlam3 = 0 holds: {d11.coeff == -d3.coeff}")

print("\nexact moments (any monomial, two independent routes):")
for text in ("q", "q^2", "q*p", "q^2*p^2", "q^4"):
    print(f"  <{text}> = {moment_classical(sym, parse_phase(text))}")

packet = PacketMoments(Q=2.0, P=-1.0, dQ=1.0, dP=0.5, hbar=1.0)
b = packet.bindings()
print(f"\nnumeric packet Q={b['Q']}, P={b['P']}, dQ={b['dQ']}, dP={b['dP']}:")
moment = moment_classical(packet, PhasePolynomial({(2, 2): 1})).evaluate({}).real
quad = gaussian_moment_numeric(packet, 2, 2)
print(f"  <q^2 p^2> engine     = {moment:.12f}")
print(f"  <q^2 p^2> quadrature = {quad:.12f}")

v = 2 * math.pi  # h with hbar = 1
print(f"\ndensity at the peak: {density_at(packet, 2.0, -1.0, v):.6f}"
      f"  (= v / (2 pi dQ dP) = {v / (2 * math.pi * 0.5):.6f})")
print(f"entropy with v = h: {entropy_classical(packet):.6f}"
      f"  (closed form 1 + ln(2 pi dQ dP / v) = "
      f"{1 + math.log(2 * math.pi * 0.5 / v):.6f})")
