"""Independent numeric verification on a truncated number basis.

This module deliberately avoids the symbolic normal-ordering machinery:
operators are evaluated as literal matrix products on a finite basis, the
state is the diagonal geometric-weight density matrix, and evolution is a
dense matrix exponential.  Its only shared dependency with the algebra
layer is expression evaluation for numeric coefficients.

Cutoff policy: smallest N with the neglected weight tail below `tail_tol`,
plus a margin of max(8, 2*degree) basis states, since a polynomial of
degree d couples at most d bands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import expm

from .algebra.weyl import WeylPolynomial
from .dynamics import PolynomialPotential
from .errors import CutoffError, DomainError, HorizonError
from .packets import PacketMoments

DEFAULT_TAIL_TOL = 1e-12

Word = Union[str, Sequence[str]]


def tail_weight(nu: float, n: int) -> float:
    """Total geometric weight above level n."""
    if nu == 1.0:
        return 0.0
    x = (nu - 1.0) / (nu + 1.0)
    return x ** (n + 1)


def choose_cutoff(nu: float, degree: int = 0, tail_tol: float = DEFAULT_TAIL_TOL) -> int:
    if nu < 1:
        raise DomainError(f"fock basis needs nu >= 1, got {nu}")
    margin = max(8, 2 * degree)
    if nu == 1.0:
        return 1 + margin
    x = (nu - 1.0) / (nu + 1.0)
    n_tail = max(0, math.ceil(math.log(tail_tol) / math.log(x)) - 1)
    return n_tail + margin


@dataclass(frozen=True)
class FockState:
    """rho, q, p as dense matrices on the packet-adapted number basis."""

    cutoff: int
    nu: float
    hbar: float
    bindings: dict
    q_mat: np.ndarray
    p_mat: np.ndarray
    rho: np.ndarray
    tail_tol: float = DEFAULT_TAIL_TOL
    leakage: float = 0.0  # top-band weight after the last evolution step

    @property
    def trace_deficit(self) -> float:
        return 1.0 - float(np.trace(self.rho).real)


def fock_state(
    packet: PacketMoments,
    degree: int = 0,
    cutoff: Optional[int] = None,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> FockState:
    b = packet.bindings()
    nu = b["nu"]
    if nu < 1:
        raise DomainError(f"fock basis needs nu >= 1, got {nu}")
    n = cutoff if cutoff is not None else choose_cutoff(nu, degree, tail_tol)
    if tail_weight(nu, n) > tail_tol:
        raise CutoffError(
            f"cutoff {n} leaves weight tail {tail_weight(nu, n):.3e} > {tail_tol:.1e}"
        )
    lower = np.zeros((n, n), dtype=complex)
    idx = np.arange(1, n)
    lower[idx - 1, idx] = np.sqrt(idx)
    raise_ = lower.conj().T
    scale_q = b["dQ"] / math.sqrt(nu)
    scale_p = b["dP"] / math.sqrt(nu)
    q_mat = b["Q"] * np.eye(n) + scale_q * (lower + raise_)
    p_mat = b["P"] * np.eye(n) - 1j * scale_p * (lower - raise_)
    if nu == 1.0:
        weights = np.zeros(n)
        weights[0] = 1.0
    else:
        x = (nu - 1.0) / (nu + 1.0)
        weights = 2.0 / (nu + 1.0) * x ** np.arange(n)
    rho = np.diag(weights).astype(complex)
    return FockState(n, nu, b["hbar"], b, q_mat, p_mat, rho, tail_tol)


def _word_matrix(state: FockState, word: Word) -> np.ndarray:
    letters = list(word)
    out = np.eye(state.cutoff, dtype=complex)
    for letter in letters:
        if letter == "q":
            out = out @ state.q_mat
        elif letter == "p":
            out = out @ state.p_mat
        else:
            raise DomainError(f"unknown letter {letter!r} in operator word")
    return out


def _operator_matrix(state: FockState, x) -> Tuple[np.ndarray, int]:
    if isinstance(x, WeylPolynomial):
        total = np.zeros((state.cutoff, state.cutoff), dtype=complex)
        degree = 0
        for (a, b), coeff in x.terms():
            degree = max(degree, a + b)
            total += coeff.evaluate(state.bindings) * _word_matrix(state, "q" * a + "p" * b)
        return total, degree
    # iterable of (coefficient, word) pairs, evaluated in written word order
    total = np.zeros((state.cutoff, state.cutoff), dtype=complex)
    degree = 0
    for coeff, word in x:
        degree = max(degree, len(list(word)))
        value = coeff.evaluate(state.bindings) if hasattr(coeff, "evaluate") else complex(coeff)
        total += value * _word_matrix(state, word)
    return total, degree


def fock_expectation(state: FockState, x) -> complex:
    """Tr(rho X) with X evaluated by direct word-order matrix products.

    X may be a WeylPolynomial (its canonical words are literal products) or
    an iterable of (coefficient, word) pairs for arbitrary orderings.
    """
    matrix, degree = _operator_matrix(state, x)
    needed = choose_cutoff(state.nu, degree, state.tail_tol)
    if state.cutoff < needed:
        raise CutoffError(
            f"cutoff {state.cutoff} too small for degree {degree}; need >= {needed}"
        )
    return complex(np.trace(state.rho @ matrix))


def hamiltonian_matrix(state: FockState, potential: PolynomialPotential) -> np.ndarray:
    m = potential.mass_value()
    h = (state.p_mat @ state.p_mat) / (2.0 * m)
    qk = np.eye(state.cutoff, dtype=complex)
    for k in range(potential.degree + 1):
        coeff = potential.coefficient(k) / math.factorial(k)
        if coeff:
            h = h + coeff * qk
        qk = qk @ state.q_mat
    return h


def fock_evolve(
    state: FockState,
    potential: PolynomialPotential,
    t: float,
    leak_tol: float = 1e-8,
    band: int = 4,
) -> FockState:
    """Evolve rho by the matrix exponential of the truncated Hamiltonian.

    The weight that reaches the top `band` levels estimates truncation
    leakage; exceeding `leak_tol` raises HorizonError.
    """
    h = hamiltonian_matrix(state, potential)
    u = expm(-1j * h * float(t) / state.hbar)
    rho = u @ state.rho @ u.conj().T
    top = np.arange(state.cutoff - band, state.cutoff)
    leakage = float(np.sum(np.diag(rho).real[top]))
    if leakage > leak_tol:
        raise HorizonError(
            f"truncation leakage {leakage:.3e} > {leak_tol:.1e} at t = {t}; "
            "raise the cutoff or shorten the horizon"
        )
    return replace(state, rho=rho, leakage=leakage)


def state_moments(state: FockState) -> PacketMoments:
    """Read (Q, P, dQ, dP) back off the density matrix."""
    q1 = float(np.trace(state.rho @ state.q_mat).real)
    p1 = float(np.trace(state.rho @ state.p_mat).real)
    q2 = float(np.trace(state.rho @ state.q_mat @ state.q_mat).real)
    p2 = float(np.trace(state.rho @ state.p_mat @ state.p_mat).real)
    return PacketMoments(
        q1, p1, math.sqrt(q2 - q1 * q1), math.sqrt(p2 - p1 * p1), hbar=state.hbar
    )


def state_entropy(state: FockState) -> float:
    """-Tr(rho ln rho) over the retained block."""
    eigenvalues = np.linalg.eigvalsh(state.rho)
    ent = 0.0
    for lam in eigenvalues:
        if lam > 1e-300:
            ent -= float(lam) * math.log(float(lam))
    return ent


# ---------------------------------------------------------------------------
# classical quadrature / Monte-Carlo oracle
# ---------------------------------------------------------------------------


def gaussian_moment_numeric(packet: PacketMoments, a: int, b: int) -> float:
    """<q^a p^b> by Gauss-Hermite quadrature (exact at polynomial degree)."""
    if a < 0 or b < 0:
        raise DomainError("moment exponents must be non-negative")
    bd = packet.bindings()

    def axis_moment(mean: float, sd: float, n: int) -> float:
        nodes = n // 2 + 1
        x, w = np.polynomial.hermite.hermgauss(nodes)
        values = (mean + math.sqrt(2.0) * sd * x) ** n
        return float(np.dot(w, values) / math.sqrt(math.pi))

    return axis_moment(bd["Q"], bd["dQ"], a) * axis_moment(bd["P"], bd["dP"], b)


def gaussian_moment_mc(
    packet: PacketMoments, a: int, b: int, samples: int = 200_000, seed: int = 0
) -> Tuple[float, float]:
    """Monte-Carlo fallback; returns (estimate, standard error)."""
    bd = packet.bindings()
    rng = np.random.default_rng(seed)
    qs = rng.normal(bd["Q"], bd["dQ"], samples)
    ps = rng.normal(bd["P"], bd["dP"], samples)
    values = qs ** a * ps ** b
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(samples))


def density_normalization(packet: PacketMoments, v: float, half_width: float = 10.0, nodes: int = 160) -> float:
    """int rho dq dp / v by tensor Gauss-Legendre quadrature."""
    from numpy.polynomial.legendre import leggauss
    from .classical import density_at

    bd = packet.bindings()
    xq, wq = leggauss(nodes)
    q_lo, q_hi = bd["Q"] - half_width * bd["dQ"], bd["Q"] + half_width * bd["dQ"]
    p_lo, p_hi = bd["P"] - half_width * bd["dP"], bd["P"] + half_width * bd["dP"]
    qs = 0.5 * (q_hi - q_lo) * xq + 0.5 * (q_hi + q_lo)
    ps = 0.5 * (p_hi - p_lo) * xq + 0.5 * (p_hi + p_lo)
    total = 0.0
    for qi, wi in zip(qs, wq):
        row = sum(
            wj * density_at(packet, qi, pj, v) for pj, wj in zip(ps, wq)
        )
        total += wi * row
    return total * 0.25 * (q_hi - q_lo) * (p_hi - p_lo) / v
