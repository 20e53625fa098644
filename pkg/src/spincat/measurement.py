"""Kraus pair of one ancilla Ramsey cycle and the conditional state update.

A single cycle couples the ancilla to the ensemble through the transverse
collective spin, so the two conditional update operators are diagonal in
the working (Sx) basis:

    w_plus(s)  = (1-i)/sqrt(2) * sin(pi/4 + gt*s/2)
    w_minus(s) = (1+i)/sqrt(2) * sin(pi/4 - gt*s/2)

with s running over the Sx eigenvalues of each sector.  They commute, form
a complete POVM (|w+|^2 + |w-|^2 = 1), and satisfy
w_plus * w_minus = cos(gt*s)/2 up to the unit phase (1-i)(1+i)/2 = 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .blocks import BlockBasis, EnsembleState
from .errors import ContractViolationError, DomainError, ImpossibleOutcomeError

PLUS = 1
MINUS = -1

#: outcomes below this probability are treated as impossible
PROBABILITY_FLOOR = 1e-15

_PHASE_PLUS = (1.0 - 1.0j) / math.sqrt(2.0)
_PHASE_MINUS = (1.0 + 1.0j) / math.sqrt(2.0)


@dataclass(frozen=True)
class KrausPair:
    """Diagonal entries of the two conditional update operators, per sector.

    ``w_plus[i]``/``w_minus[i]`` are the complex diagonal entries over
    ``basis.sectors[i].sx_eigenvalues``.  The real amplitude arrays
    (``amp_plus``/``amp_minus``, the sine factors without the constant
    phases) are what conjugation actually uses; the phases cancel in
    rho -> W rho W+.
    """

    basis: BlockBasis
    gt: float
    w_plus: tuple[np.ndarray, ...]
    w_minus: tuple[np.ndarray, ...]
    amp_plus: tuple[np.ndarray, ...] = field(repr=False)
    amp_minus: tuple[np.ndarray, ...] = field(repr=False)


def build_kraus(basis: BlockBasis, gt: float) -> KrausPair:
    """Kraus pair for coupling-time product ``gt`` on ``basis``.

    Warns (does not fail) when gt*N exceeds pi/2: the convergence
    prediction then has several candidate fixed points per outcome ratio.
    """
    if not math.isfinite(gt):
        raise DomainError(f"gt must be finite, got {gt}")
    if gt * basis.N > math.pi / 2:
        warnings.warn(
            f"gt*N = {gt * basis.N:.4g} > pi/2: several convergence candidates per trajectory",
            stacklevel=2,
        )
    w_plus, w_minus, amp_plus, amp_minus = [], [], [], []
    for sector in basis.sectors:
        s = sector.sx_eigenvalues.astype(np.float64)
        ap = np.sin(np.pi / 4 + gt * s / 2.0)
        am = np.sin(np.pi / 4 - gt * s / 2.0)
        for arr in (ap, am):
            arr.setflags(write=False)
        amp_plus.append(ap)
        amp_minus.append(am)
        w_plus.append(_PHASE_PLUS * ap)
        w_minus.append(_PHASE_MINUS * am)
    return KrausPair(
        basis=basis,
        gt=float(gt),
        w_plus=tuple(w_plus),
        w_minus=tuple(w_minus),
        amp_plus=tuple(amp_plus),
        amp_minus=tuple(amp_minus),
    )


def _weighted_diagonal_sum(state: EnsembleState, amps: tuple[np.ndarray, ...]) -> float:
    total = 0.0
    for sector, block, a in zip(state.basis.sectors, state.blocks, amps):
        diag = np.einsum("ii->i", block).real
        total += float(sector.multiplicity) * float(np.dot(a * a, diag))
    return total


def outcome_probabilities(state: EnsembleState, kraus: KrausPair) -> tuple[float, float]:
    """(p_plus, p_minus) for one measurement on ``state``.

    Both probabilities are computed independently (their sum is the
    weighted trace, a completeness check) and clamped to [0, 1].
    """
    trace = state.weighted_trace()
    if abs(trace - 1.0) > 1e-6:
        raise ContractViolationError(f"state is not normalized (weighted trace {trace})")
    p_plus = _weighted_diagonal_sum(state, kraus.amp_plus)
    p_minus = _weighted_diagonal_sum(state, kraus.amp_minus)
    if abs(p_plus + p_minus - 1.0) > 1e-10:
        raise ContractViolationError(
            f"POVM completeness violated: p+ + p- = {p_plus + p_minus}"
        )
    if p_plus < -1e-12 or p_plus > 1.0 + 1e-12 or p_minus < -1e-12 or p_minus > 1.0 + 1e-12:
        raise ContractViolationError(f"probabilities out of range: {p_plus}, {p_minus}")
    return min(max(p_plus, 0.0), 1.0), min(max(p_minus, 0.0), 1.0)


def apply_outcome(state: EnsembleState, kraus: KrausPair, outcome: int) -> EnsembleState:
    """Conditional update rho -> W rho W+ / p for the given outcome (+1/-1).

    Returns a new state; the input is left untouched.  Raises
    ImpossibleOutcomeError when the outcome probability is below
    PROBABILITY_FLOOR.
    """
    if outcome not in (PLUS, MINUS):
        raise DomainError(f"outcome must be +1 or -1, got {outcome!r}")
    p_plus, p_minus = outcome_probabilities(state, kraus)
    p = p_plus if outcome == PLUS else p_minus
    if p <= PROBABILITY_FLOOR:
        raise ImpossibleOutcomeError(f"outcome {outcome:+d} has probability {p}")
    amps = kraus.amp_plus if outcome == PLUS else kraus.amp_minus
    inv_sqrt_p = 1.0 / math.sqrt(p)
    blocks = []
    for block, a in zip(state.blocks, amps):
        b = a * inv_sqrt_p
        blocks.append((block * b[:, None]) * b[None, :])
    return EnsembleState(state.basis, blocks)
