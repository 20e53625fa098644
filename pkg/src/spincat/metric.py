"""Macroscopic-coherence metric and related projector machinery.

The central quantity ("catness") is half the trace norm of the double
commutator of the longitudinal collective spin with the state,
0.5 * ||[Sz, [Sz, rho]]||_1.  It weights coherence between Sz eigenspaces
by the squared eigenvalue separation, so values of order N^2 signal
superpositions of macroscopically distinct magnetizations.

Everything here acts blockwise: the trace norm of a block-diagonal matrix
is the multiplicity-weighted sum of sector trace norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .blocks import BlockBasis, EnsembleState
from .errors import DomainError, ImpossibleOutcomeError

#: eigenvalues of the double commutator with |lambda| below this times the
#: largest matrix entry count as zero (and are included in the projector)
ZERO_EIGENVALUE_RTOL = 1e-12


@dataclass(frozen=True)
class CatnessReport:
    """Catness value with its per-sector decomposition.

    ``value`` equals ``contributions.sum()`` where ``contributions[i]`` is
    d(N, j_i) * 0.5 * ||D_i||_1 for the sector double-commutator block D_i.
    """

    N: int
    value: float
    contributions: np.ndarray


@dataclass(frozen=True)
class ProjectorSpec:
    """Blockwise orthogonal projector (Hermitian, idempotent per sector)."""

    basis: BlockBasis
    blocks: tuple[np.ndarray, ...]
    sector_ranks: tuple[int, ...]

    @property
    def rank(self) -> int:
        """Total rank in the full 2^N space (exact integer)."""
        return sum(
            s.multiplicity * r for s, r in zip(self.basis.sectors, self.sector_ranks)
        )


def double_commutator(state: EnsembleState) -> list[np.ndarray]:
    """[Sz, [Sz, rho]] per sector, in the working basis.

    Each block is Hermitian and traceless (up to rounding)."""
    out = []
    for sector, block in zip(state.basis.sectors, state.blocks):
        if not block.any():
            out.append(np.zeros_like(block))
            continue
        sz = sector.sz_matrix_x
        sz2 = sector.sz_sq_x
        out.append(sz2 @ block - 2.0 * (sz @ block @ sz) + block @ sz2)
    return out


def catness(state: EnsembleState) -> CatnessReport:
    """0.5 * ||[Sz, [Sz, rho]]||_1 with per-sector contributions."""
    contributions = np.zeros(len(state.blocks))
    for i, (sector, d) in enumerate(zip(state.basis.sectors, double_commutator(state))):
        if not d.any():
            continue
        eigs = np.linalg.eigvalsh(d)
        contributions[i] = float(sector.multiplicity) * 0.5 * float(np.abs(eigs).sum())
    return CatnessReport(N=state.basis.N, value=float(contributions.sum()), contributions=contributions)


def tr_projection_form(n: int, m_value: int, beta: float, omega_p: float) -> float:
    """Closed form (N^2 - M^2) * tanh(beta*omega_p)^2 + 2N.

    This is Tr(P(M) [Sz, [Sz, rho_M]]) for the Gibbs state projected onto
    the Sx = M eigenspace.
    """
    if abs(m_value) > n or (m_value - n) % 2 != 0:
        raise DomainError(f"M = {m_value} is not an admissible Sx eigenvalue for N = {n}")
    return (n**2 - m_value**2) * math.tanh(beta * omega_p) ** 2 + 2.0 * n


def projection_postselect(state: EnsembleState, m_value: int) -> tuple[EnsembleState, float]:
    """Project onto the Sx = M eigenspace and renormalize.

    Returns (post-measurement state, outcome probability).  Within each
    sector the M eigenspace of a copy is one-dimensional, so the surviving
    block is the single diagonal entry at M.
    """
    n = state.basis.N
    if abs(m_value) > n or (m_value - n) % 2 != 0:
        raise DomainError(f"M = {m_value} is not an admissible Sx eigenvalue for N = {n}")
    kept = []
    probability = 0.0
    for sector, block in zip(state.basis.sectors, state.blocks):
        if abs(m_value) > sector.twoj:
            kept.append(None)
            continue
        idx = sector.eigenvalue_index(m_value)
        w = block[idx, idx].real
        probability += float(sector.multiplicity) * float(w)
        kept.append((idx, w))
    if probability <= 1e-15:
        raise ImpossibleOutcomeError(f"projection onto Sx = {m_value} has probability {probability}")
    blocks = state.basis.zero_blocks()
    for i, entry in enumerate(kept):
        if entry is not None:
            idx, w = entry
            blocks[i][idx, idx] = w / probability
    return EnsembleState(state.basis, blocks), probability


def _positive_eigenspace(blocks: list[np.ndarray], basis: BlockBasis) -> ProjectorSpec:
    scale = max((float(np.max(np.abs(b))) for b in blocks if b.size), default=0.0)
    tol = ZERO_EIGENVALUE_RTOL * scale
    projectors = []
    ranks = []
    for b in blocks:
        eigs, vecs = np.linalg.eigh(b)
        sel = eigs >= -tol
        u = vecs[:, sel]
        projectors.append(np.ascontiguousarray(u @ u.conj().T))
        ranks.append(int(sel.sum()))
    return ProjectorSpec(basis=basis, blocks=tuple(projectors), sector_ranks=tuple(ranks))


def optimal_projector(state: EnsembleState) -> ProjectorSpec:
    """Projector onto the nonnegative eigenspace of [Sz, [Sz, rho]].

    Achieves Tr(eta D) = sum of positive eigenvalues of D; since D is
    traceless this equals 0.5 * ||D||_1, i.e. the catness.
    """
    return _positive_eigenspace(double_commutator(state), state.basis)


def commutator_blocks(state: EnsembleState) -> list[np.ndarray]:
    """i [Sz, rho] per sector (Hermitian)."""
    out = []
    for sector, block in zip(state.basis.sectors, state.blocks):
        if not block.any():
            out.append(np.zeros_like(block))
            continue
        sz = sector.sz_matrix_x
        out.append(1j * (sz @ block - block @ sz))
    return out


def commutator_projector(state: EnsembleState) -> ProjectorSpec:
    """Projector onto the nonnegative eigenspace of i [Sz, rho].

    This is the projector that maximizes |Tr(eta [Sz, rho])| over all
    orthogonal projectors; it is the useful readout for the Ramsey signal.
    (The catness projector built from the double commutator is real for
    the real-matrix states this protocol produces and yields exactly zero
    there.)
    """
    return _positive_eigenspace(commutator_blocks(state), state.basis)


def q_prime(state: EnsembleState, projector: ProjectorSpec) -> float:
    """|Tr(eta [Sz, rho])| for a blockwise projector eta.

    The commutator is anti-Hermitian, so the trace is purely imaginary;
    its magnitude is returned.
    """
    total = 0.0 + 0.0j
    for sector, block, eta in zip(state.basis.sectors, state.blocks, projector.blocks):
        if not block.any():
            continue
        sz = sector.sz_matrix_x
        comm = sz @ block - block @ sz
        total += float(sector.multiplicity) * np.trace(eta @ comm)
    return abs(total.imag)
