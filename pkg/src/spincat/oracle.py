"""Dense 2^N brute-force reference implementation (ground truth for tests).

Implements every operation of the block machinery on the full Hilbert
space without symmetry reduction, plus the dictionary between the two
representations (sector isometries built from highest-weight vectors and
ladder lowering).  Capped at N = 10 to keep test runtimes in minutes.

Basis convention: computational index b with bit l = 1 meaning spin l
down, so Sz|b> = (N - 2*popcount(b))|b>.  The transverse eigenbasis is
the Hadamard transform of the computational basis.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import null_space

from .blocks import BlockBasis, EnsembleState
from .errors import ConfigurationError, DomainError, ImpossibleOutcomeError

MAX_DENSE_PARTICLES = 10

_PHASE_PLUS = (1.0 - 1.0j) / math.sqrt(2.0)
_PHASE_MINUS = (1.0 + 1.0j) / math.sqrt(2.0)


class DenseOracle:
    """Full-Hilbert-space reference for an N-spin ensemble (N <= 10)."""

    def __init__(self, n: int):
        if not 1 <= n <= MAX_DENSE_PARTICLES:
            raise ConfigurationError(
                f"dense oracle supports 1 <= N <= {MAX_DENSE_PARTICLES}, got {n}"
            )
        self.N = int(n)
        self.dim = 2**self.N
        bits = np.arange(self.dim)
        popcount = np.array([bin(b).count("1") for b in bits])
        self.sz = (self.N - 2 * popcount).astype(np.int64)
        h1 = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
        h = np.array([[1.0]])
        for _ in range(self.N):
            h = np.kron(h, h1)
        self.hadamard = h
        self._j_plus = self._build_j_plus()
        self._isometries: dict[int, list[np.ndarray]] | None = None
        self._kraus_cache: dict[float, tuple[np.ndarray, np.ndarray]] = {}

    # ------------------------------------------------------------------ ops
    def _build_j_plus(self) -> np.ndarray:
        """Standard total raising operator (matrix element 1 per flip)."""
        jp = np.zeros((self.dim, self.dim))
        for b in range(self.dim):
            for l in range(self.N):
                if b & (1 << l):  # spin l down -> raise it
                    jp[b & ~(1 << l), b] = 1.0
        return jp

    @property
    def s_plus(self) -> np.ndarray:
        """Pauli-convention raising operator, S+ = sum_l (sigma_x + i sigma_y)(l)."""
        return 2.0 * self._j_plus

    @property
    def s_minus(self) -> np.ndarray:
        return self.s_plus.T

    @property
    def sx(self) -> np.ndarray:
        return (self.s_plus + self.s_minus) / 2.0

    def thermal(self, beta: float, omega_p: float) -> np.ndarray:
        """Gibbs state exp(-beta*omega_p*Sz)/Z, diagonal in the z basis."""
        if beta < 0:
            raise DomainError(f"inverse temperature must be >= 0, got {beta}")
        x = abs(beta * omega_p)
        log_z = self.N * (x + np.log1p(np.exp(-2.0 * x)))
        diag = np.exp(-beta * omega_p * self.sz - log_z)
        return np.diag(diag).astype(np.complex128)

    def kraus_operators(self, gt: float) -> tuple[np.ndarray, np.ndarray]:
        if gt not in self._kraus_cache:
            wp = _PHASE_PLUS * np.sin(np.pi / 4 + gt * self.sz / 2.0)
            wm = _PHASE_MINUS * np.sin(np.pi / 4 - gt * self.sz / 2.0)
            h = self.hadamard
            self._kraus_cache[gt] = ((h * wp) @ h, (h * wm) @ h)
        return self._kraus_cache[gt]

    def kraus_step(self, rho: np.ndarray, gt: float, outcome: int) -> tuple[np.ndarray, float]:
        w_plus, w_minus = self.kraus_operators(gt)
        w = w_plus if outcome == 1 else w_minus
        unnorm = w @ rho @ w.conj().T
        p = float(np.trace(unnorm).real)
        if p <= 1e-15:
            raise ImpossibleOutcomeError(f"outcome {outcome:+d} has probability {p}")
        return unnorm / p, p

    def outcome_probability(self, rho: np.ndarray, gt: float, outcome: int) -> float:
        w_plus, w_minus = self.kraus_operators(gt)
        w = w_plus if outcome == 1 else w_minus
        return float(np.trace(w @ rho @ w.conj().T).real)

    def double_commutator(self, rho: np.ndarray) -> np.ndarray:
        gaps = np.subtract.outer(self.sz, self.sz).astype(float)
        return gaps**2 * rho

    def catness(self, rho: np.ndarray) -> float:
        return 0.5 * float(np.abs(np.linalg.eigvalsh(self.double_commutator(rho))).sum())

    def sx_projector(self, m_value: int) -> np.ndarray:
        ind = (self.sz == m_value).astype(float)
        h = self.hadamard
        return (h * ind) @ h

    def projection(self, rho: np.ndarray, m_value: int) -> tuple[np.ndarray, float]:
        p_op = self.sx_projector(m_value)
        unnorm = p_op @ rho @ p_op
        p = float(np.trace(unnorm).real)
        if p <= 1e-15:
            raise ImpossibleOutcomeError(f"projection onto Sx = {m_value} has probability {p}")
        return unnorm / p, p

    def q_prime(self, rho: np.ndarray, eta: np.ndarray) -> float:
        comm = np.diag(self.sz.astype(float)) @ rho - rho @ np.diag(self.sz.astype(float))
        return abs(complex(np.trace(eta @ comm)).imag)

    def q_prime_projector(self, rho: np.ndarray) -> np.ndarray:
        """Projector onto the nonnegative eigenspace of i[Sz, rho]."""
        sz = np.diag(self.sz.astype(float))
        herm = 1j * (sz @ rho - rho @ sz)
        eigs, vecs = np.linalg.eigh(herm)
        u = vecs[:, eigs >= -1e-12 * max(1.0, float(np.abs(eigs).max()))]
        return u @ u.conj().T

    def evolve_phase(self, rho: np.ndarray, omega: float, t: float) -> np.ndarray:
        """exp(-i*omega*t*Sz) rho exp(+i*omega*t*Sz) (elementwise phases)."""
        phase = np.exp(-1j * omega * t * self.sz)
        return (phase[:, None] * rho) * phase.conj()[None, :]

    # ------------------------------------------------- block <-> dense maps
    def isometries(self) -> dict[int, list[np.ndarray]]:
        """Per sector 2j: one (2^N x (2j+1)) isometry per multiplicity copy.

        Columns are the |j, m, copy> states ordered by ascending Sz
        eigenvalue, generated by lowering orthonormal highest-weight
        vectors, so they intertwine the sector operators exactly.
        """
        if self._isometries is not None:
            return self._isometries
        iso: dict[int, list[np.ndarray]] = {}
        for twoj in range(self.N, -1, -2):
            top_idx = np.flatnonzero(self.sz == twoj)
            if twoj == self.N:
                kernel = np.ones((1, 1))
            else:
                above_idx = np.flatnonzero(self.sz == twoj + 2)
                a = self._j_plus[np.ix_(above_idx, top_idx)]
                kernel = null_space(a)
            copies = []
            j = twoj / 2.0
            for c in range(kernel.shape[1]):
                vec = np.zeros(self.dim)
                vec[top_idx] = kernel[:, c]
                cols = [vec]
                m = j
                while m > -j + 0.5:
                    factor = math.sqrt(j * (j + 1) - m * (m - 1))
                    vec = (self._j_plus.T @ vec) / factor
                    cols.append(vec)
                    m -= 1.0
                copies.append(np.column_stack(cols[::-1]))  # ascending Sz
            iso[twoj] = copies
        self._isometries = iso
        return iso

    def block_to_dense(self, state: EnsembleState) -> np.ndarray:
        """Embed a block state into the full 2^N space."""
        iso = self.isometries()
        rho = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for sector, block in zip(state.basis.sectors, state.blocks):
            r = sector.rotation_zx
            block_z = r.T @ block @ r
            for w in iso[sector.twoj]:
                rho += w @ block_z @ w.conj().T
        return rho

    def dense_to_block(self, rho: np.ndarray, basis: BlockBasis) -> EnsembleState:
        """Project a dense state onto the block form (averaging over copies)."""
        iso = self.isometries()
        blocks = []
        for sector in basis.sectors:
            copies = iso[sector.twoj]
            block_z = sum(w.conj().T @ rho @ w for w in copies) / len(copies)
            r = sector.rotation_zx
            blocks.append(np.ascontiguousarray(r @ block_z @ r.T, dtype=np.complex128))
        return EnsembleState(basis, blocks)


def max_abs_difference(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)))
