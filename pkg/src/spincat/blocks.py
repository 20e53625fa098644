"""Total-spin block decomposition of a collective spin-1/2 ensemble.

N spins-1/2 decompose into total-spin sectors j = N/2, N/2-1, ..., each
occurring with multiplicity d(N, j) = C(N, N/2-j) - C(N, N/2-j-1).  Every
collective operator (sums of identical single-spin operators) acts
identically on the d(N, j) copies of a sector, so states generated from
collective initial conditions are fully described by one (2j+1)x(2j+1)
matrix per sector plus the multiplicity.

Conventions used throughout the package:

* collective operators are Pauli sums, ``Sz = sum_l sigma_z(l)``; sector
  operators are therefore twice the standard spin-j matrices and all
  eigenvalues are integers with the parity of N,
* every stored matrix (states, Sz) is expressed in the eigenbasis of the
  transverse component Sx, ordered by ascending eigenvalue, because the
  measurement backaction is diagonal there,
* a state is normalized so that sum_j d(N, j) * trace(block_j) = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, ContractViolationError, DomainError

MAX_PARTICLES = 200


def multiplicity(n: int, twoj: int) -> int:
    """Exact number of spin-(twoj/2) sectors in the n-spin decomposition."""
    k = (n - twoj) // 2
    d = comb(n, k) - (comb(n, k - 1) if k >= 1 else 0)
    return d


@dataclass(frozen=True)
class Sector:
    """One total-spin sector: operators in the Sx eigenbasis plus bookkeeping.

    Attributes
    ----------
    twoj:
        Twice the total spin quantum number (integer, parity of N).
    multiplicity:
        Exact count d(N, j) of copies of this sector (Python int; can
        exceed 2**63 for large N).
    sx_eigenvalues:
        The 2j+1 eigenvalues of Sx in this sector, ascending:
        -2j, -2j+2, ..., 2j (exact integers).
    rotation_zx:
        Real orthogonal change of basis from the Sz eigenbasis (ascending
        eigenvalue) to the Sx eigenbasis: ``coords_x = rotation_zx @ coords_z``.
    sz_matrix_x:
        Sz expressed in the Sx eigenbasis (complex128, Hermitian,
        tridiagonal up to rounding).
    """

    twoj: int
    multiplicity: int
    sx_eigenvalues: np.ndarray
    rotation_zx: np.ndarray
    sz_matrix_x: np.ndarray
    sz_sq_x: np.ndarray = field(repr=False)

    @property
    def j(self) -> float:
        return self.twoj / 2.0

    @property
    def dim(self) -> int:
        return self.twoj + 1

    def eigenvalue_index(self, s: int) -> int:
        """Position of Sx eigenvalue ``s`` in this sector's basis ordering."""
        if abs(s) > self.twoj or (s + self.twoj) % 2 != 0:
            raise DomainError(f"{s} is not an Sx eigenvalue of a 2j={self.twoj} sector")
        return (s + self.twoj) // 2


@dataclass(frozen=True)
class BlockBasis:
    """Sector decomposition of N spins with per-sector operator matrices.

    Sectors are ordered by descending j (the fully symmetric sector first).
    Immutable after construction; safe to share between workers.
    """

    N: int
    sectors: tuple[Sector, ...]

    @property
    def top(self) -> Sector:
        return self.sectors[0]

    def sector_weights(self) -> np.ndarray:
        """Multiplicities as floats, in sector order."""
        return np.array([float(s.multiplicity) for s in self.sectors])

    def zero_blocks(self) -> list[np.ndarray]:
        return [np.zeros((s.dim, s.dim), dtype=np.complex128) for s in self.sectors]


def _sector_from_twoj(n: int, twoj: int) -> Sector:
    j = twoj / 2.0
    m = np.arange(-j, j + 0.5, 1.0)  # standard magnetic quantum numbers
    sx_eigs = np.arange(-twoj, twoj + 1, 2, dtype=np.int64)
    # Pauli-sum Sx = J+ + J- with standard ladder couplings.
    coup = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    sx = np.diag(coup, 1) + np.diag(coup, -1)
    evals, vecs = np.linalg.eigh(sx)
    if np.max(np.abs(evals - sx_eigs)) > 1e-8 * max(1.0, n):
        raise ContractViolationError(
            f"Sx eigenvalues of sector 2j={twoj} deviate from the exact spectrum"
        )
    # Deterministic phase: largest-|component| entry of each eigenvector positive.
    for col in range(vecs.shape[1]):
        lead = np.argmax(np.abs(vecs[:, col]))
        if vecs[lead, col] < 0.0:
            vecs[:, col] *= -1.0
    rotation_zx = np.ascontiguousarray(vecs.T)
    sz_diag = sx_eigs.astype(np.float64)
    sz_x = (rotation_zx * sz_diag) @ rotation_zx.T
    sz_x_c = np.ascontiguousarray(sz_x, dtype=np.complex128)
    sz_sq_c = np.ascontiguousarray(sz_x @ sz_x, dtype=np.complex128)
    for arr in (sx_eigs, rotation_zx, sz_x_c, sz_sq_c):
        arr.setflags(write=False)
    return Sector(
        twoj=twoj,
        multiplicity=multiplicity(n, twoj),
        sx_eigenvalues=sx_eigs,
        rotation_zx=rotation_zx,
        sz_matrix_x=sz_x_c,
        sz_sq_x=sz_sq_c,
    )


def build_block_basis(n: int) -> BlockBasis:
    """Build the total-spin sector decomposition for ``n`` spins.

    Parameters
    ----------
    n:
        Particle count, 1 <= n <= 200.

    Returns
    -------
    BlockBasis
        Sectors ordered by descending total spin.
    """
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_PARTICLES:
        raise ConfigurationError(f"particle count must be an integer in [1, {MAX_PARTICLES}], got {n!r}")
    sectors = tuple(_sector_from_twoj(n, twoj) for twoj in range(n, -1, -2))
    basis = BlockBasis(N=int(n), sectors=sectors)
    total = sum(s.multiplicity * s.dim for s in sectors)
    if total != 2**n:
        raise ContractViolationError(f"dimension count {total} != 2^{n}")
    return basis


@dataclass
class EnsembleState:
    """Block-diagonal density matrix of the ensemble, in the Sx eigenbasis.

    ``blocks[i]`` is the per-copy matrix of ``basis.sectors[i]``; the full
    2^N-dimensional state is the direct sum of each block repeated
    d(N, j) times, so the normalization reads
    ``sum_j d(N, j) * trace(block_j) = 1``.
    """

    basis: BlockBasis
    blocks: list[np.ndarray]

    def copy(self) -> "EnsembleState":
        return EnsembleState(self.basis, [b.copy() for b in self.blocks])

    def weighted_trace(self) -> float:
        return float(
            sum(
                float(s.multiplicity) * np.trace(b).real
                for s, b in zip(self.basis.sectors, self.blocks)
            )
        )

    def validate(
        self,
        herm_atol: float = 1e-12,
        psd_atol: float = 1e-10,
        trace_atol: float = 1e-10,
    ) -> None:
        """Raise ContractViolationError unless Hermitian, PSD and normalized."""
        for s, b in zip(self.basis.sectors, self.blocks):
            scale = max(1.0, float(np.max(np.abs(b))))
            if np.max(np.abs(b - b.conj().T)) > herm_atol * scale:
                raise ContractViolationError(f"sector 2j={s.twoj} block is not Hermitian")
            if b.any():
                lo = float(np.linalg.eigvalsh(b)[0])
                if lo < -psd_atol:
                    raise ContractViolationError(
                        f"sector 2j={s.twoj} block has negative eigenvalue {lo}"
                    )
        tr = self.weighted_trace()
        if abs(tr - 1.0) > trace_atol:
            raise ContractViolationError(f"weighted trace {tr} != 1")

    def sx_moment(self, power: int = 1) -> float:
        """Expectation of Sx**power (diagonal in the working basis)."""
        total = 0.0
        for s, b in zip(self.basis.sectors, self.blocks):
            diag = np.einsum("ii->i", b).real
            total += float(s.multiplicity) * float(
                np.dot(s.sx_eigenvalues.astype(float) ** power, diag)
            )
        return total

    def sz_moment(self, power: int = 1) -> float:
        """Expectation of Sz**power via the rotated sector matrices."""
        total = 0.0
        for s, b in zip(self.basis.sectors, self.blocks):
            if not b.any():
                continue
            op = s.sz_matrix_x if power == 1 else s.sz_sq_x
            if power not in (1, 2):
                op = np.linalg.matrix_power(s.sz_matrix_x, power)
            total += float(s.multiplicity) * float(np.trace(op @ b).real)
        return total


def _log_partition(beta: float, omega_p: float, n: int) -> float:
    # ln (2 cosh(beta*omega))^N, overflow-safe
    x = abs(beta * omega_p)
    return n * (x + np.log1p(np.exp(-2.0 * x)))


def thermal_state(basis: BlockBasis, beta: float, omega_p: float) -> EnsembleState:
    """Gibbs state exp(-beta * omega_p * Sz) / Z in block form.

    Z = (2 cosh(beta*omega_p))**N.  Within each sector the state is
    diagonal in the Sz eigenbasis with entries exp(-beta*omega_p*s)/Z,
    identical across the multiplicity copies, then rotated into the
    working (Sx) basis.
    """
    if beta < 0:
        raise DomainError(f"inverse temperature must be >= 0, got {beta}")
    log_z = _log_partition(beta, omega_p, basis.N)
    blocks = []
    for s in basis.sectors:
        sz = s.sx_eigenvalues.astype(np.float64)  # Sz spectrum equals Sx spectrum
        diag = np.exp(-beta * omega_p * sz - log_z)
        r = s.rotation_zx
        block = (r * diag) @ r.T
        blocks.append(np.ascontiguousarray(block, dtype=np.complex128))
    return EnsembleState(basis, blocks)


def dicke_state(basis: BlockBasis, theta: int) -> EnsembleState:
    """Pure transverse Dicke state |Sx = theta> as a block state.

    Lives in the fully symmetric sector; ``theta`` must have the parity
    of N and satisfy |theta| <= N.
    """
    n = basis.N
    if abs(theta) > n or (theta - n) % 2 != 0:
        raise DomainError(f"Sx eigenvalue {theta} is not admissible for N={n}")
    blocks = basis.zero_blocks()
    idx = basis.top.eigenvalue_index(int(theta))
    blocks[0][idx, idx] = 1.0
    return EnsembleState(basis, blocks)


def pure_symmetric_state(basis: BlockBasis, sz_amplitudes: Sequence[complex]) -> EnsembleState:
    """Pure state of the symmetric sector given amplitudes over the
    ascending Sz eigenbasis (-N, -N+2, ..., N).

    The all-up product state is ``sz_amplitudes = (0, ..., 0, 1)``.
    """
    amps = np.asarray(sz_amplitudes, dtype=np.complex128)
    top = basis.top
    if amps.shape != (top.dim,):
        raise DomainError(f"expected {top.dim} amplitudes, got shape {amps.shape}")
    norm = float(np.linalg.norm(amps))
    if abs(norm - 1.0) > 1e-10:
        raise DomainError(f"amplitudes must be normalized, |psi| = {norm}")
    coords_x = top.rotation_zx @ amps
    blocks = basis.zero_blocks()
    blocks[0][:, :] = np.outer(coords_x, coords_x.conj())
    return EnsembleState(basis, blocks)


def all_up_state(basis: BlockBasis) -> EnsembleState:
    """The |up>^N product state (Sz = +N eigenstate)."""
    amps = np.zeros(basis.top.dim)
    amps[-1] = 1.0
    return pure_symmetric_state(basis, amps)


def dicke_variance(n: int, xi: float) -> float:
    """Variance of Sz in the transverse Dicke state |Sx = xi>:
    (N**2 - xi**2)/2 + N."""
    if abs(xi) > n:
        raise DomainError(f"|xi| = {abs(xi)} exceeds N = {n}")
    return (n**2 - xi**2) / 2.0 + n
