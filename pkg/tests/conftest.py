from functools import lru_cache

import numpy as np
import pytest
from hypothesis import settings

import spincat as sc
from spincat.oracle import DenseOracle

settings.register_profile("suite", deadline=None, max_examples=25)
settings.load_profile("suite")


@lru_cache(maxsize=None)
def cached_basis(n: int) -> sc.BlockBasis:
    return sc.build_block_basis(n)


@lru_cache(maxsize=None)
def cached_oracle(n: int) -> DenseOracle:
    return DenseOracle(n)


@pytest.fixture(scope="session")
def basis():
    return cached_basis


@pytest.fixture(scope="session")
def oracle():
    return cached_oracle


def random_block_state(b: sc.BlockBasis, rng: np.random.Generator) -> sc.EnsembleState:
    """Random PSD block state with the correct weighted normalization."""
    blocks = []
    for sector in b.sectors:
        a = rng.normal(size=(sector.dim, sector.dim)) + 1j * rng.normal(size=(sector.dim, sector.dim))
        blocks.append(a @ a.conj().T)
    total = sum(
        float(s.multiplicity) * np.trace(blk).real for s, blk in zip(b.sectors, blocks)
    )
    return sc.EnsembleState(b, [blk / total for blk in blocks])


def ghz_state(b: sc.BlockBasis) -> sc.EnsembleState:
    """(|Sz=N> + |Sz=-N>)/sqrt(2) as a block state."""
    amps = np.zeros(b.top.dim, dtype=complex)
    amps[0] = amps[-1] = 1.0 / np.sqrt(2.0)
    return sc.pure_symmetric_state(b, amps)


@pytest.fixture
def make_random_state():
    return random_block_state


@pytest.fixture
def make_ghz():
    return ghz_state
