import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import spincat as sc
from spincat.errors import ConfigurationError, DomainError

from tests.conftest import cached_basis


def test_dimension_sum_is_exact():
    # exact integer arithmetic all the way up
    for n in [1, 2, 3, 4, 7, 12, 31, 64, 127, 200]:
        sectors = [(twoj, sc.blocks.multiplicity(n, twoj)) for twoj in range(n, -1, -2)]
        assert sum(d * (twoj + 1) for twoj, d in sectors) == 2**n


def test_small_multiplicities(basis):
    b2 = basis(2)
    assert [(s.twoj, s.multiplicity) for s in b2.sectors] == [(2, 1), (0, 1)]
    b4 = basis(4)
    assert [(s.twoj, s.multiplicity) for s in b4.sectors] == [(4, 1), (2, 3), (0, 2)]
    b1 = basis(1)
    assert len(b1.sectors) == 1
    assert b1.sectors[0].multiplicity == 1
    assert list(b1.sectors[0].sx_eigenvalues) == [-1, 1]


def test_particle_count_bounds():
    with pytest.raises(ConfigurationError):
        sc.build_block_basis(0)
    with pytest.raises(ConfigurationError):
        sc.build_block_basis(201)


@pytest.mark.parametrize("n", [1, 2, 3, 6, 11, 24])
def test_rotation_is_orthogonal(basis, n):
    for s in basis(n).sectors:
        r = s.rotation_zx
        assert np.max(np.abs(r @ r.T - np.eye(s.dim))) < 1e-12


@pytest.mark.parametrize("n", [2, 5, 13, 127])
def test_sz_matrix_spectrum_and_rotation(basis, n):
    for s in basis(n).sectors:
        expected = np.arange(-s.twoj, s.twoj + 1, 2, dtype=float)
        eigs = np.linalg.eigvalsh(s.sz_matrix_x)
        assert np.max(np.abs(eigs - expected)) < 1e-10
        back = s.rotation_zx.T @ s.sz_matrix_x @ s.rotation_zx
        assert np.max(np.abs(back - np.diag(expected))) < 1e-10


def test_sx_eigenvalues_integers_with_parity(basis):
    for n in (3, 8):
        b = basis(n)
        for s in b.sectors:
            vals = s.sx_eigenvalues
            assert vals.dtype.kind == "i"
            assert np.all((vals - n) % 2 == 0)
        assert list(b.top.sx_eigenvalues) == list(range(-n, n + 1, 2))


def test_thermal_infinite_temperature_is_maximally_mixed(basis):
    b = basis(4)
    state = sc.thermal_state(b, 0.0, 0.5)
    for s, blk in zip(b.sectors, state.blocks):
        assert np.max(np.abs(blk - np.eye(s.dim) / 2**4)) < 1e-14
    assert abs(state.weighted_trace() - 1.0) < 1e-12


def test_thermal_low_temperature_ground_state(basis):
    b = basis(6)
    state = sc.thermal_state(b, 1e3, 0.5)
    top, blk = b.top, state.blocks[0]
    weight_top = top.multiplicity * np.trace(blk).real
    assert weight_top > 1 - 1e-6
    # Sz = -N component dominates: rotate back to the Sz eigenbasis
    blk_z = top.rotation_zx.T @ blk @ top.rotation_zx
    assert blk_z[0, 0].real >= 1 - 1e-6


@pytest.mark.parametrize("beta", [0.0, 0.5, 2.0, 10.0])
@pytest.mark.parametrize("n", [2, 5, 8])
def test_thermal_matches_dense_product_state(basis, oracle, n, beta):
    state = sc.thermal_state(basis(n), beta, 0.5)
    orc = oracle(n)
    dense = orc.thermal(beta, 0.5)
    projected = orc.dense_to_block(dense, basis(n))
    for a, b_ in zip(state.blocks, projected.blocks):
        assert np.max(np.abs(a - b_)) < 1e-10
    assert sc.max_abs_difference(orc.block_to_dense(state), dense) < 1e-10


def test_thermal_negative_beta_rejected(basis):
    with pytest.raises(DomainError):
        sc.thermal_state(basis(2), -0.1, 0.5)


@given(n=st.integers(min_value=1, max_value=20), beta=st.floats(0.0, 5.0))
def test_thermal_state_is_valid(n, beta):
    state = sc.thermal_state(cached_basis(n), beta, 0.5)
    state.validate()


def test_dicke_all_plus_product_state(basis, oracle):
    state = sc.dicke_state(basis(2), 2)
    dense = oracle(2).block_to_dense(state)
    plus = np.array([1.0, 1.0]) / math.sqrt(2.0)
    expected = np.outer(np.kron(plus, plus), np.kron(plus, plus))
    assert sc.max_abs_difference(dense, expected) < 1e-12


def test_dicke_is_sx_eigenstate(basis):
    state = sc.dicke_state(basis(4), 0)
    assert abs(state.sx_moment(1)) < 1e-12
    assert abs(state.sx_moment(2)) < 1e-12


def test_dicke_sz_moments_match_variance_formula(basis):
    state = sc.dicke_state(basis(3), 1)
    assert abs(state.sz_moment(1)) < 1e-10
    assert abs(state.sz_moment(2) - 7.0) < 1e-10  # (9 - 1)/2 + 3


def test_dicke_rejects_bad_eigenvalues(basis):
    with pytest.raises(DomainError):
        sc.dicke_state(basis(4), 1)  # parity mismatch
    with pytest.raises(DomainError):
        sc.dicke_state(basis(4), 6)  # out of range


def test_dicke_variance_values():
    assert sc.dicke_variance(4, 0) == 12.0
    assert sc.dicke_variance(4, 4) == 4.0
    assert sc.dicke_variance(4, -4) == 4.0
    with pytest.raises(DomainError):
        sc.dicke_variance(4, 5)


def test_dicke_variance_against_dense_brute_force(basis, oracle):
    orc = oracle(2)
    rho = orc.block_to_dense(sc.dicke_state(basis(2), 0))
    sz = np.diag(orc.sz.astype(float))
    var = np.trace(sz @ sz @ rho).real - np.trace(sz @ rho).real ** 2
    assert abs(var - sc.dicke_variance(2, 0)) < 1e-12
    assert abs(var - 4.0) < 1e-12


@pytest.mark.parametrize("n", [1, 2, 3, 5, 9, 16, 33, 64, 127])
def test_dicke_variance_matches_matrix_computation(basis, n):
    b = basis(n)
    xis = range(-n, n + 1, 2) if n <= 16 else [-n, -n + 2, -(n % 2 + 4), n % 2, n % 2 + 6, n - 4, n]
    for xi in xis:
        state = sc.dicke_state(b, xi)
        var = state.sz_moment(2) - state.sz_moment(1) ** 2
        assert abs(var - sc.dicke_variance(n, xi)) < 1e-8


def test_pure_symmetric_state_binomial_amplitudes(basis):
    # |up>^N in the transverse basis carries binomial weights C(N, r)/2^N
    b = basis(5)
    state = sc.all_up_state(b)
    diag = np.diag(state.blocks[0]).real
    expected = np.array([math.comb(5, r) / 2**5 for r in range(6)])
    assert np.max(np.abs(diag - expected)) < 1e-12
    for blk in state.blocks[1:]:
        assert not blk.any()


def test_pure_symmetric_state_requires_normalization(basis):
    with pytest.raises(DomainError):
        sc.pure_symmetric_state(basis(2), np.array([1.0, 1.0, 1.0]))
