"""Basis conventions, parameter validation, sectors, joint diagonalization."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from sixvertex import vertex
from sixvertex.lattice import (
    BlockingError, ModelParams, SIGMA_MINUS, SIGMA_X, SIGMA_Z,
    basis_index, basis_spins, embed_site, from_sector_blocks,
    joint_eigenbasis, off_sector_mass, pseudovacuum, sector_dimension,
    sector_indices, to_sector_blocks, total_sz_diagonal,
)

from conftest import generic_params


# ----------------------------------------------------------------------
# basis indexing


def test_basis_index_pinned_values():
    assert basis_index((1, 1)) == 0
    assert basis_index((1, -1)) == 1
    assert basis_index((-1, 1, 1)) == 4


@given(st.integers(min_value=1, max_value=10), st.data())
@settings(max_examples=60, deadline=None)
def test_basis_roundtrip(n, data):
    idx = data.draw(st.integers(min_value=0, max_value=(1 << n) - 1))
    assert basis_index(basis_spins(idx, n)) == idx


def test_basis_rejects_bad_spin():
    with pytest.raises(ValueError):
        basis_index((1, 0))


# ----------------------------------------------------------------------
# embeddings


def test_embed_sigma_z_site1():
    out = embed_site(SIGMA_Z, 1, 2)
    assert_allclose(out, np.diag([1, -1, 1, -1]).astype(complex))


def test_embed_sigma_minus_site2_moves_0_to_2():
    out = embed_site(SIGMA_MINUS, 2, 2)
    col = out[:, 0]
    assert col[2] == 1.0 and np.abs(col).sum() == 1.0


@given(st.integers(min_value=2, max_value=6), st.data())
@settings(max_examples=40, deadline=None)
def test_disjoint_embeddings_commute(n, data):
    i = data.draw(st.integers(min_value=1, max_value=n))
    j = data.draw(st.integers(min_value=1, max_value=n))
    if i == j:
        return
    a = embed_site(SIGMA_X, i, n)
    b = embed_site(SIGMA_Z, j, n)
    assert_allclose(a @ b, b @ a, atol=1e-14)


# ----------------------------------------------------------------------
# parameters


def test_eta_product_renormalized():
    p = ModelParams(n_sites=2, q=np.exp(0.3j), omega=1.2, eta=(2.0, 1.0))
    assert p.eta_renormalized
    assert abs(np.prod(np.array(p.eta)) - 1) < 1e-12


def test_q_near_unity_rejected():
    with pytest.raises(ValueError):
        ModelParams(n_sites=2, q=1.0, omega=1.0, eta=(1.0, 1.0))
    with pytest.raises(ValueError):
        ModelParams(n_sites=2, q=-1.0, omega=1.0, eta=(1.0, 1.0))


def test_eta_site_ordering():
    # stored order is (eta_N, ..., eta_1)
    p = ModelParams(n_sites=2, q=np.exp(0.3j), omega=1.0, eta=(2.0, 0.5))
    assert p.eta_site(2) == 2.0
    assert p.eta_site(1) == 0.5
    assert_allclose(p.eta_by_site(), [0.5, 2.0])


def test_period_validation():
    with pytest.raises(ValueError):
        ModelParams(n_sites=4, q=np.exp(0.3j), omega=1.0,
                    eta=(1j, -1j, 1.0, 1.0), r=2)
    p = ModelParams(n_sites=4, q=np.exp(0.3j), omega=1.0,
                    eta=(-1j, 1j, -1j, 1j), r=2)
    assert p.copies == 2


# ----------------------------------------------------------------------
# sectors


def test_sector_sizes_binomial():
    for n in (2, 4, 5):
        for m in range(n + 1):
            assert len(sector_indices(n, m)) == sector_dimension(n, m) \
                == math.comb(n, m)


def test_sector_blocks_roundtrip(params4):
    t = vertex.transfer_matrix(0.71 + 0.4j, params4)
    blocks = to_sector_blocks(t, 4)
    assert_allclose(from_sector_blocks(blocks, 4), t, atol=1e-15)
    assert off_sector_mass(t, 4) < 1e-13


def test_sector_blocks_raises_off_block():
    bad = embed_site(SIGMA_X, 1, 3)  # flips a spin: maximally off-block
    with pytest.raises(BlockingError):
        to_sector_blocks(bad, 3)


# ----------------------------------------------------------------------
# joint eigenbasis


def test_joint_eigenbasis_commuting_transfer_family(homog6):
    zetas = (0.47, 0.9 + 0.31j, 1.6 - 0.2j)
    ops = [vertex.transfer_matrix(z, homog6) for z in zetas]
    basis = joint_eigenbasis(ops)
    assert basis.residuals.max() < 1e-9
    # every vector stays in a single total-spin sector
    sz = total_sz_diagonal(6)
    for i in range(basis.vectors.shape[1]):
        v = basis.vectors[:, i]
        supp = np.abs(v) > 1e-9
        assert len(set(sz[supp])) == 1


def test_joint_eigenbasis_resolves_degeneracy():
    # first operator maximally degenerate (identity); second resolves it
    rng = np.random.default_rng(5)
    h = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    h = h + h.conj().T
    basis = joint_eigenbasis([np.eye(6, dtype=complex), h])
    assert basis.residuals.max() < 1e-10
    assert (basis.group_labels == -1).all()


def test_pseudovacuum_is_index_zero():
    v = pseudovacuum(3)
    assert v[0] == 1 and np.abs(v[1:]).max() == 0


def test_generic_params_unit_product():
    p = generic_params(6, seed=3)
    assert abs(np.prod(np.array(p.eta)) - 1) < 1e-12
