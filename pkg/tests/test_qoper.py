"""Baxter operator routes, functional relations, degenerate twists."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from sixvertex import bethe, qoper, vertex
from sixvertex.lattice import ModelParams, total_sz_diagonal

from conftest import generic_params, unimodular_eta

Z = 0.63 - 0.21j


@pytest.fixture
def loud_twist():
    """Three sites with a twist far off the unit circle."""
    eta = unimodular_eta(3, seed=4)
    return ModelParams(3, q=np.exp(0.31j), omega=1.9 * np.exp(0.41j),
                       eta=tuple(eta))


# ----------------------------------------------------------------------
# oscillator towers


@pytest.mark.parametrize("family", [+1, -1])
def test_tower_satisfies_algebra_below_the_cut(family):
    tower = qoper.oscillator_tower(np.exp(0.31j), 14, family)
    assert qoper.tower_algebra_defect(tower) < 1e-13


def test_tower_ladder_direction():
    tower = qoper.oscillator_tower(np.exp(0.31j), 6, +1)
    # plus family: e_minus raises the level, h counts -2n
    assert tower.e_minus[3, 2] == 1.0
    assert tower.h[3, 3] == -6.0
    mirror = qoper.oscillator_tower(np.exp(0.31j), 6, -1)
    assert mirror.e_plus[3, 2] == 1.0
    assert mirror.h[3, 3] == 6.0


def test_tower_rejects_bad_family():
    with pytest.raises(ValueError):
        qoper.oscillator_tower(np.exp(0.31j), 6, 0)


# ----------------------------------------------------------------------
# two trace routes agree where both exist


@pytest.mark.parametrize("sign", [+1, -1])
def test_literal_trace_matches_resummation(loud_twist, sign):
    lit = qoper.q_operator_trace(Z, loud_twist, sign, levels=90)
    res = qoper.q_operator(Z, loud_twist, sign)
    assert_allclose(lit, res, atol=1e-12)


def test_literal_trace_refuses_unimodular_twist(params4):
    with pytest.raises(ValueError):
        qoper.q_operator_trace(Z, params4, +1)


def test_cross_sector_elements_vanish_unforced(loud_twist):
    full = qoper.q_operator_trace(Z, loud_twist, +1, levels=90,
                                  all_pairs=True)
    blocked = qoper.q_operator_trace(Z, loud_twist, +1, levels=90)
    assert_allclose(full, blocked, atol=1e-13)


def test_normalized_to_identity_at_origin(params4):
    assert_allclose(qoper.q_operator(0.0, params4, +1), np.eye(16),
                    atol=1e-13)
    assert_allclose(qoper.q_operator(0.0, params4, -1), np.eye(16),
                    atol=1e-13)


# ----------------------------------------------------------------------
# commuting family and functional relations


def test_commutes_with_transfer_and_between_families(params4):
    t = vertex.transfer_matrix(0.4 + 0.7j, params4)
    ap = qoper.q_operator(Z, params4, +1)
    am = qoper.q_operator(1.1 + 0.2j, params4, -1)
    assert np.abs(t @ ap - ap @ t).max() < 1e-11
    assert np.abs(ap @ am - am @ ap).max() < 1e-11


@pytest.mark.parametrize("sign", [+1, -1])
def test_tq_relation(params4, sign):
    assert qoper.check_tq(Z, params4, sign) < 1e-12


def test_wronskian_relations(params4):
    assert qoper.check_wronskian(Z, params4) < 1e-12
    assert qoper.check_t_wronskian(Z, params4) < 1e-12


def test_asymptotic_product_is_twist_ratio(params4):
    ap = qoper.q_asymptotic(params4, +1)
    am = qoper.q_asymptotic(params4, -1)
    w, q = params4.omega, params4.q
    sz = total_sz_diagonal(4)
    expect = (1 - w**2 * q**(2 * sz)) / (q**(2 * sz) - w**2)
    assert_allclose(ap @ am, np.diag(expect), atol=1e-11)


# ----------------------------------------------------------------------
# spectral route


@pytest.mark.parametrize("sign", [+1, -1])
def test_spectral_route_matches_resummation(params4, sign):
    res = qoper.q_operator(Z, params4, sign)
    spec = qoper.q_operator_spectral(Z, params4, sign)
    assert np.abs(res - spec).max() < 1e-10


def test_spectral_route_at_root_of_unity(homog6):
    # exponent bases collide here and the merged resummation must agree
    # with the completely independent Bethe-root synthesis
    xs, groups = qoper._exponent_grid(homog6)
    assert len(xs) < homog6.n_sites + 1
    assert sorted(len(g) for g in groups) == [1, 1, 1, 2, 2]
    res = qoper.q_operator(Z, homog6, +1)
    spec = qoper.q_operator_spectral(Z, homog6, +1)
    assert np.abs(res - spec).max() < 1e-9


def test_minus_coefficients_close_the_wronskian(params4):
    spectra = bethe.roots_from_spectrum(params4, magnons=1)
    rec = spectra[0].records[0]
    cm = qoper.minus_coefficients(rec, params4)
    assert len(cm) == 4                     # degree N - M
    assert cm[0] == pytest.approx(1.0)
    assert cm[-1] == pytest.approx(rec.a_inf_minus)


# ----------------------------------------------------------------------
# degenerations and the zero-twist limit


def test_degenerate_twist_raises():
    eta = unimodular_eta(4, seed=2)
    q = np.exp(0.31j)
    bad = ModelParams(4, q=q, omega=1 / q**2, eta=tuple(eta))  # sector hit
    with pytest.raises(qoper.DegenerateTwistError):
        qoper.q_operator(Z, bad, +1)


def test_zero_field_limit_matches_closed_form():
    params = generic_params(n_sites=4, seed=11, gamma=np.pi / 7, k=0.0)
    zf = qoper.zero_field_q(Z, params)
    bx = qoper.baxter_zero_field_matrix(Z, params)
    assert_allclose(zf, bx, atol=1e-12)


def test_zero_field_needs_even_chain():
    params = generic_params(n_sites=3, seed=1)
    with pytest.raises(ValueError):
        qoper.zero_field_q(Z, params)


def test_zero_field_commutes_with_balanced_transfer():
    params = generic_params(n_sites=4, seed=11, gamma=np.pi / 7, k=0.0)
    from sixvertex.lattice import sector_indices
    idx = sector_indices(4, 2)
    t = vertex.transfer_matrix(0.4 + 0.7j, params)[np.ix_(idx, idx)]
    zf = qoper.zero_field_q(Z, params)
    assert np.abs(t @ zf - zf @ t).max() < 1e-11
