"""Bethe states, equations, spectral reconstruction, norm determinants."""

import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from sixvertex import bethe, vertex
from sixvertex.lattice import ModelParams, pseudovacuum, sector_indices

from conftest import generic_params


def closed_form_one_magnon_roots(params):
    """Quadratic oracle for the one-magnon sector on two sites.

    With N = 2 and M = 1 the Bethe equation is the vanishing of
    (q^2 - w^2) z^2 + q (e1 + e2)(1 - w^2) z + (1 - w^2 q^2) e1 e2.
    """
    assert params.n_sites == 2
    q, w = params.q, params.omega
    e1, e2 = params.eta_site(1), params.eta_site(2)
    return np.roots([q**2 - w**2,
                     q * (e1 + e2) * (1 - w**2),
                     (1 - w**2 * q**2) * e1 * e2])


@pytest.fixture
def params2():
    return generic_params(n_sites=2, seed=5, gamma=0.41 * np.pi, k=0.173)


# ----------------------------------------------------------------------
# Bethe vectors: two independent constructions


def test_zero_magnon_state_is_pseudovacuum(params4):
    assert_allclose(bethe.coordinate_state([], params4), pseudovacuum(4))
    assert_allclose(bethe.algebraic_state([], params4), pseudovacuum(4))


def test_coordinate_state_lives_in_its_sector(params4):
    psi = bethe.coordinate_state([0.4 + 0.1j, 1.3 - 0.2j], params4)
    support = np.nonzero(np.abs(psi) > 1e-14)[0]
    assert set(support) <= set(sector_indices(4, 2))


def test_coordinate_equals_algebraic_off_shell(params4):
    # the equality is an operator identity, so arbitrary rapidities work
    roots = [0.83 - 0.41j, 1.52 + 0.66j, 0.21 + 0.09j]
    psi_c = bethe.coordinate_state(roots, params4)
    psi_a = bethe.algebraic_state(roots, params4)
    assert_allclose(psi_c, psi_a, atol=1e-12 * np.abs(psi_a).max())


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_coordinate_equals_algebraic_random_rapidities(seed):
    rng = np.random.default_rng(seed)
    params = generic_params(n_sites=3, seed=17, gamma=0.29 * np.pi, k=0.08)
    roots = rng.uniform(0.3, 1.7, 2) * np.exp(2j * np.pi * rng.uniform(size=2))
    psi_c = bethe.coordinate_state(roots, params)
    psi_a = bethe.algebraic_state(roots, params)
    assert np.abs(psi_c - psi_a).max() < 1e-11 * max(np.abs(psi_a).max(), 1e-30)


def test_creation_commutation_guard_accepts_honest_entries(params4):
    bethe.algebraic_state([0.5, 1.1 + 0.3j], params4, check_commute=True)


def test_magnon_cap():
    params = generic_params(n_sites=9, seed=3)
    with pytest.raises(ValueError):
        bethe.coordinate_state(np.full(9, 0.5), params)


# ----------------------------------------------------------------------
# Bethe equations and the Newton solver


def test_closed_form_roots_satisfy_equations(params2):
    for z in closed_form_one_magnon_roots(params2):
        assert np.abs(bethe.bae_residual([z], params2)).max() < 1e-12


def test_on_shell_state_is_transfer_eigenvector(params2):
    z = closed_form_one_magnon_roots(params2)[0]
    psi = bethe.algebraic_state([z], params2)
    zeta = 0.67 + 0.23j
    tmat = vertex.transfer_matrix(zeta, params2)
    tval = bethe.transfer_eigenvalue(zeta, [z], params2)
    assert np.abs(tmat @ psi - tval * psi).max() < 1e-12 * np.abs(psi).max()


def test_off_shell_state_is_not_an_eigenvector(params2):
    psi = bethe.algebraic_state([0.9 + 0.4j], params2)
    tmat = vertex.transfer_matrix(0.67 + 0.23j, params2)
    ratio = (tmat @ psi)[np.abs(psi) > 1e-8] / psi[np.abs(psi) > 1e-8]
    assert np.abs(ratio - ratio[0]).max() > 1e-3


def test_newton_recovers_perturbed_roots(params2):
    z = closed_form_one_magnon_roots(params2)[1]
    seeded = bethe.solve_bae_newton([z * (1 + 0.04 - 0.03j)], params2)
    assert abs(seeded.roots[0] - z) < 1e-10
    assert seeded.max_residual < 1e-12


def test_newton_raises_on_coincident_seeds(params4):
    with pytest.raises(bethe.RootCollisionError):
        bethe.solve_bae_newton([0.7 + 0.1j, 0.7 + 0.1j], params4)


def test_residual_raises_on_source_pole(params4):
    z = -params4.q * params4.eta_site(2)   # zero of the q-shifted source term
    with pytest.raises(ZeroDivisionError):
        bethe.bae_residual([z], params4)


def test_residual_regularizes_exact_strings():
    # at q^10 = 1 the six-site chain carries exact q^2-string pairs; the
    # ratio form of the equations degenerates there but the product over
    # the string stays finite and must vanish on shell
    params = ModelParams.from_angles(6, np.pi / 5, 0.07)
    spectra = bethe.roots_from_spectrum(params)
    stringy = [rec for s in spectra for rec in s.records
               if "string" in rec.provenance]
    assert stringy, "expected exact strings at this root of unity"
    for rec in stringy:
        roots = np.asarray(rec.roots)
        ratios = roots[None, :] / roots[:, None]
        assert np.min(np.abs(ratios - params.q**2)) < 1e-5
        assert max(rec.residuals) < 1e-8
        # and the functional relation holds identically for the state
        assert bethe.tq_defect(rec.t_coefficients, rec.aplus_coefficients,
                               rec.magnons, params) < 1e-10


# ----------------------------------------------------------------------
# spectral reconstruction


def test_spectrum_is_complete_and_on_shell(params4):
    spectra = bethe.roots_from_spectrum(params4)
    assert bethe.spectrum_record_count(spectra) == 16
    assert [s.magnons for s in spectra] == [0, 1, 2, 3, 4]
    for s in spectra:
        assert len(s.records) == len(s.indices)
        for rec in s.records:
            assert len(rec.roots) == rec.magnons
            if rec.magnons:
                assert max(rec.residuals) < 1e-9


def test_spectrum_matches_direct_diagonalization(params4):
    spectra = bethe.roots_from_spectrum(params4)
    zeta = 0.58 - 0.31j    # held-out point, not among the sample nodes
    direct = np.linalg.eigvals(vertex.transfer_matrix(zeta, params4))
    from_records = [np.polyval(np.asarray(r.t_coefficients)[::-1], zeta)
                    for s in spectra for r in s.records]
    assert bethe.multiset_distance(direct, from_records) < 1e-10


def test_spectrum_reproduces_closed_form_roots(params2):
    spectra = bethe.roots_from_spectrum(params2, magnons=1)
    found = np.concatenate([rec.roots for rec in spectra[0].records])
    expected = closed_form_one_magnon_roots(params2)
    assert bethe.multiset_distance(found, expected) < 1e-10


def test_eigenvalue_record_polynomials_are_consistent(params4):
    rec = bethe.roots_from_spectrum(params4, magnons=2)[0].records[0]
    # aplus vanishes at the roots and is 1 at the origin
    avals = [rec.aplus(z) for z in rec.roots]
    assert np.abs(avals).max() < 1e-9
    assert rec.aplus(0.0) == pytest.approx(1.0)
    assert bethe.tq_defect(rec.t_coefficients, rec.aplus_coefficients,
                           2, params4) < 1e-10


def test_wronskian_fixes_product_of_asymptotics(params4):
    q, w = params4.q, params4.omega
    for s in bethe.roots_from_spectrum(params4):
        sz = 2.0 - s.magnons
        expected = (1 - w**2 * q**(2 * sz)) / (q**(2 * sz) - w**2)
        for rec in s.records:
            assert rec.a_inf_plus * rec.a_inf_minus == pytest.approx(expected)


def test_multiset_distance_is_permutation_blind():
    xs = np.array([1 + 1j, 2.0, 3 - 1j])
    assert bethe.multiset_distance(xs, xs[::-1]) == 0.0
    with pytest.raises(ValueError):
        bethe.multiset_distance(xs, xs[:2])


# ----------------------------------------------------------------------
# norm determinant against the contraction route


def test_norm_determinant_matches_contraction(params2):
    z = closed_form_one_magnon_roots(params2)[0]
    det = bethe.gaudin_korepin([z], params2)
    scalar, leak = bethe.contraction_oracle([z], params2)
    assert leak < 1e-12 * abs(scalar)
    assert det == pytest.approx(scalar, rel=1e-11)


def test_norm_determinant_matches_contraction_two_magnons(params4):
    rec = next(r for r in bethe.roots_from_spectrum(params4, 2)[0].records
               if max(r.residuals) < 1e-10)
    det = bethe.gaudin_korepin(rec.roots, params4)
    scalar, leak = bethe.contraction_oracle(rec.roots, params4)
    assert leak < 1e-10 * abs(scalar)
    assert det == pytest.approx(scalar, rel=1e-9)


def test_norm_determinant_refuses_off_shell_input(params4):
    with pytest.raises(bethe.OffShellError):
        bethe.gaudin_korepin([0.9 + 0.4j, 0.3 - 0.6j], params4)


# ----------------------------------------------------------------------
# serialization


def test_record_round_trips_through_json(params4):
    rec = bethe.roots_from_spectrum(params4, magnons=1)[0].records[0]
    blob = json.dumps(bethe.record_to_dict(rec), sort_keys=True)
    data = json.loads(blob)
    assert data["schema"] == bethe.SCHEMA_VERSION
    assert data["sector"] == 1
    z = complex(*data["roots"][0])
    assert z == pytest.approx(rec.roots[0])
    assert len(data["t_coefficients"]) == 5
