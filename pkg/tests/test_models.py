"""Closed-form specializations against the general machinery."""

import hypothesis as hy
import hypothesis.strategies as st
import numpy as np
import pytest

from sixvertex import (bethe, hermitian, lattice, models, qoper, symmetry,
                       translation, vertex)
from sixvertex.lattice import ModelParams, SingularPointError


@pytest.fixture(scope="module")
def alternating():
    return models.alternating_model(6, np.pi / 5, 0.17)


@pytest.fixture(scope="module")
def alternating_spectrum(alternating):
    return bethe.roots_from_spectrum(alternating.params, magnons=2)[0]


# ----------------------------------------------------------------------
# constructors


def test_homogeneous_model_resolves_to_unit_inhomogeneities():
    model = models.homogeneous_model(4, np.pi / 5, 0.1)
    assert model.kind == "homogeneous"
    assert np.abs(np.array(model.params.eta_by_site()) - 1).max() < 1e-12
    assert model.params.r == 1
    assert abs(model.anisotropy - np.cos(np.pi / 5)) < 1e-12
    assert abs(model.coupling_index - 3) < 1e-12


def test_alternating_model_resolves_to_staggered_imaginary_units():
    model = models.alternating_model(6, 0.4, 0.2)
    etas = np.array(model.params.eta_by_site())
    assert np.abs(etas - np.array([1j, -1j] * 3)).max() < 1e-12
    assert model.params.r == 2
    with pytest.raises(ValueError):
        models.alternating_model(5, 0.4, 0.2)


def test_cyclic_model_validates_period():
    model = models.cyclic_model(6, 3, 0.4, 0.2)
    assert model.kind == "cyclic" and model.params.r == 3
    assert models.cyclic_model(6, 2, 0.4, 0.2).kind == "alternating"
    with pytest.raises(ValueError):
        models.cyclic_model(6, 4, 0.4, 0.2)


@pytest.mark.parametrize("case", ["unimodular", "real", "modulus-paired"])
@pytest.mark.parametrize("n", [4, 6, 8])
def test_reality_case_model_classifies_itself(case, n):
    model = models.reality_case_model(n, case, 0.37, 0.21, seed=3)
    params = model.params
    assert symmetry.detect_reality_case(params) == case
    for j in range(1, n + 1):
        assert abs(params.eta_site(j) * params.eta_site(n + 1 - j) - 1) \
            < 1e-10


def test_reality_case_model_rejects_unknown_labels():
    with pytest.raises(ValueError):
        models.reality_case_model(4, "imaginary", 0.37, 0.21)


# ----------------------------------------------------------------------
# homogeneous chain


def test_xxz_display_matches_logarithmic_derivative():
    model = models.homogeneous_model(4, np.pi / 5, 0.1)
    built = models.xxz_hamiltonian(4, np.pi / 5, 0.1)
    general = translation.hamiltonian_logderiv(model.params, 1)
    assert np.abs(built - general).max() < 1e-10 * np.abs(general).max()


def test_xxz_two_site_fixture():
    # hand evaluation of the display at two sites with no twist: both
    # wrapped bonds coincide, so every coupling appears twice
    gamma = 0.4
    delta = np.cos(gamma)
    expected = np.zeros((4, 4), dtype=complex)
    expected[1, 2] = expected[2, 1] = -2 / np.sin(gamma)
    expected[1, 1] = expected[2, 2] = 2 * delta / np.sin(gamma)
    built = models.xxz_hamiltonian(2, gamma, 0.0)
    assert np.abs(built - expected).max() < 1e-12


def test_xxz_is_hermitian_and_commutes_with_transfer():
    built = models.xxz_hamiltonian(4, np.pi / 5, 0.1)
    assert np.abs(built - built.conj().T).max() < 1e-12 * np.abs(built).max()
    params = models.homogeneous_model(4, np.pi / 5, 0.1).params
    for zeta in (0.7 + 0.2j, 1.3 - 0.4j):
        transfer = vertex.transfer_matrix(zeta, params)
        comm = built @ transfer - transfer @ built
        assert np.abs(comm).max() < 1e-10 * np.abs(transfer).max()


def test_homogeneous_quasi_shift_is_the_plain_translation():
    params = models.homogeneous_model(4, np.pi / 5, 0.1).params
    assert np.abs(translation.quasi_shift(params, 1)
                  - translation.one_site_translation(params)).max() < 1e-12


# ----------------------------------------------------------------------
# alternating chain Hamiltonians


def test_alternating_displays_match_general_machinery(alternating):
    params = alternating.params
    plus, minus, total = models.alternating_hamiltonians(6, np.pi / 5, 0.17)
    gen1 = translation.hamiltonian_logderiv(params, 1)
    gen2 = translation.hamiltonian_logderiv(params, 2)
    scale = np.abs(gen1).max()
    assert np.abs(plus - gen2).max() < 1e-10 * scale
    assert np.abs(minus - gen1).max() < 1e-10 * scale
    assert np.abs(total - (plus + minus)).max() < 1e-12 * scale
    # member labels are anchored by the quasi-shift ratio, and the even-
    # sublattice display genuinely belongs to the second family member
    assert np.abs(plus - gen1).max() > 1e-2 * scale


def test_alternating_hamiltonians_validate_arguments():
    with pytest.raises(ValueError):
        models.alternating_hamiltonians(5, 0.4, 0.1)
    with pytest.raises(ValueError):
        models.alternating_hamiltonians(2, 0.4, 0.1)
    with pytest.raises(SingularPointError):
        models.alternating_hamiltonians(4, np.pi / 2, 0.1)


def test_alternating_energies_on_bethe_states(alternating,
                                              alternating_spectrum):
    params = alternating.params
    plus, minus, _ = models.alternating_hamiltonians(6, np.pi / 5, 0.17)
    checked = 0
    for rec in alternating_spectrum.records:
        if rec.max_residual > 1e-9:
            continue
        psi = bethe.algebraic_state(rec.roots, params, check_commute=False)
        ep, em = models.alternating_energies(rec.roots, params)
        scale = np.abs(psi).max()
        assert np.abs(plus @ psi - ep * psi).max() < 1e-8 * scale
        assert np.abs(minus @ psi - em * psi).max() < 1e-8 * scale
        checked += 1
    assert checked >= 3


def test_alternating_energies_vanish_without_magnons(alternating):
    ep, em = models.alternating_energies([], alternating.params)
    assert ep == 0 and em == 0


def test_reduced_root_equations(alternating, alternating_spectrum):
    params = alternating.params
    rec = next(r for r in alternating_spectrum.records
               if r.max_residual < 1e-9)
    assert models.alternating_bae_defect(rec.roots, params) < 1e-10
    nudged = np.asarray(rec.roots) * 1.01
    assert models.alternating_bae_defect(nudged, params) > 1e-4


def test_closed_form_transfer_eigenvalue(alternating, alternating_spectrum):
    params = alternating.params
    rec = next(r for r in alternating_spectrum.records
               if r.max_residual < 1e-9)
    for zeta in (0.73 + 0.21j, -0.4 + 1.1j, 1.9):
        closed = models.alternating_transfer_eigenvalue(zeta, rec.roots,
                                                        params)
        assert abs(closed - rec.t_eigenvalue(zeta)) < 1e-8 * abs(closed)


def test_full_alternating_spectrum_from_energy_sums(alternating):
    params = alternating.params
    _, _, total = models.alternating_hamiltonians(6, np.pi / 5, 0.17)
    energies = []
    for sector in bethe.roots_from_spectrum(params):
        for rec in sector.records:
            ep, em = models.alternating_energies(rec.roots, params)
            energies.append(ep + em)
    eigs = np.linalg.eigvals(total)
    assert len(energies) == params.dim
    assert bethe.multiset_distance(energies, eigs) < 1e-6


# ----------------------------------------------------------------------
# quasi-shift ratio


def test_shift_ratio_dual_construction(alternating):
    braid = models.shift_ratio_braid(6, np.pi / 5, 0.17)
    general = models.shift_ratio_operator(alternating.params)
    assert np.abs(braid - general).max() < 1e-11 * np.abs(general).max()
    small = models.alternating_model(4, 0.45, 0.3)
    braid = models.shift_ratio_braid(4, 0.45, 0.3)
    general = models.shift_ratio_operator(small.params)
    assert np.abs(braid - general).max() < 1e-11 * np.abs(general).max()


def test_shift_ratio_eigenvalues(alternating, alternating_spectrum):
    params = alternating.params
    ratio = models.shift_ratio_braid(6, np.pi / 5, 0.17)
    for rec in alternating_spectrum.records:
        if rec.max_residual > 1e-9:
            continue
        psi = bethe.algebraic_state(rec.roots, params, check_commute=False)
        val = models.shift_ratio_eigenvalue(rec.roots, params)
        assert np.abs(ratio @ psi - val * psi).max() \
            < 1e-8 * np.abs(psi).max()
    assert models.shift_ratio_eigenvalue([], params) == 1


def test_shift_ratio_rejects_the_singular_angle():
    with pytest.raises(SingularPointError):
        models.shift_ratio_braid(4, np.pi / 2, 0.1)


# ----------------------------------------------------------------------
# metric and reports


def test_alternating_metric_closed_form(alternating):
    closed = models.alternating_metric(alternating.params)
    general = hermitian.conjugation_metric(alternating.params)
    assert np.abs(closed - general).max() < 1e-12 * np.abs(general).max()


def test_sublattice_sign_squares_to_identity():
    sign = models.sublattice_sign(4)
    assert np.abs(sign @ sign - np.eye(16)).max() == 0.0


@pytest.mark.parametrize("n", [4, 6])
def test_symmetry_report_all_identities_hold(n):
    model = models.alternating_model(n, np.pi / 5, 0.17)
    report = models.alternating_symmetry_report(model.params)
    assert len(report) >= 15
    worst = max(report.items(), key=lambda kv: kv[1])
    assert worst[1] < 1e-10, worst


def test_conjugation_report_all_identities_hold(alternating):
    report = models.alternating_conjugation_report(alternating.params)
    assert len(report) == 6
    worst = max(report.items(), key=lambda kv: kv[1])
    assert worst[1] < 1e-9, worst


@hy.given(gamma=st.floats(0.2, 2.9), k=st.floats(-0.9, 0.9))
@hy.settings(deadline=None, max_examples=10)
def test_symmetry_report_over_random_couplings(gamma, k):
    hy.assume(abs(gamma - np.pi / 2) > 0.05)
    model = models.alternating_model(4, gamma, k)
    try:
        report = models.alternating_symmetry_report(model.params)
    except (qoper.DegenerateTwistError, SingularPointError,
            np.linalg.LinAlgError):
        hy.assume(False)
    assert max(report.values()) < 1e-8
