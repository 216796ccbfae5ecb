"""Parity, charge, time reversal and their conjugation identities."""

import numpy as np
import pytest

from sixvertex import bethe, qoper, symmetry, vertex
from sixvertex.lattice import ModelParams, pseudovacuum, total_sz_diagonal

Z = 0.77 + 0.31j


def inversion_symmetric_params(kind, n_sites=4):
    """Inversion-symmetric chains in the three reality patterns."""
    if kind == "unimodular":
        t1, t2 = 0.53, -0.91
        eta = [np.exp(1j * t1), np.exp(1j * t2),
               np.exp(-1j * t2), np.exp(-1j * t1)]
        lam = None
    elif kind == "real":
        a, b = 1.7, 0.6
        eta = [a, b, 1 / b, 1 / a]
        lam = None
    elif kind == "modulus-paired":
        lam = 1.3
        w1 = np.exp(0.3j)
        eta = [w1 / lam, 1 / (w1 * lam), lam * w1, lam / w1]
    return ModelParams.from_angles(n_sites, 0.37, 0.21, eta_sites=eta,
                                   Lambda=lam)


CASES = ["unimodular", "real", "modulus-paired"]


@pytest.fixture(params=CASES)
def anycase(request):
    return inversion_symmetric_params(request.param)


@pytest.fixture
def case1():
    return inversion_symmetric_params("unimodular")


# ----------------------------------------------------------------------
# the building blocks are involutions with the right fixed points


def test_parity_is_involution_fixing_vacuum(anycase):
    p = symmetry.parity(anycase)
    assert p.involution_defect() < 1e-12
    vac = pseudovacuum(anycase.n_sites)
    assert np.abs(p.apply(vac) - vac).max() < 1e-12


def test_parity_needs_inversion_symmetry():
    lopsided = ModelParams.from_angles(4, 0.37, 0.21,
                                       eta_sites=[1.1, 0.9, 1.3, 1.0])
    with pytest.raises(symmetry.RealityConditionError):
        symmetry.parity(lopsided)


def test_charge_is_involution_flipping_spin(anycase):
    c = symmetry.charge(anycase)
    assert c.involution_defect() < 1e-12
    sz = np.diag(total_sz_diagonal(anycase.n_sites)).astype(complex)
    assert np.abs(c.conjugate(sz) + sz).max() < 1e-12


def test_time_reversal_squares_to_one(anycase):
    t = symmetry.time_reversal(anycase)
    assert t.antiunitary
    assert t.involution_defect() < 1e-12


def test_compose_tracks_antiunitarity(case1):
    t = symmetry.time_reversal(case1)
    assert not t.compose(t).antiunitary
    assert symmetry.cpt_conjugation(case1).antiunitary


# ----------------------------------------------------------------------
# reality-pattern detection


def test_detect_reality_case(anycase):
    want = {2.0: "unimodular", 1.7: "real", 1.3: "modulus-paired"}
    key = round(max(np.abs(anycase.eta_by_site())), 1)
    key = 2.0 if key == 1.0 else key
    assert symmetry.detect_reality_case(anycase) == want[key]


def test_detect_rejects_patternless_chain():
    eta = [1.4 * np.exp(0.3j), np.exp(-0.3j) / 1.4,
           0.7 * np.exp(0.9j), np.exp(-0.9j) / 0.7]
    p = ModelParams.from_angles(4, 0.37, 0.21, eta_sites=eta)
    with pytest.raises(symmetry.RealityConditionError):
        symmetry.detect_reality_case(p)


# ----------------------------------------------------------------------
# permutation similarity (braid-built)


def test_permutation_similarity_intertwines_transfer():
    rng = np.random.default_rng(7)
    phases = rng.uniform(-0.4, 0.4, size=4)
    eta = np.exp(1j * np.pi * phases)
    eta /= np.prod(eta) ** (1 / 4)
    p = ModelParams.from_angles(4, np.pi / 5, 0.113, eta_sites=list(eta))
    perm = [2, 0, 3, 1]
    target = [eta[i] for i in perm]
    sim = symmetry.permutation_similarity(p, target)
    moved = p.with_eta(tuple(reversed(target)))
    lhs = np.linalg.solve(sim, vertex.transfer_matrix(Z, p) @ sim)
    rhs = vertex.transfer_matrix(Z, moved)
    assert np.abs(lhs - rhs).max() < 1e-11


def test_permutation_similarity_rejects_non_permutation(case1):
    with pytest.raises(ValueError):
        symmetry.permutation_similarity(case1, [1.0, 2.0, 3.0, 4.0])


def test_half_swap_needs_even_chain():
    p = ModelParams.from_angles(3, 0.37, 0.21)
    with pytest.raises(ValueError):
        symmetry.half_swap_similarity(p)


# ----------------------------------------------------------------------
# conjugation identities on the transfer matrix and Baxter operators


def test_cp_inverts_transfer_argument(anycase):
    assert symmetry.check_cp_transfer(anycase, Z) < 1e-12


@pytest.mark.parametrize("sign", [+1, -1])
def test_cp_swaps_baxter_families(anycase, sign):
    assert symmetry.check_cp_baxter(anycase, Z, sign) < 1e-10


def test_time_reversal_conjugates_transfer(anycase):
    assert symmetry.check_time_reversal_transfer(anycase, Z) < 1e-12


@pytest.mark.parametrize("sign", [+1, -1])
def test_time_reversal_conjugates_baxter(anycase, sign):
    assert symmetry.check_time_reversal_baxter(anycase, Z, sign) < 1e-10


def test_cpt_is_argument_conjugation(anycase):
    assert symmetry.check_cpt(anycase, Z) < 1e-12


def test_parity_and_charge_each_invert_the_twist(case1):
    flipped = case1.with_omega(1 / case1.omega)
    t_here = vertex.transfer_matrix(Z, case1)
    lhs = symmetry.parity(case1).conjugate(t_here)
    rhs = Z**case1.n_sites * vertex.transfer_matrix(1 / Z, flipped)
    assert np.abs(lhs - rhs).max() / np.abs(rhs).max() < 1e-12
    lhs = symmetry.charge(case1).conjugate(t_here)
    rhs = vertex.transfer_matrix(Z, flipped)
    assert np.abs(lhs - rhs).max() / np.abs(rhs).max() < 1e-12


# ----------------------------------------------------------------------
# CPT on Bethe states


def test_cpt_maps_bethe_state_to_conjugate_roots(case1):
    sector = bethe.roots_from_spectrum(case1, magnons=2)[0]
    rec = max(sector.records,
              key=lambda r: np.abs(np.asarray(r.roots).imag).max())
    roots = np.asarray(rec.roots)
    assert np.abs(roots.imag).max() > 0.1      # a genuinely complex pair
    assert symmetry.check_cpt_bethe_map(case1, roots) < 1e-11


def test_cpt_fixes_real_root_states(case1):
    sector = bethe.roots_from_spectrum(case1, magnons=1)[0]
    rec = min(sector.records,
              key=lambda r: np.abs(np.asarray(r.roots).imag).max())
    roots = np.asarray(rec.roots)
    if np.abs(roots.imag).max() < 1e-9:
        psi = bethe.algebraic_state(roots, case1, check_commute=False)
        cpt = symmetry.cpt_conjugation(case1)
        assert np.abs(cpt.apply(psi) - psi).max() < 1e-11 * np.abs(psi).max()
    else:
        assert symmetry.check_cpt_bethe_map(case1, roots) < 1e-11
