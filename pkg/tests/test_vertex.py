"""Vertex weights, monodromy entries, transfer matrix identities."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from sixvertex import vertex
from sixvertex.lattice import (
    ModelParams, SingularPointError, pseudovacuum, total_sz_diagonal,
)

from conftest import generic_params

Q = np.exp(0.37j)
W = np.exp(0.21j * np.pi)


def test_r_matrix_pinned_entries_at_origin():
    r = vertex.r_matrix(0.0, 2.0)
    assert_allclose(r[0, 0], 2.0)
    assert_allclose(r[3, 3], 2.0)
    assert_allclose(r[1, 1], 1.0)
    assert_allclose(r[2, 2], 1.0)
    assert_allclose(r[1, 2], 1.5)
    assert_allclose(r[2, 1], 0.0)
    # only six entries can ever be nonzero
    mask = np.zeros((4, 4), dtype=bool)
    for ij in ((0, 0), (1, 1), (2, 2), (3, 3), (1, 2), (2, 1)):
        mask[ij] = True
    assert np.abs(vertex.r_matrix(0.77 - 0.3j, Q)[~mask]).max() == 0.0


def test_r_check_unit_point_is_identity():
    assert_allclose(vertex.r_check(1.0, Q), np.eye(4), atol=1e-14)


def test_r_check_pole_raises():
    with pytest.raises(SingularPointError):
        vertex.r_check(Q**2, Q)


def test_r_check_derivative_matches_finite_difference():
    h = 1e-6
    fd = (vertex.r_check(0.8 + h, Q) - vertex.r_check(0.8 - h, Q)) / (2 * h)
    assert_allclose(vertex.r_check_derivative(0.8, Q), fd, atol=1e-8)


# ----------------------------------------------------------------------
# monodromy entries


def test_creation_entry_lowers_total_spin(params4):
    mono = vertex.monodromy(0.9 - 0.2j, params4)
    b = mono.B
    sz = total_sz_diagonal(4)
    rows, cols = np.nonzero(np.abs(b) > 1e-12)
    assert np.all(sz[rows] == sz[cols] - 1)


def test_annihilation_kills_pseudovacuum(params4):
    mono = vertex.monodromy(0.9 - 0.2j, params4)
    assert np.abs(mono.C @ pseudovacuum(4)).max() < 1e-14


def test_diagonal_entries_pseudovacuum_eigenvalues(params4):
    z = 0.63 + 0.4j
    p = params4
    mono = vertex.monodromy(z, p)
    vac = pseudovacuum(4)
    ev_a = p.q**2 * np.prod([1 + z / (p.q * p.eta_site(j)) for j in range(1, 5)])
    ev_d = p.q**-2 * np.prod([1 + z * p.q / p.eta_site(j) for j in range(1, 5)])
    assert_allclose(mono.A @ vac, ev_a * vac, atol=1e-13)
    assert_allclose(mono.D @ vac, ev_d * vac, atol=1e-13)


# ----------------------------------------------------------------------
# transfer matrix


def test_transfer_matches_monodromy_trace(params4):
    for z in (0.31, 0.9 - 0.55j, 2.7 + 0.1j):
        t = vertex.transfer_matrix(z, params4)
        mono = vertex.monodromy(z, params4)
        t2 = vertex.transfer_from_monodromy(mono, params4.omega)
        assert np.abs(t - t2).max() < 1e-12


def test_transfer_value_at_origin(params4):
    sz = total_sz_diagonal(4)
    p = params4
    want = np.diag(p.omega * p.q**sz + p.q**(-sz) / p.omega)
    assert_allclose(vertex.transfer_matrix(0.0, p), want, atol=1e-13)


def test_transfer_leading_coefficient(params4):
    # degree-N polynomial: top coefficient carries the reversed twist weight
    p = params4
    n = p.n_sites
    pts = vertex.transfer_sample_points(p, n + 1)
    samples = np.stack([vertex.transfer_matrix(z, p) for z in pts])
    vand = np.vander(pts, n + 1, increasing=True)
    coeffs = np.linalg.solve(vand, samples.reshape(n + 1, -1))
    top = coeffs[-1].reshape(p.dim, p.dim)
    sz = total_sz_diagonal(n)
    want = np.diag(p.omega * p.q**(-sz) + p.q**sz / p.omega) \
        * np.prod([1 / e for e in p.eta])
    assert_allclose(top, want, atol=1e-11)


def test_transfer_degree_certificate(params4):
    # values at N+1 points interpolate a held-out point to rounding error
    p = params4
    n = p.n_sites
    pts = vertex.transfer_sample_points(p, n + 2, radius=0.9)
    fit, hold = pts[:-1], pts[-1]
    vand = np.vander(fit, n + 1, increasing=True)
    coeffs = np.linalg.solve(vand, np.stack(
        [vertex.transfer_matrix(z, p) for z in fit]).reshape(n + 1, -1))
    pred = (np.vander([hold], n + 1, increasing=True) @ coeffs).reshape(p.dim, p.dim)
    assert np.abs(pred - vertex.transfer_matrix(hold, p)).max() < 1e-10


def test_transfer_family_commutes(params4):
    t1 = vertex.transfer_matrix(0.52 + 0.17j, params4)
    t2 = vertex.transfer_matrix(1.48 - 0.8j, params4)
    assert np.abs(t1 @ t2 - t2 @ t1).max() < 1e-12


def test_transfer_derivative_exact(params4):
    # derivative route vs differentiated interpolation polynomial
    p = params4
    n = p.n_sites
    pts = vertex.transfer_sample_points(p, n + 1)
    vand = np.vander(pts, n + 1, increasing=True)
    coeffs = np.linalg.solve(vand, np.stack(
        [vertex.transfer_matrix(z, p) for z in pts]).reshape(n + 1, -1))
    z0 = 0.67 - 0.23j
    powers = np.array([k * z0**(k - 1) for k in range(n + 1)])
    powers[0] = 0.0
    want = (powers @ coeffs).reshape(p.dim, p.dim)
    t, dt = vertex.transfer_matrix_with_derivative(z0, p)
    assert np.abs(dt - want).max() < 1e-10
    assert np.abs(t - vertex.transfer_matrix(z0, p)).max() < 1e-12


def test_exchange_relation_all_adjacent_pairs():
    p = generic_params(4, seed=23)
    for n in (1, 2, 3):
        assert vertex.check_exchange(p, n, 0.85 - 0.33j) < 1e-12


def test_site_polynomial_roots():
    p = generic_params(3, seed=5)
    for j in range(1, 4):
        assert abs(vertex.site_polynomial(-p.eta_site(j), p)) < 1e-12
