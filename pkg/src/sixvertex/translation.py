"""Lattice shifts: translation, quasi-shift operators, local Hamiltonians.

The one-site shift exists for any parameters but conjugates the transfer
matrix into the one with cyclically relabeled inhomogeneities.  When the
inhomogeneity pattern repeats with period r dividing the chain length,
combining the shift with braid factors produces r operators inside the
commuting family whose product is the r-site translation.  Logarithmic
derivatives of the transfer matrix at the r special points give
commuting Hamiltonians, each a sum of densities supported on r+1
consecutive sites.  At one distinguished unimodular inhomogeneity
pattern the braid factor alone becomes a finite cyclic symmetry that
scales the spectral parameter by an r-th root of unity.
"""

from __future__ import annotations

import numpy as np

from . import vertex
from .lattice import ModelParams, SingularPointError, embed_pair, embed_site

__all__ = [
    "one_site_translation", "rolled_params", "roll_similarity",
    "quasi_shift", "quasi_shift_from_transfer", "r_translation",
    "r_translation_from_transfer", "translation_eigenvalue",
    "quasi_shift_eigenvalue", "energy_eigenvalue", "attach_shift_scalars",
    "hamiltonian_logderiv", "local_hamiltonian_block",
    "hamiltonian_from_local", "exchange_kernel", "support_defect",
    "zr_generator", "check_zr_scaling",
]


def _require_period(params: ModelParams) -> int:
    if params.r is None:
        raise ValueError("declare the inhomogeneity period r on the "
                         "parameter set to use the shift family")
    return params.r


def _eta_mod(params: ModelParams, j: int) -> complex:
    """Inhomogeneity at site j with periodic wraparound of the label."""
    return params.eta_site((j - 1) % params.n_sites + 1)


def one_site_translation(params: ModelParams) -> np.ndarray:
    """Shift every spin up one site, wrapping site N to site 1.

    The wrapped spin crosses the twisted seam and picks up the phase
    omega to the power of its polarization.  Conjugation moves the
    local operators up the chain and relabels the inhomogeneities
    cyclically, so this commutes with the transfer matrix only after r
    applications on an r-periodic pattern.
    """
    n = params.n_sites
    mat = np.zeros((params.dim, params.dim), dtype=complex)
    for a in range(params.dim):
        bits = [(a >> j) & 1 for j in range(n)]
        b = 0
        for j in range(n):
            b |= bits[(j + 1) % n] << j
        mat[a, b] = params.omega ** (+1 if bits[0] == 0 else -1)
    return mat


def rolled_params(params: ModelParams) -> ModelParams:
    """Parameter set with every inhomogeneity moved up one site."""
    return params.with_eta(params.eta[1:] + params.eta[:1], r=None)


def roll_similarity(params: ModelParams, ell: int) -> np.ndarray:
    """Braid-built similarity undoing one cyclic roll of the pattern.

    For each of the L periods, conjugates a ladder of r-1 adjacent
    braid weights into place with powers of the one-site shift; the
    resulting factors commute, and the product S obeys
    S^-1 T(zeta | current) S = T(zeta | rolled).  The label ell picks
    which member of the period anchors the braid arguments.
    """
    n, r = params.n_sites, _require_period(params)
    if not 1 <= ell <= r:
        raise ValueError(f"anchor label {ell} outside 1..{r}")
    shift = one_site_translation(params)
    shift_inv = np.linalg.inv(shift)
    block = np.eye(params.dim, dtype=complex)
    for m in range(1, r):
        fac = vertex.embed_r_check(
            _eta_mod(params, ell) / _eta_mod(params, ell + m),
            params.q, m + 1, m, n)
        block = fac @ block
    out = np.eye(params.dim, dtype=complex)
    for j in range(n // r):
        s = ell + r * j
        out = out @ (np.linalg.matrix_power(shift, s) @ block
                     @ np.linalg.matrix_power(shift_inv, s))
    return out


def quasi_shift(params: ModelParams, ell: int) -> np.ndarray:
    """Member ell of the commuting shift family (braid roll times shift)."""
    return roll_similarity(params, ell) @ one_site_translation(params)


def quasi_shift_from_transfer(params: ModelParams, ell: int) -> np.ndarray:
    """Quasi-shift as a normalized transfer-matrix value.

    The transfer matrix at -eta_ell/q degenerates into a shift-like
    operator; dividing out the scalar prod_J (eta_J - eta_ell/q^2) and
    q^(N/2) leaves exactly the quasi-shift.
    """
    n = params.n_sites
    _require_period(params)
    eta_l = params.eta_site(ell)
    denom = np.prod([params.eta_site(j) - eta_l / params.q**2
                     for j in range(1, n + 1)])
    if abs(denom) < 1e-13:
        raise SingularPointError(
            "eta_J = eta_ell / q^2 collapses the normalizing scalar")
    return (params.q ** (-n / 2) / denom
            * vertex.transfer_matrix(-eta_l / params.q, params))


def r_translation(params: ModelParams) -> np.ndarray:
    """The r-site translation (r-th power of the one-site shift)."""
    r = _require_period(params)
    return np.linalg.matrix_power(one_site_translation(params), r)


def r_translation_from_transfer(params: ModelParams) -> np.ndarray:
    """r-site translation as a product of transfer-matrix values.

    One transfer factor per period member, sharing the scalar
    (q - 1/q)^-N and one cross-term factor per unordered pair drawn
    from the period (both endpoints included); the pair product is
    what the single-factor normalizations of the quasi-shifts combine
    into when all r of them are multiplied out.
    """
    n, r = params.n_sites, _require_period(params)
    copies = params.copies
    pref = (params.q - 1 / params.q) ** (-n)
    for m in range(1, r + 1):
        for l2 in range(m + 1, r + 1):
            u = params.eta_site(l2) / params.eta_site(m)
            cross = params.q**2 + params.q**-2 - u - 1 / u
            if abs(cross) < 1e-13:
                raise SingularPointError(
                    "period members differ by q^2; cross factor vanishes")
            pref *= cross ** (-copies)
    out = pref * np.eye(params.dim, dtype=complex)
    for ell in range(1, r + 1):
        out = out @ (params.q ** (n / 2)
                     * vertex.transfer_matrix(-params.eta_site(ell)
                                              / params.q, params))
    return out


# ----------------------------------------------------------------------
# eigenvalues on the joint spectrum


def quasi_shift_eigenvalue(record, params: ModelParams, ell: int) -> complex:
    """Quasi-shift eigenvalue from the record's Baxter polynomial."""
    sz = params.n_sites / 2 - record.magnons
    eta_l = params.eta_site(ell)
    return (params.omega * params.q ** (sz - params.n_sites / 2)
            * record.aplus(-params.q * eta_l)
            / record.aplus(-eta_l / params.q))


def translation_eigenvalue(record, params: ModelParams) -> complex:
    """r-site translation eigenvalue (product of the quasi-shift ones)."""
    r = _require_period(params)
    out = 1.0 + 0j
    for ell in range(1, r + 1):
        out *= quasi_shift_eigenvalue(record, params, ell)
    return out


def energy_eigenvalue(record, params: ModelParams, ell: int) -> complex:
    """Hamiltonian eigenvalue from the transfer-eigenvalue polynomial."""
    u = -params.eta_site(ell) / params.q
    coeffs = np.asarray(record.t_coefficients)
    t_val = np.polyval(coeffs[::-1], u)
    t_der = np.polyval(np.polyder(coeffs[::-1]), u)
    corr = 2j * sum(
        1 / (1 - params.q**2 * params.eta_site(j) / params.eta_site(ell))
        for j in range(1, params.n_sites + 1))
    return 2j * u * t_der / t_val - corr


def attach_shift_scalars(spectra, params: ModelParams):
    """Fill each record's scalar table with shift and energy eigenvalues."""
    r = _require_period(params)
    for spec in spectra:
        for rec in spec.records:
            rec.scalars["translation"] = translation_eigenvalue(rec, params)
            for ell in range(1, r + 1):
                rec.scalars[f"quasi_shift_{ell}"] = \
                    quasi_shift_eigenvalue(rec, params, ell)
                rec.scalars[f"energy_{ell}"] = \
                    energy_eigenvalue(rec, params, ell)
    return spectra


# ----------------------------------------------------------------------
# Hamiltonians


def hamiltonian_logderiv(params: ModelParams, ell: int) -> np.ndarray:
    """Hamiltonian as the transfer log-derivative at a period point.

    Uses the exact derivative of the transfer matrix (its entries are
    polynomial in the spectral parameter), so no finite differencing
    enters; the additive scalar makes the large-chain limit extensive.
    """
    n = params.n_sites
    u = -params.eta_site(ell) / params.q
    t_mat, dt_mat = vertex.transfer_matrix_with_derivative(u, params)
    corr = 2j * sum(
        1 / (1 - params.q**2 * params.eta_site(j) / params.eta_site(ell))
        for j in range(1, n + 1))
    return 2j * u * (dt_mat @ np.linalg.inv(t_mat)) - corr * np.eye(params.dim)


def exchange_kernel(zeta, q, j_upper: int, j_lower: int,
                    n_sites: int) -> np.ndarray:
    """Two-site energy density: log-derivative of the braid weight."""
    rc = vertex.r_check(zeta, q)
    drc = vertex.r_check_derivative(zeta, q)
    return embed_pair(2j * zeta * (drc @ np.linalg.inv(rc)),
                      j_upper, j_lower, n_sites)


def local_hamiltonian_block(params: ModelParams, ell: int) -> np.ndarray:
    """One density of the Hamiltonian, supported on sites ell..ell+r.

    Sum of r braid-conjugated two-site kernels; translating it through
    the chain with the r-site shift rebuilds the full Hamiltonian.
    Needs at least two periods so the support does not wrap.
    """
    n, r = params.n_sites, _require_period(params)
    if params.copies < 2:
        raise ValueError("need at least two periods for a local density")
    if not 1 <= ell <= r:
        raise ValueError(f"anchor label {ell} outside 1..{r}")
    eta_l = _eta_mod(params, ell)
    out = np.zeros((params.dim, params.dim), dtype=complex)
    for m in range(1, r + 1):
        dress = np.eye(params.dim, dtype=complex)
        for site in range(ell + m, ell + r):
            fac = vertex.embed_r_check(eta_l / _eta_mod(params, site),
                                       params.q, site + 1, site, n)
            dress = fac @ dress
        kern = exchange_kernel(eta_l / _eta_mod(params, ell + m - 1),
                               params.q, ell + m, ell + m - 1, n)
        out += dress @ kern @ np.linalg.inv(dress)
    return out


def hamiltonian_from_local(params: ModelParams, ell: int) -> np.ndarray:
    """Rebuild the Hamiltonian by translating its local density."""
    shift_r = r_translation(params)
    shift_r_inv = np.linalg.inv(shift_r)
    block = local_hamiltonian_block(params, ell)
    out = np.zeros_like(block)
    for _ in range(params.copies):
        out += block
        block = shift_r @ block @ shift_r_inv
    return out


def support_defect(op: np.ndarray, first_site: int, last_site: int,
                   n_sites: int) -> float:
    """Certify that an operator acts trivially outside a site window.

    Returns the largest commutator norm with the single-site spin
    generators on the complement; zero means the operator is the
    identity there.
    """
    from .lattice import SIGMA_X, SIGMA_Z
    worst = 0.0
    for j in range(1, n_sites + 1):
        if first_site <= j <= last_site:
            continue
        for gen in (SIGMA_X, SIGMA_Z):
            g = embed_site(gen, j, n_sites)
            worst = max(worst, float(np.abs(op @ g - g @ op).max()))
    return worst


# ----------------------------------------------------------------------
# the cyclic spectral-rotation point


def _is_zr_pattern(params: ModelParams, tol: float = 1e-9) -> bool:
    r = params.r
    if r is None:
        return False
    want = [(-1) ** r * np.exp(1j * np.pi * (2 * j - 1) / r)
            for j in range(1, params.n_sites + 1)]
    have = params.eta_by_site()
    return max(abs(have[j] - want[j]) for j in range(params.n_sites)) < tol


def zr_generator(params: ModelParams) -> np.ndarray:
    """Order-r cyclic symmetry at the spectral-rotation point.

    Exists when the inhomogeneities sit at the special unimodular
    pattern whose consecutive ratios are a fixed 2pi/r phase; the braid
    roll then closes into a finite cyclic group whose generator scales
    the spectral parameter of the whole commuting family, see
    :func:`check_zr_scaling`.
    """
    if not _is_zr_pattern(params):
        raise ValueError("inhomogeneities are not at the cyclic "
                         "spectral-rotation pattern")
    return roll_similarity(params, params.r)


def check_zr_scaling(params: ModelParams, zeta) -> float:
    """Residual of the spectral rotation by the cyclic generator.

    Conjugating the transfer matrix by the generator multiplies the
    spectral parameter by exp(2i pi / r); the one-site shift rotates it
    the opposite way.  Returns the worse of the two relative residuals.
    """
    r = _require_period(params)
    gen = zr_generator(params)
    shift = one_site_translation(params)
    w = np.exp(2j * np.pi / r)
    t_here = vertex.transfer_matrix(zeta, params)
    t_up = vertex.transfer_matrix(w * zeta, params)
    t_dn = vertex.transfer_matrix(zeta / w, params)
    d1 = np.abs(np.linalg.solve(gen, t_here @ gen) - t_up).max()
    d2 = np.abs(np.linalg.solve(shift, t_here @ shift) - t_dn).max()
    scale = max(np.abs(t_up).max(), np.abs(t_dn).max())
    return float(max(d1, d2) / scale)
