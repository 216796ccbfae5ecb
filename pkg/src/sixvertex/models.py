"""Named model specializations with closed-form operators.

Two distinguished inhomogeneity patterns admit explicit spin-operator
forms for the commuting-family Hamiltonians: the homogeneous chain
(every inhomogeneity one) and the alternating chain (inhomogeneities
+-i in turn, carrying an order-two cyclic symmetry).  Everything here
is typed directly from those closed forms, independently of the
general machinery, so equality tests between the two routes are
genuine cross-checks rather than tautologies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import hermitian, symmetry, translation, vertex
from .lattice import (SIGMA_MINUS, SIGMA_PLUS, SIGMA_Z, ModelParams,
                      SingularPointError, embed_site, pseudovacuum,
                      total_sz_diagonal)

__all__ = [
    "MODEL_KINDS", "NamedModel", "homogeneous_model", "alternating_model",
    "cyclic_model", "custom_model", "reality_case_model", "xxz_hamiltonian",
    "alternating_hamiltonians", "alternating_energies",
    "alternating_bae_defect", "alternating_transfer_eigenvalue",
    "shift_ratio_braid", "shift_ratio_operator", "shift_ratio_eigenvalue",
    "sublattice_sign", "alternating_metric", "alternating_symmetry_report",
    "alternating_conjugation_report",
]

MODEL_KINDS = ("homogeneous", "alternating", "cyclic", "custom")


def _vertex_angle(params: ModelParams) -> float:
    return float(np.angle(params.q))


@dataclass(frozen=True)
class NamedModel:
    """A recognised inhomogeneity pattern with its resolved parameters."""

    kind: str
    params: ModelParams

    @property
    def anisotropy(self) -> complex:
        """Nearest-neighbour zz coupling of the homogeneous chain."""
        return (self.params.q + 1 / self.params.q) / 2

    @property
    def coupling_index(self) -> float:
        """Alternative label n of the vertex angle, gamma = pi/(n+2)."""
        return float(np.pi / _vertex_angle(self.params) - 2)


def homogeneous_model(n_sites: int, gamma: float, k: float) -> NamedModel:
    return NamedModel("homogeneous",
                      ModelParams.from_angles(n_sites, gamma, k, r=1))


def alternating_model(n_sites: int, gamma: float, k: float) -> NamedModel:
    if n_sites % 2:
        raise ValueError("the alternating chain needs an even site count")
    etas = [1j * (-1) ** (j - 1) for j in range(1, n_sites + 1)]
    return NamedModel("alternating",
                      ModelParams.from_angles(n_sites, gamma, k,
                                              eta_sites=etas, r=2))


def cyclic_model(n_sites: int, r: int, gamma: float, k: float) -> NamedModel:
    """Chain at the distinguished point where the roll similarity closes.

    The inhomogeneities sit at r-th roots of (-1)^r, one per residue,
    making the cyclic generator an exact r-th root of the identity.
    """
    if n_sites % r:
        raise ValueError("the period must divide the site count")
    etas = [(-1) ** r * np.exp(1j * np.pi * (2 * j - 1) / r)
            for j in range(1, n_sites + 1)]
    return NamedModel("cyclic" if r != 2 else "alternating",
                      ModelParams.from_angles(n_sites, gamma, k,
                                              eta_sites=etas, r=r))


def custom_model(params: ModelParams) -> NamedModel:
    return NamedModel("custom", params)


def reality_case_model(n_sites: int, case: str, gamma: float, k: float,
                       seed: int = 0) -> NamedModel:
    """Random inversion-symmetric chain of the requested reality pattern.

    ``case`` is one of the :func:`symmetry.detect_reality_case` labels;
    the sampled inhomogeneities satisfy eta_J * eta_(N+1-J) = 1 and the
    corresponding conjugation-closure, so the whole Hermitian-structure
    machinery applies.
    """
    if n_sites % 2:
        raise ValueError("the random reality patterns need an even chain")
    rng = np.random.default_rng(seed)
    half = n_sites // 2
    if case == "unimodular":
        phases = rng.uniform(0.15, 3.0, half)
        etas = ([np.exp(1j * t) for t in phases]
                + [np.exp(-1j * t) for t in phases[::-1]])
    elif case == "real":
        mags = rng.uniform(0.45, 2.2, half)
        etas = list(mags) + [1 / x for x in mags[::-1]]
    elif case == "modulus-paired":
        lam = rng.uniform(1.15, 1.6)
        phases = rng.uniform(0.1, 1.4, half // 2)
        inner = ([np.exp(1j * t) for t in phases]
                 + ([1.0] if half % 2 else [])
                 + [np.exp(-1j * t) for t in phases[::-1]])
        etas = [w / lam for w in inner] + [lam ** 2 * (w / lam)
                                           for w in inner]
    else:
        raise ValueError(f"unknown reality case {case!r}")
    params = ModelParams.from_angles(n_sites, gamma, k, eta_sites=etas)
    if symmetry.detect_reality_case(params) != case:
        raise symmetry.RealityConditionError(
            "sampled pattern failed its own classification")
    return NamedModel("custom", params)


# ----------------------------------------------------------------------
# spin-operator building blocks with quasi-periodic boundary winding


def _raising(m: int, n: int, k: float) -> np.ndarray:
    wind, site = divmod(m - 1, n)
    return np.exp(2j * np.pi * k * wind) * embed_site(SIGMA_PLUS, site + 1, n)


def _lowering(m: int, n: int, k: float) -> np.ndarray:
    wind, site = divmod(m - 1, n)
    return np.exp(-2j * np.pi * k * wind) * embed_site(SIGMA_MINUS,
                                                       site + 1, n)


def _axial(m: int, n: int) -> np.ndarray:
    return embed_site(SIGMA_Z, (m - 1) % n + 1, n)


def _transverse_pair(m1: int, m2: int, n: int, k: float) -> np.ndarray:
    """xx + yy coupling between two (possibly wrapped) sites."""
    return 2 * (_raising(m1, n, k) @ _lowering(m2, n, k)
                + _lowering(m1, n, k) @ _raising(m2, n, k))


# ----------------------------------------------------------------------
# homogeneous chain


def xxz_hamiltonian(n_sites: int, gamma: float, k: float) -> np.ndarray:
    """Nearest-neighbour anisotropic Heisenberg chain, twisted boundary.

    Normalised so it equals the logarithmic derivative of the transfer
    matrix of the homogeneous chain at its shift point.
    """
    q = np.exp(1j * gamma)
    delta = (q + 1 / q) / 2
    dim = 2 ** n_sites
    out = np.zeros((dim, dim), dtype=complex)
    for m in range(1, n_sites + 1):
        out += _transverse_pair(m, m + 1, n_sites, k)
        out += delta * (_axial(m, n_sites) @ _axial(m + 1, n_sites)
                        - np.eye(dim))
    return -1j / (q - 1 / q) * out


# ----------------------------------------------------------------------
# alternating chain: Hamiltonians and spectra


def _require_alternating(n_sites: int, gamma: float):
    if n_sites % 2:
        raise ValueError("the alternating chain needs an even site count")
    if abs(np.exp(2j * gamma) + 1) < 1e-9:
        raise SingularPointError(
            "the braid weight at -1 degenerates when q^2 = -1")


def alternating_hamiltonians(n_sites: int, gamma: float, k: float):
    """The two conserved Hamiltonians of the alternating chain + their sum.

    Returns (plus, minus, total).  Each member couples nearest and
    next-to-nearest neighbours only: a shared staggered zz part, a
    next-to-nearest exchange on one sublattice (even for plus, odd for
    minus), and a chiral three-spin term; the sum telescopes into a
    single translation-invariant expression.
    """
    _require_alternating(n_sites, gamma)
    if n_sites < 4:
        raise ValueError("need at least four sites for the local form")
    n, dim = n_sites, 2 ** n_sites
    sin2, cos1, tan1 = np.sin(2 * gamma), np.cos(gamma), np.tan(gamma)
    zz_chain = sum(_axial(m, n) @ _axial(m + 1, n) for m in range(1, n + 1))
    members = {}
    for start, label in ((2, "plus"), (1, "minus")):
        ham = 0.5 * tan1 * zz_chain.astype(complex)
        for a in range(start, n + 1, 2):
            ham -= (_transverse_pair(a, a + 2, n, k)
                    + _axial(a, n) @ _axial(a + 2, n)) / sin2
            ham += 1j / (2 * cos1) * (
                _transverse_pair(a, a + 1, n, k) @ _axial(a + 2, n)
                - _axial(a, n) @ _transverse_pair(a + 1, a + 2, n, k))
        ham += n / 2 / np.tan(2 * gamma) * np.eye(dim)
        members[label] = ham
    total = np.zeros((dim, dim), dtype=complex)
    for m in range(1, n + 1):
        total += 2 * np.sin(gamma) ** 2 * _axial(m, n) @ _axial(m + 1, n)
        total -= (_transverse_pair(m, m + 2, n, k)
                  + _axial(m, n) @ _axial(m + 2, n))
        total += 1j * np.sin(gamma) * _transverse_pair(m, m + 1, n, k) @ (
            _axial(m + 2, n) - _axial(m - 1 + n, n))
    total = total / sin2 + n / np.tan(2 * gamma) * np.eye(dim)
    return members["plus"], members["minus"], total


def alternating_energies(roots, params: ModelParams):
    """Closed-form eigenvalues (plus, minus) on the state with the roots."""
    q = params.q
    zs = np.asarray(roots, dtype=complex)
    plus = np.sum(2 * (q - 1 / q) / (zs - 1 / zs - 1j * (q + 1 / q)))
    minus = -np.sum(2 * (q - 1 / q) / (zs - 1 / zs + 1j * (q + 1 / q)))
    return complex(plus), complex(minus)


def alternating_bae_defect(roots, params: ModelParams) -> float:
    """Worst relative defect of the reduced root equations.

    On the alternating chain the site product in the root equations
    collapses to a half-power of a single rational factor.
    """
    q, w, n = params.q, params.omega, params.n_sites
    zs = np.asarray(roots, dtype=complex)
    sz = n / 2 - len(zs)
    worst = 0.0
    for m, zm in enumerate(zs):
        lhs = ((1 + q ** 2 * zm ** 2) / (1 + q ** -2 * zm ** 2)) ** (n // 2)
        others = np.prod((zs - q ** 2 * zm) / (zs - q ** -2 * zm))
        rhs = -w ** 2 * q ** (2 * sz) * others
        worst = max(worst, abs(lhs - rhs) / (abs(lhs) + abs(rhs)))
    return float(worst)


def alternating_transfer_eigenvalue(zeta, roots,
                                    params: ModelParams) -> complex:
    """Transfer-matrix eigenvalue of the alternating chain in closed form."""
    q, w, n = params.q, params.omega, params.n_sites
    zeta = complex(zeta)
    zs = np.asarray(roots, dtype=complex)
    sz = n / 2 - len(zs)
    return complex(
        w * q ** sz * (1 + q ** -2 * zeta ** 2) ** (n // 2)
        * np.prod((zs - q ** 2 * zeta) / (zs - zeta))
        + w ** -1 * q ** -sz * (1 + q ** 2 * zeta ** 2) ** (n // 2)
        * np.prod((zs - q ** -2 * zeta) / (zs - zeta)))


# ----------------------------------------------------------------------
# the quasi-shift ratio


def _twist_at_last_site(n_sites: int, omega: complex, sign: int
                        ) -> np.ndarray:
    diag = [omega ** (sign if (a >> (n_sites - 1)) & 1 == 0 else -sign)
            for a in range(2 ** n_sites)]
    return np.diag(np.asarray(diag, dtype=complex))


def shift_ratio_braid(n_sites: int, gamma: float, k: float) -> np.ndarray:
    """Ratio of the two quasi-shifts as an explicit braid chain.

    Two staggered layers of braid weights at argument -1, dressed by
    opposite twist factors on the last site; this is the transfer
    matrix of a homogeneous model drawn on the diagonally rotated
    lattice.
    """
    _require_alternating(n_sites, gamma)
    n, q = n_sites, np.exp(1j * gamma)
    omega = np.exp(1j * np.pi * k)
    dim = 2 ** n
    upper = np.eye(dim, dtype=complex)
    for a, b in [(n - 1 - 2 * i, n - 2 - 2 * i) for i in range(n // 2 - 1)]:
        upper = upper @ vertex.embed_r_check(-1, q, a, b, n)
    upper = upper @ vertex.embed_r_check(-1, q, 1, n, n)
    lower = np.eye(dim, dtype=complex)
    for a, b in [(n - 2 * i, n - 1 - 2 * i) for i in range(n // 2)]:
        lower = lower @ vertex.embed_r_check(-1, q, a, b, n)
    return (_twist_at_last_site(n, omega, -1) @ upper
            @ _twist_at_last_site(n, omega, +1) @ lower)


def shift_ratio_operator(params: ModelParams) -> np.ndarray:
    """Same operator through the general quasi-shift machinery."""
    return translation.quasi_shift(params, 1) @ np.linalg.inv(
        translation.quasi_shift(params, 2))


def shift_ratio_eigenvalue(roots, params: ModelParams) -> complex:
    zs = np.asarray(roots, dtype=complex)
    q = params.q
    return complex(np.prod((zs + 1j * q) * (zs - 1j / q)
                           / ((zs - 1j * q) * (zs + 1j / q))))


# ----------------------------------------------------------------------
# metric and symmetry reports


def sublattice_sign(n_sites: int) -> np.ndarray:
    """Diagonal product of the axial spins on the even sublattice."""
    diag = [float(np.prod([1 - 2 * ((a >> (j - 1)) & 1)
                           for j in range(2, n_sites + 1, 2)]))
            for a in range(2 ** n_sites)]
    return np.diag(np.asarray(diag, dtype=complex))


def alternating_metric(params: ModelParams) -> np.ndarray:
    """Conjugation metric of the alternating chain in closed form.

    Sublattice sign times the cyclic generator times a quarter-turn
    spin phase; equals :func:`hermitian.conjugation_metric`.
    """
    n = params.n_sites
    szd = total_sz_diagonal(n)
    phase = np.diag(np.exp(1j * np.pi / 2 * (szd - n / 2)))
    return sublattice_sign(n) @ translation.zr_generator(params) @ phase


def _rel(lhs: np.ndarray, rhs: np.ndarray) -> float:
    return float(np.abs(lhs - rhs).max() / max(np.abs(rhs).max(), 1e-300))


def alternating_symmetry_report(params: ModelParams) -> dict:
    """Residuals of every discrete-symmetry identity of the chain.

    Covers the cyclic generator (involution, vacuum, local-spin
    conjugation), its swap action on the Hamiltonian and quasi-shift
    pairs and inversion of their ratio, the charge-parity and
    time-reversal actions, and the sandwich identity for the
    large-argument Baxter limit.  All values are relative defects.
    """
    from . import qoper
    n, k = params.n_sites, params.twist_exponent
    gamma = _vertex_angle(params)
    gen = translation.zr_generator(params)
    sg, cg = np.sin(gamma), np.cos(gamma)
    report = {}
    report["generator_involution"] = float(
        np.abs(gen @ gen - np.eye(params.dim)).max())
    report["generator_fixes_vacuum"] = float(
        np.abs(gen @ pseudovacuum(n) - pseudovacuum(n)).max())
    worst = {"odd_transverse": 0.0, "odd_axial": 0.0,
             "even_transverse": 0.0, "even_axial": 0.0}
    for m in range(1, n + 1):
        if m % 2:
            for op in (SIGMA_PLUS, SIGMA_MINUS):
                image = (embed_site(op, m + 1, n)
                         - 1j * sg * _axial(m + 1, n)
                         @ embed_site(op, m, n)) / cg
                worst["odd_transverse"] = max(
                    worst["odd_transverse"],
                    float(np.abs(gen @ embed_site(op, m, n) @ gen
                                 - image).max()))
            image = (_axial(m + 1, n) - sg ** 2 * _axial(m, n)
                     + 2j * sg * (embed_site(SIGMA_PLUS, m + 1, n)
                                  @ embed_site(SIGMA_MINUS, m, n)
                                  + embed_site(SIGMA_MINUS, m + 1, n)
                                  @ embed_site(SIGMA_PLUS, m, n))) / cg ** 2
            worst["odd_axial"] = max(worst["odd_axial"], float(
                np.abs(gen @ _axial(m, n) @ gen - image).max()))
        else:
            for op in (SIGMA_PLUS, SIGMA_MINUS):
                image = (embed_site(op, m - 1, n)
                         + 1j * sg * embed_site(op, m, n)
                         @ _axial(m - 1, n)) / cg
                worst["even_transverse"] = max(
                    worst["even_transverse"],
                    float(np.abs(gen @ embed_site(op, m, n) @ gen
                                 - image).max()))
            image = (_axial(m - 1, n) - sg ** 2 * _axial(m, n)
                     - 2j * sg * (embed_site(SIGMA_PLUS, m, n)
                                  @ embed_site(SIGMA_MINUS, m - 1, n)
                                  + embed_site(SIGMA_MINUS, m, n)
                                  @ embed_site(SIGMA_PLUS, m - 1, n))
                     ) / cg ** 2
            worst["even_axial"] = max(worst["even_axial"], float(
                np.abs(gen @ _axial(m, n) @ gen - image).max()))
    for key, val in worst.items():
        report[f"spin_map_{key}"] = val

    ham_plus, ham_minus, _ = alternating_hamiltonians(n, gamma, k)
    quasi_plus = translation.quasi_shift(params, 1)
    quasi_minus = translation.quasi_shift(params, 2)
    ratio = quasi_plus @ np.linalg.inv(quasi_minus)
    report["generator_swaps_hamiltonians"] = max(
        _rel(gen @ ham_plus @ gen, ham_minus),
        _rel(gen @ ham_minus @ gen, ham_plus))
    report["generator_swaps_quasi_shifts"] = max(
        _rel(gen @ quasi_plus @ gen, quasi_minus),
        _rel(gen @ quasi_minus @ gen, quasi_plus))
    report["generator_inverts_shift_ratio"] = _rel(
        gen @ ratio @ gen, np.linalg.inv(ratio))

    cp = symmetry.cp_conjugation(params)
    tr = symmetry.time_reversal(params)
    report["charge_parity_inverts_generator"] = _rel(
        cp.conjugate(gen), np.linalg.inv(gen))
    report["time_reversal_fixes_generator"] = _rel(tr.conjugate(gen), gen)
    report["charge_parity_swaps_hamiltonians"] = max(
        _rel(cp.conjugate(ham_plus), ham_minus),
        _rel(cp.conjugate(ham_minus), ham_plus))
    report["time_reversal_fixes_hamiltonians"] = max(
        _rel(tr.conjugate(ham_plus), ham_plus),
        _rel(tr.conjugate(ham_minus), ham_minus))
    report["charge_parity_swap_inverts_quasi_shifts"] = max(
        _rel(cp.conjugate(quasi_plus), np.linalg.inv(quasi_minus)),
        _rel(cp.conjugate(quasi_minus), np.linalg.inv(quasi_plus)))
    report["time_reversal_fixes_quasi_shifts"] = max(
        _rel(tr.conjugate(quasi_plus), quasi_plus),
        _rel(tr.conjugate(quasi_minus), quasi_minus))
    report["charge_parity_fixes_shift_ratio"] = _rel(
        cp.conjugate(ratio), ratio)
    report["time_reversal_fixes_shift_ratio"] = _rel(
        tr.conjugate(ratio), ratio)

    asym = qoper.q_asymptotic(params, +1)
    szd = total_sz_diagonal(n)
    phase = np.diag(np.exp(1j * np.pi * (szd - n / 2)))
    report["generator_sandwich_scales_asymptotic"] = _rel(
        gen @ asym @ gen, phase @ asym)
    return report


def alternating_conjugation_report(params: ModelParams) -> dict:
    """Residuals of the metric-twisted conjugation on the named operators."""
    n, k = params.n_sites, params.twist_exponent
    metric = hermitian.conjugation_metric(params)
    commutant = hermitian.canonical_commutant(params)

    def star(op):
        return hermitian.star_conjugate(op, metric, commutant)

    ham_plus, ham_minus, total = alternating_hamiltonians(
        n, _vertex_angle(params), k)
    quasi_plus = translation.quasi_shift(params, 1)
    quasi_minus = translation.quasi_shift(params, 2)
    ratio = quasi_plus @ np.linalg.inv(quasi_minus)
    two_site = translation.r_translation(params)
    return {
        "metric_closed_form": _rel(alternating_metric(params), metric),
        "hamiltonian_pair_star_swap": max(
            _rel(star(ham_plus), ham_minus),
            _rel(star(ham_minus), ham_plus)),
        "quasi_shift_pair_star_swap_inverts": max(
            _rel(star(quasi_plus), np.linalg.inv(quasi_minus)),
            _rel(star(quasi_minus), np.linalg.inv(quasi_plus))),
        "total_hamiltonian_star_fixed": _rel(star(total), total),
        "translation_star_inverted": _rel(star(two_site),
                                          np.linalg.inv(two_site)),
        "shift_ratio_star_fixed": _rel(star(ratio), ratio),
    }
