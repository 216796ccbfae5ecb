"""Hermitian structures compatible with the commuting family.

The plain matrix dagger does not fix the transfer matrix; it lands on
the chain with conjugated inhomogeneities, dressed by site-local
diagonal factors.  When the inhomogeneity multiset is closed under
complex conjugation, a braid similarity pulls the conjugated chain
back, and combining it with the diagonal dressing yields a Hermitian
metric.  The metric twists the dagger into a conjugation that fixes
the whole commuting family up to conjugation of the spectral
parameter, and fixes the associated sesquilinear form up to a
commutant factor; the induced "norm" of a Bethe state is computed in
closed form by the determinant functional.
"""

from __future__ import annotations

import numpy as np

from . import bethe, qoper, symmetry, vertex
from .lattice import ModelParams, total_sz_diagonal

__all__ = [
    "conjugation_diagonal", "conjugation_metric", "periodic_metric",
    "double_dagger", "star_conjugate", "canonical_commutant",
    "coordinate_commutant", "gram_matrix", "star_form", "bethe_norm",
    "check_ddag_monodromy", "check_ddag_family", "check_star_family",
    "check_bethe_orthogonality",
]


def conjugation_diagonal(params: ModelParams) -> np.ndarray:
    """Diagonal dressing picked up by the dagger of the monodromy.

    Each basis state carries the product over sites of the conjugated
    inhomogeneity raised to minus half the local spin (principal square
    roots).
    """
    diag = np.ones(params.dim, dtype=complex)
    roots = [np.sqrt(np.conj(params.eta_site(j)))
             for j in range(1, params.n_sites + 1)]
    for a in range(params.dim):
        for j in range(1, params.n_sites + 1):
            if (a >> (j - 1)) & 1:
                diag[a] *= roots[j - 1]
            else:
                diag[a] /= roots[j - 1]
    return np.diag(diag)


def _conjugation_target(params: ModelParams, case: str):
    """By-site inhomogeneity pattern after complex conjugation."""
    by_site = list(params.eta_by_site())
    if case == "real":
        return by_site
    if case == "unimodular":
        return by_site[::-1]
    half = params.n_sites // 2
    return by_site[:half][::-1] + by_site[half:][::-1]


def conjugation_metric(params: ModelParams) -> np.ndarray:
    """Hermitian metric twisting the dagger onto the commuting family.

    Product of the diagonal dressing with the inverse of the braid
    similarity that moves every inhomogeneity onto its complex
    conjugate.  Raises if the parameters admit none of the supported
    reality patterns, or if the result fails to be Hermitian (which
    would signal an inconsistent pattern match).
    """
    case = symmetry.detect_reality_case(params)
    sim = symmetry.permutation_similarity(
        params, _conjugation_target(params, case))
    metric = conjugation_diagonal(params) @ np.linalg.inv(sim)
    defect = np.abs(metric - metric.conj().T).max()
    if defect > 1e-8 * max(1.0, np.abs(metric).max()):
        raise ArithmeticError(
            f"metric failed its Hermiticity certificate ({defect:.2e})")
    return metric


def _window_reversal(params: ModelParams, first: int, last: int
                     ) -> np.ndarray:
    """Braid similarity reversing the inhomogeneities on a site window."""
    vals = [params.eta_site(j) for j in range(first, last + 1)]
    target = vals[::-1]
    sim = np.eye(params.dim, dtype=complex)
    cur = vals[:]
    for pos in range(len(cur)):
        src = next(i for i in range(pos, len(cur))
                   if abs(cur[i] - target[pos]) < 1e-9)
        for i in range(src, pos, -1):
            site = first + i - 1
            sim = sim @ vertex.embed_r_check(cur[i] / cur[i - 1], params.q,
                                             site + 1, site, params.n_sites)
            cur[i - 1], cur[i] = cur[i], cur[i - 1]
    return sim


def periodic_metric(params: ModelParams) -> np.ndarray:
    """Metric of an r-periodic unimodular chain, built period by period.

    The one-period block (diagonal dressing times the inverse of the
    within-period reversal braid) acts only on the first r sites;
    translating it with the r-site shift and multiplying the copies
    reproduces :func:`conjugation_metric` exactly.
    """
    from . import translation
    r = params.r
    if r is None:
        raise ValueError("declare the inhomogeneity period r to use the "
                         "factorized metric")
    if symmetry.detect_reality_case(params) != "unimodular":
        raise symmetry.RealityConditionError(
            "the factorized metric needs unimodular inhomogeneities")
    diag = np.ones(params.dim, dtype=complex)
    for a in range(params.dim):
        for ell in range(1, r + 1):
            s = -1 if (a >> (ell - 1)) & 1 else +1
            diag[a] *= np.sqrt(params.eta_site(ell)) ** s
    block = np.diag(diag) @ np.linalg.inv(_window_reversal(params, 1, r))
    shift_r = translation.r_translation(params)
    shift_r_inv = np.linalg.inv(shift_r)
    out = np.eye(params.dim, dtype=complex)
    for m in range(params.copies):
        km = np.linalg.matrix_power(shift_r, m)
        out = out @ (km @ block @ np.linalg.matrix_power(shift_r_inv, m))
    return out


def double_dagger(op: np.ndarray, metric: np.ndarray) -> np.ndarray:
    """Metric-twisted Hermitian conjugate of an operator."""
    return np.linalg.solve(metric, op.conj().T @ metric)


def star_conjugate(op: np.ndarray, metric: np.ndarray,
                   commutant: np.ndarray) -> np.ndarray:
    """Conjugation extended by a factor commuting with the family."""
    return np.linalg.solve(commutant,
                           double_dagger(op, metric) @ commutant)


# ----------------------------------------------------------------------
# commutant factors completing the conjugation


def canonical_commutant(params: ModelParams) -> np.ndarray:
    """Spectral-weight factor making the form produce the determinant norm.

    Sign alternation in the magnon number times the large-argument
    limit of the + Baxter operator; its eigenvalue on a Bethe state is
    the inverse product of the roots, exactly cancelling the root
    product that the bare metric form would attach to the norm.
    """
    sz = total_sz_diagonal(params.n_sites)
    phase = np.exp(1j * np.pi * (sz - params.n_sites / 2))
    return np.diag(phase) @ qoper.q_asymptotic(params, +1)


def coordinate_commutant(params: ModelParams) -> np.ndarray:
    """Factor reproducing the positive coordinate-basis norm.

    At the homogeneous point the plain dagger already fixes the family,
    and this product of two Baxter values matches the historical
    normalization of coordinate-basis wavefunctions.
    """
    sz = total_sz_diagonal(params.n_sites)
    pref = np.diag((1j * (params.q - 1 / params.q)) ** (2 * sz
                                                        - params.n_sites))
    return (pref @ qoper.q_operator(-params.q, params, +1)
            @ qoper.q_operator(-1 / params.q, params, +1))


# ----------------------------------------------------------------------
# the sesquilinear form


def gram_matrix(params: ModelParams, commutant: np.ndarray | None = None
                ) -> np.ndarray:
    """Gram matrix of the form adapted to the twisted conjugation.

    Product of the metric with the commutant factor, normalized so the
    pseudovacuum has unit norm; Hermitian whenever the commutant is
    fixed by the twisted dagger.
    """
    if commutant is None:
        commutant = canonical_commutant(params)
    gram = conjugation_metric(params) @ commutant
    scale = gram[0, 0]
    if abs(scale) < 1e-12:
        raise ArithmeticError("pseudovacuum is null for this form")
    return gram / scale


def star_form(psi2: np.ndarray, psi1: np.ndarray,
              gram: np.ndarray) -> complex:
    """Sesquilinear form (antilinear in the first argument)."""
    return complex(np.conj(psi2) @ gram @ psi1)


def bethe_norm(roots, params: ModelParams,
               gram: np.ndarray | None = None) -> complex:
    """Norm of a Bethe state: the form paired against its CPT image.

    With the canonical commutant this equals the determinant functional
    evaluated on the roots.
    """
    if gram is None:
        gram = gram_matrix(params)
    cpt = symmetry.cpt_conjugation(params)
    psi = bethe.algebraic_state(roots, params, check_commute=False)
    return star_form(cpt.apply(psi), psi, gram)


# ----------------------------------------------------------------------
# identity checks


def check_ddag_monodromy(params: ModelParams, zeta) -> float:
    """Twisted dagger exchanges the diagonal monodromy entries and
    transposes the off-diagonal ones with spectral weights."""
    zeta = complex(zeta)
    metric = conjugation_metric(params)
    mono = vertex.monodromy(zeta, params)
    mono_c = vertex.monodromy(np.conj(zeta), params)
    zc = np.conj(zeta)
    pairs = [
        (double_dagger(mono.A, metric), mono_c.D),
        (double_dagger(mono.D, metric), mono_c.A),
        (double_dagger(mono.B, metric), zc * mono_c.C),
        (double_dagger(mono.C, metric), mono_c.B / zc),
    ]
    scale = max(np.abs(rhs).max() for _, rhs in pairs)
    return float(max(np.abs(lhs - rhs).max() for lhs, rhs in pairs) / scale)


def check_ddag_family(params: ModelParams, zeta) -> float:
    """Twisted dagger conjugates the spectral parameter of the family."""
    zeta = complex(zeta)
    metric = conjugation_metric(params)
    worst = 0.0
    lhs = double_dagger(vertex.transfer_matrix(zeta, params), metric)
    rhs = vertex.transfer_matrix(np.conj(zeta), params)
    worst = max(worst, np.abs(lhs - rhs).max() / np.abs(rhs).max())
    for sign in (+1, -1):
        lhs = double_dagger(qoper.q_operator(zeta, params, sign), metric)
        rhs = qoper.q_operator(np.conj(zeta), params, sign)
        worst = max(worst, np.abs(lhs - rhs).max() / np.abs(rhs).max())
    return float(worst)


def check_star_family(params: ModelParams, zeta,
                      commutant: np.ndarray | None = None) -> float:
    """Same as :func:`check_ddag_family` for the extended conjugation,
    after certifying the commutant is fixed and commutes."""
    zeta = complex(zeta)
    metric = conjugation_metric(params)
    if commutant is None:
        commutant = canonical_commutant(params)
    worst = np.abs(double_dagger(commutant, metric) - commutant
                   ).max() / np.abs(commutant).max()
    aplus = qoper.q_operator(zeta, params, +1)
    worst = max(worst, np.abs(commutant @ aplus - aplus @ commutant
                              ).max() / np.abs(aplus).max())
    lhs = star_conjugate(vertex.transfer_matrix(zeta, params), metric,
                         commutant)
    rhs = vertex.transfer_matrix(np.conj(zeta), params)
    worst = max(worst, np.abs(lhs - rhs).max() / np.abs(rhs).max())
    for sign in (+1, -1):
        lhs = star_conjugate(qoper.q_operator(zeta, params, sign), metric,
                             commutant)
        rhs = qoper.q_operator(np.conj(zeta), params, sign)
        worst = max(worst, np.abs(lhs - rhs).max() / np.abs(rhs).max())
    return float(worst)


def check_bethe_orthogonality(params: ModelParams, magnons: int,
                              residual_cap: float = 1e-8):
    """Gram-orthogonality and closed-form norms across a whole sector.

    Returns (worst relative off-diagonal mass, worst relative norm
    defect) over the Bethe states of the sector whose root residuals
    pass the cap; states pair to zero unless matched with their own
    CPT image, and each diagonal entry equals the determinant
    functional.  Off-diagonal mass is measured against the largest
    diagonal entry, since the Gram diagonal sets the natural scale of
    the pairing.  Root sets closer than ``bethe.DEGENERATE_STRING_CUTOFF``
    to an exact q^2-string keep their place in the orthogonality table
    but are left out of the norm comparison: the determinant functional
    is a generic-root formula and degenerates to 0/0 on strings.
    """
    gram = gram_matrix(params)
    cpt = symmetry.cpt_conjugation(params)
    spectrum = bethe.roots_from_spectrum(params, magnons=magnons)[0]
    states, norms, generic = [], [], []
    for rec in spectrum.records:
        if rec.max_residual > residual_cap:
            continue
        states.append(bethe.algebraic_state(rec.roots, params,
                                            check_commute=False))
        norms.append(bethe.gaudin_korepin(rec.roots, params))
        generic.append(bethe.string_distance(rec.roots, params)
                       > bethe.DEGENERATE_STRING_CUTOFF)
    if not states:
        raise bethe.OffShellError("no certified root sets in the sector")
    basis = np.array(states).T
    table = (cpt.matrix @ np.conj(basis)).conj().T @ gram @ basis
    diag = np.diag(table)
    off = table - np.diag(diag)
    off_mass = np.abs(off).max() / max(np.abs(diag).max(), 1e-300)
    norm_defect = max((abs(table[i, i] - norms[i]) / abs(norms[i])
                       for i in range(len(norms)) if generic[i]),
                      default=0.0)
    return float(off_mass), float(norm_defect)
