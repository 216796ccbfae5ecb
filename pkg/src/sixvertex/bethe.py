"""Bethe ansatz layer: states, equations, spectra, norm determinants.

Everything here treats the magnon number M (down spins) as the sector
label; the total spin of that sector is N/2 - M.  Root sets live in a
fixed sector and are always accompanied by their equation residuals so
that on-shell preconditions can be enforced instead of assumed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from . import vertex
from .lattice import (
    ModelParams, TOLS, joint_eigenbasis, pseudovacuum, sector_indices,
)


class OffShellError(ValueError):
    """A root set failed the on-shell precondition of a formula."""


class RootCollisionError(np.linalg.LinAlgError):
    """Bethe roots collided; the Newton system lost rank."""


@dataclass
class BetheRootSet:
    """Roots of one Bethe state together with their residual certificate."""

    magnons: int
    roots: tuple
    residuals: tuple
    provenance: str = ""

    @property
    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else 0.0


@dataclass
class EigenvalueRecord:
    """One joint eigenvector of the commuting family, in closed form.

    ``t_coefficients`` are the transfer-matrix eigenvalue polynomial
    coefficients (ascending, length N+1); ``aplus_coefficients`` those
    of the + Baxter polynomial normalized to 1 at the origin.  Derived
    scalar observables (translation/quasi-shift eigenvalues, energies)
    accumulate in ``scalars`` as later layers compute them.
    """

    magnons: int
    t_coefficients: tuple
    aplus_coefficients: tuple
    roots: tuple
    residuals: tuple
    a_inf_plus: complex
    a_inf_minus: complex
    degenerate_group: int = -1
    provenance: str = ""
    scalars: dict = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else 0.0

    def t_eigenvalue(self, zeta) -> complex:
        return complex(np.polyval(self.t_coefficients[::-1], zeta))

    def aplus(self, zeta) -> complex:
        return complex(np.polyval(self.aplus_coefficients[::-1], zeta))


@dataclass
class SectorSpectrum:
    """Joint diagonalization data of one magnon sector."""

    magnons: int
    indices: np.ndarray        # basis indices of the sector
    vectors: np.ndarray        # eigenvectors as columns (sector-local)
    records: list


# ----------------------------------------------------------------------
# states


def coordinate_state(roots, params: ModelParams) -> np.ndarray:
    """Coordinate-ansatz Bethe vector for the given magnon rapidities.

    Sums the permanent-like permutation sum over magnon orderings with
    the two-magnon scattering amplitudes; cost grows as M! and is
    capped at M = 8.
    """
    roots = [complex(z) for z in roots]
    m = len(roots)
    n = params.n_sites
    q = params.q
    if m > 8:
        raise ValueError("permutation sum capped at 8 magnons")
    psi = np.zeros(params.dim, dtype=complex)
    if m == 0:
        return pseudovacuum(n)

    # one-magnon amplitude phi[j, x-1] for root j at position x
    phi = np.empty((m, n), dtype=complex)
    for j, z in enumerate(roots):
        hop = 1.0
        for x in range(1, n + 1):
            ex = params.eta_site(x)
            phi[j, x - 1] = (-1j * q**0.5 / params.omega * (q - 1 / q) * z
                             / (q * ex + z)) * hop
            hop *= (ex + q * z) / (q * ex + z)

    perms = list(itertools.permutations(range(m)))
    amps = []
    for perm in perms:
        a = 1.0 + 0j
        for j in range(m):
            for l in range(j + 1, m):
                zj, zl = roots[perm[j]], roots[perm[l]]
                a *= (q * zj - zl / q) / (zj - zl)
        amps.append(a)

    for xs in itertools.combinations(range(1, n + 1), m):
        total = 0.0 + 0j
        for a, perm in zip(amps, perms):
            term = a
            for slot, x in enumerate(xs):
                term *= phi[perm[slot], x - 1]
            total += term
        idx = 0
        for x in xs:
            idx |= 1 << (x - 1)
        psi[idx] = total
    return psi


def algebraic_state(roots, params: ModelParams, check_commute=True) -> np.ndarray:
    """Bethe vector from the monodromy creation entries.

    Applies the creation operators right-to-left on the pseudovacuum.
    The creation family must commute among itself; this is validated
    pairwise unless switched off.
    """
    roots = [complex(z) for z in roots]
    creation = [vertex.monodromy(z, params).B for z in roots]
    if check_commute:
        for b1, b2 in itertools.combinations(creation, 2):
            defect = np.abs(b1 @ b2 - b2 @ b1).max()
            if defect > 1e-11:
                raise AssertionError(
                    f"creation operators failed to commute ({defect:.2e})")
    psi = pseudovacuum(params.n_sites)
    for b in creation:          # rightmost root applied first
        psi = b @ psi
    return psi


# ----------------------------------------------------------------------
# Bethe equations


def _fold_phase(z: complex) -> complex:
    """Fold the imaginary part of a log onto the principal strip."""
    return z - 2j * np.pi * np.round(z.imag / (2 * np.pi))


def _string_pairs(roots, q, tol=1e-5):
    """Directed index pairs (i, j) with roots[j] = q^2 * roots[i] (exact string).

    Such a pair puts a zero in the scattering numerator of equation i
    and a matching zero in the denominator of equation j.  Because
    (z_i - z_j/q^2) = -(z_j - q^2 z_i)/q^2 identically, the two factors
    always cancel to exactly -q^2 in the product of equations i and j,
    so a generous detection tolerance costs no accuracy.
    """
    pairs = []
    for i, zi in enumerate(roots):
        for j, zj in enumerate(roots):
            if i != j and abs(zj - q**2 * zi) < tol * max(1.0, abs(zj)):
                pairs.append((i, j))
    return pairs


def bae_residual(roots, params: ModelParams, string_tol=1e-5) -> np.ndarray:
    """Logarithmic Bethe-equation defects, one per root.

    Principal branch of log(LHS/RHS); identically zero exactly on
    shell.  When q is a root of unity, on-shell sets may contain exact
    strings (root pairs with ratio q^2); the individual equations then
    degenerate to 0*inf and only the product over the string component
    is well defined.  Those components are evaluated in the regularized
    limit — the vanishing numerator/denominator pair contributes the
    finite factor -q^2 — and the component defect is shared among its
    members.  Roots sitting on a source pole -eta_J q^{+-1} still
    raise.
    """
    roots = np.asarray(roots, dtype=complex)
    m = len(roots)
    if m == 0:
        return np.array([])
    q = params.q
    sz = params.n_sites / 2.0 - m
    for z in roots:
        if abs(z) < 1e-14:
            raise ZeroDivisionError("root at the origin")
        for j in range(1, params.n_sites + 1):
            if abs(params.eta_site(j) + z / q) < 1e-13:
                raise ZeroDivisionError("root collides with a source pole")

    log_lhs = np.array([sum(np.log((params.eta_site(j) + q * z)
                                   / (params.eta_site(j) + z / q))
                            for j in range(1, params.n_sites + 1))
                        for z in roots])
    pairs = _string_pairs(roots, q, tol=string_tol)
    skip_num = {(i, j) for i, j in pairs}           # numerator zero in eq i
    skip_den = {(j, i) for i, j in pairs}           # denominator zero in eq j

    log_rhs = np.empty(m, dtype=complex)
    const = np.log(-params.omega**2 * q**(2 * sz) + 0j)
    for i, z in enumerate(roots):
        acc = const
        for l, zl in enumerate(roots):
            if (i, l) not in skip_num:
                acc += np.log(zl - q**2 * z)
            if (i, l) not in skip_den:
                acc -= np.log(zl - z / q**2)
        log_rhs[i] = acc

    if not pairs:
        return np.array([_fold_phase(a - b) for a, b in zip(log_lhs, log_rhs)])

    # union-find over string components
    parent = list(range(m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in pairs:
        parent[find(i)] = find(j)
    comp = {}
    for i in range(m):
        comp.setdefault(find(i), []).append(i)
    pair_count = {}
    for i, j in pairs:
        pair_count[find(i)] = pair_count.get(find(i), 0) + 1

    out = np.empty(m, dtype=complex)
    for root_key, members in comp.items():
        if len(members) == 1:
            i = members[0]
            out[i] = _fold_phase(log_lhs[i] - log_rhs[i])
            continue
        total = sum(log_lhs[i] - log_rhs[i] for i in members)
        total -= pair_count.get(root_key, 0) * np.log(-q**2 + 0j)
        total = _fold_phase(total)
        for i in members:
            out[i] = total / len(members)
    return out


def _bae_jacobian(roots, params: ModelParams):
    """Holomorphic Jacobian of the log-form residual."""
    roots = np.asarray(roots, dtype=complex)
    m = len(roots)
    q = params.q
    jac = np.zeros((m, m), dtype=complex)
    for i, z in enumerate(roots):
        diag = 0.0 + 0j
        for j in range(1, params.n_sites + 1):
            e = params.eta_site(j)
            diag += q / (e + q * z) - (1 / q) / (e + z / q)
        for l in range(m):
            if l == i:
                continue  # the j = m scattering factor is z-independent
            zl = roots[l]
            diag -= (-q**2) / (zl - q**2 * z) - (-q**-2) / (zl - z / q**2)
            jac[i, l] = -(1.0 / (zl - q**2 * z) - 1.0 / (zl - z / q**2))
        jac[i, i] = diag
    return jac


def solve_bae_newton(seed_roots, params: ModelParams, tol=None, max_iter=80):
    """Damped Newton iteration on the logarithmic Bethe equations.

    Returns a :class:`BetheRootSet`; raises :class:`RootCollisionError`
    when roots coalesce (rank-deficient Jacobian) and RuntimeError when
    the iteration stalls above tolerance.
    """
    tol = TOLS.newton if tol is None else tol
    roots = np.asarray(seed_roots, dtype=complex).copy()
    m = len(roots)
    if m == 0:
        return BetheRootSet(0, (), (), provenance="newton:trivial")
    res = bae_residual(roots, params)
    for _ in range(max_iter):
        err = np.abs(res).max()
        if err < tol:
            break
        for i, j in itertools.combinations(range(m), 2):
            if abs(roots[i] - roots[j]) < 1e-12 * max(1.0, abs(roots[i])):
                raise RootCollisionError("coincident roots in Newton step")
        jac = _bae_jacobian(roots, params)
        try:
            step = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError as exc:
            raise RootCollisionError(str(exc)) from exc
        lam = 1.0
        while lam > 2**-14:
            trial = roots + lam * step
            try:
                trial_res = bae_residual(trial, params)
            except ZeroDivisionError:
                lam /= 2
                continue
            if np.abs(trial_res).max() < err:
                roots, res = trial, trial_res
                break
            lam /= 2
        else:
            raise RuntimeError("Newton damping stalled above tolerance")
    else:
        raise RuntimeError("Newton failed to converge")
    return BetheRootSet(m, tuple(roots), tuple(np.abs(res)),
                        provenance=f"newton:{np.abs(res).max():.1e}")


# ----------------------------------------------------------------------
# eigenvalue in closed form


def transfer_eigenvalue(zeta, roots, params: ModelParams) -> complex:
    """Transfer-matrix eigenvalue of the Bethe state at spectral point zeta.

    Uses the two-term rational form away from the roots; at a root the
    apparent pole cancels on shell and the value is recovered from the
    interpolating polynomial (after verifying the on-shell condition).
    """
    zeta = complex(zeta)
    q = params.q
    m = len(roots)
    sz = params.n_sites / 2.0 - m
    roots = np.asarray(roots, dtype=complex)
    near = m > 0 and np.abs(roots - zeta).min() < 1e-8 * max(1.0, abs(zeta))
    if not near:
        t1 = params.omega * q**sz * vertex.site_polynomial(zeta / q, params)
        t2 = q**(-sz) / params.omega * vertex.site_polynomial(q * zeta, params)
        if m:
            t1 *= np.prod((roots - q**2 * zeta) / (roots - zeta))
            t2 *= np.prod((roots - zeta / q**2) / (roots - zeta))
        return complex(t1 + t2)
    defect = np.abs(bae_residual(roots, params)).max()
    if defect > 1e-7:
        raise OffShellError(
            f"eigenvalue at a root needs on-shell data (residual {defect:.2e})")
    n = params.n_sites
    pts = vertex.transfer_sample_points(params, n + 1, radius=1.17)
    pts = np.array([p for p in pts if np.abs(roots - p).min() > 1e-6])
    while len(pts) < n + 1:
        extra = vertex.transfer_sample_points(params, n + 3, radius=1.31)
        pts = np.concatenate([pts, extra])[:n + 1]
    vals = [transfer_eigenvalue(p, roots, params) for p in pts[:n + 1]]
    coeff = np.linalg.solve(np.vander(pts[:n + 1], n + 1, increasing=True), vals)
    return complex(np.polyval(coeff[::-1], zeta))


# ----------------------------------------------------------------------
# spectrum -> roots (eigenvalue-first pipeline)


def _tq_polynomial_fit(t_poly_coeffs, magnons, params: ModelParams,
                       radius=0.57, extra=4):
    """Baxter polynomial coefficients from the TQ relation, least squares.

    ``t_poly_coeffs`` are the ascending transfer-eigenvalue polynomial
    coefficients of one state.  Returns (coeffs ascending with [0]=1,
    lsq defect).
    """
    q = params.q
    m = magnons
    sz = params.n_sites / 2.0 - m
    pts = radius * np.exp(2j * np.pi * (np.arange(m + extra) + 0.31) / (m + extra))
    tvals = np.polyval(t_poly_coeffs[::-1], pts)
    fm = np.array([vertex.site_polynomial(p / q, params) for p in pts])
    fp = np.array([vertex.site_polynomial(p * q, params) for p in pts])
    wp = params.omega * q**sz
    wm = q**(-sz) / params.omega
    if m == 0:
        defect = np.abs(tvals - wp * fm - wm * fp).max()
        return np.array([1.0 + 0j]), float(defect)
    rows = np.empty((len(pts), m), dtype=complex)
    for k in range(1, m + 1):
        rows[:, k - 1] = (tvals * pts**k
                          - wp * fm * (q**2 * pts)**k
                          - wm * fp * (pts / q**2)**k)
    rhs = -(tvals - wp * fm - wm * fp)
    sol, *_ = np.linalg.lstsq(rows, rhs, rcond=None)
    defect = np.abs(rows @ sol - rhs).max()
    return np.concatenate([[1.0 + 0j], sol]), float(defect)


def tq_defect(t_poly_coeffs, a_coeffs, magnons, params: ModelParams,
              n_points=None, radius=0.83) -> float:
    """Largest relative defect of the TQ functional relation on a circle.

    Evaluates T(z)*A(z) against the sum of the two shifted source terms
    at ``n_points`` sample points and normalizes by the largest term
    magnitude seen.  This certificate stays regular for exact-string
    root sets where the ratio-form Bethe equations degenerate.
    """
    q = params.q
    sz = params.n_sites / 2.0 - magnons
    if n_points is None:
        n_points = 2 * (params.n_sites + magnons) + 5
    pts = radius * np.exp(2j * np.pi * (np.arange(n_points) + 0.17) / n_points)
    tvals = np.polyval(np.asarray(t_poly_coeffs)[::-1], pts)
    avals = np.polyval(np.asarray(a_coeffs)[::-1], pts)
    ap = np.polyval(np.asarray(a_coeffs)[::-1], q**2 * pts)
    am = np.polyval(np.asarray(a_coeffs)[::-1], pts / q**2)
    fm = np.array([vertex.site_polynomial(p / q, params) for p in pts])
    fp = np.array([vertex.site_polynomial(p * q, params) for p in pts])
    lhs = tvals * avals
    t1 = params.omega * q**sz * fm * ap
    t2 = q**(-sz) / params.omega * fp * am
    scale = max(np.abs(lhs).max(), np.abs(t1).max(), np.abs(t2).max(), 1e-300)
    return float(np.abs(lhs - t1 - t2).max() / scale)


def roots_from_spectrum(params: ModelParams, magnons=None, polish=True):
    """Diagonalize the commuting transfer family and reconstruct all roots.

    For each magnon sector: sample the transfer matrix at N+1 spectral
    points, jointly diagonalize the sector blocks, interpolate each
    eigenvalue to its degree-N polynomial, extract the Baxter polynomial
    through the TQ relation and take its zeros.  Every record carries
    Bethe-equation residuals; rows whose least-squares roots miss the
    Newton tolerance are polished.

    Returns a list of :class:`SectorSpectrum`, one per requested sector.
    """
    n = params.n_sites
    sectors = range(n + 1) if magnons is None else [magnons]
    pts = vertex.transfer_sample_points(params, n + 1)
    mats = [vertex.transfer_matrix(z, params) for z in pts]
    vand_inv = np.linalg.inv(np.vander(pts, n + 1, increasing=True))
    out = []
    for m in sectors:
        idx = sector_indices(n, m)
        blocks = [mat[np.ix_(idx, idx)] for mat in mats]
        basis = joint_eigenbasis(blocks)
        records = []
        for col in range(len(idx)):
            tvals = basis.values[:, col]
            coeffs = vand_inv @ tvals
            acoeffs, lsq_defect = _tq_polynomial_fit(coeffs, m, params)
            prov = f"tq-lsq:{lsq_defect:.1e}"
            if m:
                roots = np.roots(acoeffs[::-1])
                try:
                    resid = np.abs(bae_residual(roots, params))
                except ZeroDivisionError:
                    resid = np.array([np.inf])
                stringy = bool(_string_pairs(roots, params.q))
                if stringy:
                    # Newton's Jacobian is singular on exact strings;
                    # certify through the functional relation instead.
                    cert = tq_defect(coeffs, acoeffs, m, params)
                    resid = np.maximum(resid, cert)
                    prov += f"+string-reg:{cert:.1e}"
                elif polish and resid.max() > TOLS.newton * 10:
                    try:
                        polished = solve_bae_newton(roots, params)
                        roots = np.asarray(polished.roots)
                        resid = np.asarray(polished.residuals)
                        prov += "+newton"
                    except (RootCollisionError, RuntimeError, ZeroDivisionError):
                        prov += "+newton-failed"
                order = np.lexsort((roots.imag, roots.real))
                roots = roots[order]
                # rebuild the Baxter polynomial from the (polished) roots,
                # normalized to 1 at the origin
                monic = np.poly(roots)          # descending, leading 1
                acoeffs = (monic / monic[-1])[::-1]
            else:
                roots = np.array([])
                resid = np.array([])
            a_inf_p = acoeffs[-1] if m else 1.0 + 0j
            sz = n / 2.0 - m
            wronsk = ((1 - params.omega**2 * params.q**(2 * sz))
                      / (params.q**(2 * sz) - params.omega**2))
            record = EigenvalueRecord(
                magnons=m,
                t_coefficients=tuple(coeffs),
                aplus_coefficients=tuple(acoeffs),
                roots=tuple(roots),
                residuals=tuple(np.abs(resid)),
                a_inf_plus=complex(a_inf_p),
                a_inf_minus=complex(wronsk / a_inf_p),
                degenerate_group=int(basis.group_labels[col]),
                provenance=prov,
            )
            records.append(record)
        out.append(SectorSpectrum(magnons=m, indices=idx,
                                  vectors=basis.vectors, records=records))
    return out


def spectrum_record_count(spectra) -> int:
    return sum(len(s.records) for s in spectra)


def string_distance(roots, params: ModelParams) -> float:
    """Distance of a root set from an exact q^2-string configuration.

    Returns ``min_{j != m} |zeta_j / zeta_m - q^2|`` over ordered root
    pairs (reciprocal pairs cover the q^{-2} side automatically), or
    ``inf`` for fewer than two roots.  When the anisotropy sits at a
    root of unity, on-shell root sets can contain exact strings; there
    the coordinate-basis amplitudes and the norm determinant become
    0/0 limits, and closed-form cross-checks built on generic-root
    formulas lose one digit of accuracy per digit of string distance.
    Callers can use this to route such records to limit-safe paths.
    """
    roots = np.asarray(roots, dtype=complex)
    if roots.size < 2:
        return float("inf")
    ratio = roots[:, None] / roots[None, :]
    np.fill_diagonal(ratio, np.inf)
    return float(np.abs(ratio - params.q**2).min())


#: Below this string distance the generic-root closed forms (coordinate
#: amplitudes, norm determinant) are numerically unreliable in double
#: precision; measured error grows like eps / distance.
DEGENERATE_STRING_CUTOFF = 1e-4


def multiset_distance(xs, ys) -> float:
    """Largest matched distance between two equal-size complex multisets."""
    xs = np.asarray(xs, dtype=complex)
    ys = np.asarray(ys, dtype=complex)
    if xs.shape != ys.shape:
        raise ValueError("multisets differ in size")
    if xs.size == 0:
        return 0.0
    cost = np.abs(xs[:, None] - ys[None, :])
    rows, cols = scipy.optimize.linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


# ----------------------------------------------------------------------
# norm determinant and its contraction oracle


def gaudin_korepin(roots, params: ModelParams) -> complex:
    """On-shell norm determinant of a Bethe state.

    Requires the root set to satisfy the Bethe equations to 1e-7;
    raises :class:`OffShellError` otherwise.
    """
    roots = np.asarray(roots, dtype=complex)
    m = len(roots)
    if m == 0:
        return 1.0 + 0j
    defect = np.abs(bae_residual(roots, params)).max()
    if defect > 1e-7:
        raise OffShellError(f"norm determinant needs on-shell roots "
                            f"(residual {defect:.2e})")
    q = params.q
    kappa = np.empty(m, dtype=complex)
    for i, z in enumerate(roots):
        kappa[i] = -sum(z / (e * (1 + z / (q * e)) * (1 + q * z / e))
                        for e in (params.eta_site(j)
                                  for j in range(1, params.n_sites + 1)))
    cross = ((q + 1 / q) * roots[:, None] * roots[None, :]
             / ((q * roots[None, :] - roots[:, None] / q)
                * (q * roots[:, None] - roots[None, :] / q)))
    mat = np.diag(kappa + cross.sum(axis=1)) - cross
    pref = (q - 1 / q)**(2 * m)
    for j in range(m):
        for i in range(m):
            if i != j:
                pref *= (q * roots[j] - roots[i] / q) / (roots[i] - roots[j])
    return complex(pref * np.linalg.det(mat))


def contraction_oracle(roots, params: ModelParams):
    """Collapse the Bethe state with annihilation operators.

    Applies the annihilation entries at every root to the algebraic
    Bethe vector; on shell the image is proportional to the
    pseudovacuum and the scalar equals the norm determinant.  Returns
    (scalar, leakage) where leakage measures the non-vacuum remainder.
    """
    psi = algebraic_state(roots, params, check_commute=False)
    for z in reversed(list(roots)):   # rightmost annihilation acts first
        psi = vertex.monodromy(z, params).C @ psi
    scalar = complex(psi[0])
    leak = float(np.abs(psi[1:]).max()) if len(psi) > 1 else 0.0
    return scalar, leak


# ----------------------------------------------------------------------
# serialization


SCHEMA_VERSION = 1


def _complex_pair(z):
    z = complex(z)
    return [z.real, z.imag]


def record_to_dict(record: EigenvalueRecord) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "sector": record.magnons,
        "roots": [_complex_pair(z) for z in record.roots],
        "residuals": list(record.residuals),
        "t_coefficients": [_complex_pair(z) for z in record.t_coefficients],
        "aplus_coefficients": [_complex_pair(z)
                               for z in record.aplus_coefficients],
        "a_inf_plus": _complex_pair(record.a_inf_plus),
        "a_inf_minus": _complex_pair(record.a_inf_minus),
        "degenerate_group": record.degenerate_group,
        "provenance": record.provenance,
        "scalars": {k: _complex_pair(v) for k, v in record.scalars.items()},
    }
