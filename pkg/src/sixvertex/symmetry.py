"""Discrete conjugations of the chain: parity, charge, time reversal.

Parity and charge conjugation exist for any inhomogeneity pattern that
is inversion-symmetric across the chain; each one alone inverts the
twist, so only their product preserves the commuting family.  Time
reversal is antiunitary and exists under one of three reality patterns
of the inhomogeneities — all unimodular, all real, or modulus-paired
halves — differing only by a braid-built similarity factor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import bethe, qoper, vertex
from .lattice import ModelParams, total_sz_diagonal

__all__ = [
    "RealityConditionError", "SymmetryOperator", "parity", "charge",
    "spin_flip", "permutation_similarity", "reversal_similarity",
    "half_swap_similarity", "detect_reality_case", "time_reversal",
    "cp_conjugation", "cpt_conjugation", "check_cp_transfer",
    "check_cp_baxter", "check_time_reversal_transfer",
    "check_time_reversal_baxter", "check_cpt", "check_cpt_bethe_map",
]


class RealityConditionError(ValueError):
    """Parameters violate the reality pattern a conjugation requires."""


@dataclass
class SymmetryOperator:
    """A (possibly antiunitary) involution of the spin chain.

    Antiunitary operators act as the stored matrix composed with
    complex conjugation of coordinates; conjugation of an operator O
    is U O U^-1 for the unitary case and U O* U^-1 otherwise.
    """

    matrix: np.ndarray
    antiunitary: bool = False
    name: str = ""
    _inverse: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self._inverse is None:
            self._inverse = np.linalg.inv(self.matrix)

    def apply(self, state: np.ndarray) -> np.ndarray:
        return self.matrix @ (state.conj() if self.antiunitary else state)

    def conjugate(self, op: np.ndarray) -> np.ndarray:
        core = op.conj() if self.antiunitary else op
        return self.matrix @ core @ self._inverse

    def compose(self, other: "SymmetryOperator") -> "SymmetryOperator":
        right = other.matrix.conj() if self.antiunitary else other.matrix
        return SymmetryOperator(self.matrix @ right,
                                antiunitary=self.antiunitary
                                ^ other.antiunitary,
                                name=f"{self.name}{other.name}")

    def involution_defect(self) -> float:
        sq = self.matrix @ (self.matrix.conj() if self.antiunitary
                            else self.matrix)
        return float(np.abs(sq - np.eye(len(sq))).max())


def _require_inversion_symmetric(params: ModelParams):
    n = params.n_sites
    for j in range(1, n + 1):
        if abs(params.eta_site(j) * params.eta_site(n + 1 - j) - 1) > 1e-10:
            raise RealityConditionError(
                "parity needs eta_J * eta_(N+1-J) = 1 for every site")


def parity(params: ModelParams) -> SymmetryOperator:
    """Site-reversal conjugation, normalized to fix the pseudovacuum.

    Reverses the chain and dresses each basis state with the product of
    square-rooted inhomogeneities signed by the local spin; the overall
    branch sign is fixed by demanding the pseudovacuum stay put.
    """
    _require_inversion_symmetric(params)
    n = params.n_sites
    sq = [np.sqrt(params.eta_site(j)) for j in range(1, n + 1)]
    mat = np.zeros((params.dim, params.dim), dtype=complex)
    for a in range(params.dim):
        rev = 0
        wgt = 1.0 + 0j
        for j in range(1, n + 1):
            bit = (a >> (j - 1)) & 1
            rev |= bit << (n - j)
            wgt *= 1 / sq[j - 1] if bit else sq[j - 1]
        mat[a, rev] = wgt
    mat /= mat[0, 0]
    return SymmetryOperator(mat, name="P")


def charge(params: ModelParams) -> SymmetryOperator:
    """Spin-flip conjugation dressed by the local inhomogeneities."""
    mat = np.array([[1.0 + 0j]])
    for j in range(params.n_sites, 0, -1):     # site N leftmost
        s = np.sqrt(params.eta_site(j))
        mat = np.kron(mat, np.array([[0, s], [1 / s, 0]]))
    return SymmetryOperator(mat, name="C")


def spin_flip(n_sites: int) -> np.ndarray:
    """Plain all-site spin flip (no inhomogeneity dressing)."""
    mat = np.array([[1.0 + 0j]])
    for _ in range(n_sites):
        mat = np.kron(mat, np.array([[0.0, 1.0], [1.0, 0.0]]))
    return mat


# ----------------------------------------------------------------------
# realizing inhomogeneity permutations on the quantum space


def permutation_similarity(params: ModelParams, target_by_site) -> np.ndarray:
    """Similarity matrix moving the inhomogeneities into a new order.

    ``target_by_site`` must be a permutation of the current by-site
    values.  Built by bubble sort: each adjacent swap contributes the
    braid factor at the ratio of the two values being exchanged, which
    intertwines the corresponding monodromy matrices; composing them
    gives S with  M(target) = S^-1 M(current) S.
    """
    n = params.n_sites
    cur = list(params.eta_by_site())
    target = list(target_by_site)
    unmatched = list(target)
    for value in cur:
        hit = next((i for i, t in enumerate(unmatched)
                    if abs(t - value) < 1e-9), None)
        if hit is None:
            raise ValueError("target is not a permutation of the current "
                             "inhomogeneities")
        unmatched.pop(hit)
    sim = np.eye(params.dim, dtype=complex)
    for pos in range(n):
        src = next(i for i in range(pos, n)
                   if abs(cur[i] - target[pos]) < 1e-9)
        for i in range(src, pos, -1):
            ratio = cur[i] / cur[i - 1]     # upper site over lower site
            sim = sim @ vertex.embed_r_check(ratio, params.q, i + 1, i, n)
            cur[i - 1], cur[i] = cur[i], cur[i - 1]
    return sim


def reversal_similarity(params: ModelParams) -> np.ndarray:
    """Similarity that reverses the by-site inhomogeneity order."""
    return permutation_similarity(params, list(params.eta_by_site())[::-1])


def half_swap_similarity(params: ModelParams) -> np.ndarray:
    """Similarity exchanging the two half-chain inhomogeneity groups."""
    n = params.n_sites
    if n % 2:
        raise ValueError("half swap needs an even chain")
    by_site = list(params.eta_by_site())
    return permutation_similarity(params, by_site[n // 2:] + by_site[:n // 2])


# ----------------------------------------------------------------------
# time reversal


def detect_reality_case(params: ModelParams, tol: float = 1e-10) -> str:
    """Classify the inhomogeneity pattern for time reversal.

    Returns "unimodular", "real" or "modulus-paired"; raises
    :class:`RealityConditionError` when none applies.  The chain must
    be inversion-symmetric in all three cases.
    """
    _require_inversion_symmetric(params)
    by_site = np.array(list(params.eta_by_site()))
    if np.abs(np.abs(by_site) - 1).max() < tol:
        return "unimodular"
    if np.abs(by_site.imag).max() < tol:
        return "real"
    n = params.n_sites
    if n % 2 == 0:
        lam = np.abs(by_site[n // 2:])
        mods_ok = (np.abs(lam - lam[0]).max() < tol
                   and np.abs(np.abs(by_site[:n // 2]) - 1 / lam[0]).max()
                   < tol)
        phases_ok = np.abs(by_site[n // 2:] / lam[0]
                           - by_site[:n // 2] * lam[0]).max() < tol
        if mods_ok and phases_ok:
            return "modulus-paired"
    raise RealityConditionError(
        "inhomogeneities fit none of the supported reality patterns")


def time_reversal(params: ModelParams, case: str | None = None
                  ) -> SymmetryOperator:
    """Antiunitary conjugation preserving the commuting family.

    The matrix part is the all-site spin flip, preceded by the braid
    similarity appropriate to the reality pattern: none when the
    inhomogeneities are unimodular, the full reversal when they are
    real, the half-chain swap when they are modulus-paired.
    """
    case = detect_reality_case(params) if case is None else case
    if case == "unimodular":
        braid = np.eye(params.dim)
    elif case == "real":
        braid = reversal_similarity(params)
    elif case == "modulus-paired":
        braid = half_swap_similarity(params)
    else:
        raise ValueError(f"unknown reality case {case!r}")
    return SymmetryOperator(braid @ spin_flip(params.n_sites),
                            antiunitary=True, name="T")


def cp_conjugation(params: ModelParams) -> SymmetryOperator:
    return charge(params).compose(parity(params))


def cpt_conjugation(params: ModelParams, case: str | None = None
                    ) -> SymmetryOperator:
    return cp_conjugation(params).compose(time_reversal(params, case))


# ----------------------------------------------------------------------
# identity checks (relative residuals at one spectral point)


def check_cp_transfer(params: ModelParams, zeta) -> float:
    """CP maps the transfer matrix to its spectral inversion."""
    zeta = complex(zeta)
    cp = cp_conjugation(params)
    lhs = cp.conjugate(vertex.transfer_matrix(zeta, params))
    rhs = zeta**params.n_sites * vertex.transfer_matrix(1 / zeta, params)
    return float(np.abs(lhs - rhs).max() / max(np.abs(rhs).max(), 1e-300))


def _baxter_image(params, zeta, sign):
    """Common right-hand side of the CP and T conjugation identities."""
    n = params.n_sites
    sz = total_sz_diagonal(n)
    pref = np.diag(zeta**(n / 2.0 + sign * sz))
    partner = qoper.q_operator(1 / zeta, params, -sign)
    tail = np.linalg.inv(qoper.q_asymptotic(params, -sign))
    return pref @ partner @ tail


def check_cp_baxter(params: ModelParams, zeta, sign: int = +1) -> float:
    """CP swaps the two Baxter families and inverts the argument."""
    zeta = complex(zeta)
    cp = cp_conjugation(params)
    lhs = cp.conjugate(qoper.q_operator(zeta, params, sign))
    rhs = _baxter_image(params, zeta, sign)
    return float(np.abs(lhs - rhs).max() / max(np.abs(lhs).max(), 1e-300))


def check_time_reversal_transfer(params: ModelParams, zeta,
                                 case: str | None = None) -> float:
    zeta = complex(zeta)
    tr = time_reversal(params, case)
    lhs = tr.conjugate(vertex.transfer_matrix(zeta, params))
    zc = np.conj(zeta)
    rhs = zc**params.n_sites * vertex.transfer_matrix(1 / zc, params)
    return float(np.abs(lhs - rhs).max() / max(np.abs(rhs).max(), 1e-300))


def check_time_reversal_baxter(params: ModelParams, zeta, sign: int = +1,
                               case: str | None = None) -> float:
    zeta = complex(zeta)
    tr = time_reversal(params, case)
    lhs = tr.conjugate(qoper.q_operator(zeta, params, sign))
    rhs = _baxter_image(params, np.conj(zeta), sign)
    return float(np.abs(lhs - rhs).max() / max(np.abs(lhs).max(), 1e-300))


def check_cpt(params: ModelParams, zeta, case: str | None = None) -> float:
    """CPT conjugation is plain complex conjugation of the argument."""
    zeta = complex(zeta)
    cpt = cpt_conjugation(params, case)
    worst = 0.0
    lhs = cpt.conjugate(vertex.transfer_matrix(zeta, params))
    rhs = vertex.transfer_matrix(np.conj(zeta), params)
    worst = max(worst, np.abs(lhs - rhs).max() / np.abs(rhs).max())
    for sign in (+1, -1):
        lhs = cpt.conjugate(qoper.q_operator(zeta, params, sign))
        rhs = qoper.q_operator(np.conj(zeta), params, sign)
        worst = max(worst, np.abs(lhs - rhs).max() / np.abs(rhs).max())
    return float(worst)


def check_cpt_bethe_map(params: ModelParams, roots,
                        case: str | None = None) -> float:
    """CPT sends the Bethe state to the one with conjugated roots.

    Holds with unit coefficient thanks to the phase conventions of the
    creation amplitudes; returns the largest componentwise deviation
    relative to the target state's scale.
    """
    cpt = cpt_conjugation(params, case)
    psi = bethe.algebraic_state(roots, params, check_commute=False)
    target = bethe.algebraic_state(np.conj(np.asarray(roots)), params,
                                   check_commute=False)
    return float(np.abs(cpt.apply(psi) - target).max()
                 / max(np.abs(target).max(), 1e-300))
