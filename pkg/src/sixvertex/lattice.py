"""Finite-chain spin-1/2 lattice: basis conventions, parameters, sectors.

The chain has N sites labelled J = 1..N.  A basis state of the 2^N
dimensional space assigns a spin a_J in {+1, -1} ("up"/"down") to every
site.  Site J occupies bit J-1 of the basis index, with bit value 0 for
spin up, so site 1 is the least significant bit and the leftmost factor
of a Kronecker chain is site N.  The index of the all-up state
(the pseudovacuum) is 0.

Everything downstream (vertex weights, Bethe states, Q-operators,
symmetry operators) relies on these conventions; they are pinned by unit
tests and must not drift.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg


# ----------------------------------------------------------------------
# tolerances


@dataclass(frozen=True)
class Tolerances:
    """Global numerical tolerances used across the workbench."""

    identity: float = 1e-11   # operator identities, residual norms
    eigen: float = 1e-9       # eigen-decomposition residuals
    newton: float = 1e-12     # Bethe-root Newton convergence
    blocking: float = 1e-13   # off-sector matrix-element mass
    degeneracy_gap: float = 1e-8  # relative eigenvalue clustering gap


TOLS = Tolerances()


class SingularPointError(ZeroDivisionError):
    """Evaluation requested at a pole or other singular parameter point."""


class BlockingError(ValueError):
    """Operator is not block-diagonal over the conserved-charge sectors."""


# ----------------------------------------------------------------------
# single-site operators (rows/columns ordered (up, down))

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)   # |up><down|
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |down><up|
ID2 = np.eye(2, dtype=complex)


# ----------------------------------------------------------------------
# model parameters


def _principal_root(z: complex, n: int) -> complex:
    return cmath.exp(cmath.log(z) / n)


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the inhomogeneous six-vertex transfer matrix.

    Fields
    ------
    n_sites:
        chain length N.
    q:
        anisotropy parameter, q != +-1.
    omega:
        twist parameter (omega = exp(i*pi*k) for twist exponent k).
    eta:
        inhomogeneities stored in the order (eta_N, ..., eta_1), i.e.
        ``eta[0]`` belongs to site N.  Use :meth:`eta_site` to access by
        site label.  The product of all eta is renormalized to 1 on
        construction if it is not already.
    r:
        optional period of the inhomogeneity pattern (eta_{J+r} = eta_J,
        r divides N).
    Lambda:
        optional modulus parameter used by one of the conjugation cases.
    """

    n_sites: int
    q: complex
    omega: complex
    eta: tuple
    r: int | None = None
    Lambda: complex | None = None
    eta_renormalized: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError("need at least one site")
        if len(self.eta) != self.n_sites:
            raise ValueError("eta must supply one value per site")
        q = complex(self.q)
        if abs(q - 1.0) < 1e-12 or abs(q + 1.0) < 1e-12:
            raise ValueError("q = +-1 is excluded (free-fermion/degenerate weights)")
        eta = tuple(complex(e) for e in self.eta)
        if any(e == 0 for e in eta):
            raise ValueError("inhomogeneities must be nonzero")
        prod = complex(np.prod(np.asarray(eta, dtype=complex)))
        if abs(prod - 1.0) > 1e-12:
            root = _principal_root(prod, self.n_sites)
            eta = tuple(e / root for e in eta)
            object.__setattr__(self, "eta_renormalized", True)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "omega", complex(self.omega))
        object.__setattr__(self, "eta", eta)
        if self.r is not None:
            if self.n_sites % self.r != 0:
                raise ValueError("period r must divide the chain length")
            for j in range(1, self.n_sites + 1):
                jp = j + self.r
                if jp <= self.n_sites:
                    if abs(self.eta_site(jp) - self.eta_site(j)) > 1e-10:
                        raise ValueError("eta pattern is not r-periodic")

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_angles(cls, n_sites, gamma, k, eta_sites=None, r=None, Lambda=None):
        """Build from the anisotropy angle gamma and twist exponent k.

        ``eta_sites`` lists the inhomogeneities in site order
        (eta_1, ..., eta_N); omitted means the homogeneous point.
        """
        q = cmath.exp(1j * gamma)
        omega = cmath.exp(1j * math.pi * k)
        if eta_sites is None:
            eta_sites = [1.0] * n_sites
            r = r if r is not None else 1
        eta = tuple(reversed([complex(e) for e in eta_sites]))
        return cls(n_sites=n_sites, q=q, omega=omega, eta=eta, r=r, Lambda=Lambda)

    # -- accessors -------------------------------------------------------

    def eta_site(self, j: int) -> complex:
        """Inhomogeneity eta_J attached to site J (1-based)."""
        if not 1 <= j <= self.n_sites:
            raise IndexError(f"site label {j} outside 1..{self.n_sites}")
        return self.eta[self.n_sites - j]

    def eta_by_site(self) -> np.ndarray:
        """All inhomogeneities as an array indexed by site-1."""
        return np.asarray(self.eta[::-1], dtype=complex)

    @property
    def dim(self) -> int:
        return 1 << self.n_sites

    @property
    def copies(self) -> int:
        """Number L of periods when the pattern period r is set."""
        if self.r is None:
            raise ValueError("no period r declared for this parameter set")
        return self.n_sites // self.r

    @property
    def twist_exponent(self) -> float:
        """The exponent k with omega = exp(i*pi*k) (principal branch)."""
        return (cmath.log(self.omega) / (1j * math.pi)).real

    def with_omega(self, omega) -> "ModelParams":
        return ModelParams(self.n_sites, self.q, omega, self.eta,
                           r=self.r, Lambda=self.Lambda)

    def with_eta(self, eta, r=None) -> "ModelParams":
        return ModelParams(self.n_sites, self.q, self.omega, tuple(eta),
                           r=r, Lambda=self.Lambda)


# ----------------------------------------------------------------------
# basis bookkeeping


def basis_index(spins) -> int:
    """Index of the product state with spins listed as (a_N, ..., a_1).

    Spin values are +1 (up) or -1 (down).  Site J sits at bit J-1 and a
    down spin sets the bit.
    """
    spins = tuple(spins)
    n = len(spins)
    idx = 0
    for pos, a in enumerate(spins):          # pos 0 <-> site N
        j = n - pos                           # site label
        if a == -1:
            idx |= 1 << (j - 1)
        elif a != 1:
            raise ValueError("spins must be +-1")
    return idx


def basis_spins(index: int, n_sites: int) -> tuple:
    """Inverse of :func:`basis_index`: spins ordered (a_N, ..., a_1)."""
    if not 0 <= index < (1 << n_sites):
        raise ValueError("basis index out of range")
    return tuple(-1 if (index >> (j - 1)) & 1 else 1
                 for j in range(n_sites, 0, -1))


def down_count(index: int) -> int:
    """Number of down spins (set bits) of a basis index."""
    return bin(index).count("1")


def pseudovacuum(n_sites: int) -> np.ndarray:
    """The all-up product state as a dense vector."""
    psi = np.zeros(1 << n_sites, dtype=complex)
    psi[0] = 1.0
    return psi


# ----------------------------------------------------------------------
# operator embeddings


def embed_site(op2, j: int, n_sites: int) -> np.ndarray:
    """Embed a one-site operator at site J into the full chain.

    The embedding is kron(Id_{2^(N-J)}, op, Id_{2^(J-1)}) so that site 1
    is the least significant factor.
    """
    op2 = np.asarray(op2, dtype=complex)
    left = np.eye(1 << (n_sites - j), dtype=complex)
    right = np.eye(1 << (j - 1), dtype=complex)
    return np.kron(left, np.kron(op2, right))


def embed_pair(op4, j_first: int, j_second: int, n_sites: int) -> np.ndarray:
    """Embed a two-site operator acting on sites (j_first, j_second).

    ``op4`` is 4x4 with row index (s_first, s_second) flattened as
    2*s_first + s_second, spin-up = 0.  The two sites may be any
    distinct labels (wrap-around pairs included).
    """
    op4 = np.asarray(op4, dtype=complex)
    if j_first == j_second:
        raise ValueError("need two distinct sites")
    dim = 1 << n_sites
    mask_f = 1 << (j_first - 1)
    mask_s = 1 << (j_second - 1)
    rest = np.array([i for i in range(dim)
                     if not (i & mask_f) and not (i & mask_s)], dtype=np.int64)
    out = np.zeros((dim, dim), dtype=complex)
    for bf in (0, 1):
        for bs in (0, 1):
            rows = rest + bf * mask_f + bs * mask_s
            for af in (0, 1):
                for as_ in (0, 1):
                    cols = rest + af * mask_f + as_ * mask_s
                    out[rows, cols] += op4[2 * bf + bs, 2 * af + as_]
    return out


def total_sz_diagonal(n_sites: int) -> np.ndarray:
    """Diagonal of the total-spin operator: N/2 - (#down) per basis state."""
    dim = 1 << n_sites
    counts = np.array([down_count(i) for i in range(dim)])
    return n_sites / 2.0 - counts


def total_sz_operator(n_sites: int) -> np.ndarray:
    return np.diag(total_sz_diagonal(n_sites).astype(complex))


# ----------------------------------------------------------------------
# sector structure (total spin is conserved by every operator we build)


def sector_indices(n_sites: int, magnons: int) -> np.ndarray:
    """Ascending basis indices of the sector with the given down-spin count."""
    if not 0 <= magnons <= n_sites:
        raise ValueError("down-spin count out of range")
    return np.array([i for i in range(1 << n_sites) if down_count(i) == magnons],
                    dtype=np.int64)


def sector_sz(n_sites: int, magnons: int) -> float:
    """Total-spin value of the sector with ``magnons`` down spins."""
    return n_sites / 2.0 - magnons


def sector_dimension(n_sites: int, magnons: int) -> int:
    return math.comb(n_sites, magnons)


@dataclass
class LatticeOperator:
    """Operator on the chain, stored dense and/or sector-blocked.

    Blocks are keyed by the down-spin count M (sector total spin is
    N/2 - M).  ``tag`` is free-form provenance for reports.
    """

    n_sites: int
    matrix: np.ndarray | None = None
    blocks: dict | None = None
    tag: str = ""

    def dense(self) -> np.ndarray:
        if self.matrix is None:
            self.matrix = from_sector_blocks(self.blocks, self.n_sites)
        return self.matrix

    def block(self, magnons: int) -> np.ndarray:
        if self.blocks is None:
            self.blocks = to_sector_blocks(self.matrix, self.n_sites)
        return self.blocks[magnons]

    def sectors(self):
        return range(self.n_sites + 1)


def to_sector_blocks(mat, n_sites: int, tol: float | None = None) -> dict:
    """Split an operator into conserved-charge blocks.

    Raises :class:`BlockingError` when the off-block mass exceeds the
    blocking tolerance (scaled by the largest matrix element).
    """
    mat = np.asarray(mat, dtype=complex)
    tol = TOLS.blocking if tol is None else tol
    scale = max(1.0, np.abs(mat).max())
    blocks = {}
    mass = 0.0
    seen = np.zeros(mat.shape, dtype=bool)
    for m in range(n_sites + 1):
        idx = sector_indices(n_sites, m)
        blocks[m] = mat[np.ix_(idx, idx)].copy()
        seen[np.ix_(idx, idx)] = True
    off = np.abs(mat[~seen])
    mass = off.max() if off.size else 0.0
    if mass > tol * scale:
        raise BlockingError(f"off-sector mass {mass:.3e} exceeds {tol:.1e}*scale")
    return blocks


def from_sector_blocks(blocks: dict, n_sites: int) -> np.ndarray:
    dim = 1 << n_sites
    out = np.zeros((dim, dim), dtype=complex)
    for m, blk in blocks.items():
        idx = sector_indices(n_sites, m)
        out[np.ix_(idx, idx)] = blk
    return out


def off_sector_mass(mat, n_sites: int) -> float:
    """Largest matrix element connecting different total-spin sectors."""
    mat = np.asarray(mat)
    mass = 0.0
    labels = np.array([down_count(i) for i in range(mat.shape[0])])
    diff = labels[:, None] != labels[None, :]
    if diff.any():
        mass = float(np.abs(mat[diff]).max())
    return mass


# ----------------------------------------------------------------------
# simultaneous diagonalization of a commuting family


@dataclass
class JointEigenbasis:
    """Result of diagonalizing a commuting operator family.

    ``vectors`` holds unit-norm eigenvectors as columns; ``values`` has
    shape (n_ops, dim); ``residuals`` the per-vector defect
    ||O v - lambda v||; ``group_labels`` tags vectors that remained in
    a common degenerate cluster after all operators were used.
    """

    vectors: np.ndarray
    values: np.ndarray
    residuals: np.ndarray
    group_labels: np.ndarray


def _cluster(values, gap: float):
    """Group indices of ``values`` whose pairwise gaps fall below ``gap``."""
    order = np.lexsort((values.imag, values.real))
    groups = []
    current = [order[0]]
    for a, b in zip(order[:-1], order[1:]):
        if abs(values[b] - values[a]) <= gap:
            current.append(b)
        else:
            groups.append(current)
            current = [b]
    groups.append(current)
    return groups


def joint_eigenbasis(ops, gap_factor: float | None = None) -> JointEigenbasis:
    """Simultaneously diagonalize a list of commuting dense operators.

    The first operator is eigendecomposed; clusters of eigenvalues closer
    than gap_factor * spectral radius are treated as possibly degenerate
    and re-resolved with the restriction of each subsequent operator
    (an oblique projection, valid because the family commutes).
    """
    if not ops:
        raise ValueError("need at least one operator")
    ops = [np.asarray(o, dtype=complex) for o in ops]
    dim = ops[0].shape[0]
    gap_factor = TOLS.degeneracy_gap if gap_factor is None else gap_factor

    lam, vecs = scipy.linalg.eig(ops[0])
    vecs = vecs / np.linalg.norm(vecs, axis=0, keepdims=True)
    radius = max(np.abs(lam).max(), 1e-30)
    groups = _cluster(lam, gap_factor * radius)

    for op in ops[1:]:
        if all(len(g) == 1 for g in groups):
            break
        new_groups = []
        for g in groups:
            if len(g) == 1:
                new_groups.append(g)
                continue
            sub = vecs[:, g]
            # restriction of op to the invariant subspace spanned by sub
            restricted = np.linalg.pinv(sub) @ op @ sub
            mu, w = scipy.linalg.eig(restricted)
            refined = sub @ w
            refined /= np.linalg.norm(refined, axis=0, keepdims=True)
            vecs[:, g] = refined
            sub_radius = max(np.abs(mu).max(), np.abs(op).max(), 1e-30)
            for cluster in _cluster(mu, gap_factor * sub_radius):
                new_groups.append([g[i] for i in cluster])
        groups = new_groups

    labels = np.full(dim, -1, dtype=int)
    for tag, g in enumerate(groups):
        if len(g) > 1:
            labels[g] = tag

    values = np.empty((len(ops), dim), dtype=complex)
    residuals = np.empty((len(ops), dim))
    for k, op in enumerate(ops):
        action = op @ vecs
        # oblique diagonal: (V^-1 O V)_ii, stable for mildly non-normal ops
        coeff = np.linalg.solve(vecs, action)
        values[k] = np.diag(coeff)
        residuals[k] = np.linalg.norm(action - vecs * values[k][None, :], axis=0)
    return JointEigenbasis(vectors=vecs, values=values,
                           residuals=residuals, group_labels=labels)
