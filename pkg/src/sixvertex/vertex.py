"""Vertex weights, monodromy matrix and transfer matrix.

Two independent construction routes are kept deliberately separate:

* :func:`transfer_matrix` contracts the auxiliary index of the 4x4
  vertex weight around the chain directly (one site at a time, never
  forming the 2^(N+1)-dimensional product space);
* :func:`monodromy` multiplies the 2x2 auxiliary-space blocks whose
  entries are operators on the growing chain segment, exposing the
  creation/annihilation entries used by the algebraic Bethe ansatz.

Their agreement (trace with twist weights vs direct contraction) is a
structural regression test for all index conventions downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import ModelParams, SingularPointError, embed_pair

SWAP = np.array([[1, 0, 0, 0],
                 [0, 0, 1, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1]], dtype=complex)


def r_matrix(zeta, q) -> np.ndarray:
    """Six-vertex R-matrix as a 4x4 array.

    Row index is the outgoing pair (b1, b2), column the incoming pair
    (a1, a2), flattened as 2*first + second with spin-up = 0.  In the
    transfer-matrix contraction the second slot of each pair carries the
    auxiliary (horizontal) line and the first the quantum (vertical)
    one; the one-magnon eigenvector test pins this orientation.
    """
    q = complex(q)
    zeta = complex(zeta)
    qi = 1.0 / q
    out = np.zeros((4, 4), dtype=complex)
    out[0, 0] = q + qi * zeta
    out[3, 3] = q + qi * zeta
    out[1, 1] = 1.0 + zeta
    out[2, 2] = 1.0 + zeta
    out[2, 1] = -(q - qi) * zeta   # (-,+) <- (+,-)
    out[1, 2] = q - qi             # (+,-) <- (-,+)
    return out


def r_matrix_derivative(q) -> np.ndarray:
    """d/dzeta of :func:`r_matrix` (the weight is affine in zeta)."""
    q = complex(q)
    qi = 1.0 / q
    out = np.zeros((4, 4), dtype=complex)
    out[0, 0] = qi
    out[3, 3] = qi
    out[1, 1] = 1.0
    out[2, 2] = 1.0
    out[2, 1] = -(q - qi)
    return out


def r_check(zeta, q) -> np.ndarray:
    """Braid-normalized weight: swap composed with R(-zeta), over (q - zeta/q).

    Normalized so the value at zeta = 1 is the identity.  The
    normalizing denominator vanishes at zeta = q^2, which is a genuine
    pole of the braid weight.  When embedded on a site pair (j, j') the
    first tensor slot carries site j; this orientation is pinned by the
    adjacent-swap intertwining test.
    """
    q = complex(q)
    zeta = complex(zeta)
    denom = q - zeta / q
    if abs(denom) < 1e-13:
        raise SingularPointError("braid weight has a pole at zeta = q^2")
    return SWAP @ r_matrix(-zeta, q) / denom


def r_check_derivative(zeta, q) -> np.ndarray:
    """Analytic zeta-derivative of :func:`r_check`."""
    q = complex(q)
    zeta = complex(zeta)
    denom = q - zeta / q
    if abs(denom) < 1e-13:
        raise SingularPointError("braid weight has a pole at zeta = q^2")
    num = SWAP @ r_matrix(-zeta, q)
    dnum = -SWAP @ r_matrix_derivative(q)
    return dnum / denom + num / denom**2 / q


def embed_r_check(zeta, q, j_first, j_second, n_sites) -> np.ndarray:
    """Braid weight acting on the (j_first, j_second) pair of the chain."""
    return embed_pair(r_check(zeta, q), j_first, j_second, n_sites)


# ----------------------------------------------------------------------
# auxiliary-space 2x2 blocks of one site factor


def _site_blocks(zeta, q, eta_j):
    """2x2 auxiliary blocks of the vertex weight at one site.

    Returns ((W00, W01), (W10, W11)) where each W is the 2x2 quantum
    operator at that site; the argument entering the weight is
    q*zeta/eta_j.
    """
    x = zeta / eta_j
    qi = 1.0 / q
    g = q - qi
    w00 = np.array([[q + x, 0.0], [0.0, 1.0 + q * x]], dtype=complex)
    w01 = np.array([[0.0, 0.0], [-g * q * x, 0.0]], dtype=complex)
    w10 = np.array([[0.0, g], [0.0, 0.0]], dtype=complex)
    w11 = np.array([[1.0 + q * x, 0.0], [0.0, q + x]], dtype=complex)
    return ((w00, w01), (w10, w11))


def _site_blocks_derivative(q, eta_j):
    """zeta-derivative of :func:`_site_blocks` (affine in zeta)."""
    qi = 1.0 / q
    g = q - qi
    e = 1.0 / eta_j
    d00 = np.array([[e, 0.0], [0.0, q * e]], dtype=complex)
    d01 = np.array([[0.0, 0.0], [-g * q * e, 0.0]], dtype=complex)
    d10 = np.zeros((2, 2), dtype=complex)
    d11 = np.array([[q * e, 0.0], [0.0, e]], dtype=complex)
    return ((d00, d01), (d10, d11))


@dataclass
class Monodromy:
    """2x2 auxiliary-space matrix of chain operators.

    ``entries[a][b]`` are the raw products; the off-diagonal entries
    contain the scalar prefactors ``a_scalar``/``d_scalar`` which the
    normalized creation/annihilation operators divide out.
    """

    entries: list
    a_scalar: complex
    d_scalar: complex
    zeta: complex

    @property
    def A(self):
        return self.entries[0][0]

    @property
    def B(self):
        return self.entries[0][1] / self.a_scalar

    @property
    def C(self):
        return self.entries[1][0] / self.d_scalar

    @property
    def D(self):
        return self.entries[1][1]


def _block_chain(zeta, params: ModelParams, derivative: bool = False):
    """Ordered product of site blocks, site 1 applied first.

    Keeps a 2x2 array of operators on the processed segment; appending
    site m+1 Kronecker-multiplies from the left (site m+1 is the more
    significant tensor factor).  With ``derivative`` the zeta-derivative
    of the product is propagated alongside (exact product rule).
    """
    q = params.q
    cur = [[np.ones((1, 1), dtype=complex), np.zeros((1, 1), dtype=complex)],
           [np.zeros((1, 1), dtype=complex), np.ones((1, 1), dtype=complex)]]
    # initialize as identity on a 1-dimensional segment; absorb sites in turn
    dcur = [[np.zeros((1, 1), dtype=complex) for _ in range(2)] for _ in range(2)]
    for j in range(1, params.n_sites + 1):
        blocks = _site_blocks(zeta, q, params.eta_site(j))
        nxt = [[None, None], [None, None]]
        dnxt = [[None, None], [None, None]]
        for a in range(2):
            for b in range(2):
                acc = 0
                for c in range(2):
                    acc = acc + np.kron(blocks[a][c], cur[c][b])
                nxt[a][b] = acc
        if derivative:
            dblocks = _site_blocks_derivative(q, params.eta_site(j))
            for a in range(2):
                for b in range(2):
                    acc = 0
                    for c in range(2):
                        acc = (acc
                               + np.kron(dblocks[a][c], cur[c][b])
                               + np.kron(blocks[a][c], dcur[c][b]))
                    dnxt[a][b] = acc
            dcur = dnxt
        cur = nxt
    return cur, (dcur if derivative else None)


def monodromy(zeta, params: ModelParams) -> Monodromy:
    """Monodromy matrix with the overall q^(-N/2) normalization.

    The stored scalars multiply the normalized magnon creation and
    annihilation entries: entry (0,1) = a_scalar * B, entry (1,0) =
    d_scalar * C.
    """
    n = params.n_sites
    q = params.q
    cur, _ = _block_chain(zeta, params)
    norm = q ** (-n / 2.0)
    entries = [[norm * cur[a][b] for b in range(2)] for a in range(2)]
    prod_plus = np.prod([1.0 + zeta / (q * params.eta_site(j)) for j in range(1, n + 1)])
    prod_minus = np.prod([1.0 + q * zeta / params.eta_site(j) for j in range(1, n + 1)])
    a_scal = -1j * params.omega * q ** ((n + 1) / 2.0) * prod_plus
    d_scal = 1j / params.omega * q ** (-(n + 1) / 2.0) * prod_minus
    return Monodromy(entries=entries, a_scalar=a_scal, d_scalar=d_scal, zeta=zeta)


def transfer_matrix(zeta, params: ModelParams) -> np.ndarray:
    """Twisted trace of the monodromy by direct auxiliary contraction.

    Sweeps the chain once, carrying the pair of open auxiliary indices;
    cost O(N 4^N) and independent of the 2x2-block route used by
    :func:`monodromy`.
    """
    q = params.q
    n = params.n_sites
    # W[aux-out of the last processed site, aux-in of site 1; blocks].
    # In the 4x4 weight table the quantum index occupies the first slot
    # of each pair for this contraction (orientation pinned by the
    # one-magnon eigenvector test against the block route).
    w = np.zeros((2, 2, 1, 1), dtype=complex)
    w[0, 0] = 1.0
    w[1, 1] = 1.0
    for j in range(1, n + 1):
        r4 = r_matrix(q * zeta / params.eta_site(j), q).reshape(2, 2, 2, 2)
        # r4[b_j, c_out, a_j, c_in]; site j's aux-in meets the chain's open end
        w = np.einsum("bkal,ldBA->kdbBaA", r4, w,
                      ).reshape(2, 2, w.shape[2] * 2, w.shape[3] * 2)
    tw = params.omega * w[0, 0] + w[1, 1] / params.omega
    return q ** (-n / 2.0) * tw


def transfer_matrix_with_derivative(zeta, params: ModelParams):
    """Transfer matrix and its exact zeta-derivative (product rule)."""
    cur, dcur = _block_chain(zeta, params, derivative=True)
    norm = params.q ** (-params.n_sites / 2.0)
    omega = params.omega
    t = norm * (omega * cur[0][0] + cur[1][1] / omega)
    dt = norm * (omega * dcur[0][0] + dcur[1][1] / omega)
    return t, dt


def transfer_from_monodromy(mono: Monodromy, omega) -> np.ndarray:
    return omega * mono.entries[0][0] + mono.entries[1][1] / omega


def site_polynomial(zeta, params: ModelParams) -> complex:
    """prod_J (1 + zeta/eta_J) — the polynomial entering the TQ relation."""
    return complex(np.prod([1.0 + zeta / params.eta_site(j)
                            for j in range(1, params.n_sites + 1)]))


def transfer_sample_points(params: ModelParams, count: int, radius: float = 0.83,
                           phase_seed: int = 7) -> np.ndarray:
    """Deterministic circle of spectral-parameter samples.

    Radius and rotation chosen away from the weight poles q^{+-2} eta_J
    for unimodular inhomogeneities; a check rejects accidental hits.
    """
    rng = np.random.default_rng(phase_seed)
    rot = np.exp(2j * np.pi * rng.random())
    pts = radius * rot * np.exp(2j * np.pi * np.arange(count) / count)
    bad = [params.q**2 * e for e in params.eta] + [e / params.q**2 for e in params.eta]
    for p in pts:
        if any(abs(p - b) < 1e-6 for b in bad):
            raise SingularPointError("sample circle hits a weight pole; "
                                     "choose a different radius")
    return pts


def operator_polynomial(fn, degree: int, params: ModelParams,
                        radius: float = 0.83) -> list:
    """Matrix coefficients of an operator-valued polynomial in zeta.

    Samples ``fn`` on a circle of ``degree + 1`` points and solves the
    Vandermonde system entrywise.  Returns coefficients in ascending
    order; the caller is responsible for ``degree`` being an upper
    bound on the true degree.
    """
    pts = transfer_sample_points(params, degree + 1, radius=radius)
    samples = np.array([fn(z) for z in pts])
    vand_inv = np.linalg.inv(np.vander(pts, degree + 1, increasing=True))
    return [np.tensordot(vand_inv[k], samples, axes=(0, 0))
            for k in range(degree + 1)]


def check_exchange(params: ModelParams, n: int, zeta) -> float:
    """Residual of the adjacent-swap intertwining of the monodromy.

    Swapping the inhomogeneities of sites n and n+1 is implemented by
    conjugation with the braid weight at their ratio; returns the
    largest deviation over the four auxiliary entries.
    """
    if not 1 <= n < params.n_sites:
        raise ValueError("need an interior adjacent pair")
    eta_site = list(params.eta_by_site())
    swapped = list(eta_site)
    swapped[n - 1], swapped[n] = swapped[n], swapped[n - 1]
    params_swapped = params.with_eta(tuple(reversed(swapped)))
    ratio = eta_site[n] / eta_site[n - 1]          # eta_{n+1} / eta_n
    f = embed_r_check(ratio, params.q, n + 1, n, params.n_sites)
    m_orig = monodromy(zeta, params)
    m_swap = monodromy(zeta, params_swapped)
    worst = 0.0
    for a in range(2):
        for b in range(2):
            lhs = m_orig.entries[a][b] @ f
            rhs = f @ m_swap.entries[a][b]
            worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst
