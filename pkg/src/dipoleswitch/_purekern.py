"""Pure-numpy implementations of the hot kernels.

Same contracts as the compiled twin in ``_fastkern.pyx``; ``kernels`` picks
whichever is available. Everything here works on float64 because the model
Hamiltonian is real symmetric and so are all states derived from it.
"""

from __future__ import annotations

import numpy as np

# sigma_y (x) sigma_y is real in the standard basis; used for the spin flip.
FLIP = np.array(
    [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ]
)


def fill_block(masks, couplings, omega, lookup):
    """Dense Hamiltonian block over the given basis masks.

    ``masks`` are the bitmask basis states of one excitation sector (or the
    full basis), ``lookup`` maps a mask to its row index. Matrix elements:
    diagonal ``sum(omega[i] for set bits i)``, off-diagonal ``couplings[i, j]``
    between states that differ by moving one excitation from i to j.
    """
    masks = np.asarray(masks, dtype=np.int64)
    couplings = np.asarray(couplings, dtype=np.float64)
    omega = np.asarray(omega, dtype=np.float64)
    lookup = np.asarray(lookup, dtype=np.int64)
    d = masks.shape[0]
    n = couplings.shape[0]
    h = np.zeros((d, d))

    diag = np.zeros(d)
    for i in range(n):
        diag += omega[i] * ((masks >> i) & 1)
    h[np.arange(d), np.arange(d)] = diag

    rows_all = np.arange(d)
    for i in range(n):
        bit_i = (masks >> i) & 1
        for j in range(i + 1, n):
            jij = couplings[i, j]
            if jij == 0.0:
                continue
            hop = np.int64((1 << i) | (1 << j))
            sel = (bit_i == 1) & (((masks >> j) & 1) == 0)
            rows = rows_all[sel]
            if rows.size == 0:
                continue
            cols = lookup[masks[rows] ^ hop]
            h[rows, cols] = jij
            h[cols, rows] = jij
    return h


def pair_rho(vectors, weights, pos_i, pos_j):
    """Weighted two-site reduced density matrix from a batch of state vectors.

    ``vectors[k]`` is a real state over the full 2^n basis and ``weights[k]``
    its (nonnegative) mixture weight. Basis slot of the result is
    ``2*bit(pos_i) + bit(pos_j)``, so the first argument is the first ket slot.
    """
    vectors = np.asarray(vectors, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    idx = pair_gather_indices(vectors.shape[1], pos_i, pos_j)
    sub = vectors[:, idx] * np.sqrt(weights)[:, None, None]
    flat = sub.transpose(1, 0, 2).reshape(4, -1)
    return flat @ flat.T


def pair_gather_indices(dim, pos_i, pos_j):
    """(4, dim//4) index table: row a lists the full-basis indices whose
    (pos_i, pos_j) bits spell a, ordered by the remaining bits."""
    rest = np.arange(dim >> 2, dtype=np.int64)
    lo, hi = sorted((pos_i, pos_j))
    base = _insert_zero_bit(_insert_zero_bit(rest, lo), hi)
    a = np.arange(4, dtype=np.int64)[:, None]
    return base[None, :] | ((a >> 1) << pos_i) | ((a & 1) << pos_j)


def _insert_zero_bit(values, pos):
    low = values & ((np.int64(1) << pos) - 1)
    return ((values >> pos) << (pos + 1)) | low


def concurrence_batch(rhos):
    """Wootters concurrence for a batch of real symmetric 4x4 density matrices.

    Uses the Hermitian route: sqrt(rho) * rho_tilde * sqrt(rho) equals
    B^T B with B = sqrt(rho_tilde) * sqrt(rho), so the lambda's are the
    singular values of B. Taking them from an SVD instead of square-rooting
    the eigenvalues of B^T B keeps full precision for (near-)pure states,
    where the product's noise eigenvalues ~1e-16 would blow up to ~1e-8
    under the square root. Negative rho eigenvalues from roundoff are
    clamped to zero before building sqrt(rho).
    """
    rhos = np.asarray(rhos, dtype=np.float64)
    w, v = np.linalg.eigh(rhos)
    sqrt_rho = (v * np.sqrt(np.clip(w, 0.0, None))[:, None, :]) @ np.swapaxes(v, 1, 2)
    sqrt_tilde = FLIP @ sqrt_rho @ FLIP  # sqrt of rho_tilde for real rho
    lam = np.linalg.svd(sqrt_tilde @ sqrt_rho, compute_uv=False)
    return np.clip(2.0 * lam[:, 0] - lam.sum(axis=1), 0.0, 1.0)
