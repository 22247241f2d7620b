"""Eigensystem, partition function and thermal (Gibbs) states.

Everything downstream of diagonalization works in the spectral representation:
a thermal state is its eigenbasis plus Boltzmann weights and is never
materialized as a full 2^N x 2^N density matrix. Boltzmann factors are always
computed relative to the ground energy so that even kT = 1e-4 in units of the
coupling stays far from double-precision underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import InvalidInputError
from .hamiltonian import HamiltonianMatrix

#: Relative scale of the degeneracy window around the ground energy.
DEGENERACY_RTOL = 1e-9


@dataclass(frozen=True)
class SpectralDecomposition:
    """Full eigensystem of a Hamiltonian, globally sorted by eigenvalue.

    Eigenvectors are stored per sector block and embedded into the full
    2^N standard basis on access. ``sector_labels[i]`` is the excitation
    count of eigenpair i (None when the input was a plain matrix without
    popcount structure).
    """

    n_dipoles: int
    dim: int
    eigenvalues: np.ndarray
    sector_labels: Optional[np.ndarray]
    _block_masks: tuple[np.ndarray, ...]
    _block_vectors: tuple[np.ndarray, ...]
    _block_of: np.ndarray
    _col_of: np.ndarray

    @property
    def size(self) -> int:
        return self.eigenvalues.shape[0]

    def eigenvector(self, index: int) -> np.ndarray:
        """Eigenvector ``index`` embedded in the full standard basis."""
        full = np.zeros(self.dim)
        b = self._block_of[index]
        full[self._block_masks[b]] = self._block_vectors[b][:, self._col_of[index]]
        return full

    def eigenvectors_full(self, indices: Optional[Sequence[int]] = None) -> np.ndarray:
        """Row-stacked embedded eigenvectors for the given global indices."""
        if indices is None:
            indices = np.arange(self.size)
        indices = np.asarray(indices, dtype=np.int64)
        out = np.zeros((indices.shape[0], self.dim))
        for row, idx in enumerate(indices):
            b = self._block_of[idx]
            out[row, self._block_masks[b]] = self._block_vectors[b][:, self._col_of[idx]]
        return out

    def degeneracy_tolerance(self) -> float:
        lam_min = float(self.eigenvalues[0])
        return DEGENERACY_RTOL * max(1.0, abs(lam_min))

    def ground_indices(self) -> np.ndarray:
        """Indices of all eigenpairs degenerate with the ground energy."""
        tol = self.degeneracy_tolerance()
        return np.nonzero(self.eigenvalues <= self.eigenvalues[0] + tol)[0]


class PartitionFunction(NamedTuple):
    """Ground-shifted partition sum; log Z = log(value) - beta * energy_shift."""

    value: float
    energy_shift: float


def diagonalize(
    h: Union[HamiltonianMatrix, np.ndarray]
) -> SpectralDecomposition:
    """Full eigensystem of a Hamiltonian, deterministic for identical input.

    Sector-blocked Hamiltonians are diagonalized block by block and merged
    into one ascending eigenvalue list. The overall sign of every eigenvector
    is fixed by making its first nonzero component (in standard-basis order)
    positive, and degenerate eigenvalues are tie-broken by sector label so a
    repeated call returns bit-identical arrays.
    """
    popcount_labels = False
    if isinstance(h, HamiltonianMatrix):
        n = h.n_dipoles
        dim = h.dim
        if h.is_blocked:
            pieces = [(block.k, block.masks, block.matrix) for block in h.blocks]
        else:
            pieces = [(None, np.arange(dim, dtype=np.int64), h.dense)]
            popcount_labels = True
    else:
        matrix = np.asarray(h, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise InvalidInputError("matrix must be square")
        dim = matrix.shape[0]
        n = dim.bit_length() - 1 if dim == (1 << (dim.bit_length() - 1)) else 0
        pieces = [(None, np.arange(dim, dtype=np.int64), matrix)]

    block_masks: list[np.ndarray] = []
    block_vectors: list[np.ndarray] = []
    all_vals: list[np.ndarray] = []
    all_labels: list[np.ndarray] = []
    all_block: list[np.ndarray] = []
    all_col: list[np.ndarray] = []
    labelled = True
    for k, masks, matrix in pieces:
        scale = np.abs(matrix).max(initial=0.0)
        if np.abs(matrix - matrix.T).max(initial=0.0) > 1e-12 * max(1.0, scale):
            raise InvalidInputError("matrix is not symmetric within 1e-12")
        vals, vecs = np.linalg.eigh(matrix)
        _fix_signs(vecs)
        b = len(block_masks)
        block_masks.append(np.asarray(masks, dtype=np.int64))
        block_vectors.append(vecs)
        all_vals.append(vals)
        all_block.append(np.full(vals.shape[0], b, dtype=np.int64))
        all_col.append(np.arange(vals.shape[0], dtype=np.int64))
        if k is not None:
            all_labels.append(np.full(vals.shape[0], k, dtype=np.int64))
        elif popcount_labels:
            # dense model build: the excitation number of each eigenvector,
            # exact unless eigh mixed cross-sector degenerate levels
            pop = np.bitwise_count(np.asarray(masks)).astype(np.float64)
            all_labels.append(np.rint(pop @ (vecs * vecs)).astype(np.int64))
        else:
            labelled = False
            all_labels.append(np.zeros(vals.shape[0], dtype=np.int64))

    vals = np.concatenate(all_vals)
    labels = np.concatenate(all_labels)
    blocks_of = np.concatenate(all_block)
    cols_of = np.concatenate(all_col)
    # ascending energy; ties broken by sector then by intra-block column
    order = np.lexsort((cols_of, labels, vals))
    return SpectralDecomposition(
        n_dipoles=n,
        dim=dim,
        eigenvalues=vals[order],
        sector_labels=labels[order] if labelled else None,
        _block_masks=tuple(block_masks),
        _block_vectors=tuple(block_vectors),
        _block_of=blocks_of[order],
        _col_of=cols_of[order],
    )


def _fix_signs(vecs: np.ndarray) -> None:
    """Flip columns so the first component above 1e-12 of the max is positive."""
    mag = np.abs(vecs)
    first = np.argmax(mag > 1e-12 * mag.max(axis=0), axis=0)
    signs = np.sign(vecs[first, np.arange(vecs.shape[1])])
    signs[signs == 0.0] = 1.0
    vecs *= signs


@dataclass(frozen=True)
class ThermalState:
    """Gibbs state in spectral form: eigenbasis plus Boltzmann weights."""

    decomposition: SpectralDecomposition
    beta: float
    weights: np.ndarray
    partition_function: float
    energy_shift: float

    def kept_indices(self, relative_cutoff: float = 1e-16) -> np.ndarray:
        """Eigenstate indices whose weight reaches ``relative_cutoff`` of the max."""
        return np.nonzero(self.weights >= self.weights.max() * relative_cutoff)[0]

    def energy(self) -> float:
        """Thermal expectation of the energy."""
        return float(self.weights @ self.decomposition.eigenvalues)


def partition_function(
    spec: SpectralDecomposition, beta: float
) -> PartitionFunction:
    """Ground-shifted partition sum Z = sum_i exp(-beta (E_i - E_min)).

    ``beta = inf`` returns the ground-state multiplicity (all eigenvalues
    within the degeneracy tolerance of the minimum).
    """
    beta = _check_beta(beta)
    lam = spec.eigenvalues
    shift = float(lam[0])
    if math.isinf(beta):
        return PartitionFunction(float(spec.ground_indices().shape[0]), shift)
    value = float(np.exp(-beta * (lam - shift)).sum())
    return PartitionFunction(value, shift)


def thermal_state(spec: SpectralDecomposition, beta: float) -> ThermalState:
    """Gibbs weights at inverse temperature beta (beta = inf is the T=0 limit).

    At beta = inf the weight is spread uniformly over the degenerate ground
    multiplet rather than approximated by a large finite beta.
    """
    beta = _check_beta(beta)
    lam = spec.eigenvalues
    shift = float(lam[0])
    if math.isinf(beta):
        ground = spec.ground_indices()
        weights = np.zeros(spec.size)
        weights[ground] = 1.0 / ground.shape[0]
        return ThermalState(spec, beta, weights, float(ground.shape[0]), shift)
    raw = np.exp(-beta * (lam - shift))
    z = float(raw.sum())
    return ThermalState(spec, beta, raw / z, z, shift)


def ground_state(spec: SpectralDecomposition) -> np.ndarray:
    """Row-stacked ground state vector(s), one row per degenerate state."""
    return spec.eigenvectors_full(spec.ground_indices())


def beta_from_kt(kt: float) -> float:
    """Inverse temperature for a given kT; kT = 0 maps to beta = inf."""
    if math.isnan(kt) or kt < 0.0:
        raise InvalidInputError(f"kT must be nonnegative, got {kt}")
    if kt == 0.0:
        return math.inf
    if math.isinf(kt):
        return 0.0
    return 1.0 / kt


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if math.isnan(beta) or beta < 0.0:
        raise InvalidInputError(f"beta must be >= 0 or inf, got {beta}")
    return beta
