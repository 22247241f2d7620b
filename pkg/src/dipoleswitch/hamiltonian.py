"""Spin-1/2 Hamiltonian of the dipole array in the bitmask standard basis.

Basis state ``m`` has bit i set when dipole i is excited (pointing against
the field). The Hamiltonian is

    H = sum_i omega_i n_i  +  sum_{i<j} Omega_ij (flip i->j + flip j->i)

with ``n_i`` the excitation projector on site i, so the vacuum state has
energy exactly 0 and the diagonal counts ``omega`` per excitation. The
exchange term conserves the total excitation number, which allows the matrix
to be built and diagonalized sector by sector.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Optional, Sequence, Union

import numpy as np

from . import kernels
from .errors import InvalidInputError, SizeLimitError
from .geometry import CouplingMatrix

#: Largest dipole count for which a dense 2^N x 2^N matrix is allowed.
DENSE_MAX_DIPOLES = 14

#: Sector blocking becomes the default representation from this size on.
BLOCKED_DEFAULT_THRESHOLD = 8


def enumerate_sector(n: int, k: int) -> np.ndarray:
    """All n-bit masks with popcount k, in ascending integer order."""
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise InvalidInputError(f"n must be a nonnegative integer, got {n!r}")
    if not isinstance(k, (int, np.integer)) or not 0 <= k <= n:
        raise InvalidInputError(f"k must satisfy 0 <= k <= {n}, got {k!r}")
    if k == 0:
        return np.zeros(1, dtype=np.int64)
    out = np.empty(comb(n, k), dtype=np.int64)
    m = (1 << k) - 1
    limit = 1 << n
    pos = 0
    while m < limit:
        out[pos] = m
        pos += 1
        low = m & -m  # Gosper's hack: next mask with the same popcount
        ripple = m + low
        m = (((m ^ ripple) >> 2) // low) | ripple
    return out


@dataclass(frozen=True)
class SectorBlock:
    """One excitation sector: its basis masks and dense symmetric block."""

    k: int
    masks: np.ndarray
    matrix: np.ndarray


@dataclass(frozen=True)
class HamiltonianMatrix:
    """Hamiltonian in dense or sector-blocked form.

    Exactly one of ``dense`` / ``blocks`` is set. ``omega`` holds the per-site
    transition frequencies in units of the reference coupling.
    """

    n_dipoles: int
    omega: np.ndarray
    blocks: Optional[tuple[SectorBlock, ...]] = None
    dense: Optional[np.ndarray] = None

    @property
    def is_blocked(self) -> bool:
        return self.blocks is not None

    @property
    def dim(self) -> int:
        return 1 << self.n_dipoles

    def to_dense(self) -> np.ndarray:
        """Full 2^N x 2^N matrix (sector blocks embedded at their masks)."""
        if self.dense is not None:
            return self.dense
        full = np.zeros((self.dim, self.dim))
        for block in self.blocks:
            full[np.ix_(block.masks, block.masks)] = block.matrix
        return full


def build_hamiltonian(
    couplings: Union[CouplingMatrix, np.ndarray],
    omega: Union[float, Sequence[float], np.ndarray],
    sector: Optional[int] = None,
    representation: Optional[str] = None,
) -> HamiltonianMatrix:
    """Construct the Hamiltonian for the given couplings and frequencies.

    Parameters
    ----------
    couplings : CouplingMatrix or ndarray
        Symmetric zero-diagonal matrix of pair couplings (units of the
        reference coupling). A plain array is accepted for experiments with
        hand-made couplings.
    omega : float or sequence
        Per-site transition frequency; a scalar is broadcast to all sites.
    sector : int, optional
        Build only the excitation sector with this popcount.
    representation : {"dense", "blocked"}, optional
        Defaults to blocked for 8 or more dipoles, dense below.
    """
    j_ij = couplings.omega_ij if isinstance(couplings, CouplingMatrix) else np.asarray(
        couplings, dtype=np.float64
    )
    if j_ij.ndim != 2 or j_ij.shape[0] != j_ij.shape[1]:
        raise InvalidInputError("couplings must be a square matrix")
    n = j_ij.shape[0]
    if n < 1:
        raise InvalidInputError("couplings must cover at least one dipole")
    if np.abs(j_ij - j_ij.T).max(initial=0.0) > 1e-12:
        raise InvalidInputError("couplings must be symmetric within 1e-12")
    if np.abs(np.diagonal(j_ij)).max(initial=0.0) > 1e-12:
        raise InvalidInputError("couplings must have a zero diagonal")
    j_ij = np.ascontiguousarray((j_ij + j_ij.T) / 2.0)
    np.fill_diagonal(j_ij, 0.0)

    if n > 24:
        raise SizeLimitError(f"{n} dipoles exceed the 24-site hard limit")

    omega_vec = np.asarray(omega, dtype=np.float64)
    if omega_vec.ndim == 0:
        omega_vec = np.full(n, float(omega_vec))
    if omega_vec.shape != (n,):
        raise InvalidInputError(
            f"omega must be a scalar or length-{n} vector, got shape {omega_vec.shape}"
        )

    if sector is not None:
        if not 0 <= sector <= n:
            raise InvalidInputError(f"sector must be in [0, {n}], got {sector}")
        if representation == "dense":
            raise InvalidInputError("a single sector cannot be built densely")
        representation = "blocked"
    if representation is None:
        representation = "blocked" if n >= BLOCKED_DEFAULT_THRESHOLD else "dense"
    if representation not in ("dense", "blocked"):
        raise InvalidInputError(f"unknown representation {representation!r}")

    lookup = np.empty(1 << n, dtype=np.int64)
    if representation == "dense":
        if n > DENSE_MAX_DIPOLES:
            raise SizeLimitError(
                f"dense form is capped at {DENSE_MAX_DIPOLES} dipoles, got {n}"
            )
        masks = np.arange(1 << n, dtype=np.int64)
        lookup[:] = masks
        dense = kernels.fill_block(masks, j_ij, omega_vec, lookup)
        return HamiltonianMatrix(n_dipoles=n, omega=omega_vec, dense=dense)

    sectors = range(n + 1) if sector is None else (sector,)
    blocks = []
    for k in sectors:
        masks = enumerate_sector(n, k)
        # stale lookup entries belong to other popcounts and are never hit
        lookup[masks] = np.arange(masks.shape[0])
        matrix = kernels.fill_block(masks, j_ij, omega_vec, lookup)
        blocks.append(SectorBlock(k=k, masks=masks, matrix=matrix))
    return HamiltonianMatrix(n_dipoles=n, omega=omega_vec, blocks=tuple(blocks))
