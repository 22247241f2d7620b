"""Two-site reduced density matrices and Wootters concurrence.

The two-qubit basis is ordered |00>, |01>, |10>, |11> with the first slot
holding the first dipole index passed to :func:`reduce_to_pair`. Concurrence
follows the Hermitian route: instead of eigendecomposing the non-Hermitian
product rho * rho_tilde, it takes the singular values of
sqrt(rho_tilde) * sqrt(rho), whose Gram matrix is exactly the Hermitian
product sqrt(rho) * rho_tilde * sqrt(rho). No complex eigensolver is needed,
and both routes agree, which the test suite checks on random density
matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from . import kernels
from ._purekern import FLIP
from .errors import InvalidDensityError, InvalidInputError, InvalidPairError
from .spectral import ThermalState

#: Eigenvalues of a density matrix in [-CLAMP_TOL, 0) are treated as 0.
CLAMP_TOL = 1e-10

#: Thermal reductions drop eigenstates below this fraction of the top weight.
WEIGHT_CUTOFF = 1e-16


@dataclass(frozen=True)
class TwoQubitDensity:
    """Validated 4x4 density matrix of a dipole pair.

    Construction checks Hermiticity and unit trace to 1e-12 and rejects
    eigenvalues below -1e-10; small negative eigenvalues from roundoff are
    tolerated here and clamped wherever eigenvalues are consumed.
    """

    rho: np.ndarray
    pair: tuple[int, int]

    def __post_init__(self):
        rho = np.asarray(self.rho)
        if rho.shape != (4, 4):
            raise InvalidInputError(f"rho must be 4x4, got {rho.shape}")
        _validate_density(rho)
        object.__setattr__(self, "rho", rho)


def _validate_density(rho: np.ndarray) -> None:
    if np.abs(rho - rho.conj().T).max() > 1e-12:
        raise InvalidDensityError("density matrix is not Hermitian within 1e-12")
    if abs(np.trace(rho).real - 1.0) > 1e-12 or abs(np.trace(rho).imag) > 1e-12:
        raise InvalidDensityError("density matrix trace differs from 1 by > 1e-12")
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -CLAMP_TOL:
        raise InvalidDensityError(
            f"density matrix has eigenvalue {evals.min():.3e} < -{CLAMP_TOL}"
        )


def reduce_to_pair(
    state: Union[ThermalState, np.ndarray], i: int, j: int
) -> TwoQubitDensity:
    """Partial trace of a pure or thermal state down to dipoles (i, j).

    A thermal state is reduced as the Gibbs-weighted sum of its eigenstate
    reductions; eigenstates below 1e-16 of the top weight are dropped and the
    remaining weights renormalized, so the result keeps unit trace.
    """
    if isinstance(state, ThermalState):
        n = state.decomposition.n_dipoles
        _check_pair(n, i, j)
        kept = state.kept_indices(WEIGHT_CUTOFF)
        weights = state.weights[kept]
        weights = weights / weights.sum()
        rho = np.zeros((4, 4))
        # chunked so a hot sweep never holds more than ~32 MB of vectors
        chunk = max(1, (1 << 22) // state.decomposition.dim)
        for start in range(0, kept.shape[0], chunk):
            sel = kept[start : start + chunk]
            vectors = state.decomposition.eigenvectors_full(sel)
            rho += kernels.pair_rho(vectors, weights[start : start + chunk], i, j)
        rho = (rho + rho.T) / 2.0
        return TwoQubitDensity(rho=rho, pair=(i, j))

    psi = np.asarray(state)
    if psi.ndim != 1:
        raise InvalidInputError("pure state must be a 1-D amplitude vector")
    dim = psi.shape[0]
    n = dim.bit_length() - 1
    if dim < 4 or dim != (1 << n):
        raise InvalidInputError(f"state length {dim} is not 2**n with n >= 2")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-9:
        raise InvalidInputError("state vector is not normalized")
    _check_pair(n, i, j)
    # axis a of the reshaped tensor carries bit (n - 1 - a)
    tensor = psi.reshape([2] * n)
    ax_i, ax_j = n - 1 - i, n - 1 - j
    rest = [a for a in range(n) if a not in (ax_i, ax_j)]
    mat = np.transpose(tensor, [ax_i, ax_j] + rest).reshape(4, -1)
    rho = mat @ mat.conj().T
    return TwoQubitDensity(rho=rho, pair=(i, j))


def _check_pair(n: int, i: int, j: int) -> None:
    if i == j:
        raise InvalidPairError(f"pair indices must differ, got ({i}, {j})")
    if not (0 <= i < n and 0 <= j < n):
        raise InvalidPairError(f"pair ({i}, {j}) out of range for {n} dipoles")


def spin_flip(
    rho: Union[TwoQubitDensity, np.ndarray]
) -> Union[TwoQubitDensity, np.ndarray]:
    """Spin-flipped state (sigma_y x sigma_y) rho* (sigma_y x sigma_y)."""
    if isinstance(rho, TwoQubitDensity):
        return TwoQubitDensity(rho=FLIP @ rho.rho.conj() @ FLIP, pair=rho.pair)
    return FLIP @ np.asarray(rho).conj() @ FLIP


def concurrence(rho: Union[TwoQubitDensity, np.ndarray]) -> float:
    """Wootters concurrence in [0, 1].

    C = max(0, l1 - l2 - l3 - l4) with l's the decreasing eigenvalues of the
    Hermitian matrix R = sqrt(sqrt(rho) rho_tilde sqrt(rho)), obtained here
    as the singular values of sqrt(rho_tilde) * sqrt(rho) (the same matrix:
    the product is B+B for B = sqrt(rho_tilde) sqrt(rho)). The SVD form
    keeps (near-)pure states accurate: square-rooting the product's noise
    eigenvalues would cost ~1e-8. Negative eigenvalues of rho within the
    clamp tolerance are zeroed; anything more negative raises.
    """
    if isinstance(rho, TwoQubitDensity):
        rho = rho.rho
    else:
        rho = np.asarray(rho)
        if rho.shape != (4, 4):
            raise InvalidInputError(f"rho must be 4x4, got {rho.shape}")
        _validate_density(rho)

    evals, vecs = np.linalg.eigh(rho)
    evals = np.where(evals > 0.0, evals, 0.0)
    sqrt_rho = (vecs * np.sqrt(evals)) @ vecs.conj().T
    # conjugating by the flip matrix commutes with the square root
    sqrt_tilde = FLIP @ sqrt_rho.conj() @ FLIP
    lam = np.linalg.svd(sqrt_tilde @ sqrt_rho, compute_uv=False)
    return float(np.clip(2.0 * lam[0] - lam.sum(), 0.0, 1.0))
