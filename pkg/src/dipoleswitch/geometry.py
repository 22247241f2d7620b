"""Dipole-array geometries and dipole-dipole coupling matrices.

Positions live on a unit-spaced integer lattice (lengths in units of the
lattice constant). The coupling between two sites carries the angular factor
``1 - 3*cos(theta)**2`` with ``theta`` the angle between the pair displacement
and the external field, and decays as ``1/r**3``. Couplings are expressed in
units of the reference pair's coupling magnitude, so the nearest-neighbour
coupling strength is the energy unit of the whole model.

A geometry may also be built with ``field_direction=None``. That switches the
angular factor to 1 for every pair, i.e. the field is treated as perpendicular
to every pair displacement. For a chain or a planar array this is exactly what
an axis-perpendicular field gives; for three-dimensional arrangements, where no
such direction exists, it is the convention that keeps all couplings positive
``1/r**3`` and makes results comparable across dimensionalities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import constants

from .errors import (
    DegenerateReferenceError,
    InvalidGeometryError,
    InvalidInputError,
    SizeLimitError,
)

KINDS = ("chain", "rectangular", "cubic", "custom")

#: Default cap on the dipole count (2**14 basis states is the dense ceiling).
DEFAULT_MAX_DIPOLES = 14

_KIND_ALIASES = {"rect": "rectangular", "cube": "cubic"}

# 1 Debye in C*m (1e-21/c, the classical definition).
DEBYE = 1e-21 / constants.speed_of_light


@dataclass(frozen=True)
class DipoleGeometry:
    """Positions and field orientation of a dipole array.

    Parameters
    ----------
    positions : ndarray, shape (N, 3)
        Site coordinates in units of the lattice constant.
    field_direction : ndarray, shape (3,), or None
        Unit vector of the external field. ``None`` selects the
        perpendicular-to-every-pair convention (angular factor 1).
    kind : str
        One of ``chain``, ``rectangular``, ``cubic``, ``custom``.
    extents : tuple of int
        Lattice dimensions for the regular kinds, e.g. ``(3, 3)``.
    """

    positions: np.ndarray
    field_direction: Optional[np.ndarray]
    kind: str
    extents: tuple[int, ...]

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3 or pos.shape[0] == 0:
            raise InvalidInputError("positions must be a nonempty (N, 3) array")
        object.__setattr__(self, "positions", pos)
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown geometry kind {self.kind!r}")
        if self.field_direction is not None:
            fd = np.asarray(self.field_direction, dtype=float)
            if fd.shape != (3,):
                raise InvalidInputError("field_direction must be a 3-vector")
            if abs(np.linalg.norm(fd) - 1.0) > 1e-12:
                raise InvalidInputError("field_direction must have unit norm")
            object.__setattr__(self, "field_direction", fd)
        if self.n > 1:
            d = _pairwise_distances(pos)
            if np.min(d[np.triu_indices(self.n, k=1)]) <= 0.0:
                raise InvalidGeometryError("coincident dipole positions")
        if self.kind != "custom" and math.prod(self.extents) != self.n:
            raise InvalidInputError(
                f"extents {self.extents} do not match {self.n} positions"
            )

    @property
    def n(self) -> int:
        return self.positions.shape[0]


def build_geometry(
    kind: str,
    extents: Sequence[int],
    field_direction: Optional[Sequence[float]] = (0.0, 0.0, 1.0),
    max_dipoles: int = DEFAULT_MAX_DIPOLES,
) -> DipoleGeometry:
    """Lay out a regular dipole array on the unit lattice.

    A chain runs along x, a rectangular array spans the xy plane, a cubic
    array fills xyz. Sites are ordered lexicographically by (z, y, x), so
    site 0 is the origin and site 1 its x-neighbour. The default field along
    z is perpendicular to a chain and to a planar array.

    Parameters
    ----------
    kind : str
        ``chain``, ``rectangular`` (alias ``rect``) or ``cubic``.
    extents : sequence of int
        One integer per lattice dimension of the kind.
    field_direction : sequence of float, or None
        External field direction (normalized here); ``None`` selects the
        all-perpendicular convention described in the module docstring.
    max_dipoles : int
        Reject arrays with more sites than this.
    """
    kind = _KIND_ALIASES.get(kind, kind)
    expected_rank = {"chain": 1, "rectangular": 2, "cubic": 3}
    if kind not in expected_rank:
        raise InvalidInputError(
            f"kind must be one of chain/rectangular/cubic, got {kind!r}"
        )
    ext = tuple(int(e) for e in extents)
    if len(ext) != expected_rank[kind]:
        raise InvalidInputError(
            f"{kind} geometry needs {expected_rank[kind]} extent(s), got {ext}"
        )
    if any(e <= 0 for e in ext):
        raise InvalidInputError(f"extents must be positive, got {ext}")
    count = math.prod(ext)
    if count > max_dipoles:
        raise SizeLimitError(
            f"{count} dipoles exceed the limit of {max_dipoles}"
        )

    if field_direction is None:
        fd = None
    else:
        fd = np.asarray(field_direction, dtype=float)
        if fd.shape != (3,):
            raise InvalidInputError("field_direction must be a 3-vector")
        norm = np.linalg.norm(fd)
        if norm == 0.0:
            raise InvalidInputError("field_direction must be nonzero")
        fd = fd / norm

    nx, ny, nz = ext + (1,) * (3 - len(ext))
    positions = np.array(
        [
            (float(ix), float(iy), float(iz))
            for iz in range(nz)
            for iy in range(ny)
            for ix in range(nx)
        ]
    )
    return DipoleGeometry(positions=positions, field_direction=fd, kind=kind, extents=ext)


@dataclass(frozen=True)
class CouplingMatrix:
    """Dimensionless pair couplings, normalized to the reference pair.

    ``omega_ij[i, j]`` is the coupling between sites i and j in units of the
    reference coupling magnitude; the reference entry is +-1 and the diagonal
    is zero. ``reference_raw`` restores the unnormalized values
    (``raw = omega_ij * abs(reference_raw)``).
    """

    n: int
    omega_ij: np.ndarray
    reference_pair: tuple[int, int]
    reference_raw: float

    def __post_init__(self):
        m = np.asarray(self.omega_ij, dtype=float)
        if m.shape != (self.n, self.n):
            raise InvalidInputError("omega_ij must be an (n, n) matrix")
        if not np.array_equal(m, m.T):
            raise InvalidInputError("omega_ij must be exactly symmetric")
        if np.any(np.diagonal(m) != 0.0):
            raise InvalidInputError("omega_ij must have a zero diagonal")
        i, j = self.reference_pair
        if not (0 <= i < self.n and 0 <= j < self.n and i != j):
            raise InvalidInputError(f"bad reference pair {self.reference_pair}")
        if abs(abs(m[i, j]) - 1.0) > 1e-12:
            raise InvalidInputError("reference coupling must have magnitude 1")
        object.__setattr__(self, "omega_ij", m)


def raw_couplings(
    geometry: DipoleGeometry, cutoff: float = math.inf
) -> np.ndarray:
    """Unnormalized couplings ``(1 - 3 cos^2 theta) / r^3`` for all pairs.

    Pairs separated by more than ``cutoff`` lattice constants get coupling 0.
    """
    pos = geometry.positions
    n = geometry.n
    raw = np.zeros((n, n))
    fd = geometry.field_direction
    for i in range(n):
        for j in range(i + 1, n):
            rij = pos[j] - pos[i]
            dist = float(np.linalg.norm(rij))
            if dist <= 0.0:
                raise InvalidGeometryError(f"coincident positions {i} and {j}")
            if dist > cutoff:
                continue
            if fd is None:
                angular = 1.0
            else:
                cos_t = float(np.dot(rij, fd)) / dist
                angular = 1.0 - 3.0 * cos_t * cos_t
            val = angular / dist**3
            raw[i, j] = val
            raw[j, i] = val
    return raw


def nearest_neighbour_pair(geometry: DipoleGeometry) -> tuple[int, int]:
    """Lowest-index pair at the minimum pairwise distance."""
    d = _pairwise_distances(geometry.positions)
    n = geometry.n
    iu = np.triu_indices(n, k=1)
    dmin = float(np.min(d[iu]))
    for i in range(n):
        for j in range(i + 1, n):
            if d[i, j] <= dmin * (1.0 + 1e-9):
                return (i, j)
    raise InvalidGeometryError("no valid pair found")  # pragma: no cover


def coupling_matrix(
    geometry: DipoleGeometry,
    cutoff: float = math.inf,
    reference_pair: Optional[tuple[int, int]] = None,
) -> CouplingMatrix:
    """Normalized coupling matrix of a geometry.

    The reference pair (default: the nearest-neighbour pair with the lowest
    indices) defines the energy unit; its normalized coupling is +-1. All
    other pairs keep their exact ratios, so a chain perpendicular to the field
    has couplings ``1/|i-j|**3``.

    Raises
    ------
    DegenerateReferenceError
        If the reference coupling vanishes (magic-angle pair).
    """
    if geometry.n < 2:
        raise InvalidInputError("need at least two dipoles for couplings")
    raw = raw_couplings(geometry, cutoff=cutoff)
    if reference_pair is None:
        reference_pair = nearest_neighbour_pair(geometry)
    i, j = reference_pair
    if not (0 <= i < geometry.n and 0 <= j < geometry.n and i != j):
        raise InvalidInputError(f"bad reference pair {reference_pair}")
    ref = float(raw[i, j])
    if abs(ref) < 1e-12:
        raise DegenerateReferenceError(
            f"reference pair {reference_pair} sits at the magic angle; "
            "its coupling is zero and cannot define the energy unit"
        )
    omega = raw / abs(ref)
    np.fill_diagonal(omega, 0.0)
    omega = (omega + omega.T) / 2.0  # enforce exact symmetry bit-for-bit
    return CouplingMatrix(
        n=geometry.n,
        omega_ij=omega,
        reference_pair=(i, j),
        reference_raw=ref,
    )


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory parameters of a dipole array.

    dipole_moment is in Debye, field_magnitude in V/m, spacing in meters.
    """

    dipole_moment: float
    field_magnitude: float
    spacing: float

    def __post_init__(self):
        for name in ("dipole_moment", "field_magnitude", "spacing"):
            if getattr(self, name) <= 0.0:
                raise InvalidInputError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class ModelScales:
    """Energy scales of the model in SI units and as temperatures.

    ``transition_energy_*`` is the field-alignment energy p*E (the level
    splitting of one dipole), ``coupling_energy_*`` the nearest-neighbour
    dipole-dipole energy p^2 / (4 pi eps0 d^3). ``ratio`` is their quotient,
    the dimensionless switch parameter.
    """

    transition_energy_j: float
    transition_energy_k: float
    coupling_energy_j: float
    coupling_energy_k: float
    ratio: float


def physical_to_model(params: PhysicalParams) -> ModelScales:
    """Convert laboratory parameters to the model's two energy scales."""
    p = params.dipole_moment * DEBYE
    transition = p * params.field_magnitude
    coupling = p * p / (4.0 * math.pi * constants.epsilon_0 * params.spacing**3)
    return ModelScales(
        transition_energy_j=transition,
        transition_energy_k=transition / constants.k,
        coupling_energy_j=coupling,
        coupling_energy_k=coupling / constants.k,
        ratio=transition / coupling,
    )


def _pairwise_distances(positions: np.ndarray) -> np.ndarray:
    diff = positions[:, None, :] - positions[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=2))
