import math

import numpy as np
import pytest
from scipy import constants

from dipoleswitch import (
    DegenerateReferenceError,
    DipoleGeometry,
    InvalidGeometryError,
    InvalidInputError,
    PhysicalParams,
    SizeLimitError,
    build_geometry,
    coupling_matrix,
    nearest_neighbour_pair,
    physical_to_model,
    raw_couplings,
)
from _oracles import random_rotation

EZ = (0.0, 0.0, 1.0)


def test_chain_positions_are_collinear_unit_spaced():
    geom = build_geometry("chain", [9], EZ)
    assert geom.n == 9
    assert np.array_equal(geom.positions[:, 0], np.arange(9.0))
    assert np.all(geom.positions[:, 1:] == 0.0)


def test_single_dipole_chain_is_allowed_but_has_no_couplings():
    geom = build_geometry("chain", [1], EZ)
    assert geom.n == 1
    with pytest.raises(InvalidInputError):
        coupling_matrix(geom)


def test_cubic_222_gives_unit_cube_corners_in_zyx_order():
    geom = build_geometry("cubic", [2, 2, 2], EZ)
    expected = [
        (0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0),
        (0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1),
    ]
    assert [tuple(p) for p in geom.positions] == [tuple(map(float, e)) for e in expected]


def test_rectangular_order_runs_x_fastest():
    geom = build_geometry("rect", [3, 2], EZ)
    assert [tuple(p[:2]) for p in geom.positions] == [
        (0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (0.0, 1.0), (1.0, 1.0), (2.0, 1.0),
    ]


def test_zero_field_vector_rejected():
    with pytest.raises(InvalidInputError):
        build_geometry("chain", [3], (0.0, 0.0, 0.0))


def test_size_limit():
    with pytest.raises(SizeLimitError):
        build_geometry("chain", [15], EZ)
    assert build_geometry("chain", [15], EZ, max_dipoles=15).n == 15


def test_bad_extents_rejected():
    with pytest.raises(InvalidInputError):
        build_geometry("chain", [0], EZ)
    with pytest.raises(InvalidInputError):
        build_geometry("rect", [3], EZ)
    with pytest.raises(InvalidInputError):
        build_geometry("pyramid", [3], EZ)


def test_coincident_positions_rejected():
    with pytest.raises(InvalidGeometryError):
        DipoleGeometry(
            positions=np.array([[0.0, 0, 0], [0.0, 0, 0]]),
            field_direction=np.array([0.0, 0, 1]),
            kind="custom",
            extents=(2,),
        )


def test_pair_along_field_has_raw_factor_minus_two():
    geom = DipoleGeometry(
        positions=np.array([[0.0, 0, 0], [0.0, 0, 1]]),
        field_direction=np.array([0.0, 0, 1.0]),
        kind="custom",
        extents=(2,),
    )
    raw = raw_couplings(geom)
    assert raw[0, 1] == pytest.approx(-2.0, abs=1e-14)


def test_magic_angle_pair_has_zero_coupling():
    # displacement at arccos(1/sqrt(3)) to the field zeroes 1 - 3 cos^2
    direction = np.array([math.sqrt(2.0 / 3.0), 0.0, math.sqrt(1.0 / 3.0)])
    geom = DipoleGeometry(
        positions=np.array([[0.0, 0, 0], direction]),
        field_direction=np.array([0.0, 0, 1.0]),
        kind="custom",
        extents=(2,),
    )
    raw = raw_couplings(geom)
    assert abs(raw[0, 1]) < 1e-14
    with pytest.raises(DegenerateReferenceError):
        coupling_matrix(geom)


def test_chain_perpendicular_couplings_decay_as_inverse_cube():
    geom = build_geometry("chain", [6], EZ)
    coup = coupling_matrix(geom)
    assert coup.reference_pair == (0, 1)
    for i in range(6):
        for j in range(6):
            if i != j:
                assert coup.omega_ij[i, j] == pytest.approx(
                    1.0 / abs(i - j) ** 3, rel=1e-13
                )
    # second neighbour is exactly 1/8 of the nearest-neighbour value
    assert coup.omega_ij[0, 2] == pytest.approx(coup.omega_ij[0, 1] / 8.0, rel=1e-13)


def test_square_lattice_field_perpendicular_all_couplings_positive():
    geom = build_geometry("rect", [3, 3], EZ)
    coup = coupling_matrix(geom)
    off = coup.omega_ij[~np.eye(9, dtype=bool)]
    assert np.all(off > 0.0)
    # diagonal neighbour of the unit square: 1/sqrt(2)^3
    assert coup.omega_ij[0, 4] == pytest.approx(2.0 ** -1.5, rel=1e-13)


def test_coupling_matrix_symmetric_zero_diagonal_exact():
    for kind, ext in (("chain", [5]), ("rect", [3, 2]), ("cubic", [2, 2, 2])):
        coup = coupling_matrix(build_geometry(kind, ext, EZ))
        assert np.array_equal(coup.omega_ij, coup.omega_ij.T)
        assert np.all(np.diagonal(coup.omega_ij) == 0.0)
        i, j = coup.reference_pair
        assert abs(abs(coup.omega_ij[i, j]) - 1.0) < 1e-12


def test_isotropic_convention_matches_perpendicular_field_for_chain_and_plane():
    for kind, ext in (("chain", [7]), ("rect", [3, 3])):
        with_field = coupling_matrix(build_geometry(kind, ext, EZ))
        iso = coupling_matrix(build_geometry(kind, ext, field_direction=None))
        assert np.array_equal(with_field.omega_ij, iso.omega_ij)


def test_cubic_axis_field_has_negative_axial_couplings_but_iso_does_not():
    axial = coupling_matrix(build_geometry("cubic", [2, 2, 2], EZ))
    assert axial.omega_ij[0, 4] == pytest.approx(-2.0, rel=1e-13)  # z-edge
    iso = coupling_matrix(build_geometry("cubic", [2, 2, 2], field_direction=None))
    assert np.all(iso.omega_ij[~np.eye(8, dtype=bool)] > 0.0)


def test_rigid_rotation_leaves_couplings_invariant():
    rng = np.random.default_rng(7)
    base = build_geometry("rect", [3, 2], EZ)
    reference = coupling_matrix(base).omega_ij
    for _ in range(8):
        rot = random_rotation(rng)
        rotated = DipoleGeometry(
            positions=base.positions @ rot.T,
            field_direction=rot @ np.asarray(EZ) / np.linalg.norm(rot @ np.asarray(EZ)),
            kind="custom",
            extents=(6,),
        )
        assert np.abs(coupling_matrix(rotated).omega_ij - reference).max() < 1e-12


def test_uniform_scaling_rescales_raw_couplings_by_inverse_cube():
    rng = np.random.default_rng(11)
    geom = build_geometry("cubic", [2, 2, 2], EZ)
    raw = raw_couplings(geom)
    for scale in rng.uniform(0.5, 3.0, size=5):
        scaled = DipoleGeometry(
            positions=geom.positions * scale,
            field_direction=geom.field_direction,
            kind="custom",
            extents=(8,),
        )
        ratio = raw_couplings(scaled) * scale**3
        assert np.abs(ratio - raw).max() < 1e-12 * np.abs(raw).max()


def test_cutoff_zeroes_distant_pairs():
    geom = build_geometry("chain", [5], EZ)
    coup = coupling_matrix(geom, cutoff=1.5)
    assert coup.omega_ij[0, 1] == 1.0
    assert coup.omega_ij[0, 2] == 0.0
    assert coup.omega_ij[0, 4] == 0.0


def test_nearest_neighbour_pair_prefers_lowest_indices():
    geom = build_geometry("cubic", [2, 2, 2], EZ)
    assert nearest_neighbour_pair(geom) == (0, 1)


def test_explicit_reference_pair_rescales_couplings():
    geom = build_geometry("chain", [4], EZ)
    coup = coupling_matrix(geom, reference_pair=(0, 2))
    assert coup.reference_pair == (0, 2)
    assert coup.omega_ij[0, 2] == pytest.approx(1.0, abs=1e-14)
    assert coup.omega_ij[0, 1] == pytest.approx(8.0, rel=1e-13)
    with pytest.raises(InvalidInputError):
        coupling_matrix(geom, reference_pair=(1, 1))


def test_physical_to_model_matches_direct_arithmetic():
    params = PhysicalParams(dipole_moment=3.0, field_magnitude=1e5, spacing=10e-9)
    scales = physical_to_model(params)
    debye = 1e-21 / constants.speed_of_light
    p = 3.0 * debye
    coupling = p * p / (4.0 * math.pi * constants.epsilon_0 * (10e-9) ** 3)
    assert scales.coupling_energy_j == pytest.approx(coupling, rel=1e-12)
    assert scales.coupling_energy_k == pytest.approx(coupling / constants.k, rel=1e-12)
    # the scales land where the switch is experimentally plausible
    assert 0.03 < scales.coupling_energy_k < 0.3
    assert 0.5 < scales.ratio < 2.0
    assert scales.ratio == pytest.approx(1.112, abs=0.01)


def test_doubling_spacing_multiplies_ratio_by_eight():
    a = physical_to_model(PhysicalParams(3.0, 1e5, 10e-9))
    b = physical_to_model(PhysicalParams(3.0, 1e5, 20e-9))
    assert b.ratio == pytest.approx(8.0 * a.ratio, rel=1e-12)


def test_nonpositive_physical_params_rejected():
    with pytest.raises(InvalidInputError):
        PhysicalParams(0.0, 1e5, 1e-8)
    with pytest.raises(InvalidInputError):
        PhysicalParams(3.0, -1.0, 1e-8)
