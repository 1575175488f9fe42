import numpy as np
import pytest

from eigenpath.core import (
    DegenerateEigenphaseError, DimensionMismatchError, EigenPath, SpectralOperator, TWO_PI, angular_distance,
    as_state, basis_state, fidelity, measure_projector, overlap_probability, path_length, phase_distance,
    reflection_about, velocity_profile, wrap_phase,
)
from eigenpath.paths import (
    discrete_path, great_circle_path, grover_gap, grover_hamiltonian, grover_path, random_smooth_path,
    speed_profile_path, states_path,
)
from eigenpath.analysis import SpeedProfile


def random_unitary(rng, d):
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    Q, R = np.linalg.qr(A)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def test_wrap_phase_range():
    assert wrap_phase(-0.5) == pytest.approx(TWO_PI - 0.5)
    assert wrap_phase(TWO_PI) == 0.0
    arr = wrap_phase(np.array([-TWO_PI, 7.0, -1e-18]))
    assert np.all((arr >= 0) & (arr < TWO_PI))


def test_phase_distance_wraps():
    assert phase_distance(0.1, TWO_PI - 0.1) == pytest.approx(0.2)
    assert phase_distance(0.0, np.pi) == pytest.approx(np.pi)


def test_state_validation():
    with pytest.raises(ValueError):
        as_state([1.0])
    with pytest.raises(ValueError):
        as_state([0.0, 0.0])
    with pytest.raises(ValueError):
        as_state([1.0, 1.0], normalize=False)
    assert np.linalg.norm(as_state([3.0, 4.0])) == pytest.approx(1.0)


def test_overlap_and_angle():
    a = basis_state(2, 0)
    b = as_state([1.0, 1.0])
    assert overlap_probability(a, b) == pytest.approx(0.5)
    assert angular_distance(a, b) == pytest.approx(np.pi / 4)
    assert fidelity(a, a) == 1.0
    with pytest.raises(DimensionMismatchError):
        overlap_probability(a, basis_state(3, 0))


def test_measure_projector_statistics(rng):
    psi = as_state([np.sqrt(0.3), np.sqrt(0.7)])
    P = np.diag([1.0, 0.0])
    hits = sum(measure_projector(psi, P, rng)[0] for _ in range(20000))
    assert abs(hits / 20000 - 0.3) < 4 * np.sqrt(0.21 / 20000)
    with pytest.raises(ValueError):
        measure_projector(psi, np.array([[1.0, 1.0], [0.0, 0.0]]), rng)


def test_from_unitary_reconstructs(rng):
    U = random_unitary(rng, 6)
    op = SpectralOperator.from_unitary(U)
    op.check()
    assert np.allclose((op.eigenvectors * np.exp(1j * op.eigenphases)) @ op.eigenvectors.conj().T, U)


def test_from_unitary_rejects_non_normal():
    with pytest.raises(ValueError):
        SpectralOperator.from_unitary(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_from_hermitian_phases_are_minus_energies(rng):
    A = rng.normal(size=(4, 4))
    H = (A + A.T) / 2
    op = SpectralOperator.from_hermitian(H)
    assert np.allclose(np.sort(wrap_phase(-np.linalg.eigvalsh(H))), np.sort(op.eigenphases))


def test_gap_and_groups():
    op = SpectralOperator.from_spectrum([0.0, 0.0, 1.0], np.eye(3))
    ids = op.group_ids
    assert ids[0] == ids[1] != ids[2]
    assert op.gap(2) == pytest.approx(1.0)
    flagged = SpectralOperator.from_spectrum([0.0, 0.1, 1.0], np.eye(3), flagged=[False, True, False])
    assert flagged.gap(0) == pytest.approx(1.0)


def test_reflection_about():
    psi = as_state([1.0, 2.0, 2.0j])
    op = reflection_about(psi)
    op.check()
    assert np.allclose(op.apply(psi), -psi)


def test_grover_path_gap_matches_spectrum():
    path = grover_path(16)
    for s in (0.0, 0.3, 0.5, 0.9):
        assert path.gap(s) == pytest.approx(path.exact_gap(s), abs=1e-9)
    assert grover_gap(16, 0.5) == pytest.approx(0.25)
    assert np.allclose(grover_hamiltonian(4, 0.0) @ np.full(4, 0.5), 0.0)


def test_grover_endpoints():
    path = grover_path(16)
    assert fidelity(path.state(0.0), np.full(16, 0.25)) == pytest.approx(1.0)
    assert fidelity(path.state(1.0), basis_state(16, 0)) == pytest.approx(1.0)


def test_degenerate_target_raises():
    op = SpectralOperator.from_spectrum([0.0, 0.0], np.eye(2))
    path = EigenPath(sampler=lambda s: op)
    with pytest.raises(DegenerateEigenphaseError):
        path.state(0.5)


def test_great_circle_length():
    assert path_length(great_circle_path(1.3)) == pytest.approx(1.3, abs=1e-6)


def test_grover_length_is_endpoint_angle():
    # the ground state rotates monotonically in a fixed real plane
    assert path_length(grover_path(16)) == pytest.approx(np.arccos(0.25), abs=1e-6)


def test_uniform_speed_vmax_equals_vavg():
    geo = velocity_profile(great_circle_path(2.0), 0.3)
    assert geo.v_max == pytest.approx(geo.v_avg, rel=1e-6)


def test_two_speed_vmax():
    prof = SpeedProfile([0.0, 0.5, 1.0], [4.0, 1.0])
    geo = velocity_profile(speed_profile_path(prof), 0.5)
    assert geo.length == pytest.approx(2.5, abs=1e-5)
    assert geo.v_max == pytest.approx(4.0, rel=1e-3)
    assert prof.v_max(0.5) == pytest.approx(4.0)


def test_discrete_path_and_jump():
    states = [basis_state(2, 0), as_state([1.0, 1.0]), basis_state(2, 1)]
    path = states_path(states)
    assert path_length(path) == pytest.approx(np.pi / 2)
    geo = velocity_profile(path, 0.5)
    assert geo.v_max == np.inf
    ops = [SpectralOperator.from_spectrum([0.0, 1.0], np.eye(2))] * 2
    assert path_length(discrete_path(ops)) == pytest.approx(0.0)


def test_random_smooth_path_is_reproducible():
    a = random_smooth_path(4, np.random.default_rng(5))
    b = random_smooth_path(4, np.random.default_rng(5))
    assert np.allclose(a.state(0.4), b.state(0.4))
