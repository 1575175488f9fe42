import numpy as np
import pytest

from eigenpath.core import angular_distance, fidelity
from eigenpath.oracles import CostLedger
from eigenpath.paths import great_circle_path, grover_path
from eigenpath.traversal import (
    DepthCapError, attempted_interval_bound, enumerate_bit, greedy_checkpoints, overlap_free_bound,
    reduce_checkpoints, segment_overlaps, traverse_known, traverse_parallel, traverse_recursive_dominant,
    traverse_recursive_overlap_free,
)

from oracles import bit_count


@pytest.fixture(scope="module")
def grover():
    return grover_path(16)


def test_greedy_checkpoints_keep_overlap(grover):
    cps = greedy_checkpoints(grover, 0.5)
    assert cps[0] == 0.0 and cps[-1] == 1.0
    assert np.all(segment_overlaps(grover, cps) >= 0.5 - 1e-12)


def test_greedy_checkpoints_single_segment_when_close():
    path = great_circle_path(0.3)
    assert greedy_checkpoints(path, 0.5).tolist() == [0.0, 1.0]


def test_known_traversal_reaches_target(grover, rng):
    cps = greedy_checkpoints(grover, 1 / 3)
    out = traverse_known(grover, cps, rng=rng, check_preconditions=True)
    assert out.success
    assert out.final_fidelity > 1 - 1e-9
    assert out.attempted == len(cps) - 1


def test_known_traversal_rejects_small_overlap(grover, rng):
    with pytest.raises(ValueError):
        traverse_known(grover, [0.0, 1.0], rng=rng, check_preconditions=True)


def test_known_traversal_constant_path_costs(rng):
    # psi_0 = psi_1, so the suppressed transform sees overlap 3/4
    path = great_circle_path(1e-9)
    counts = [traverse_known(path, [0.0, 1.0], rng=rng).reflections for _ in range(4000)]
    assert abs(np.mean(counts) - 5 / 3) < 4 * np.std(counts) / np.sqrt(4000)


def test_parallel_traversal_single_segment(rng):
    path = great_circle_path(0.3)
    led = CostLedger()
    out = traverse_parallel(path, [0.0, 1.0], 100, 0.1, ledger=led, rng=rng)
    assert out.success
    assert out.final_fidelity > 1 - 1e-9
    # one anchor PE plus the segment's forward and partial reversal calls
    assert led.pe_calls < 1 + 2 * 100


def test_reduce_checkpoints_single_step(rng):
    path = great_circle_path(0.2)
    cp = reduce_checkpoints(path, [0.0, 1.0], 0.4, 0.3, 0.5, rng=rng)
    assert cp.s.tolist() == [0.0, 1.0]
    assert cp.ov_calls == 0


def test_reduce_checkpoints_spacing(rng):
    L = 5.0
    path = great_circle_path(L)
    trace = np.linspace(0.0, 1.0, 21)
    cp = reduce_checkpoints(path, trace, 0.4, 0.3, 0.5, rng=rng)
    inner = cp.angles[:-1]
    assert np.all(inner >= 0.3 - 1e-9)
    assert np.all(cp.angles <= 0.5 + 0.25 + 1e-9)
    assert cp.length == pytest.approx(L, abs=1e-6)


def test_reduce_checkpoints_validates(rng):
    path = great_circle_path(5.0)
    with pytest.raises(ValueError):
        reduce_checkpoints(path, [0.0, 1.0], 0.4, 0.5, 0.3, rng=rng)
    with pytest.raises(ValueError):
        reduce_checkpoints(path, [0.0, 1.0], 0.4, 0.3, 0.5, rng=rng)


def test_enumerate_bit_order_and_counts():
    theta, L = 0.1, 0.5
    nodes = enumerate_bit(0.0, 1.0, lambda c, d: L * (d - c) <= theta)
    assert [(n.c, n.d) for n in nodes[:3]] == [(0.0, 1.0), (0.0, 0.5), (0.0, 0.25)]
    split = sum(n.status == "subdivided" for n in nodes)
    assert split == bit_count(lambda s: L * s, theta) == 7
    assert len(nodes) == 2 * split + 1


def test_enumerate_bit_depth_cap():
    with pytest.raises(DepthCapError):
        enumerate_bit(0.0, 1.0, lambda c, d: False, depth_cap=5)
    with pytest.raises(ValueError):
        enumerate_bit(1.0, 0.0, lambda c, d: True)


def test_bounds_closed_forms():
    assert attempted_interval_bound(5.0, 1.0, 1.0, 1.0) == pytest.approx(31.0)
    theta = np.arccos(np.sqrt(1 / 3))
    assert overlap_free_bound(3.0, 1.0, 1.0) == pytest.approx(360 / theta + 10)


def test_dominant_short_path_one_interval(rng):
    out = traverse_recursive_dominant(great_circle_path(0.05), 0.5, 0.05, 60, rng=rng)
    assert out.success and out.attempted == 1
    assert out.final_fidelity > 1 - 1e-9


@pytest.mark.slow
def test_dominant_long_path_within_bound(rng):
    theta = np.arccos(np.sqrt(0.95))
    L = 5 * theta
    path = great_circle_path(L)
    out = traverse_recursive_dominant(path, 0.5, 0.05, 30, rng=rng)
    assert out.success
    assert out.attempted <= attempted_interval_bound(L, 1.0, 1.0, theta)
    assert out.final_fidelity > 1 - 1e-9


def test_overlap_free_root_success_rate(rng):
    path = great_circle_path(0.01)
    roots = [traverse_recursive_overlap_free(path, rng=rng).attempted == 1 for _ in range(2000)]
    assert np.mean(roots) >= 19 / 20 - 3 * np.sqrt(0.05 * 0.95 / 2000)


def test_overlap_free_reaches_target(rng):
    path = great_circle_path(3.0)
    out = traverse_recursive_overlap_free(path, rng=rng)
    assert out.success
    assert fidelity(out.final_state, path.state(1.0)) > 1 - 1e-9
    assert angular_distance(out.final_state, path.state(1.0)) < 1e-4
