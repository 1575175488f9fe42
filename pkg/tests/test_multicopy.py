import numpy as np
import pytest

from eigenpath.core import SpectralOperator, TWO_PI, fidelity, phase_distance
from eigenpath.instances import overlap_instance
from eigenpath.multicopy import (
    check_dominance, circular_median, circular_window_search, er_parallel, er_x, fraction_inside, interval_grid,
    suppressed_operator, transform_tp, transform_tpx,
)
from eigenpath.oracles import IDEAL, CostLedger, Reflector

from oracles import dominance_brute


def copies_of(state, r):
    return np.tile(state, (r, 1))


def test_window_search_wraps_around():
    samples = np.array([TWO_PI - 0.05, 0.02, 0.04, 3.0])
    start, mask = circular_window_search(samples, 0.2, 2.5)
    assert start == pytest.approx(TWO_PI - 0.05)
    assert mask.tolist() == [True, True, True, False]
    assert circular_median(samples[mask], start) == pytest.approx(0.02)


def test_window_search_none_when_spread():
    assert circular_window_search(np.array([0.0, 2.0, 4.0]), 0.1, 1.5) == (None, None)
    assert circular_window_search(np.array([np.nan]), 0.1, 0.0) == (None, None)


def test_window_search_ignores_nan():
    start, mask = circular_window_search(np.array([1.0, np.nan, 1.05]), 0.1, 1.5)
    assert start == 1.0 and mask.tolist() == [True, False, True]


def test_fraction_inside():
    assert fraction_inside([1.0], 0.1, 0.95, 0.1)[0] == pytest.approx(0.5)
    assert fraction_inside([0.0], 0.1, TWO_PI - 0.1, 0.2)[0] == pytest.approx(1.0)
    assert fraction_inside([3.0], 0.1, 0.0, 0.2, jitter=False)[0] == 0.0


def test_interval_grid_covers_circle():
    lefts = interval_grid(0.5)
    assert lefts[0] == pytest.approx(-0.5)
    assert lefts.size == int(np.ceil(TWO_PI / 0.5))


def test_suppressed_operator_blocks():
    inst = overlap_instance(0.7)
    Vx = suppressed_operator(inst.V)
    assert Vx.dim == 2 * inst.V.dim
    assert Vx.flagged.sum() == inst.V.dim
    Vx.check()


def test_er_all_copies_on_phi():
    inst = overlap_instance(1.0)
    r = 40
    led = CostLedger()
    out = er_parallel(inst.V, inst.gap, copies_of(inst.phi, r), IDEAL, led, np.random.default_rng(0))
    assert out.success and out.j == r
    assert phase_distance(out.reported_phase, inst.phase_v) <= inst.gap / 5
    assert led.oracle_calls["pe"] == r
    assert led.oracle_calls.get("pe_reverse", 0) == 0


def test_er_reverse_count(rng):
    inst = overlap_instance(0.75)
    r = 200
    led = CostLedger()
    out = er_parallel(inst.V, inst.gap, copies_of(inst.psi, r), IDEAL, led, rng)
    assert out.success
    assert led.oracle_calls["pe_reverse"] == r - out.j
    # copies outside the window lose weight on phi, since their estimates were unlikely to miss
    assert np.all(np.abs(out.copies[~out.labels] @ inst.phi.conj()) ** 2 < 0.75)
    assert np.allclose(np.abs(out.copies[out.labels] @ inst.phi.conj()), 1.0)


def test_tp_at_unit_overlap_sees_suppressed_overlap(rng):
    # the ancilla lowers the effective overlap to 3/4, so about a quarter of the copies need T
    inst = overlap_instance(1.0)
    r = 2000
    out = transform_tp(Reflector.exact(inst.psi), inst.V, inst.gap, 0.1, copies_of(inst.psi, r), IDEAL, None, rng)
    assert out.success
    assert abs(out.j / r - 0.75) < 4 * np.sqrt(0.75 * 0.25 / r)
    assert all(fidelity(row, inst.phi) == pytest.approx(1.0) for row in out.copies)


def test_tp_moves_every_copy(rng):
    inst = overlap_instance(0.9)
    led = CostLedger()
    out = transform_tp(Reflector.exact(inst.psi), inst.V, inst.gap, 0.1, copies_of(inst.psi, 100), IDEAL, led, rng)
    assert out.success and out.flag == "1"
    assert min(fidelity(row, inst.phi) for row in out.copies) > 1 - 1e-9
    assert led.pe_calls < 200


def test_erx_high_branch(rng):
    inst = overlap_instance(0.95)
    r = 400
    out = er_x(inst.V, inst.gap, 0.5, 0.85, 0.1, copies_of(inst.psi, r), Reflector.exact(inst.psi), IDEAL, None, rng)
    assert out.b == 1 and out.j == r


def test_erx_low_branch(rng):
    inst = overlap_instance(0.4)
    r = 400
    out = er_x(inst.V, inst.gap, 0.5, 0.85, 0.1, copies_of(inst.psi, r), Reflector.exact(inst.psi), IDEAL, None, rng)
    assert out.b == 0 and out.j == r
    assert out.n == r


def test_tpx_success(rng):
    inst = overlap_instance(0.98)
    r = 200
    out = transform_tpx(Reflector.exact(inst.psi), inst.V, inst.gap, 0.5, 0.01, copies_of(inst.psi, r), IDEAL,
                        None, rng)
    assert out.flag == "1"
    assert min(fidelity(row, inst.phi) for row in out.copies) > 1 - 1e-9


def test_tpx_declines(rng):
    inst = overlap_instance(0.3)
    r = 200
    out = transform_tpx(Reflector.exact(inst.psi), inst.V, inst.gap, 0.5, 0.1, copies_of(inst.psi, r), IDEAL,
                        None, rng)
    assert out.flag == "#"
    assert min(fidelity(row, inst.psi) for row in out.copies) > 1 - 1e-9


def test_dominance_explicit_violation():
    # weight 0.5 on phase 3 away from the target at 0
    V = SpectralOperator.from_spectrum([0.0, 3.0], np.eye(2))
    psi = np.array([np.sqrt(0.5), np.sqrt(0.5)])
    assert not check_dominance(V, psi, 0.4, 0.2, 0.0)
    assert check_dominance(V, psi, 0.6, 0.2, 0.0)


def test_dominance_two_phase_window():
    # two phases 0.3 apart each below gamma, together above; only a window covering both catches it
    V = SpectralOperator.from_spectrum([0.0, 2.0, 2.3], np.eye(3))
    w = np.array([0.4, 0.3, 0.3])
    psi = np.sqrt(w)
    assert not check_dominance(V, psi, 0.5, 0.16, 0.0)
    assert not dominance_brute(V.eigenphases, w, 0.0, 0.5, 0.16)


@pytest.mark.parametrize("seed", range(8))
def test_dominance_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    d = 6
    ph = rng.uniform(0, TWO_PI, d)
    w = rng.dirichlet(np.ones(d))
    V = SpectralOperator.from_spectrum(ph, np.eye(d))
    for gamma in (0.1, 0.3, 0.5):
        for delta in (0.05, 0.3, 0.8):
            fast = check_dominance(V, np.sqrt(w), gamma, delta, ph[0])
            assert fast == dominance_brute(ph, w, ph[0], gamma, delta, centers=60000)
