import numpy as np
import pytest

from eigenpath import analysis as an
from eigenpath.experiments import perturbation_check, random_perturbation_instance
from eigenpath.paths import grover_hamiltonian
from eigenpath.stats import check_moment

from oracles import (
    bit_count, chain_tx_prime, gw_series_leaf_mean, gw_series_mean, gw_series_moment, principal_angle_dense,
    sigma_brute,
)

PROFILES = [([0.0, 0.5, 1.0], [2.0, 0.25]), ([0.0, 0.3, 0.6, 1.0], [0.5, 3.0, 1.0])]


@pytest.mark.parametrize("p_s", [0.6, 0.8, 0.95])
def test_gw_closed_forms_match_series(p_s):
    assert an.gw_mean_nodes(p_s) == pytest.approx(gw_series_mean(p_s), rel=1e-6)
    assert an.gw_mean(p_s) == pytest.approx(gw_series_leaf_mean(p_s), rel=1e-6)
    g = 0.5 * (1 + an.gw_gamma_max(p_s))
    assert an.gw_moment_exact(p_s, g) == pytest.approx(gw_series_moment(p_s, g), rel=1e-6)


def test_gw_closed_forms_reject_subcritical():
    for fn in (an.gw_mean, an.gw_mean_nodes, an.gw_gamma_max):
        with pytest.raises(ValueError):
            fn(0.5)


@pytest.mark.parametrize("p_s", [0.7, 0.95])
def test_gw_simulation_matches_series(p_s, rng):
    nodes, leaves = an.galton_watson_trees(p_s, 200000, rng)
    assert np.all(nodes == 2 * leaves - 1)
    se = nodes.std() / np.sqrt(nodes.size)
    assert abs(nodes.mean() - gw_series_mean(p_s)) < 4 * se
    assert abs(leaves.mean() - gw_series_leaf_mean(p_s)) < 4 * leaves.std() / np.sqrt(leaves.size)


def test_gw_moment_bound_holds_in_simulation(rng):
    p_s = 0.9
    sizes = an.galton_watson_sizes(p_s, 100000, rng)
    g = 1.0 + 0.5 * (an.gw_gamma_max(p_s) - 1.0)
    assert check_moment("gw", sizes, g, an.gw_moment_exponent(p_s)).passed


def test_composition_with_unit_costs():
    costs = np.ones((1000, 5))
    verdicts = an.verify_ldev_composition(costs, [1.0] * 5, [1.1, 2.0])
    assert all(v.passed for v in verdicts)
    assert an.verify_ldev_composition(costs, [0.5] * 5, [2.0])[0].passed is False


def test_tx_prime_cost_sampler_mean(rng):
    a = an.tx_prime_costs(0.5, rng, 50000)
    b, _ = chain_tx_prime(0.5, 50000, np.random.default_rng(3))
    assert abs(a.mean() - b.mean()) < 4 * np.hypot(a.std(), b.std()) / np.sqrt(50000)


@pytest.mark.parametrize("bp,speeds", PROFILES)
def test_sigma_matches_brute_force(bp, speeds):
    prof = an.SpeedProfile(bp, speeds)
    theta = prof.length / 10
    for frac in (0.2, 0.5, 0.7):
        l = frac * prof.length
        exact = an.sigma_theta(prof, l, theta)
        assert sigma_brute(bp, speeds, l, theta, n=41) == pytest.approx(exact, rel=1e-6)


@pytest.mark.parametrize("bp,speeds", PROFILES)
def test_sigma_at_most_twice_rho(bp, speeds):
    prof = an.SpeedProfile(bp, speeds)
    theta = prof.length / 8
    for l in np.linspace(0, prof.length, 11):
        assert an.sigma_theta(prof, l, theta) <= 2 * an.rho_theta(prof, l, theta) * (1 + 1e-9)


def test_uniform_profile_values():
    prof = an.SpeedProfile.uniform(2.0)
    assert an.sigma_theta(prof, 1.0, 0.2) == pytest.approx(2.0)
    assert an.rho_theta(prof, 1.0, 0.2) == pytest.approx(1.0)
    # interval too short for any window
    assert an.sigma_theta(an.SpeedProfile.uniform(0.1), 0.05, 0.2) == 1.0
    assert an.bit_cost_rough(an.SpeedProfile.uniform(2.0), 0.2, 1.0) == pytest.approx(60.0)


@pytest.mark.parametrize("bp,speeds", PROFILES)
def test_bit_cost_chain(bp, speeds):
    prof = an.SpeedProfile(bp, speeds)
    theta = prof.length / 10
    exact = an.enumerate_bit_cost(prof, theta, lambda c, d: 1.0)
    assert exact == bit_count(prof.arc_length, theta)
    integral = an.bit_cost_bound(prof, theta, 1.0)
    assert exact <= integral + 1e-9
    assert integral <= an.bit_cost_rough(prof, theta, 1.0) + 1e-9


def test_angle_bound_zero_perturbation():
    H = np.diag([0.0, 1.0, 3.0])
    exact, bound = perturbation_check(H, np.zeros((3, 3)))
    assert exact == pytest.approx(0.0, abs=1e-7) and bound == 0.0


def test_angle_bound_commuting_perturbation():
    H = np.diag([0.0, 1.0, 3.0])
    exact, bound = perturbation_check(H, np.diag([0.3, -0.2, 0.1]))
    assert exact == pytest.approx(0.0, abs=1e-7)
    assert bound == pytest.approx(0.0, abs=1e-12)


def test_angle_bound_random_instances(rng):
    for _ in range(30):
        H, S = random_perturbation_instance(rng, 6, 0.2)
        exact, bound = perturbation_check(H, S)
        assert exact == pytest.approx(principal_angle_dense(H, S), abs=1e-7)
        assert exact <= bound + 1e-12


def test_rate_bound_constant_family():
    H = np.diag([0.0, 1.0])
    assert an.projected_rate(lambda t: H, 0.3) == pytest.approx(0.0, abs=1e-6)
    assert an.rate_bound(lambda t: H, 0.3, 1.0) == 0.0


def test_rate_bound_grover_midpoint():
    def H_of(s):
        return grover_hamiltonian(16, s)

    gap = an.hermitian_gap(H_of(0.5))
    assert an.projected_rate(H_of, 0.5) <= an.rate_bound(H_of, 0.5, gap) + 1e-6


def test_rho_window_ending_exactly_at_l():
    # the maximizing fast window ends exactly at l, which rounding used to exclude
    prof = an.SpeedProfile(np.linspace(0.0, 1.0, 4), [1.2603477277241266, 0.8869340261205125, 3.3273558257997085])
    theta, l = 0.25 * prof.length, 0.875 * prof.length
    assert an.rho_theta(prof, l, theta, grid=80) > 1.09
    assert an.sigma_theta(prof, l, theta, grid=80) <= 2 * an.rho_theta(prof, l, theta, grid=80) * (1 + 1e-9)
