"""Simulation and verification toolkit for eigenpath traversal by reflections and phase estimation.

Dense statevector simulation of moving an eigenvector along a path of
unitaries, with oracle cost accounting, single- and multi-copy
transformations, path-level traversals and Monte Carlo checks of the
supporting cost and tail bounds.
"""

from .core import (
    EigenPath, PathGeometry, SpectralOperator, angular_distance, fidelity, overlap_probability, path_length,
    phase_distance, refine_path, velocity_profile, wrap_phase,
)
from .oracles import IDEAL, CostLedger, OracleConfig, Reflector, oracle_cost, ov, pd, pe, reflect
from .onestep import (
    rt_attempt, transform_t, transform_tm, transform_tmx_prime, transform_tx, transform_tx_prime,
)
from .multicopy import check_dominance, er_parallel, er_x, transform_tp, transform_tpx
from .paths import great_circle_path, grover_path, random_smooth_path, speed_profile_path
from .traversal import (
    enumerate_bit, greedy_checkpoints, reduce_checkpoints, traverse_known, traverse_parallel,
    traverse_recursive_dominant, traverse_recursive_overlap_free,
)
from .analysis import SpeedProfile, galton_watson_size, gw_gamma_max, gw_mean, sigma_theta, rho_theta
from .experiments import CATALOG, list_experiments, run_experiment

__version__ = "0.1.0"

__all__ = [
    "EigenPath", "PathGeometry", "SpectralOperator", "angular_distance", "fidelity", "overlap_probability",
    "path_length", "phase_distance", "refine_path", "velocity_profile", "wrap_phase",
    "IDEAL", "CostLedger", "OracleConfig", "Reflector", "oracle_cost", "ov", "pd", "pe", "reflect",
    "rt_attempt", "transform_t", "transform_tm", "transform_tmx_prime", "transform_tx", "transform_tx_prime",
    "check_dominance", "er_parallel", "er_x", "transform_tp", "transform_tpx",
    "great_circle_path", "grover_path", "random_smooth_path", "speed_profile_path",
    "enumerate_bit", "greedy_checkpoints", "reduce_checkpoints", "traverse_known", "traverse_parallel",
    "traverse_recursive_dominant", "traverse_recursive_overlap_free",
    "SpeedProfile", "galton_watson_size", "gw_gamma_max", "gw_mean", "sigma_theta", "rho_theta",
    "CATALOG", "list_experiments", "run_experiment",
]
