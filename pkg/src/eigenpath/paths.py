"""Concrete eigenpath families used in the experiments."""

from __future__ import annotations

from typing import Callable, Optional, Sequence

import numpy as np

from .core import EigenPath, SpectralOperator, TWO_PI, lowest_energy, first_eigenvector


def grover_hamiltonian(num_items: int, s: float, marked: int = 0) -> np.ndarray:
    """H(s) = (1-s)(1 - |u><u|) + s(1 - |m><m|), u uniform, m marked."""
    N = num_items
    u = np.full(N, 1.0 / np.sqrt(N))
    eye = np.eye(N)
    H = (1.0 - s) * (eye - np.outer(u, u))
    H[marked, marked] -= s
    H += s * eye
    return H


def grover_gap(num_items: int, s: float) -> float:
    """Energy gap between the ground state and the first excited state of H(s)."""
    return float(np.sqrt(1.0 - 4.0 * s * (1.0 - s) * (1.0 - 1.0 / num_items)))


def grover_path(num_items: int, marked: int = 0) -> EigenPath:
    """Ground-state path of the linear interpolation between the two projector Hamiltonians.

    U_s = exp(-i H(s)). All eigenvalues of H(s) lie in [0, 1], so phase gaps
    coincide with energy gaps.
    """
    if num_items < 2:
        raise ValueError("need at least two items")
    N = int(num_items)

    def sampler(s):
        return SpectralOperator.from_hermitian(grover_hamiltonian(N, s, marked))

    return EigenPath(
        sampler=sampler,
        target_rule=lowest_energy,
        gap_lower_bound=1.0 / np.sqrt(N),
        gap_profile=lambda s: grover_gap(N, s),
        name=f"grover-{N}",
    )


def _plane_rotation(e0: np.ndarray, chi: np.ndarray, angle: float) -> np.ndarray:
    d = e0.size
    return (np.eye(d)
            + np.sin(angle) * (np.outer(chi, e0) - np.outer(e0, chi))
            + (np.cos(angle) - 1.0) * (np.outer(e0, e0) + np.outer(chi, chi)))


def rotating_path(arc_length: Callable[[float], float], dim: int = 4,
                  phases: Optional[Sequence[float]] = None, name: str = "rotating") -> EigenPath:
    """psi_s = cos(l(s))|0> + sin(l(s))|chi>, |chi> uniform over the other basis states.

    The whole eigenbasis is carried along by the same plane rotation, so the
    spectrum is constant in s. Default phases 2*pi*k/dim give gap 2*pi/dim and
    spread the weight of the orthogonal complement over dim-1 eigenphases,
    which keeps the tracked phase dominant for every pair of path points.
    """
    if dim < 2:
        raise ValueError("dim must be >= 2")
    ph = np.array(phases if phases is not None else TWO_PI * np.arange(dim) / dim, dtype=float)
    e0 = np.zeros(dim)
    e0[0] = 1.0
    chi = np.zeros(dim)
    chi[1:] = 1.0 / np.sqrt(dim - 1)
    gap = float(np.min(np.abs(np.mod(ph[0] - ph[1:] + np.pi, TWO_PI) - np.pi)))

    def sampler(s):
        # columns of R are the rotated eigenvectors
        R = _plane_rotation(e0, chi, float(arc_length(s)))
        return SpectralOperator.from_spectrum(ph, R.astype(complex))

    return EigenPath(sampler=sampler, target_rule=first_eigenvector,
                     gap_lower_bound=gap, gap_profile=lambda s: gap, name=name)


def great_circle_path(omega: float, dim: int = 4, phases=None) -> EigenPath:
    """Uniform-speed path of angular length ``omega`` on [0, 1]."""
    return rotating_path(lambda s: omega * s, dim=dim, phases=phases, name=f"great-circle-{omega:g}")


def speed_profile_path(profile, dim: int = 4, phases=None) -> EigenPath:
    """Rotating path whose arclength function is ``profile.arc_length``."""
    return rotating_path(profile.arc_length, dim=dim, phases=phases, name="piecewise-speed")


def random_smooth_path(dim: int, rng, scale: float = 1.0) -> EigenPath:
    """Ground state of H(s) = (1-s) H0 + s H1 for random Hermitian H0, H1."""
    def herm():
        A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        return scale * (A + A.conj().T) / (2.0 * np.sqrt(2 * dim))

    H0, H1 = herm(), herm()

    def sampler(s):
        return SpectralOperator.from_hermitian((1.0 - s) * H0 + s * H1)

    return EigenPath(sampler=sampler, target_rule=lowest_energy, name="random-smooth")


def discrete_path(operators: Sequence[SpectralOperator], target_rule=first_eigenvector,
                  knots: Optional[Sequence[float]] = None) -> EigenPath:
    """Piecewise-constant path through ``operators`` (knot j at j/n unless given)."""
    ops = list(operators)
    n = len(ops) - 1
    kn = np.asarray(knots if knots is not None else np.arange(n + 1) / max(n, 1), dtype=float)

    def sampler(s):
        j = int(np.searchsorted(kn, s, side="right")) - 1
        return ops[max(min(j, n), 0)]

    return EigenPath(sampler=sampler, target_rule=target_rule, knots=kn, name="discrete")


def states_path(states: Sequence[np.ndarray], knots=None, phases=None) -> EigenPath:
    """Discrete path whose tracked eigenvectors are the given states."""
    ops = []
    for v in states:
        v = np.asarray(v, dtype=complex)
        v = v / np.linalg.norm(v)
        d = v.size
        M = np.eye(d, dtype=complex)
        k = int(np.argmax(np.abs(v)))
        M[:, [0, k]] = M[:, [k, 0]]
        M[:, 0] = v
        Q, R = np.linalg.qr(M)
        Q[:, 0] *= R[0, 0] / abs(R[0, 0])
        ph = phases if phases is not None else TWO_PI * np.arange(d) / d
        ops.append(SpectralOperator.from_spectrum(ph, Q))
    return discrete_path(ops, knots=knots)
