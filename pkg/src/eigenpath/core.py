"""Dense statevector primitives: states, spectral operators, eigenpaths and their geometry.

States are plain complex numpy vectors with unit Euclidean norm. Operators that
the algorithms reflect about or phase-estimate are carried together with their
eigendecomposition (:class:`SpectralOperator`), so every oracle can act exactly
in the eigenbasis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg

TWO_PI = 2.0 * np.pi

NORM_TOL = 1e-12
UNITARY_TOL = 1e-10
DEGENERACY_TOL = 1e-9


class DimensionMismatchError(ValueError):
    pass


class DegenerateEigenphaseError(ValueError):
    """The tracked eigenphase collides with another eigenphase."""


class PathRefinementError(RuntimeError):
    """Adaptive refinement hit its depth cap (jump or pathological path)."""


class NumericalInconsistencyError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# phases
# ---------------------------------------------------------------------------

def wrap_phase(phi):
    """Reduce phases to [0, 2pi)."""
    out = np.mod(phi, TWO_PI)
    if np.ndim(out) == 0:
        return float(out) if out < TWO_PI else 0.0
    out[out >= TWO_PI] = 0.0
    return out


def phase_distance(a, b):
    """Circular distance between phases, in [0, pi]."""
    d = np.abs(np.mod(np.asarray(a) - np.asarray(b) + np.pi, TWO_PI) - np.pi)
    return float(d) if np.ndim(d) == 0 else d


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

def as_state(amplitudes, normalize: bool = True) -> np.ndarray:
    v = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if v.size < 2:
        raise ValueError("state dimension must be at least 2")
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise ValueError("zero vector is not a state")
    if normalize:
        return v / nrm
    if abs(nrm - 1.0) > NORM_TOL:
        raise ValueError(f"state not normalized (norm={nrm!r})")
    return v


def basis_state(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def canonical_phase(v: np.ndarray) -> np.ndarray:
    """Fix the global phase so the largest-magnitude amplitude is real positive."""
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


def align_phase(v: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Multiply ``v`` by the global phase that makes <reference|v> real positive."""
    ov = np.vdot(reference, v)
    if abs(ov) < 1e-15:
        return v
    return v * (abs(ov) / ov)


def _check_dims(psi, phi):
    if np.shape(psi) != np.shape(phi):
        raise DimensionMismatchError(f"dimension mismatch: {np.shape(psi)} vs {np.shape(phi)}")


def overlap_probability(psi, phi) -> float:
    """|<psi|phi>|^2."""
    _check_dims(psi, phi)
    p = abs(np.vdot(psi, phi)) ** 2
    return float(min(1.0, p))


def angular_distance(psi, phi) -> float:
    """arccos |<psi|phi>|, in [0, pi/2]."""
    _check_dims(psi, phi)
    return float(np.arccos(min(1.0, abs(np.vdot(psi, phi)))))


def fidelity(psi, phi) -> float:
    return overlap_probability(psi, phi)


def measure_projector(state, projector, rng):
    """Projective measurement {P, 1-P}.

    Returns ``(bit, post_state)`` where ``bit == 1`` means the state was found
    in the range of ``projector``.
    """
    P = np.asarray(projector, dtype=complex)
    if np.max(np.abs(P @ P - P)) > UNITARY_TOL or np.max(np.abs(P - P.conj().T)) > UNITARY_TOL:
        raise ValueError("projector must be idempotent and Hermitian")
    inside = P @ state
    p1 = float(np.real(np.vdot(inside, inside)))
    bit = int(rng.random() < p1)
    post = inside if bit else state - inside
    nrm = np.linalg.norm(post)
    if nrm < 1e-14:
        raise NumericalInconsistencyError("selected measurement branch has zero norm")
    return bit, post / nrm


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralOperator:
    """Unitary (or normal) operator stored together with its eigendecomposition.

    ``flagged`` marks eigenvectors belonging to an auxiliary subspace (the
    ``Pi_0`` block of a direct sum ``V_0 + Pi_0``); phase estimation reports
    no phase for those.
    """

    matrix: np.ndarray
    eigenphases: np.ndarray
    eigenvectors: np.ndarray
    flagged: Optional[np.ndarray] = None
    energies: Optional[np.ndarray] = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_spectrum(cls, eigenphases, eigenvectors, flagged=None, energies=None):
        phases = wrap_phase(np.asarray(eigenphases, dtype=float).copy())
        vecs = np.asarray(eigenvectors, dtype=complex)
        mat = (vecs * np.exp(1j * phases)) @ vecs.conj().T
        fl = None if flagged is None else np.asarray(flagged, dtype=bool)
        return cls(mat, phases, vecs, fl, energies)

    @classmethod
    def from_hermitian(cls, hamiltonian):
        """U = exp(-iH); eigenvectors from ``eigh`` so they are orthonormal."""
        H = np.asarray(hamiltonian, dtype=complex)
        energies, vecs = np.linalg.eigh(H)
        return cls.from_spectrum(-energies, vecs, energies=energies)

    @classmethod
    def from_unitary(cls, unitary):
        """Diagonalize a normal matrix via the complex Schur form."""
        U = np.asarray(unitary, dtype=complex)
        T, Z = scipy.linalg.schur(U, output="complex")
        off = T - np.diag(np.diag(T))
        if np.max(np.abs(off), initial=0.0) > 1e-8:
            raise ValueError("matrix is not normal")
        phases = np.angle(np.diag(T))
        op = cls.from_spectrum(phases, Z)
        return cls(U, op.eigenphases, op.eigenvectors)

    def check(self, tol: float = UNITARY_TOL) -> None:
        E = self.eigenvectors
        eye = np.eye(self.dim)
        if np.max(np.abs(E.conj().T @ E - eye)) > tol:
            raise ValueError("eigenvectors not orthonormal")
        U = self.matrix
        if np.max(np.abs(U.conj().T @ U - eye)) > tol:
            raise ValueError("operator not unitary")
        recon = (E * np.exp(1j * self.eigenphases)) @ E.conj().T
        if np.max(np.abs(recon - U)) > 1e-8:
            raise ValueError("spectrum does not reconstruct the matrix")

    def weights(self, state) -> np.ndarray:
        """Born weights of ``state`` (or rows of a state array) on each eigenvector."""
        return np.abs(np.asarray(state) @ self.eigenvectors.conj()) ** 2

    @cached_property
    def group_ids(self) -> np.ndarray:
        """Label eigenvectors sharing an eigenphase (and flag) with a common group id."""
        n = self.dim
        ids = -np.ones(n, dtype=int)
        fl = self.flagged if self.flagged is not None else np.zeros(n, dtype=bool)
        g = 0
        for k in range(n):
            if ids[k] >= 0:
                continue
            same = (phase_distance(self.eigenphases, self.eigenphases[k]) < DEGENERACY_TOL) & (fl == fl[k])
            ids[same & (ids < 0)] = g
            g += 1
        return ids

    def is_flagged(self, k: int) -> bool:
        return bool(self.flagged is not None and self.flagged[k])

    def gap(self, index: int) -> float:
        """Circular distance from eigenphase ``index`` to every other eigenphase."""
        others = np.delete(self.eigenphases, index)
        if self.flagged is not None:
            others = others[~np.delete(self.flagged, index)]
        if others.size == 0:
            return np.pi
        return float(np.min(phase_distance(self.eigenphases[index], others)))

    def projector(self, indices) -> np.ndarray:
        E = self.eigenvectors[:, list(indices)]
        return E @ E.conj().T

    def apply(self, state):
        return self.matrix @ state


def reflection_about(psi) -> SpectralOperator:
    """R_psi = 1 - 2|psi><psi| with its spectrum (pi on psi, 0 elsewhere)."""
    psi = as_state(psi)
    d = psi.size
    # complete psi to an orthonormal basis with psi as the first column
    M = np.eye(d, dtype=complex)
    M[:, 0] = psi
    k = int(np.argmax(np.abs(psi)))
    if k != 0:
        M[:, k] = basis_state(d, 0)
    Q, R = np.linalg.qr(M)
    Q[:, 0] *= R[0, 0] / abs(R[0, 0])
    phases = np.zeros(d)
    phases[0] = np.pi
    mat = np.eye(d, dtype=complex) - 2.0 * np.outer(psi, psi.conj())
    return SpectralOperator(mat, phases, Q)


# ---------------------------------------------------------------------------
# paths
# ---------------------------------------------------------------------------

TargetRule = Callable[[SpectralOperator], int]


def lowest_energy(op: SpectralOperator) -> int:
    if op.energies is None:
        raise ValueError("lowest_energy rule needs an operator built from a Hamiltonian")
    return int(np.argmin(op.energies))


def first_eigenvector(op: SpectralOperator) -> int:
    return 0


@dataclass
class EigenPath:
    """Family s -> (U_s, tracked eigenstate, eigenphase, gap) on [0, 1].

    ``knots`` turns the path into a piecewise-constant (discrete) one:
    the state at s equals the state at the largest knot <= s.
    """

    sampler: Callable[[float], SpectralOperator]
    target_rule: TargetRule = first_eigenvector
    gap_lower_bound: Optional[float] = None
    gap_profile: Optional[Callable[[float], float]] = None
    knots: Optional[Sequence[float]] = None
    name: str = "path"
    _cache: dict = field(default_factory=dict, repr=False)

    def _resolve(self, s: float) -> float:
        if self.knots is None:
            return float(s)
        kn = np.asarray(self.knots, dtype=float)
        j = int(np.searchsorted(kn, s, side="right")) - 1
        return float(kn[max(j, 0)])

    def _entry(self, s: float):
        s = self._resolve(s)
        hit = self._cache.get(s)
        if hit is not None:
            return hit
        op = self.sampler(s)
        k = self.target_rule(op)
        if op.gap(k) < DEGENERACY_TOL:
            raise DegenerateEigenphaseError(f"tracked eigenphase degenerate at s={s}")
        vec = canonical_phase(op.eigenvectors[:, k])
        entry = (op, k, vec)
        if len(self._cache) < 200_000:
            self._cache[s] = entry
        return entry

    def operator(self, s: float) -> SpectralOperator:
        return self._entry(s)[0]

    def target_index(self, s: float) -> int:
        return self._entry(s)[1]

    def state(self, s: float) -> np.ndarray:
        return self._entry(s)[2]

    def phase(self, s: float) -> float:
        op, k, _ = self._entry(s)
        return float(op.eigenphases[k])

    def gap(self, s: float) -> float:
        """Gap used by the algorithms: the profile if given, else the exact gap."""
        if self.gap_profile is not None:
            return float(self.gap_profile(s))
        op, k, _ = self._entry(s)
        return op.gap(k)

    def exact_gap(self, s: float) -> float:
        op, k, _ = self._entry(s)
        return op.gap(k)

    @property
    def dim(self) -> int:
        return self.state(0.0).size

    def tracked_states(self, grid) -> np.ndarray:
        """States on ``grid`` with global phases chained by maximal overlap."""
        out = []
        prev = None
        for s in grid:
            v = self.state(s)
            v = v if prev is None else align_phase(v, prev)
            out.append(v)
            prev = v
        return np.array(out)


@dataclass(frozen=True)
class PathGeometry:
    length: float
    v_max: float
    v_avg: float
    theta: float
    grid: np.ndarray
    cumulative: np.ndarray

    def arc_length(self, s):
        """L(s): length from the start of the grid to s (linear in between grid points)."""
        return np.interp(s, self.grid, self.cumulative)

    def segment_length(self, c: float, d: float) -> float:
        return float(self.arc_length(d) - self.arc_length(c))


def _segment_angles(states: np.ndarray) -> np.ndarray:
    ov = np.abs(np.sum(states[:-1].conj() * states[1:], axis=1))
    return np.arccos(np.clip(ov, 0.0, 1.0))


def _discrete_grid(path: EigenPath, a: float, b: float):
    kn = np.asarray(path.knots, dtype=float)
    inner = kn[(kn > a) & (kn <= b)]
    grid = np.concatenate([[a], inner])
    if grid[-1] < b:
        grid = np.append(grid, b)
    states = np.array([path.state(s) for s in grid])
    return grid, states


def refine_path(path: EigenPath, a: float = 0.0, b: float = 1.0, tol: float = 1e-6,
                max_angle: float = 0.05, max_depth: int = 40, initial: int = 16):
    """Adaptive bisection grid on [a, b].

    Returns ``(grid, cumulative_length)``. Segments are bisected until each
    subtends at most ``max_angle``; the whole grid is then bisected until the
    summed length moves by less than ``tol``.
    """
    if not a < b:
        raise ValueError("need a < b")
    if path.knots is not None:
        grid, states = _discrete_grid(path, a, b)
        return grid, np.concatenate([[0.0], np.cumsum(_segment_angles(states))])

    grid = np.linspace(a, b, initial + 1)
    depth = np.zeros(initial, dtype=int)
    states = np.array([path.state(s) for s in grid])
    while True:
        ang = _segment_angles(states)
        bad = ang > max_angle
        if not bad.any():
            break
        if np.any(depth[bad] >= max_depth):
            raise PathRefinementError(
                f"refinement depth {max_depth} exceeded near s={grid[:-1][bad & (depth >= max_depth)][0]:.6g}")
        grid, states, depth = _bisect(path, grid, states, depth, bad)

    total = float(np.sum(_segment_angles(states)))
    while True:
        if np.max(depth) >= max_depth:
            raise PathRefinementError(f"refinement depth {max_depth} exceeded")
        grid, states, depth = _bisect(path, grid, states, depth, np.ones(len(grid) - 1, dtype=bool))
        new_total = float(np.sum(_segment_angles(states)))
        if abs(new_total - total) < tol:
            total = new_total
            break
        total = new_total
    cum = np.concatenate([[0.0], np.cumsum(_segment_angles(states))])
    return grid, cum


def _bisect(path, grid, states, depth, mask):
    mids = 0.5 * (grid[:-1][mask] + grid[1:][mask])
    mid_states = np.array([path.state(s) for s in mids])
    n_new = len(grid) + mask.sum()
    g = np.empty(n_new)
    st = np.empty((n_new, states.shape[1]), dtype=complex)
    dp = np.empty(n_new - 1, dtype=int)
    i_out = 0
    m = 0
    for i in range(len(grid) - 1):
        g[i_out] = grid[i]
        st[i_out] = states[i]
        if mask[i]:
            dp[i_out] = depth[i] + 1
            i_out += 1
            g[i_out] = mids[m]
            st[i_out] = mid_states[m]
            dp[i_out] = depth[i] + 1
            m += 1
        else:
            dp[i_out] = depth[i]
        i_out += 1
    g[i_out] = grid[-1]
    st[i_out] = states[-1]
    return g, st, dp


def path_length(path: EigenPath, a: float = 0.0, b: float = 1.0, tol: float = 1e-6,
                max_depth: int = 40) -> float:
    """Angular length of the path restricted to [a, b] (sum of arccos overlaps, refined)."""
    _, cum = refine_path(path, a, b, tol=tol, max_depth=max_depth)
    return float(cum[-1])


def max_window_speed(grid: np.ndarray, cumulative: np.ndarray, theta: float,
                     chunk: int = 512) -> float:
    """sup (L(s2)-L(s1))/(s2-s1) over grid pairs with L(s2)-L(s1) >= theta; nan if none."""
    best = -np.inf
    n = len(grid)
    for start in range(0, n, chunk):
        i = np.arange(start, min(start + chunk, n))[:, None]
        dL = cumulative[None, :] - cumulative[i]
        ds = grid[None, :] - grid[i]
        ok = (ds > 0) & (dL >= theta)
        if ok.any():
            best = max(best, float(np.max(dL[ok] / ds[ok])))
    return best if np.isfinite(best) else float("nan")


def velocity_profile(path: EigenPath, theta: float, a: float = 0.0, b: float = 1.0,
                     tol: float = 1e-6, max_depth: int = 40) -> PathGeometry:
    """Length, maximum locally averaged angular velocity at scale ``theta``, and average velocity.

    ``v_max`` is evaluated over pairs of refinement grid points, so it is a lower
    estimate of the supremum; for paths with a jump of at least ``theta`` it is
    reported as infinite.
    """
    if theta <= 0:
        raise ValueError("theta must be positive")
    grid, cum = refine_path(path, a, b, tol=tol, max_depth=max_depth)
    L = float(cum[-1])
    v_avg = L / (b - a)
    if path.knots is not None and np.any(np.diff(cum) >= theta):
        return PathGeometry(L, float("inf"), v_avg, theta, grid, cum)
    v = max_window_speed(grid, cum, theta)
    if not np.isfinite(v):
        v = v_avg
    return PathGeometry(L, max(v, v_avg), v_avg, theta, grid, cum)
