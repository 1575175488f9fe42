"""Phase estimation, phase detection, reflection and overlap oracles with cost accounting.

The oracles act exactly through the eigendecomposition of the operator they
are defined from. Each call is charged ``ceil(c * ln(1/eps) / delta)``
applications of the underlying unitary, the cost of a high-confidence phase
estimation at resolution ``delta`` and error amplitude ``eps``.

Band behaviour (eigenphases between the inner and outer thresholds) follows
one fixed admissible rule per oracle; see the individual docstrings.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    SpectralOperator,
    TWO_PI,
    UNITARY_TOL,
    NumericalInconsistencyError,
    phase_distance,
    wrap_phase,
)

DEFAULT_COST_CONSTANT = 2.0 * math.log(2.0)


@dataclass(frozen=True)
class OracleConfig:
    """How oracles behave and what they cost.

    ``jitter`` switches the uniform phase-estimate perturbation on or off;
    with it off, estimates are exact.
    """

    mode: str = "ideal"
    epsilon: float = 1e-3
    cost_constant: float = DEFAULT_COST_CONSTANT
    jitter: bool = True

    def __post_init__(self):
        if self.mode not in ("ideal", "noisy"):
            raise ValueError(f"unknown oracle mode {self.mode!r}")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.cost_constant <= 0:
            raise ValueError("cost constant must be positive")

    @property
    def noisy(self) -> bool:
        return self.mode == "noisy"

    @property
    def corruption_probability(self) -> float:
        return self.epsilon ** 2 if self.noisy else 0.0


IDEAL = OracleConfig()


@dataclass
class CostLedger:
    """Running totals of unitary applications, oracle calls and reflections."""

    unitary_applications: int = 0
    reflections: int = 0
    oracle_calls: Counter = field(default_factory=Counter)
    samples: list = field(default_factory=list)

    def charge(self, kind: str, applications: int = 0, calls: int = 1) -> None:
        self.oracle_calls[kind] += calls
        self.unitary_applications += applications * calls

    def add_reflections(self, n: int = 1) -> None:
        self.reflections += n

    def log(self, value) -> None:
        self.samples.append(value)

    def __iadd__(self, other: "CostLedger") -> "CostLedger":
        self.unitary_applications += other.unitary_applications
        self.reflections += other.reflections
        self.oracle_calls.update(other.oracle_calls)
        self.samples.extend(other.samples)
        return self

    def __add__(self, other: "CostLedger") -> "CostLedger":
        out = self.copy()
        out += other
        return out

    def copy(self) -> "CostLedger":
        return CostLedger(self.unitary_applications, self.reflections,
                          Counter(self.oracle_calls), list(self.samples))

    def snapshot(self) -> dict:
        return {
            "unitary_applications": self.unitary_applications,
            "reflections": self.reflections,
            "oracle_calls": dict(sorted(self.oracle_calls.items())),
        }

    @property
    def pe_calls(self) -> int:
        return self.oracle_calls["pe"] + self.oracle_calls["pe_reverse"]

    @property
    def total_oracle_calls(self) -> int:
        return sum(self.oracle_calls.values())


def oracle_cost(delta: float, epsilon: float, c: float = 1.0) -> int:
    """ceil(c ln(1/epsilon) / delta) applications of the controlled unitary."""
    if not 0.0 < delta <= np.pi + 1e-12:
        raise ValueError("resolution must lie in (0, pi]")
    return int(math.ceil(c * math.log(1.0 / epsilon) / delta - 1e-12))


def _cost(delta, cfg: OracleConfig) -> int:
    return oracle_cost(min(delta, np.pi), cfg.epsilon, cfg.cost_constant)


def _ledger(ledger):
    return ledger if ledger is not None else CostLedger()


# ---------------------------------------------------------------------------
# phase estimation
# ---------------------------------------------------------------------------

def pe_many(U: SpectralOperator, delta: float, states: np.ndarray, cfg: OracleConfig,
            ledger: Optional[CostLedger], rng):
    """Phase estimation on each row of ``states`` independently.

    Returns ``(estimates, indices, post_states)``. ``estimates`` is nan for rows
    that collapsed into a flagged eigenvector; ``indices`` are the sampled
    eigenvector indices. Each row collapses onto the eigenspace of its sampled
    eigenphase.
    """
    X = np.atleast_2d(np.asarray(states, dtype=complex))
    r = X.shape[0]
    E = U.eigenvectors
    amps = X @ E.conj()
    w = np.abs(amps) ** 2
    w /= w.sum(axis=1, keepdims=True)
    cdf = np.cumsum(w, axis=1)
    u = rng.random(r)
    idx = np.minimum((cdf < u[:, None]).sum(axis=1), U.dim - 1)
    est = U.eigenphases[idx].copy()
    if cfg.jitter:
        est = est + rng.uniform(-delta, delta, size=r)
    if cfg.noisy:
        bad = rng.random(r) < cfg.corruption_probability
        est[bad] = rng.uniform(0.0, TWO_PI, size=int(bad.sum()))
    est = wrap_phase(est)
    if U.flagged is not None:
        est[U.flagged[idx]] = np.nan
    gid = U.group_ids
    keep = gid[None, :] == gid[idx][:, None]
    post = (amps * keep) @ E.T
    post /= np.linalg.norm(post, axis=1, keepdims=True)
    if ledger is not None:
        ledger.charge("pe", _cost(delta, cfg), calls=r)
    return est, idx, post


def pe(U: SpectralOperator, delta: float, state, cfg: OracleConfig = IDEAL,
       ledger: Optional[CostLedger] = None, rng=None):
    """Phase estimation oracle at resolution ``delta``.

    Samples an eigenphase by the Born rule, collapses ``state`` onto its
    eigenspace and reports the phase perturbed uniformly within ``delta``
    (``None`` for flagged eigenvectors). Eigenstate inputs come back unchanged.
    """
    est, _, post = pe_many(U, delta, np.asarray(state)[None, :], cfg, ledger, rng)
    e = float(est[0])
    return (None if np.isnan(e) else e), post[0]


def pe_reverse(U: SpectralOperator, delta: float, state, cfg: OracleConfig = IDEAL,
               ledger: Optional[CostLedger] = None, calls: int = 1):
    """Uncompute a phase estimation instance.

    The oracle is U-controlled, so on a state left in a single eigenspace by the
    forward instance the system register is returned unchanged and only the
    phase register is cleared.
    """
    if ledger is not None:
        ledger.charge("pe_reverse", _cost(delta, cfg), calls=calls)
    return state


# ---------------------------------------------------------------------------
# phase detection and reflection
# ---------------------------------------------------------------------------

def detection_probabilities(U: SpectralOperator, phi0: float, delta: float,
                            cfg: OracleConfig = IDEAL) -> np.ndarray:
    """P(bit = 1) per eigenvector for PD(U, phi0, delta).

    Built from PE at resolution delta/4 followed by the threshold
    |estimate - phi0| <= delta/2, so the probability ramps linearly across the
    band between delta/4 and 3 delta/4.
    """
    d = phase_distance(U.eigenphases, phi0)
    if cfg.jitter:
        p1 = np.clip((0.75 * delta - d) / (0.5 * delta), 0.0, 1.0)
    else:
        p1 = (d <= 0.5 * delta).astype(float)
    if U.flagged is not None:
        p1 = np.where(U.flagged, 0.0, p1)
    return p1


def pd(U: SpectralOperator, phi0: float, delta: float, state, cfg: OracleConfig = IDEAL,
       ledger: Optional[CostLedger] = None, rng=None):
    """Phase detection oracle: bit 1 iff the eigenphase is within delta/4 of phi0.

    Returns ``(bit, post_state)``. Because the inner PE instance is reversed, the
    state is only projected by the Kraus operator of the observed bit.
    """
    p1 = detection_probabilities(U, phi0, delta, cfg)
    E = U.eigenvectors
    amps = E.conj().T @ state
    w = np.abs(amps) ** 2
    prob1 = float(np.clip(np.dot(w, p1), 0.0, 1.0))
    bit = int(rng.random() < prob1)
    kraus = np.sqrt(p1 if bit else 1.0 - p1)
    post = E @ (kraus * amps)
    nrm = np.linalg.norm(post)
    if nrm < 1e-14:
        raise NumericalInconsistencyError("phase detection branch has zero norm")
    if cfg.noisy and rng.random() < cfg.corruption_probability:
        bit = 1 - bit
    if ledger is not None:
        ledger.charge("pd", _cost(delta, cfg))
    return bit, post / nrm


def reflection_signs(U: SpectralOperator, phi0: float, delta: float) -> np.ndarray:
    """-1 within delta/4 of phi0, +1 beyond 3 delta/4, nearest threshold in between."""
    d = phase_distance(U.eigenphases, phi0)
    signs = np.where(d < 0.5 * delta, -1.0, 1.0)
    if U.flagged is not None:
        signs = np.where(U.flagged, 1.0, signs)
    return signs


def reflection_matrix(U: SpectralOperator, phi0: float, delta: float) -> np.ndarray:
    E = U.eigenvectors
    return (E * reflection_signs(U, phi0, delta)) @ E.conj().T


def reflect(U: SpectralOperator, phi0: float, delta: float, state, cfg: OracleConfig = IDEAL,
            ledger: Optional[CostLedger] = None, rng=None):
    """Reflection oracle R(U, phi0, delta). Noisy mode skips the reflection with probability eps^2."""
    if ledger is not None:
        ledger.charge("reflect", _cost(delta, cfg))
        ledger.add_reflections()
    if cfg.noisy and rng is not None and rng.random() < cfg.corruption_probability:
        return np.array(state, dtype=complex)
    return reflection_matrix(U, phi0, delta) @ state


# ---------------------------------------------------------------------------
# overlap detection
# ---------------------------------------------------------------------------

class SpanError(ValueError):
    """State left the two-dimensional span a procedure works in."""


def span_residual(state, a, b) -> float:
    """Norm of the component of ``state`` outside span{a, b}."""
    Q, _ = np.linalg.qr(np.column_stack([a, b]))
    if abs(abs(np.vdot(a, b)) - 1.0) < 1e-12:
        Q = Q[:, :1]
    return float(np.linalg.norm(state - Q @ (Q.conj().T @ state)))


def ov(psi, phi, alpha: float, delta: float, state, cfg: OracleConfig = IDEAL,
       ledger: Optional[CostLedger] = None, rng=None, span_tol: float = 1e-10):
    """Overlap detection oracle OV(psi, phi, alpha, delta).

    Phase estimation at resolution 2 delta on R_psi R_phi, whose eigenphases on
    span{psi, phi} are +-2 arccos|<psi|phi>|, thresholded at |phase| <= 2 alpha
    and reversed. Both eigenphases have the same modulus, so the observed bit
    carries no which-eigenvector information and the state comes back intact.
    ``psi`` and ``phi`` may be vectors or :class:`Reflector` objects.
    """
    a = getattr(psi, "target", psi)
    b = getattr(phi, "target", phi)
    if span_residual(state, a, b) > span_tol:
        raise SpanError("overlap oracle called outside span{psi, phi}")
    theta = float(np.arccos(min(1.0, abs(np.vdot(a, b)))))
    if cfg.jitter:
        p1 = float(np.clip((2 * alpha - 2 * theta + 2 * delta) / (4 * delta), 0.0, 1.0))
    else:
        p1 = 1.0 if theta <= alpha else 0.0
    bit = int(rng.random() < p1)
    if cfg.noisy and rng.random() < cfg.corruption_probability:
        bit = 1 - bit
    if ledger is not None:
        ledger.charge("ov", _cost(delta, cfg))
    return bit, np.array(state, dtype=complex)


# ---------------------------------------------------------------------------
# reflections used by the transformation procedures
# ---------------------------------------------------------------------------

def _ancilla_unitary(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    return np.array([[a[0], -np.conj(a[1])], [a[1], np.conj(a[0])]])


class Reflector:
    """A reflection about one state, usable as a gate or as a two-outcome measurement.

    ``matrix`` is the reflection as realized (exactly, or through the reflection
    oracle of a spectral operator). Every application or measurement counts as
    one reflection and is charged ``cost`` unitary applications.
    """

    def __init__(self, matrix: np.ndarray, target: Optional[np.ndarray] = None, cost: int = 0,
                 cfg: OracleConfig = IDEAL, kind: str = "reflect"):
        self.matrix = np.asarray(matrix, dtype=complex)
        self.projector = 0.5 * (np.eye(self.matrix.shape[0]) - self.matrix)
        self.target = target
        self.cost = cost
        self.cfg = cfg
        self.kind = kind

    @classmethod
    def exact(cls, psi) -> "Reflector":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.eye(psi.size) - 2.0 * np.outer(psi, psi.conj()), target=psi, kind="exact")

    @classmethod
    def from_oracle(cls, U: SpectralOperator, anchor: float, delta: float,
                    cfg: OracleConfig = IDEAL, target=None) -> "Reflector":
        """R(U, anchor, delta); the target defaults to the eigenvector nearest the anchor."""
        if target is None:
            k = int(np.argmin(phase_distance(U.eigenphases, anchor)))
            target = U.eigenvectors[:, k]
        return cls(reflection_matrix(U, anchor, delta), target=np.asarray(target, dtype=complex),
                   cost=_cost(delta, cfg), cfg=cfg, kind="reflect")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def extend(self, ancilla) -> "Reflector":
        """Reflection about |target>|ancilla>, built from the reflection controlled on the ancilla."""
        A = _ancilla_unitary(ancilla)
        d = self.dim
        P0 = np.diag([1.0, 0.0])
        P1 = np.diag([0.0, 1.0])
        ctrl = np.kron(self.matrix, P0) + np.kron(np.eye(d), P1)
        IA = np.kron(np.eye(d), A)
        mat = IA @ ctrl @ IA.conj().T
        tgt = None if self.target is None else np.kron(self.target, np.asarray(ancilla, dtype=complex))
        return Reflector(mat, target=tgt, cost=self.cost, cfg=self.cfg, kind=self.kind)

    def _charge(self, ledger, n=1):
        if ledger is not None:
            ledger.add_reflections(n)
            if self.kind != "exact":
                ledger.charge(self.kind, self.cost, calls=n)

    def apply(self, x, ledger=None, rng=None):
        self._charge(ledger)
        if self.cfg.noisy and rng is not None and rng.random() < self.cfg.corruption_probability:
            return x
        return self.matrix @ x

    def measure(self, x, ledger=None, rng=None):
        """Project onto the target (bit 1) or its orthogonal complement (bit 0)."""
        self._charge(ledger)
        inside = self.projector @ x
        p1 = float(np.real(np.vdot(inside, inside)))
        bit = int(rng.random() < p1)
        post = inside if bit else x - inside
        nrm = math.sqrt(p1 if bit else max(0.0, 1.0 - p1))
        if nrm < 1e-12:
            post_n = np.linalg.norm(post)
            if post_n < 1e-14:
                raise NumericalInconsistencyError("measurement branch has zero norm")
            nrm = post_n
        if self.cfg.noisy and rng.random() < self.cfg.corruption_probability:
            bit = 1 - bit
        return bit, post / nrm

    def apply_many(self, X, ledger=None, rng=None):
        """Row-wise application to a stack of states."""
        X = np.atleast_2d(X)
        self._charge(ledger, X.shape[0])
        out = X @ self.matrix.T
        if self.cfg.noisy and rng is not None:
            skip = rng.random(X.shape[0]) < self.cfg.corruption_probability
            out[skip] = X[skip]
        return out

    def measure_many(self, X, ledger=None, rng=None):
        """Row-wise measurement of a stack of states."""
        X = np.atleast_2d(X)
        self._charge(ledger, X.shape[0])
        inside = X @ self.projector.T
        p1 = np.real(np.sum(inside.conj() * inside, axis=1))
        bits = rng.random(X.shape[0]) < p1
        post = np.where(bits[:, None], inside, X - inside)
        post /= np.linalg.norm(post, axis=1, keepdims=True)
        if self.cfg.noisy:
            bits ^= rng.random(X.shape[0]) < self.cfg.corruption_probability
        return bits.astype(int), post

    def check_unitary(self, tol: float = UNITARY_TOL) -> bool:
        M = self.matrix
        return bool(np.max(np.abs(M.conj().T @ M - np.eye(self.dim))) <= tol)
