"""Single-copy state transformations built from reflections and measurements.

Every procedure here moves a state from |psi> towards |phi> inside the plane
they span. A "psi-measurement" is the two-outcome measurement realized by a
controlled reflection about |psi>; it counts as one reflection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import NumericalInconsistencyError
from .oracles import CostLedger, OracleConfig, IDEAL, Reflector, SpanError, ov, span_residual

#: ancilla state used by the overlap-suppression trick; maps p to 3p/4
SUPPRESSION_ANCILLA = np.array([np.sqrt(0.75), 0.5])
ANCILLA_ZERO = np.array([1.0, 0.0])

#: OV parameters separating p > 1/2 from p < 1/3
TX_ALPHA = 0.5 * (np.arccos(np.sqrt(1.0 / 3.0)) + np.pi / 4.0)
TX_DELTA = 0.5 * (np.arccos(np.sqrt(1.0 / 3.0)) - np.pi / 4.0)

MAX_ROUNDS = 100_000


@dataclass
class AttemptOutcome:
    """Result of one transformation attempt.

    ``n`` counts reflections about either state, measurements included.
    ``flag`` is "1" when the state was moved to the target, "0" when it was
    left at the source and "#" when a multi-copy procedure declined.
    """

    success: bool
    n: int
    state: np.ndarray
    reported_phase: Optional[float] = None
    flag: Optional[str] = None


def as_reflector(x) -> Reflector:
    return x if isinstance(x, Reflector) else Reflector.exact(x)


def extended_pair(psi, phi):
    """Reflectors about psi (x) a and phi (x) |0> for the suppression ancilla a."""
    return as_reflector(psi).extend(SUPPRESSION_ANCILLA), as_reflector(phi).extend(ANCILLA_ZERO)


def drop_ancilla(x: np.ndarray, branch: int = 0) -> np.ndarray:
    """Discard a trailing qubit that is known to be in a product state."""
    cols = x.reshape(-1, 2)
    v = cols[:, branch]
    nrm = np.linalg.norm(v)
    if nrm < 1e-12:
        # the kept branch is empty, so the product factor sits on the other one
        v = cols[:, 1 - branch]
        nrm = np.linalg.norm(v)
    return v / nrm


def _check_span(state, psi_ref, phi_ref, tol=1e-10):
    if psi_ref.target is None or phi_ref.target is None:
        return
    if span_residual(state, psi_ref.target, phi_ref.target) > tol:
        raise SpanError("state is not in span{psi, phi}")


def rt_attempt(psi_ref, phi_ref, state, ledger: Optional[CostLedger] = None, rng=None,
               check_span: bool = True):
    """Reflect about psi, then measure phi. Returns ``(bit, post)``; two reflections."""
    psi_ref, phi_ref = as_reflector(psi_ref), as_reflector(phi_ref)
    if check_span:
        _check_span(state, psi_ref, phi_ref)
    x = psi_ref.apply(state, ledger, rng)
    return phi_ref.measure(x, ledger, rng)


def transform_t(state, psi_ref, phi_ref, ledger: Optional[CostLedger] = None, rng=None,
                max_rounds: int = MAX_ROUNDS) -> AttemptOutcome:
    """Move ``state`` (in the psi/phi plane) to phi.

    One phi-measurement, then repeated reflect-and-measure rounds until phi is
    seen.
    """
    psi_ref, phi_ref = as_reflector(psi_ref), as_reflector(phi_ref)
    bit, x = phi_ref.measure(state, ledger, rng)
    n = 1
    rounds = 0
    while not bit:
        if rounds >= max_rounds:
            raise NumericalInconsistencyError("transformation did not terminate")
        x = psi_ref.apply(x, ledger, rng)
        bit, x = phi_ref.measure(x, ledger, rng)
        n += 2
        rounds += 1
    return AttemptOutcome(True, n, x, flag="1")


def transform_t_many(X, psi_ref: Reflector, phi_ref: Reflector, ledger: Optional[CostLedger] = None,
                     rng=None, max_rounds: int = MAX_ROUNDS):
    """Run :func:`transform_t` independently on every row of ``X``.

    Returns ``(counts, post)`` where ``counts`` holds the reflections used per row.
    """
    X = np.array(np.atleast_2d(X), dtype=complex)
    counts = np.zeros(X.shape[0], dtype=np.int64)
    if X.shape[0] == 0:
        return counts, X
    bits, X = phi_ref.measure_many(X, ledger, rng)
    counts += 1
    active = np.flatnonzero(bits == 0)
    rounds = 0
    while active.size:
        if rounds >= max_rounds:
            raise NumericalInconsistencyError("transformation did not terminate")
        Y = psi_ref.apply_many(X[active], ledger, rng)
        b, Y = phi_ref.measure_many(Y, ledger, rng)
        X[active] = Y
        counts[active] += 2
        active = active[b == 0]
        rounds += 1
    return counts, X


def transform_tm(psi_ref, phi_ref, ledger: Optional[CostLedger] = None, rng=None,
                 state=None) -> AttemptOutcome:
    """T with the overlap-suppression ancilla; needs p >= 1/3 for its cost guarantees."""
    psi_ref, phi_ref = as_reflector(psi_ref), as_reflector(phi_ref)
    start = psi_ref.target if state is None else state
    psi_x, phi_x = extended_pair(psi_ref, phi_ref)
    out = transform_t(np.kron(start, SUPPRESSION_ANCILLA), psi_x, phi_x, ledger, rng)
    out.state = drop_ancilla(out.state, 0)
    return out


def transform_tx(psi_ref, phi_ref, ledger: Optional[CostLedger] = None, rng=None,
                 cfg: OracleConfig = IDEAL) -> AttemptOutcome:
    """Transform psi to phi only when the overlap is large enough.

    One overlap-oracle call decides between p > 1/2 and p < 1/3, then a
    psi-measurement. The state is moved to phi (flag "1") if the oracle said
    "large" or if the measurement found psi-perp; otherwise it stays at psi
    (flag "0").
    """
    psi_ref, phi_ref = as_reflector(psi_ref), as_reflector(phi_ref)
    x = psi_ref.target
    b, x = ov(psi_ref, phi_ref, TX_ALPHA, TX_DELTA, x, cfg, ledger, rng)
    m, x = psi_ref.measure(x, ledger, rng)
    n = 1
    if m == 1 and b == 0:
        return AttemptOutcome(False, n, x, flag="0")
    if m == 1:
        out = transform_tm(psi_ref, phi_ref, ledger, rng, state=x)
    else:
        # psi-perp lies in the plane already, so plain T finishes the job
        out = transform_t(x, psi_ref, phi_ref, ledger, rng)
    return AttemptOutcome(True, n + out.n, out.state, flag="1")


def transform_tx_prime(psi_ref, phi_ref, ledger: Optional[CostLedger] = None, rng=None,
                       state=None, max_rounds: int = MAX_ROUNDS) -> AttemptOutcome:
    """Bounded-effort transformation with a success flag.

    A phi-measurement and at most two reflect-and-measure rounds; if phi has not
    appeared, alternate psi- and phi-measurements until one of them fires.
    Success (flag "1") leaves phi, failure (flag "0") leaves psi.
    """
    psi_ref, phi_ref = as_reflector(psi_ref), as_reflector(phi_ref)
    x = psi_ref.target if state is None else state
    bit, x = phi_ref.measure(x, ledger, rng)
    n = 1
    for _ in range(2):
        if bit:
            return AttemptOutcome(True, n, x, flag="1")
        x = psi_ref.apply(x, ledger, rng)
        bit, x = phi_ref.measure(x, ledger, rng)
        n += 2
    if bit:
        return AttemptOutcome(True, n, x, flag="1")
    for _ in range(max_rounds):
        bit, x = psi_ref.measure(x, ledger, rng)
        n += 1
        if bit:
            return AttemptOutcome(False, n, x, flag="0")
        bit, x = phi_ref.measure(x, ledger, rng)
        n += 1
        if bit:
            return AttemptOutcome(True, n, x, flag="1")
    raise NumericalInconsistencyError("alternating measurements did not terminate")


def transform_tmx_prime(psi_ref, phi_ref, ledger: Optional[CostLedger] = None, rng=None,
                        state=None) -> AttemptOutcome:
    """:func:`transform_tx_prime` on the ancilla-extended pair (effective overlap 3p/4)."""
    psi_ref, phi_ref = as_reflector(psi_ref), as_reflector(phi_ref)
    start = psi_ref.target if state is None else state
    psi_x, phi_x = extended_pair(psi_ref, phi_ref)
    out = transform_tx_prime(psi_x, phi_x, ledger, rng, state=np.kron(start, SUPPRESSION_ANCILLA))
    out.state = drop_ancilla(out.state, 0)
    return out


# closed forms used for reporting and bounds

def t_mean_reflections(p: float, p0: float) -> float:
    """Expected reflections of T: p0 + (1 - p0)(1 + 1/(2pq))."""
    if p0 >= 1.0:
        return 1.0
    return p0 + (1.0 - p0) * (1.0 + 1.0 / (2.0 * p * (1.0 - p)))


def t_gamma_moment(p: float, p0: float, gamma: float) -> float:
    """<gamma^n> for T, valid for gamma < 1/|p - q|."""
    q = 1.0 - p
    inner = 4 * p * q * gamma ** 2 / (1.0 - (p - q) ** 2 * gamma ** 2)
    return gamma * (p0 + (1.0 - p0) * inner)


def tx_prime_success_probability(p: float) -> float:
    q = 1.0 - p
    return 1.0 - (1.0 - p) / (1.0 + p) * (q - p) ** 4
