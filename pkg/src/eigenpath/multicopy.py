"""Parallel transformations of r identical copies with on-the-fly eigenphase recovery.

Copies are held as the rows of an ``(r, d)`` array and evolve independently;
the only coupling is the classical post-processing of sampled phase
estimates (interval search, counting), which decides how each copy is
collapsed or restored when the phase estimations are undone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import SpectralOperator, TWO_PI, wrap_phase
from .oracles import IDEAL, CostLedger, OracleConfig, Reflector, pe_many, pe_reverse
from .onestep import ANCILLA_ZERO, SUPPRESSION_ANCILLA, transform_t_many

#: jitter points per eigenphase when integrating a window indicator over a PE outcome
_JITTER_POINTS = 64


@dataclass
class MultiCopyOutcome:
    """Result of a multi-copy procedure.

    ``labels`` marks the copies that ended (or were found) in the preferred
    state; ``j`` is their number.
    """

    success: bool
    n: int
    copies: np.ndarray
    reported_phase: Optional[float] = None
    flag: Optional[str] = None
    j: int = 0
    b: Optional[int] = None
    labels: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))


def suppressed_operator(V: SpectralOperator) -> SpectralOperator:
    """V (x) |0><0| + 1 (x) |1><1| with the |1> block flagged as the excluded subspace."""
    d = V.dim
    E = V.eigenvectors
    vecs = np.zeros((2 * d, 2 * d), dtype=complex)
    vecs[:, :d] = np.kron(E, ANCILLA_ZERO[:, None])
    vecs[:, d:] = np.kron(np.eye(d), np.array([[0.0], [1.0]]))
    phases = np.concatenate([V.eigenphases, np.zeros(d)])
    flagged = np.concatenate([np.zeros(d, dtype=bool), np.ones(d, dtype=bool)])
    return SpectralOperator.from_spectrum(phases, vecs, flagged=flagged)


def extend_copies(X: np.ndarray, ancilla=SUPPRESSION_ANCILLA) -> np.ndarray:
    X = np.atleast_2d(X)
    return np.einsum("ri,a->ria", X, np.asarray(ancilla, dtype=complex)).reshape(X.shape[0], -1)


def drop_ancilla_rows(X: np.ndarray) -> np.ndarray:
    """Discard the trailing qubit of each row, which must be in a product state."""
    Y = X.reshape(X.shape[0], -1, 2)
    n0 = np.linalg.norm(Y[:, :, 0], axis=1)
    out = np.where((n0 > 1e-12)[:, None], Y[:, :, 0], Y[:, :, 1])
    return out / np.linalg.norm(out, axis=1, keepdims=True)


# ---------------------------------------------------------------------------
# window arithmetic on the circle
# ---------------------------------------------------------------------------

def circular_window_search(samples: np.ndarray, width: float, threshold: float):
    """First window [x, x + width] (x a sample, scanned upwards) holding more than ``threshold`` samples.

    Returns ``(start, member_mask)`` or ``(None, None)``.
    """
    ok = ~np.isnan(samples)
    x = samples[ok]
    if x.size == 0:
        return None, None
    order = np.argsort(x)
    xs = x[order]
    ext = np.concatenate([xs, xs + TWO_PI])
    counts = np.searchsorted(ext, xs + width, side="right") - np.arange(xs.size)
    hits = np.flatnonzero(counts > threshold)
    if hits.size == 0:
        return None, None
    start = float(xs[hits[0]])
    mask = np.zeros(samples.size, dtype=bool)
    mask[ok] = wrap_phase(x - start) <= width
    return start, mask


def circular_median(values: np.ndarray, start: float) -> float:
    return float(wrap_phase(start + np.median(wrap_phase(values - start))))


def fraction_inside(centers, half_width: float, start: float, width: float, jitter: bool = True):
    """Fraction of the uniform estimate distribution around each center that lands in [start, start+width]."""
    centers = np.asarray(centers, dtype=float)
    if not jitter or half_width == 0.0:
        return (wrap_phase(centers - start) <= width).astype(float)
    lo = wrap_phase(centers - half_width - start)
    hi = lo + 2 * half_width
    first = np.clip(np.minimum(hi, width) - lo, 0.0, None)
    second = np.clip(np.minimum(hi, TWO_PI + width) - np.maximum(lo, TWO_PI), 0.0, None)
    return np.clip((first + second) / (2 * half_width), 0.0, 1.0)


def _kraus(X: np.ndarray, op: SpectralOperator, weights: np.ndarray) -> np.ndarray:
    """Apply sum_k sqrt(weights[..., k]) |e_k><e_k| to each row and renormalize."""
    E = op.eigenvectors
    amps = X @ E.conj()
    Y = (amps * np.sqrt(np.clip(weights, 0.0, 1.0))) @ E.T
    return Y / np.linalg.norm(Y, axis=1, keepdims=True)


def _with_noise(p_in: np.ndarray, coverage: float, cfg: OracleConfig) -> np.ndarray:
    eta = cfg.corruption_probability
    return (1.0 - eta) * p_in + eta * coverage


# ---------------------------------------------------------------------------
# ER: majority-window phase recovery
# ---------------------------------------------------------------------------

def er_parallel(V: SpectralOperator, gap: float, copies: np.ndarray, cfg: OracleConfig = IDEAL,
                ledger: Optional[CostLedger] = None, rng=None, gamma: Optional[float] = None) -> MultiCopyOutcome:
    """Estimate the dominant eigenphase from r copies and sort them into phi / phi-perp.

    PE(V, gap/5) on every copy; the first window of width 2 gap/5 holding more
    than r/2 estimates wins and its median is reported. Copies in the window
    stay collapsed on their eigenspace; the others have their phase estimation
    undone, which leaves them projected onto the eigenspaces whose estimates
    would have missed the window. ``gamma`` is only echoed for bookkeeping.
    """
    X = np.atleast_2d(np.asarray(copies, dtype=complex))
    r = X.shape[0]
    res = gap / 5.0
    width = 2.0 * res
    if r == 0:
        return MultiCopyOutcome(False, 0, X)
    est, idx, post = pe_many(V, res, X, cfg, ledger, rng)
    start, inside = circular_window_search(est, width, r / 2.0)
    if start is None:
        pe_reverse(V, res, X, cfg, ledger, calls=r)
        return MultiCopyOutcome(False, 0, X, j=0, labels=np.zeros(r, dtype=bool))
    phase = circular_median(est[inside], start)
    j = int(inside.sum())
    out = X.copy()
    out[inside] = post[inside]
    miss = ~inside
    if miss.any():
        p_in = fraction_inside(V.eigenphases, res, start, width, cfg.jitter)
        p_in = _with_noise(p_in, width / TWO_PI, cfg)
        if V.flagged is not None:
            p_in = np.where(V.flagged, 0.0, p_in)
        out[miss] = _kraus(X[miss], V, np.broadcast_to(1.0 - p_in, (int(miss.sum()), V.dim)))
        pe_reverse(V, res, out[miss], cfg, ledger, calls=int(miss.sum()))
    return MultiCopyOutcome(True, 0, out, reported_phase=phase, j=j, labels=inside)


def transform_tp(psi_ref: Reflector, V: SpectralOperator, gap: float, gamma: float, copies: np.ndarray,
                 cfg: OracleConfig = IDEAL, ledger: Optional[CostLedger] = None, rng=None,
                 extended: bool = False) -> MultiCopyOutcome:
    """Move r copies of psi to the tracked eigenvector of V and report its phase.

    The copies get the suppression ancilla (unless ``extended``), ER sorts
    them, and T finishes the ones labelled phi-perp using a reflection oracle
    anchored at the recovered phase. Returned copies have the ancilla removed.
    """
    X = np.atleast_2d(np.asarray(copies, dtype=complex))
    psi_x = psi_ref.extend(SUPPRESSION_ANCILLA) if not extended else psi_ref
    Xe = X if extended else extend_copies(X)
    Vx = suppressed_operator(V)
    er = er_parallel(Vx, gap, Xe, cfg, ledger, rng, gamma=gamma)
    if not er.success:
        return MultiCopyOutcome(False, 0, drop_ancilla_rows(er.copies), j=er.j, labels=er.labels)
    phi_x = Reflector.from_oracle(V, er.reported_phase, gap, cfg).extend(ANCILLA_ZERO)
    Y = er.copies
    pending = np.flatnonzero(~er.labels)
    counts, done = transform_t_many(Y[pending], psi_x, phi_x, ledger, rng)
    Y = Y.copy()
    Y[pending] = done
    return MultiCopyOutcome(True, int(counts.sum()), drop_ancilla_rows(Y), reported_phase=er.reported_phase,
                            flag="1", j=er.j, labels=er.labels)


# ---------------------------------------------------------------------------
# ER_x: threshold test for a dominant eigenphase
# ---------------------------------------------------------------------------

def interval_grid(step: float) -> np.ndarray:
    """Left ends of the intervals [(l-1) step, (l+1) step], l = 0 .. ceil(2 pi / step) - 1."""
    n = int(math.ceil(TWO_PI / step - 1e-12))
    return (np.arange(n) - 1) * step


def _membership(values: np.ndarray, lefts: np.ndarray, width: float) -> np.ndarray:
    ok = ~np.isnan(values)
    M = np.zeros((values.size, lefts.size), dtype=bool)
    M[ok] = wrap_phase(values[ok, None] - lefts[None, :]) <= width
    return M


def _jitter_grid(op: SpectralOperator, half_width: float, jitter: bool) -> np.ndarray:
    if not jitter:
        return op.eigenphases[:, None]
    u = (np.arange(_JITTER_POINTS) + 0.5) / _JITTER_POINTS
    return wrap_phase(op.eigenphases[:, None] + half_width * (2 * u[None, :] - 1))


def er_x(V: SpectralOperator, gap: float, delta: float, p_m: float, gamma: float, copies: np.ndarray,
         psi_ref: Reflector, cfg: OracleConfig = IDEAL, ledger: Optional[CostLedger] = None,
         rng=None) -> MultiCopyOutcome:
    """Decide whether some narrow interval holds a p_m-fraction of the phase weight.

    PE(V, d'/2) with d' = min(delta/2, gap/4) on every copy; ``b`` is 1 iff
    one of the intervals [(l-1)d', (l+1)d'] holds at least (p_m - gamma) r
    estimates. The estimations are then undone and every copy is
    psi-measured; ``labels`` marks the copies found in psi.

    Undoing the estimations restores a copy exactly unless its own estimate
    could have changed ``b`` given the others. Such a pivotal copy is
    projected onto the eigenspaces consistent with the observed ``b``.
    """
    X = np.atleast_2d(np.asarray(copies, dtype=complex))
    r = X.shape[0]
    step = min(delta / 2.0, gap / 4.0)
    res = step / 2.0
    width = 2.0 * step
    lefts = interval_grid(step)
    threshold = (p_m - gamma) * r
    est, _, _ = pe_many(V, res, X, cfg, ledger, rng)
    member = _membership(est, lefts, width)
    counts = member.sum(axis=0)
    b = int(np.any(counts >= threshold - 1e-9))
    # counts with each copy removed; pivotal when they sit one below the threshold
    without = counts[None, :] - member
    best = without.max(axis=1)
    pivotal = (best < threshold - 1e-9) & (best + 1 >= threshold - 1e-9)
    out = X.copy()
    if pivotal.any():
        grid = _jitter_grid(V, res, cfg.jitter)
        for i in np.flatnonzero(pivotal):
            hot = lefts[without[i] + 1 >= threshold - 1e-9]
            hit = _membership(grid.ravel(), hot, width).any(axis=1).reshape(grid.shape).mean(axis=1)
            coverage = min(1.0, hot.size * width / TWO_PI)
            p1 = _with_noise(hit, coverage, cfg)
            if V.flagged is not None:
                p1 = np.where(V.flagged, _with_noise(0.0, coverage, cfg), p1)
            w = p1 if b else 1.0 - p1
            out[i] = _kraus(X[i:i + 1], V, w[None, :])[0]
    pe_reverse(V, res, out, cfg, ledger, calls=r)
    bits, out = psi_ref.measure_many(out, ledger, rng)
    labels = bits.astype(bool)
    return MultiCopyOutcome(True, r, out, j=int(labels.sum()), b=b, labels=labels)


def transform_tpx(psi_ref: Reflector, V: SpectralOperator, gap: float, delta: float, gamma: float,
                  copies: np.ndarray, cfg: OracleConfig = IDEAL, ledger: Optional[CostLedger] = None,
                  rng=None) -> MultiCopyOutcome:
    """Transform r copies of psi to phi when the overlap is large, or decline with flag "#".

    ER_x on the suppressed copies decides. On "continue" the copies found in
    psi go through T_p and the psi-perp ones through T, both using the phase
    T_p recovers. On "#" the copies are returned in psi.
    """
    X = np.atleast_2d(np.asarray(copies, dtype=complex))
    r = X.shape[0]
    psi_x = psi_ref.extend(SUPPRESSION_ANCILLA)
    Vx = suppressed_operator(V)
    erx = er_x(Vx, gap, delta, 0.75 * (1.0 - gamma), 0.75 * gamma, extend_copies(X), psi_x, cfg, ledger, rng)
    n = erx.n
    if erx.b == 0 and erx.j == r:
        return MultiCopyOutcome(False, n, drop_ancilla_rows(erx.copies), flag="#", j=erx.j, b=0,
                                labels=erx.labels)
    Y = erx.copies.copy()
    keep = np.flatnonzero(erx.labels)
    tp = transform_tp(psi_x, V, gap, 0.75 * gamma, Y[keep], cfg, ledger, rng, extended=True) if keep.size else None
    if tp is None or not tp.success:
        return MultiCopyOutcome(False, n + (tp.n if tp else 0), drop_ancilla_rows(Y), j=erx.j, b=erx.b,
                                labels=erx.labels)
    n += tp.n
    phi_x = Reflector.from_oracle(V, tp.reported_phase, gap, cfg).extend(ANCILLA_ZERO)
    rest = np.flatnonzero(~erx.labels)
    counts, done = transform_t_many(Y[rest], psi_x, phi_x, ledger, rng)
    n += int(counts.sum())
    final = np.empty((r, V.dim), dtype=complex)
    final[keep] = tp.copies
    if rest.size:
        final[rest] = drop_ancilla_rows(done)
    return MultiCopyOutcome(True, n, final, reported_phase=tp.reported_phase, flag="1", j=erx.j, b=erx.b,
                            labels=erx.labels)


# ---------------------------------------------------------------------------
# dominance
# ---------------------------------------------------------------------------

def window_weights(phases: np.ndarray, weights: np.ndarray, lefts: np.ndarray, width: float) -> np.ndarray:
    inside = wrap_phase(phases[None, :] - lefts[:, None]) <= width + 1e-12
    return inside @ weights


def check_dominance(V: SpectralOperator, psi, gamma: float, delta: float, target_phase: float) -> bool:
    """True iff every window of half-width ``delta`` with weight above ``gamma`` contains ``target_phase``.

    Only windows whose left or right edge sits on an eigenphase need checking:
    any offending window can be slid onto one of those without dropping
    weight or picking up the target phase.
    """
    keep = np.ones(V.dim, dtype=bool) if V.flagged is None else ~V.flagged
    ph = V.eigenphases[keep]
    w = V.weights(psi)[keep]
    width = 2.0 * delta
    lefts = np.concatenate([ph, wrap_phase(ph - width)])
    mass = window_weights(ph, w, lefts, width)
    has_target = wrap_phase(target_phase - lefts) <= width + 1e-12
    return bool(not np.any((mass > gamma) & ~has_target))
