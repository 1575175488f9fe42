"""Path-level traversal: fixed checkpoints, parallel copies, and binary-interval-tree recursion."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .core import EigenPath, angular_distance, fidelity, phase_distance
from .multicopy import transform_tp, transform_tpx
from .onestep import transform_t, transform_tm, transform_tmx_prime
from .oracles import IDEAL, CostLedger, OracleConfig, Reflector, ov, pe

DEPTH_CAP = 40


class DepthCapError(RuntimeError):
    """Binary subdivision went deeper than allowed."""


@dataclass
class IntervalRecord:
    c: float
    d: float
    depth: int
    outcome: str
    reflections: int


@dataclass
class TraversalReport:
    """Outcome of one traversal. ``reflections`` is the sum over ``intervals``."""

    success: bool
    final_state: Optional[np.ndarray]
    final_fidelity: float
    reflections: int
    pe_calls: int
    intervals: List[IntervalRecord] = field(default_factory=list)
    anchors: List[float] = field(default_factory=list)
    ledger: dict = field(default_factory=dict)
    seed: Optional[int] = None

    @property
    def attempted(self) -> int:
        return len(self.intervals)


def _finish(path, success, state, records, ledger, anchors=(), seed=None) -> TraversalReport:
    target = path.state(1.0)
    if state is None:
        fid = 0.0
    elif np.ndim(state) == 2:
        fid = float(min(fidelity(row, target) for row in state))
    else:
        fid = fidelity(state, target)
    return TraversalReport(
        success=success, final_state=state, final_fidelity=fid,
        reflections=sum(rec.reflections for rec in records), pe_calls=ledger.pe_calls,
        intervals=records, anchors=list(anchors), ledger=ledger.snapshot(), seed=seed)


def oracle_reflector(path: EigenPath, s: float, anchor: Optional[float] = None,
                     cfg: OracleConfig = IDEAL) -> Reflector:
    """Reflection oracle R(U_s, anchor, gap_s) about the tracked state (anchor defaults to the true phase)."""
    return Reflector.from_oracle(path.operator(s), path.phase(s) if anchor is None else anchor,
                                 path.gap(s), cfg, target=path.state(s))


# ---------------------------------------------------------------------------
# fixed checkpoints
# ---------------------------------------------------------------------------

def greedy_checkpoints(path: EigenPath, min_overlap: float, grid_size: int = 2001) -> np.ndarray:
    """Checkpoints on a uniform grid, each the furthest point keeping overlap >= ``min_overlap``."""
    grid = np.linspace(0.0, 1.0, grid_size)
    states = np.array([path.state(s) for s in grid])
    out = [0]
    while out[-1] < grid_size - 1:
        ov_probs = np.abs(states[out[-1] + 1:] @ states[out[-1]].conj()) ** 2
        ok = np.flatnonzero(ov_probs >= min_overlap)
        if ok.size == 0 or ok[0] != 0:
            raise ValueError("grid too coarse for the requested overlap")
        # furthest point such that every point before it also qualifies
        run = np.flatnonzero(np.diff(ok) != 1)
        last = ok[run[0]] if run.size else ok[-1]
        out.append(out[-1] + 1 + int(last))
    return grid[out]


def segment_overlaps(path: EigenPath, checkpoints: Sequence[float]) -> np.ndarray:
    states = [path.state(s) for s in checkpoints]
    return np.array([abs(np.vdot(a, b)) ** 2 for a, b in zip(states[:-1], states[1:])])


def checkpoint_reflectors(path: EigenPath, checkpoints: Sequence[float], anchors=None,
                          cfg: OracleConfig = IDEAL) -> List[Reflector]:
    anchors = [None] * len(checkpoints) if anchors is None else anchors
    return [oracle_reflector(path, s, a, cfg) for s, a in zip(checkpoints, anchors)]


def traverse_known(path: EigenPath, checkpoints: Sequence[float], anchors=None, cfg: OracleConfig = IDEAL,
                   ledger: Optional[CostLedger] = None, rng=None, reflectors=None,
                   check_preconditions: bool = False) -> TraversalReport:
    """Move psi_0 to psi_1 with one overlap-suppressed T per checkpoint segment.

    Needs overlaps >= 1/3 between consecutive checkpoints and anchors within
    gap/4 of the true phases; ``check_preconditions`` verifies both.
    """
    ledger = CostLedger() if ledger is None else ledger
    cps = list(checkpoints)
    if check_preconditions:
        if np.any(segment_overlaps(path, cps) < 1.0 / 3.0 - 1e-12):
            raise ValueError("checkpoint overlap below 1/3")
        if anchors is not None:
            for s, a in zip(cps, anchors):
                if phase_distance(a, path.phase(s)) > path.gap(s) / 4.0:
                    raise ValueError(f"anchor at s={s} is off by more than gap/4")
    refs = reflectors if reflectors is not None else checkpoint_reflectors(path, cps, anchors, cfg)
    x = path.state(cps[0])
    records = []
    for k in range(len(cps) - 1):
        out = transform_tm(refs[k], refs[k + 1], ledger, rng, state=x)
        x = out.state
        records.append(IntervalRecord(cps[k], cps[k + 1], 0, "1", out.n))
    return _finish(path, True, x, records, ledger)


def initial_anchor(path: EigenPath, cfg: OracleConfig, ledger, rng) -> float:
    """One PE call at resolution gap/4 on psi_0."""
    est, _ = pe(path.operator(0.0), path.gap(0.0) / 4.0, path.state(0.0), cfg, ledger, rng)
    return est


def traverse_parallel(path: EigenPath, checkpoints: Sequence[float], r: int, gamma: float,
                      cfg: OracleConfig = IDEAL, ledger: Optional[CostLedger] = None, rng=None) -> TraversalReport:
    """Move r copies along the checkpoints with T_p, recovering an anchor at every checkpoint."""
    ledger = CostLedger() if ledger is None else ledger
    cps = list(checkpoints)
    anchors = [initial_anchor(path, cfg, ledger, rng)]
    X = np.tile(path.state(cps[0]), (r, 1))
    records = []
    for k in range(1, len(cps)):
        psi_ref = oracle_reflector(path, cps[k - 1], anchors[-1], cfg)
        out = transform_tp(psi_ref, path.operator(cps[k]), path.gap(cps[k]), gamma, X, cfg, ledger, rng)
        records.append(IntervalRecord(cps[k - 1], cps[k], 0, "1" if out.success else "fail", out.n))
        if not out.success:
            return _finish(path, False, None, records, ledger, anchors)
        X = out.copies
        anchors.append(out.reported_phase)
    return _finish(path, True, X, records, ledger, anchors)


# ---------------------------------------------------------------------------
# checkpoint reduction
# ---------------------------------------------------------------------------

@dataclass
class Checkpoints:
    s: np.ndarray
    angles: np.ndarray
    ov_calls: int
    reflections: int
    restorations: int

    @property
    def length(self) -> float:
        return float(self.angles.sum())


def reduce_checkpoints(path: EigenPath, trace: Sequence[float], theta: float, theta_lo: float,
                       theta_hi: float, cfg: OracleConfig = IDEAL, ledger: Optional[CostLedger] = None,
                       rng=None) -> Checkpoints:
    """Thin a traversal trace 0 = t_0 < ... < t_n = 1 to checkpoints with controlled spacing.

    After each step an overlap oracle compares the current state with the
    last kept checkpoint; the step is kept when the oracle reports an angle
    that is not small, or when the follow-up psi-measurement shows the state
    was disturbed (in which case T restores it).
    """
    if not (0 < theta_lo < theta_hi < theta_lo + theta < np.pi / 2):
        raise ValueError("need 0 < theta_lo < theta_hi < theta_lo + theta < pi/2")
    ts = list(trace)
    states = [path.state(t) for t in ts]
    for a, b in zip(states[:-1], states[1:]):
        if angular_distance(a, b) >= theta:
            raise ValueError("trace step not shorter than theta")
    ledger = CostLedger() if ledger is None else ledger
    alpha = 0.5 * (theta_hi + theta_lo)
    half = 0.5 * (theta_hi - theta_lo)
    kept = [0]
    calls = refl = restores = 0
    for l in range(1, len(ts)):
        if l == len(ts) - 1:
            kept.append(l)
            break
        cur, last = states[l], states[kept[-1]]
        bit, x = ov(cur, last, alpha, half, cur, cfg, ledger, rng)
        here = Reflector.exact(cur)
        same, x = here.measure(x, ledger, rng)
        calls += 1
        refl += 1
        if same == 0 or bit == 0:
            if same == 0:
                transform_t(x, last, cur, ledger, rng)
                restores += 1
            kept.append(l)
    s = np.array([ts[i] for i in kept])
    angles = np.array([angular_distance(states[i], states[j]) for i, j in zip(kept[:-1], kept[1:])])
    return Checkpoints(s, angles, calls, refl, restores)


# ---------------------------------------------------------------------------
# binary interval tree
# ---------------------------------------------------------------------------

@dataclass
class BitNode:
    c: float
    d: float
    depth: int
    status: str = "pending"


def enumerate_bit(a: float, b: float, terminate: Callable[[float, float], bool],
                  depth_cap: int = DEPTH_CAP) -> List[BitNode]:
    """Depth-first nodes of the binary interval tree, splitting only where ``terminate`` declines."""
    if not a < b:
        raise ValueError("need a < b")
    nodes = []

    def visit(c, d, depth):
        if depth > depth_cap:
            raise DepthCapError(f"subdivision deeper than {depth_cap}")
        node = BitNode(c, d, depth)
        nodes.append(node)
        if terminate(c, d):
            node.status = "succeeded"
            return
        node.status = "subdivided"
        m = 0.5 * (c + d)
        visit(c, m, depth + 1)
        visit(m, d, depth + 1)

    visit(a, b, 0)
    return nodes


def attempted_interval_bound(length: float, v_max: float, v_avg: float, theta: float) -> float:
    """2 L (log2(v_max / v_avg) + 3) / theta + 1."""
    return 2.0 * length * (np.log2(v_max / v_avg) + 3.0) / theta + 1.0


def overlap_free_bound(length: float, v_max: float, v_avg: float) -> float:
    """40 L (log2(v_max / v_avg) + 3) / theta + 10 with theta = arccos(sqrt(1/3))."""
    theta = float(np.arccos(np.sqrt(1.0 / 3.0)))
    return 40.0 * length * (np.log2(v_max / v_avg) + 3.0) / theta + 10.0


def traverse_recursive_dominant(path: EigenPath, delta: float, gamma: float, r: int,
                                cfg: OracleConfig = IDEAL, ledger: Optional[CostLedger] = None, rng=None,
                                depth_cap: int = DEPTH_CAP) -> TraversalReport:
    """Move r copies along the path with T_px, splitting every interval where it declines.

    Each success reports the phase at the interval's right end, which anchors
    the reflections of the next attempt.
    """
    ledger = CostLedger() if ledger is None else ledger
    anchor = initial_anchor(path, cfg, ledger, rng)
    state = {"X": np.tile(path.state(0.0), (r, 1)), "anchor": anchor, "ok": True}
    records: List[IntervalRecord] = []
    anchors = [anchor]

    def visit(c, d, depth):
        if not state["ok"]:
            return
        if depth > depth_cap:
            raise DepthCapError(f"subdivision deeper than {depth_cap}")
        psi_ref = oracle_reflector(path, c, state["anchor"], cfg)
        out = transform_tpx(psi_ref, path.operator(d), path.gap(d), delta, gamma, state["X"], cfg, ledger, rng)
        if out.flag == "1":
            records.append(IntervalRecord(c, d, depth, "1", out.n))
            state["X"] = out.copies
            state["anchor"] = out.reported_phase
            anchors.append(out.reported_phase)
            return
        if out.flag != "#":
            records.append(IntervalRecord(c, d, depth, "fail", out.n))
            state["ok"] = False
            return
        records.append(IntervalRecord(c, d, depth, "#", out.n))
        state["X"] = out.copies
        m = 0.5 * (c + d)
        visit(c, m, depth + 1)
        visit(m, d, depth + 1)

    visit(0.0, 1.0, 0)
    return _finish(path, state["ok"], state["X"] if state["ok"] else None, records, ledger, anchors)


def traverse_recursive_overlap_free(path: EigenPath, anchors: Optional[Callable[[float], float]] = None,
                                    cfg: OracleConfig = IDEAL, ledger: Optional[CostLedger] = None, rng=None,
                                    depth_cap: int = DEPTH_CAP) -> TraversalReport:
    """Move one copy along the path with overlap-suppressed T'_x, splitting an interval when it fails.

    ``anchors`` maps s to a phase within gap/4 of the tracked eigenphase
    (the true phase by default).
    """
    ledger = CostLedger() if ledger is None else ledger
    anchor = anchors if anchors is not None else path.phase
    records: List[IntervalRecord] = []
    refs = {}

    def ref(s):
        if s not in refs:
            refs[s] = oracle_reflector(path, s, anchor(s), cfg)
        return refs[s]

    x = path.state(0.0)

    def visit(c, d, depth):
        nonlocal x
        if depth > depth_cap:
            raise DepthCapError(f"subdivision deeper than {depth_cap}")
        out = transform_tmx_prime(ref(c), ref(d), ledger, rng, state=x)
        x = out.state
        records.append(IntervalRecord(c, d, depth, out.flag, out.n))
        if out.success:
            return
        m = 0.5 * (c + d)
        visit(c, m, depth + 1)
        visit(m, d, depth + 1)

    visit(0.0, 1.0, 0)
    return _finish(path, True, x, records, ledger)
