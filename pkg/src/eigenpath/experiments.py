"""Catalog of reproducible experiments.

Each experiment owns default parameters, a per-trial function and a
summary step that turns logged trial records into aggregates, bound
values and verdicts. Trial ``k`` of a run with master seed ``seed`` draws
from its own counter-based stream, so results do not depend on how trials
are spread over worker processes.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from . import analysis as an
from .core import PathRefinementError, fidelity, phase_distance, refine_path, velocity_profile
from .instances import overlap_instance
from .multicopy import check_dominance, er_parallel, er_x, transform_tp, transform_tpx
from .onestep import (
    t_gamma_moment, t_mean_reflections, transform_t, transform_tm, transform_tmx_prime, transform_tx,
    transform_tx_prime, tx_prime_success_probability, rt_attempt,
)
from .oracles import IDEAL, CostLedger, OracleConfig
from .paths import grover_hamiltonian, grover_path, great_circle_path, random_smooth_path, \
    speed_profile_path
from .stats import Verdict, check_eq, check_ge, check_le, check_moment, mean_se, proportion_se
from .traversal import (
    DepthCapError, attempted_interval_bound, checkpoint_reflectors, greedy_checkpoints, overlap_free_bound,
    reduce_checkpoints, segment_overlaps, traverse_known, traverse_parallel, traverse_recursive_dominant,
    traverse_recursive_overlap_free,
)

THREADS_ENV = "EIGENPATH_THREADS"
CSV_COLUMNS = ("trial_id", "n_reflections", "pe_calls", "success", "final_fidelity", "reported_phase_error")
FIDELITY_TOL = 1e-9

# stream ids keep the per-trial generators apart from auxiliary ones
TRIAL_STREAM = 0
SETUP_STREAM = 1


def trial_rng(seed: int, trial: int, stream: int = TRIAL_STREAM) -> np.random.Generator:
    """Philox generator keyed by the seed, with the trial and stream ids in the high counter words."""
    return np.random.Generator(np.random.Philox(key=int(seed), counter=[0, 0, int(trial), int(stream)]))


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    n = int(raw)
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer")
    return n


def record(n=0, pe_calls=0, success=True, fid=float("nan"), phase_err=float("nan"), **extra) -> dict:
    return {"n_reflections": int(n), "pe_calls": int(pe_calls), "success": bool(success),
            "final_fidelity": float(fid), "reported_phase_error": float(phase_err), "extra": extra}


@dataclass(frozen=True)
class Experiment:
    name: str
    anchor: str
    defaults: Dict[str, object]
    trial: Callable
    summarize: Callable
    setup: Callable = field(default=lambda params, cfg, seed: None)
    trials: int = 1000

    def describe(self) -> dict:
        return {"name": self.name, "anchor": self.anchor, "defaults": dict(self.defaults),
                "trials": self.trials}


@dataclass
class RunResult:
    experiment: str
    params: dict
    records: List[dict]
    aggregates: dict
    bounds: dict
    verdicts: List[Verdict]

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)


# ---------------------------------------------------------------------------
# helpers shared by summaries
# ---------------------------------------------------------------------------

def _col(records, key):
    return np.array([r[key] for r in records], dtype=float)


def _extra(records, key):
    return np.array([r["extra"][key] for r in records], dtype=float)


def _base_aggregates(records) -> dict:
    n = _col(records, "n_reflections")
    m, se = mean_se(n)
    fid = _col(records, "final_fidelity")
    pe = _col(records, "pe_calls")
    err = _col(records, "reported_phase_error")
    out = {"trials": len(records), "mean_n": m, "se_n": se,
           "success_rate": float(_col(records, "success").mean()) if records else float("nan"),
           "mean_pe_calls": float(pe.mean()) if records else float("nan")}
    if np.any(np.isfinite(fid)):
        out["min_final_fidelity"] = float(np.nanmin(fid))
    if np.any(np.isfinite(err)):
        out["max_reported_phase_error"] = float(np.nanmax(err))
    return out


def _rate_at_most(name, failures, trials, bound) -> Verdict:
    rate = failures / trials
    return check_le(name, rate, bound, stderr=proportion_se(failures, trials))


def _rate_at_least(name, successes, trials, bound) -> Verdict:
    rate = successes / trials
    return check_ge(name, rate, bound, stderr=proportion_se(successes, trials))


def _count_zero(name, count) -> Verdict:
    """Exact requirement: no violations at all."""
    return check_eq(name, float(count), 0.0, stderr=0.0)


def _pair(params, cfg):
    inst = overlap_instance(float(params["p"]), int(params.get("dim", 4)))
    return inst, inst.psi_reflector(cfg), inst.phi_reflector(cfg)


def _plane_state(inst, p0: float) -> np.ndarray:
    """State in span{psi, phi} with overlap p0 to phi."""
    perp = inst.psi - inst.phi * np.vdot(inst.phi, inst.psi)
    nrm = np.linalg.norm(perp)
    if nrm < 1e-12:
        return inst.phi.copy()
    perp = perp / nrm
    return math.sqrt(p0) * inst.phi + math.sqrt(max(1.0 - p0, 0.0)) * perp


# ---------------------------------------------------------------------------
# single-copy transformations
# ---------------------------------------------------------------------------

def _chain_setup(params, cfg, seed):
    inst, psi_ref, phi_ref = _pair(params, cfg)
    return {"inst": inst, "psi": psi_ref, "phi": phi_ref, "start": _plane_state(inst, 0.0)}


def _chain_trial(params, ctx, rng, cfg):
    led = CostLedger()
    bit, post = rt_attempt(ctx["psi"], ctx["phi"], ctx["start"], led, rng)
    return record(2, led.pe_calls, bool(bit), fidelity(post, ctx["inst"].phi) if bit else float("nan"))


def _chain_summary(params, records, ctx):
    p = float(params["p"])
    hits = int(_col(records, "success").sum())
    N = len(records)
    target = 4 * p * (1 - p)
    agg = _base_aggregates(records)
    agg["transition_rate"] = hits / N
    return agg, {"transition_probability": target}, [
        check_eq("transition phi-perp -> phi", hits / N, target, stderr=proportion_se(hits, N, target))]


def _t_setup(params, cfg, seed):
    inst, psi_ref, phi_ref = _pair(params, cfg)
    p0 = params.get("p0")
    p0 = float(params["p"]) if p0 is None else float(p0)
    return {"inst": inst, "psi": psi_ref, "phi": phi_ref, "start": _plane_state(inst, p0), "p0": p0}


def _t_trial(params, ctx, rng, cfg):
    led = CostLedger()
    out = transform_t(ctx["start"], ctx["psi"], ctx["phi"], led, rng)
    return record(out.n, led.pe_calls, True, fidelity(out.state, ctx["inst"].phi))


def _t_summary(params, records, ctx):
    p, p0 = float(params["p"]), ctx["p0"]
    n = _col(records, "n_reflections")
    agg = _base_aggregates(records)
    target = t_mean_reflections(p, p0)
    verdicts = [check_eq("mean reflections", n, target)]
    bounds = {"mean_n": target}
    gamma = float(params.get("moment_gamma") or 1.1)
    if abs(2 * p - 1) * gamma < 1:
        exact = t_gamma_moment(p, p0, gamma)
        ratio = np.exp(n * math.log(gamma)) / exact
        verdicts.append(check_eq(f"moment at gamma={gamma:g}", ratio, 1.0))
        bounds["gamma_moment"] = exact
    verdicts.append(check_ge("fidelity with target", float(np.min(_col(records, "final_fidelity"))),
                             1 - FIDELITY_TOL, stderr=0.0))
    return agg, bounds, verdicts


def _pair_setup(params, cfg, seed):
    inst, psi_ref, phi_ref = _pair(params, cfg)
    return {"inst": inst, "psi": psi_ref, "phi": phi_ref}


def _tm_trial(params, ctx, rng, cfg):
    led = CostLedger()
    out = transform_tm(ctx["psi"], ctx["phi"], led, rng)
    return record(out.n, led.pe_calls, True, fidelity(out.state, ctx["inst"].phi))


def _tm_summary(params, records, ctx):
    n = _col(records, "n_reflections")
    agg = _base_aggregates(records)
    p = float(params["p"])
    agg["formula_mean_n"] = t_mean_reflections(0.75 * p, 0.75 * p)
    return agg, {"mean_n": 4.0, "moment_exponent": 6.0}, [
        check_le("mean reflections below 4", n, 4.0),
        check_moment("moment at gamma=7/4", n, 7 / 4, 6.0),
        check_ge("fidelity with target", float(np.min(_col(records, "final_fidelity"))), 1 - FIDELITY_TOL,
                 stderr=0.0),
    ]


def _tx_trial(params, ctx, rng, cfg):
    led = CostLedger()
    out = transform_tx(ctx["psi"], ctx["phi"], led, rng, cfg)
    inst = ctx["inst"]
    target = inst.phi if out.flag == "1" else inst.psi
    return record(out.n, led.pe_calls, out.flag == "1", fidelity(out.state, target), flag=out.flag)


def _tx_summary(params, records, ctx):
    p = float(params["p"])
    agg = _base_aggregates(records)
    fid = _col(records, "final_fidelity")
    verdicts = [_count_zero("state inconsistent with flag", int(np.sum(fid < 1 - FIDELITY_TOL)))]
    N = len(records)
    moved = int(_col(records, "success").sum())
    if p >= 0.5:
        verdicts.append(_rate_at_least("moved when overlap >= 1/2", moved, N, 1.0))
    elif p <= 1 / 3:
        verdicts.append(_rate_at_most("moved when overlap <= 1/3", moved, N, 0.0))
    verdicts.append(check_le("mean reflections", _col(records, "n_reflections"), 5.0))
    return agg, {"mean_n": 5.0}, verdicts


def _txp_trial(params, ctx, rng, cfg):
    led = CostLedger()
    inst = ctx["inst"]
    first = transform_tx_prime(ctx["psi"], ctx["phi"], led, rng)
    target = inst.phi if first.success else inst.psi
    fid = fidelity(first.state, target)
    # a second call from whatever psi-state the first left behind
    start = first.state if not first.success else inst.psi
    second = transform_tx_prime(ctx["psi"], ctx["phi"], CostLedger(), rng, state=start)
    return record(first.n, led.pe_calls, first.success, fid, second_success=float(second.success),
                  second_n=float(second.n))


def _txp_summary(params, records, ctx):
    p = float(params["p"])
    n = _col(records, "n_reflections")
    ok = _col(records, "success").astype(bool)
    agg = _base_aggregates(records)
    N = len(records)
    verdicts = [
        _rate_at_least("success rate at least 19/20", int(ok.sum()), N, 19 / 20),
        check_eq("success rate matches chain", ok.mean(), tx_prime_success_probability(p),
                 stderr=proportion_se(int(ok.sum()), N, tx_prime_success_probability(p))),
        check_le("mean reflections", n, 9.0),
        _count_zero("state inconsistent with flag", int(np.sum(_col(records, "final_fidelity") < 1 - FIDELITY_TOL))),
    ]
    for label, mask in (("success", ok), ("failure", ~ok)):
        if mask.sum() >= 2:
            verdicts.append(check_moment(f"moment at gamma=8/7 given {label}", n[mask], 8 / 7, 11.0))
    s2 = _extra(records, "second_success")
    n2 = _extra(records, "second_n")
    se_rho = 1.0 / math.sqrt(N)
    for label, a, b in (("success", ok.astype(float), s2), ("reflections", n, n2)):
        if np.std(a) > 0 and np.std(b) > 0:
            rho = float(np.corrcoef(a, b)[0, 1])
            agg[f"correlation_{label}"] = rho
            verdicts.append(check_eq(f"consecutive-call correlation of {label}", rho, 0.0, stderr=se_rho))
    return agg, {"success_rate": 19 / 20, "mean_n": 9.0, "moment_exponent": 11.0,
                 "chain_success_rate": tx_prime_success_probability(p)}, verdicts


def _tmxp_trial(params, ctx, rng, cfg):
    led = CostLedger()
    out = transform_tmx_prime(ctx["psi"], ctx["phi"], led, rng)
    inst = ctx["inst"]
    return record(out.n, led.pe_calls, out.success, fidelity(out.state, inst.phi if out.success else inst.psi))


def _tmxp_summary(params, records, ctx):
    p = float(params["p"])
    n = _col(records, "n_reflections")
    N = len(records)
    ok = int(_col(records, "success").sum())
    agg = _base_aggregates(records)
    expected = tx_prime_success_probability(0.75 * p)
    return agg, {"success_rate": 19 / 20, "chain_success_rate": expected, "mean_n": 9.0}, [
        _rate_at_least("success rate at least 19/20", ok, N, 19 / 20),
        check_eq("success rate matches chain", ok / N, expected, stderr=proportion_se(ok, N, expected)),
        check_le("mean reflections", n, 9.0),
    ]


# ---------------------------------------------------------------------------
# multi-copy procedures
# ---------------------------------------------------------------------------

def _engineered_instance(p: float, dim: int = 4, spurious: Optional[int] = None):
    """Overlap instance; with ``spurious`` the whole remainder sits on that one eigenphase."""
    rest = None
    if spurious is not None:
        rest = np.zeros(dim - 1)
        rest[spurious - 1] = 1.0
    return overlap_instance(p, dim, rest=rest)


def _multi_setup(params, cfg, seed):
    sp = params.get("spurious")
    inst = _engineered_instance(float(params["p"]), int(params.get("dim", 4)),
                                None if sp in (None, "none") else int(sp))
    return {"inst": inst, "psi": inst.psi_reflector(cfg), "copies": inst.copies(int(params["r"]))}


def _er_trial(params, ctx, rng, cfg):
    inst = ctx["inst"]
    led = CostLedger()
    out = er_parallel(inst.V, inst.gap, ctx["copies"], cfg, led, rng, gamma=float(params["gamma"]))
    err = phase_distance(out.reported_phase, inst.phase_v) if out.success else float("nan")
    return record(0, led.pe_calls, out.success and err <= inst.gap / 5, phase_err=err, j=out.j,
                  forward=led.oracle_calls["pe"], reverse=led.oracle_calls["pe_reverse"])


def _er_summary(params, records, ctx):
    r, gamma = int(params["r"]), float(params["gamma"])
    inst = ctx["inst"]
    N = len(records)
    fails = int(N - _col(records, "success").sum())
    err = _col(records, "reported_phase_error")
    bound = math.exp(-r * gamma ** 2) ** 2
    agg = _base_aggregates(records)
    agg["mean_forward_pe"] = float(_extra(records, "forward").mean())
    agg["mean_reverse_pe"] = float(_extra(records, "reverse").mean())
    return agg, {"failure_probability": bound, "phase_error": inst.gap / 5}, [
        _rate_at_most("failure frequency", fails, N, bound),
        _count_zero("phase error beyond gap/5 on success", int(np.sum(np.nan_to_num(err, nan=0.0) > inst.gap / 5))),
    ]


def _tp_trial(params, ctx, rng, cfg):
    inst = ctx["inst"]
    led = CostLedger()
    out = transform_tp(ctx["psi"], inst.V, inst.gap, float(params["gamma"]), ctx["copies"], cfg, led, rng)
    if out.success:
        err = phase_distance(out.reported_phase, inst.phase_v)
        fid = min(fidelity(row, inst.phi) for row in out.copies)
    else:
        err, fid = float("nan"), float("nan")
    ok = out.success and err <= inst.gap / 5
    return record(out.n, led.pe_calls, ok, fid, err, forward=led.oracle_calls["pe"])


def _tp_summary(params, records, ctx):
    r, gamma = int(params["r"]), float(params["gamma"])
    N = len(records)
    fails = int(N - _col(records, "success").sum())
    n = _col(records, "n_reflections")
    ok = _col(records, "success").astype(bool)
    fid = _col(records, "final_fidelity")[ok]
    agg = _base_aggregates(records)
    bound = math.exp(-2 * r * gamma ** 2)
    verdicts = [
        _rate_at_most("failure frequency", fails, N, bound),
        check_le("mean reflections below 2r", n, 2.0 * r),
        check_le("PE calls below 2r", float(_col(records, "pe_calls").max()), 2.0 * r, stderr=0.0),
        _count_zero("copies off target after success", int(np.sum(fid < 1 - FIDELITY_TOL))),
    ]
    if "moment_gamma" in params and params["moment_gamma"]:
        g = float(params["moment_gamma"])
        verdicts.append(check_moment(f"moment at gamma={g:g}", n, g, 3.0 * r))
    return agg, {"failure_probability": bound, "mean_n": 2.0 * r}, verdicts


def erx_branch(p: float, p_m: float, gamma: float) -> str:
    if p > p_m:
        return "high"
    if p <= p_m - 2 * gamma:
        return "low"
    return "mid"


def _erx_trial(params, ctx, rng, cfg):
    inst = ctx["inst"]
    led = CostLedger()
    r = int(params["r"])
    p_m, gamma = float(params["p_m"]), float(params["gamma"])
    out = er_x(inst.V, inst.gap, float(params["delta"]), p_m, gamma, ctx["copies"], ctx["psi"], cfg, led, rng)
    branch = erx_branch(float(params["p"]), p_m, gamma)
    if branch == "high":
        ok = out.b == 1 and out.j == r
    elif branch == "low":
        ok = out.b == 0 and out.j == r
    else:
        ok = out.j >= r / 20
    fid = min(fidelity(row, inst.psi) for row in out.copies[out.labels]) if out.j else float("nan")
    return record(out.n, led.pe_calls, ok, fid, b=float(out.b), j=float(out.j))


def _erx_summary(params, records, ctx):
    r, gamma = int(params["r"]), float(params["gamma"])
    N = len(records)
    fails = int(N - _col(records, "success").sum())
    bound = (5 * math.exp(-r * gamma ** 2)) ** 2
    agg = _base_aggregates(records)
    agg["branch"] = erx_branch(float(params["p"]), float(params["p_m"]), gamma)
    agg["mean_b"] = float(_extra(records, "b").mean())
    agg["mean_j"] = float(_extra(records, "j").mean())
    return agg, {"failure_probability": bound}, [
        _rate_at_most(f"{agg['branch']} branch failure frequency", fails, N, bound),
        check_le("PE calls at most 2r", float(_col(records, "pe_calls").max()), 2.0 * r, stderr=0.0),
    ]


def tpx_branch(p: float, gamma: float) -> str:
    if p > 1 - gamma:
        return "success"
    if p <= 1 - 3 * gamma:
        return "decline"
    return "either"


def _tpx_trial(params, ctx, rng, cfg):
    inst = ctx["inst"]
    led = CostLedger()
    gamma = float(params["gamma"])
    out = transform_tpx(ctx["psi"], inst.V, inst.gap, float(params["delta"]), gamma, ctx["copies"], cfg, led, rng)
    branch = tpx_branch(float(params["p"]), gamma)
    if out.flag == "1":
        fid = min(fidelity(row, inst.phi) for row in out.copies)
        err = phase_distance(out.reported_phase, inst.phase_v)
    elif out.flag == "#":
        fid = min(fidelity(row, inst.psi) for row in out.copies)
        err = float("nan")
    else:
        fid, err = float("nan"), float("nan")
    if branch == "success":
        ok = out.flag == "1" and fid >= 1 - FIDELITY_TOL
    elif branch == "decline":
        ok = out.flag == "#" and fid >= 1 - FIDELITY_TOL
    else:
        ok = out.flag in ("1", "#")
    return record(out.n, led.pe_calls, ok, fid, err, declined=float(out.flag == "#"))


def _tpx_summary(params, records, ctx):
    r, gamma = int(params["r"]), float(params["gamma"])
    N = len(records)
    fails = int(N - _col(records, "success").sum())
    bound = (6 * math.exp(-r * gamma ** 2 / 36)) ** 2
    agg = _base_aggregates(records)
    agg["branch"] = tpx_branch(float(params["p"]), gamma)
    agg["decline_rate"] = float(_extra(records, "declined").mean())
    verdicts = [check_le("mean reflections at most 5r", _col(records, "n_reflections"), 5.0 * r),
                check_le("PE calls at most 4r", float(_col(records, "pe_calls").max()), 4.0 * r, stderr=0.0)]
    if agg["branch"] != "either":
        verdicts.insert(0, _rate_at_most(f"{agg['branch']} branch failure frequency", fails, N, bound))
    return agg, {"failure_probability": bound, "mean_n": 5.0 * r}, verdicts


# ---------------------------------------------------------------------------
# traversals
# ---------------------------------------------------------------------------

def build_path(params, seed: int):
    kind = params.get("path", "grover")
    if kind == "grover":
        return grover_path(int(params.get("items", 16)))
    if kind == "great-circle":
        return great_circle_path(float(params.get("length", 3.0)), dim=int(params.get("dim", 4)))
    if kind == "piecewise-speed":
        speeds = [float(v) for v in str(params.get("speeds", "2,0.5,1")).split(",")]
        bp = np.linspace(0.0, 1.0, len(speeds) + 1)
        prof = an.SpeedProfile(bp, speeds)
        scale = float(params.get("length", 3.0)) / prof.length
        return speed_profile_path(an.SpeedProfile(bp, [v * scale for v in speeds]), dim=int(params.get("dim", 4)))
    if kind == "random-smooth":
        return random_smooth_path(int(params.get("dim", 4)), trial_rng(seed, 0, SETUP_STREAM))
    raise ValueError(f"unknown path kind {kind!r}")


def equal_angle_checkpoints(path, segments: int) -> np.ndarray:
    """Checkpoints splitting the path into ``segments`` pieces of equal length."""
    grid, cum = refine_path(path)
    targets = np.linspace(0.0, cum[-1], segments + 1)
    s = np.interp(targets, cum, grid)
    s[0], s[-1] = 0.0, 1.0
    return s


def _checkpoints(path, params):
    seg = params.get("segments")
    if seg:
        return equal_angle_checkpoints(path, int(seg))
    return greedy_checkpoints(path, float(params["min_overlap"]))


def _known_setup(params, cfg, seed):
    path = build_path(params, seed)
    cps = _checkpoints(path, params)
    return {"path": path, "cps": cps, "refs": checkpoint_reflectors(path, cps, cfg=cfg),
            "overlaps": segment_overlaps(path, cps)}


def _known_trial(params, ctx, rng, cfg):
    led = CostLedger()
    rep = traverse_known(ctx["path"], ctx["cps"], cfg=cfg, ledger=led, rng=rng, reflectors=ctx["refs"])
    return record(rep.reflections, rep.pe_calls, rep.success, rep.final_fidelity,
                  oracle_calls=float(led.total_oracle_calls))


def _known_summary(params, records, ctx):
    n_seg = len(ctx["cps"]) - 1
    m = _col(records, "n_reflections")
    agg = _base_aggregates(records)
    agg["segments"] = n_seg
    agg["min_segment_overlap"] = float(ctx["overlaps"].min())
    agg["mean_oracle_calls"] = float(_extra(records, "oracle_calls").mean())
    fid = _col(records, "final_fidelity")
    return agg, {"mean_m": 4.0 * n_seg, "moment_exponent": 6.0 * n_seg}, [
        _count_zero("runs with final fidelity below 1", int(np.sum(fid < 1 - FIDELITY_TOL))),
        check_le("mean reflections below 4n", m, 4.0 * n_seg),
        check_moment("moment at gamma=7/4", m, 7 / 4, 6.0 * n_seg),
    ]


def _parallel_setup(params, cfg, seed):
    path = build_path(params, seed)
    cps = _checkpoints(path, params)
    return {"path": path, "cps": cps, "overlaps": segment_overlaps(path, cps),
            "phases": [path.phase(s) for s in cps], "gaps": [path.gap(s) for s in cps]}


def _parallel_trial(params, ctx, rng, cfg):
    led = CostLedger()
    r = int(params["r"])
    rep = traverse_parallel(ctx["path"], ctx["cps"], r, float(params["gamma"]), cfg, led, rng)
    errs = [phase_distance(a, ph) / g for a, ph, g in zip(rep.anchors[1:], ctx["phases"][1:], ctx["gaps"][1:])]
    worst = max(errs) if errs else 0.0
    ok = rep.success and worst <= 0.2
    return record(rep.reflections, rep.pe_calls, ok, rep.final_fidelity if rep.success else float("nan"),
                  max(errs) if rep.success and errs else float("nan"),
                  oracle_calls=float(led.total_oracle_calls), anchor_ok=float(worst <= 0.2),
                  completed=float(rep.success))


def _parallel_summary(params, records, ctx):
    n_seg = len(ctx["cps"]) - 1
    r, gamma = int(params["r"]), float(params["gamma"])
    N = len(records)
    fails = int(N - _col(records, "success").sum())
    done = _extra(records, "completed").astype(bool)
    bad_anchor = int(np.sum(done & (_extra(records, "anchor_ok") == 0)))
    bound = (n_seg * math.exp(-r * gamma ** 2)) ** 2
    agg = _base_aggregates(records)
    agg["segments"] = n_seg
    agg["min_segment_overlap"] = float(ctx["overlaps"].min())
    agg["mean_oracle_calls_per_copy"] = float(_extra(records, "oracle_calls").mean() / r)
    return agg, {"failure_probability": bound, "pe_calls": 2.0 * n_seg * r + 1}, [
        _rate_at_most("failure frequency", fails, N, bound),
        _count_zero("anchors farther than gap/5 on success", bad_anchor),
        check_le("PE calls at most 2nr + 1", float(_col(records, "pe_calls").max()), 2.0 * n_seg * r + 1,
                 stderr=0.0),
    ]


def _geometry(path, theta):
    geo = velocity_profile(path, theta)
    return geo.length, geo.v_max, geo.v_avg


def _dominant_setup(params, cfg, seed):
    path = build_path(params, seed)
    theta = float(np.arccos(np.sqrt(1.0 - float(params["gamma"]))))
    L, vmax, vavg = _geometry(path, theta)
    return {"path": path, "theta": theta, "C": attempted_interval_bound(L, vmax, vavg, theta), "L": L,
            "dominance_grid_ok": dominance_on_grid(path, 1.0 - 4.0 * float(params["gamma"]),
                                                   float(params["delta"]))}


def dominance_on_grid(path, weight: float, delta: float, points: int = 9) -> bool:
    """Dominance of the tracked phase of U_s in psi_r for all grid pairs r < s."""
    grid = np.linspace(0.0, 1.0, points)
    states = [path.state(s) for s in grid]
    for j in range(1, points):
        op = path.operator(grid[j])
        ph = path.phase(grid[j])
        for i in range(j):
            if not check_dominance(op, states[i], weight, delta, ph):
                return False
    return True


def _dominant_trial(params, ctx, rng, cfg):
    led = CostLedger()
    try:
        rep = traverse_recursive_dominant(ctx["path"], float(params["delta"]), float(params["gamma"]),
                                          int(params["r"]), cfg, led, rng)
    except DepthCapError:
        return record(led.unitary_applications, led.pe_calls, False, attempted=float("nan"), error="depth cap")
    return record(rep.reflections, rep.pe_calls, rep.success, rep.final_fidelity if rep.success else float("nan"),
                  attempted=float(rep.attempted))


def _dominant_summary(params, records, ctx):
    r, gamma = int(params["r"]), float(params["gamma"])
    C = ctx["C"]
    N = len(records)
    fails = int(N - _col(records, "success").sum())
    att = _extra(records, "attempted")
    bound = (6 * C * math.exp(-r * gamma ** 2 / 36)) ** 2
    agg = _base_aggregates(records)
    agg["path_length"] = ctx["L"]
    agg["dominance_grid_ok"] = ctx["dominance_grid_ok"]
    agg["mean_attempted"] = float(np.nanmean(att)) if np.any(np.isfinite(att)) else float("nan")
    agg["max_attempted"] = float(np.nanmax(att)) if np.any(np.isfinite(att)) else float("nan")
    return agg, {"attempted_intervals": C, "failure_probability": bound, "mean_n": 5.0 * r * C,
                 "pe_calls": 4.0 * r * C + 1}, [
        _count_zero("runs above the attempted-interval bound", int(np.sum(np.nan_to_num(att, nan=np.inf) > C))),
        _rate_at_most("failure frequency", fails, N, min(bound, 1.0)),
        check_le("mean reflections at most 5rC", _col(records, "n_reflections"), 5.0 * r * C),
        check_le("PE calls at most 4rC + 1", float(_col(records, "pe_calls").max()), 4.0 * r * C + 1, stderr=0.0),
    ]


OVERLAP_FREE_THETA = float(np.arccos(np.sqrt(1.0 / 3.0)))


def _overlap_free_setup(params, cfg, seed):
    path = build_path(params, seed)
    L, vmax, vavg = _geometry(path, OVERLAP_FREE_THETA)
    return {"path": path, "nbar": overlap_free_bound(L, vmax, vavg), "L": L}


def _overlap_free_trial(params, ctx, rng, cfg):
    led = CostLedger()
    try:
        rep = traverse_recursive_overlap_free(ctx["path"], cfg=cfg, ledger=led, rng=rng)
    except DepthCapError:
        return record(led.unitary_applications, led.pe_calls, False, attempted=float("nan"), error="depth cap")
    return record(rep.reflections, rep.pe_calls, rep.success, rep.final_fidelity, attempted=float(rep.attempted))


def _overlap_free_summary(params, records, ctx):
    n = _col(records, "n_reflections")
    nbar = ctx["nbar"]
    agg = _base_aggregates(records)
    agg["path_length"] = ctx["L"]
    agg["mean_attempted"] = float(np.nanmean(_extra(records, "attempted")))
    fid = _col(records, "final_fidelity")
    return agg, {"mean_n": nbar, "moment_exponent": 36 * nbar}, [
        check_le("mean reflections at most nbar", n, nbar),
        check_moment("moment at gamma=14/13", n, 14 / 13, 36 * nbar),
        _count_zero("runs ending off the final eigenvector", int(np.sum(~(fid >= 1 - FIDELITY_TOL)))),
    ]


def _reduction_setup(params, cfg, seed):
    path = great_circle_path(float(params["length"]))
    return {"path": path, "trace": np.linspace(0.0, 1.0, int(params["steps"]) + 1)}


def _reduction_trial(params, ctx, rng, cfg):
    led = CostLedger()
    lo, hi, th = float(params["theta_lo"]), float(params["theta_hi"]), float(params["theta"])
    out = reduce_checkpoints(ctx["path"], ctx["trace"], th, lo, hi, cfg, led, rng)
    k = len(out.s) - 1
    gaps = out.angles
    tol = 1e-9
    upper_ok = bool(np.all(gaps <= hi + th + tol))
    lower_ok = bool(np.all(gaps[:-1] >= lo - tol))
    length_ok = out.length >= lo * (k - 1) - tol
    return record(out.reflections, led.pe_calls, upper_ok and lower_ok and length_ok, k=float(k),
                  length=out.length, ov_calls=float(out.ov_calls), restorations=float(out.restorations),
                  upper_ok=float(upper_ok), lower_ok=float(lower_ok), length_ok=float(length_ok))


def _reduction_summary(params, records, ctx):
    agg = _base_aggregates(records)
    agg["mean_checkpoints"] = float(_extra(records, "k").mean())
    agg["mean_ov_calls"] = float(_extra(records, "ov_calls").mean())
    lo, hi, th = float(params["theta_lo"]), float(params["theta_hi"]), float(params["theta"])
    return agg, {"gap_upper": hi + th, "gap_lower": lo}, [
        _count_zero("gaps above theta_hi + theta", int(np.sum(_extra(records, "upper_ok") == 0))),
        _count_zero("interior gaps below theta_lo", int(np.sum(_extra(records, "lower_ok") == 0))),
        _count_zero("length below theta_lo (k - 1)", int(np.sum(_extra(records, "length_ok") == 0))),
        check_le("overlap-oracle calls at most steps", float(_extra(records, "ov_calls").max()),
                 float(params["steps"]), stderr=0.0),
    ]


# ---------------------------------------------------------------------------
# lemma checks without quantum simulation
# ---------------------------------------------------------------------------

def _gw_trial(params, ctx, rng, cfg):
    nodes, leaves = an.galton_watson_trees(float(params["p_s"]), 1, rng)
    return record(int(nodes[0]), 0, True, leaves=float(leaves[0]))


def _gw_summary(params, records, ctx):
    p = float(params["p_s"])
    nodes = _col(records, "n_reflections")
    leaves = _extra(records, "leaves")
    agg = _base_aggregates(records)
    agg["mean_nodes"], agg["se_nodes"] = mean_se(nodes)
    agg["mean_leaves"], agg["se_leaves"] = mean_se(leaves)
    g = an.gw_gamma_max(p)
    return agg, {"mean_nodes": an.gw_mean_nodes(p), "mean_leaves": an.gw_mean(p), "gamma_max": g,
                 "moment_exponent": an.gw_moment_exponent(p)}, [
        check_eq("mean node count", nodes, an.gw_mean_nodes(p)),
        check_eq("mean successful-node count", leaves, an.gw_mean(p)),
        check_moment("moment at gamma_max", nodes, g, an.gw_moment_exponent(p)),
    ]


def _composition_trial(params, ctx, rng, cfg):
    """Independent T_m costs at the given overlap, one per step."""
    steps = int(params["steps"])
    costs = [transform_tm(ctx["psi"], ctx["phi"], None, rng).n for _ in range(steps)]
    return record(sum(costs), 0, True, steps=costs)


def _composition_summary(params, records, ctx):
    steps = int(params["steps"])
    C = np.array([r["extra"]["steps"] for r in records], dtype=float)
    gammas = [1.25, 1.5, 7 / 4]
    verdicts = an.verify_ldev_composition(C, [6.0] * steps, gammas)
    return _base_aggregates(records), {"exponent": 6.0 * steps}, verdicts


def _random_count_trial(params, ctx, rng, cfg):
    p_s = float(params["p_s"])
    nodes, _ = an.galton_watson_trees(p_s, 1, rng)
    costs = an.tx_prime_costs(float(params["p"]), rng, int(nodes[0]))
    return record(int(costs.sum()), 0, True, count=float(nodes[0]))


def _random_count_summary(params, records, ctx):
    p_s = float(params["p_s"])
    total = _col(records, "n_reflections")
    count = _extra(records, "count")
    m_bound = an.gw_moment_exponent(p_s)
    lam = an.gw_gamma_max(p_s)
    cost_exp, cost_gmax = float(params["cost_exponent"]), float(params["cost_gamma_max"])
    g = min(lam ** (1.0 / cost_exp), cost_gmax)
    agg = _base_aggregates(records)
    agg["gamma"] = g
    return agg, {"count_exponent": m_bound, "total_exponent": m_bound * cost_exp}, [
        check_moment("invocation count moment", count, lam, m_bound),
        check_moment("total cost moment", total, g, m_bound * cost_exp),
    ]


PROFILES = {
    "uniform": ([0.0, 1.0], [1.0]),
    "two-speed": ([0.0, 0.5, 1.0], [2.0, 0.25]),
    "three-speed": ([0.0, 0.3, 0.6, 1.0], [0.5, 3.0, 1.0]),
}


def profile_from(name: str, length: float) -> an.SpeedProfile:
    bp, v = PROFILES[name]
    base = an.SpeedProfile(bp, v)
    return an.SpeedProfile(bp, np.asarray(v) * length / base.length)


def _bit_setup(params, cfg, seed):
    theta = float(params["theta"])
    prof = profile_from(params["profile"], float(params["length_in_theta"]) * theta)
    enumerated = an.enumerate_bit_cost(prof, theta, lambda c, d: 1.0)
    integral = an.bit_cost_bound(prof, theta, 1.0)
    rough = an.bit_cost_rough(prof, theta, 1.0)
    return {"profile": prof, "theta": theta, "enumerated": enumerated, "integral": integral, "rough": rough}


def _bit_trial(params, ctx, rng, cfg):
    prof, theta = ctx["profile"], ctx["theta"]
    l = float(rng.uniform(0.0, prof.length))
    sig = an.sigma_theta(prof, l, theta)
    rho = an.rho_theta(prof, l, theta)
    return record(0, 0, sig <= 2 * rho * (1 + 1e-9), l=l, sigma=sig, rho=rho)


def _bit_summary(params, records, ctx):
    agg = _base_aggregates(records)
    agg.update(enumerated_cost=ctx["enumerated"], integral_bound=ctx["integral"], rough_bound=ctx["rough"])
    fails = int(len(records) - _col(records, "success").sum())
    return agg, {"integral_bound": ctx["integral"], "rough_bound": ctx["rough"]}, [
        _count_zero("points with sigma above 2 rho", fails),
        check_le("enumerated cost at most integral bound", ctx["enumerated"], ctx["integral"], stderr=0.0),
        check_le("integral bound at most rough bound", ctx["integral"], ctx["rough"], stderr=0.0),
    ]


def random_perturbation_instance(rng, dim: int = 8, scale: float = 0.2):
    def herm():
        A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        return (A + A.conj().T) / 2.0

    H = herm()
    S = scale * herm()
    return H, S


def perturbation_check(H, S):
    """(exact angle, bound) for the lowest eigenvector of H under H + S."""
    w, v = np.linalg.eigh(H)
    psi, lam = v[:, 0], float(w[0])
    shift = float(np.real(np.vdot(psi, S @ psi)))
    w2, v2 = np.linalg.eigh(H + S)
    k = int(np.argmin(np.abs(w2 - (lam + shift))))
    gap = float(np.min(np.abs(np.delete(w2, k) - (lam + shift))))
    exact = an.angle_to_subspace(psi, v2[:, [k]])
    return exact, an.eig_angle_bound(H, S, psi, lam, shift, gap)


def _angle_trial(params, ctx, rng, cfg):
    H, S = random_perturbation_instance(rng, int(params["dim"]), float(params["scale"]))
    exact, bound = perturbation_check(H, S)
    return record(0, 0, exact <= bound + 1e-12, angle=exact, bound=bound)


def _angle_summary(params, records, ctx):
    agg = _base_aggregates(records)
    agg["max_angle_to_bound"] = float(np.max(_extra(records, "angle") / np.maximum(_extra(records, "bound"), 1e-300)))
    fails = int(len(records) - _col(records, "success").sum())
    return agg, {}, [_count_zero("instances with angle above bound", fails)]


def _rate_trial(params, ctx, rng, cfg):
    items = int(params["items"])
    t = float(rng.uniform(0.05, 0.95))
    h = float(params["h"])

    def H_of(s):
        return grover_hamiltonian(items, s)

    lhs = an.projected_rate(H_of, t, h=h)
    rhs = an.rate_bound(H_of, t, an.hermitian_gap(H_of(t)), h=h)
    return record(0, 0, lhs <= rhs + float(params["slack"]), t=t, lhs=lhs, rhs=rhs)


def _rate_summary(params, records, ctx):
    agg = _base_aggregates(records)
    agg["max_lhs_minus_rhs"] = float(np.max(_extra(records, "lhs") - _extra(records, "rhs")))
    fails = int(len(records) - _col(records, "success").sum())
    return agg, {"slack": float(params["slack"])}, [_count_zero("points violating the rate bound", fails)]


def _composition_setup(params, cfg, seed):
    return _pair_setup({"p": params["p"]}, cfg, seed)


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

_GROVER = {"path": "grover", "items": 16}

CATALOG: Dict[str, Experiment] = {e.name: e for e in [
    Experiment("chain", "reflect-and-measure chain: phi-perp to phi transition probability 4pq",
               {"p": 0.5}, _chain_trial, _chain_summary, _chain_setup, trials=100000),
    Experiment("t", "plain transformation T: mean reflections p0 + (1-p0)(1 + 1/(2pq))",
               {"p": 0.5, "p0": None, "moment_gamma": 1.1}, _t_trial, _t_summary, _t_setup, trials=100000),
    Experiment("tm", "overlap-suppressed T_m: mean below 4, moment bound at gamma 7/4",
               {"p": 1 / 3}, _tm_trial, _tm_summary, _pair_setup, trials=100000),
    Experiment("tx", "overlap-gated T_x: flag consistent with final state",
               {"p": 0.75}, _tx_trial, _tx_summary, _pair_setup, trials=10000),
    Experiment("tx-prime", "bounded-effort T'_x: success at least 19/20, mean at most 9, moments, independence",
               {"p": 0.5}, _txp_trial, _txp_summary, _pair_setup, trials=100000),
    Experiment("tmx-prime", "suppressed bounded-effort T'_mx: success at least 19/20 for overlap at least 1/3",
               {"p": 1 / 3}, _tmxp_trial, _tmxp_summary, _pair_setup, trials=100000),
    Experiment("er", "majority-window phase recovery ER: failure and phase error",
               {"p": 0.75, "r": 200, "gamma": 0.1}, _er_trial, _er_summary, _multi_setup, trials=10000),
    Experiment("tp", "parallel transformation T_p: failure, mean reflections below 2r",
               {"p": 0.9, "r": 100, "gamma": 0.1, "moment_gamma": None}, _tp_trial, _tp_summary, _multi_setup,
               trials=1000),
    Experiment("er-x", "dominance threshold test ER_x: three-branch contract",
               {"p": 0.95, "r": 400, "gamma": 0.1, "p_m": 0.85, "delta": 0.5, "spurious": 2},
               _erx_trial, _erx_summary, _multi_setup, trials=1000),
    Experiment("tpx", "gated parallel transformation T_px: success and decline branches, mean at most 5r",
               {"p": 0.98, "r": 50, "gamma": 0.05, "delta": 0.5, "spurious": 2},
               _tpx_trial, _tpx_summary, _multi_setup, trials=500),
    Experiment("known-overlaps", "traversal with known overlaps: fidelity 1, mean below 4n",
               {**_GROVER, "min_overlap": 1 / 3, "segments": None}, _known_trial, _known_summary, _known_setup,
               trials=10000),
    Experiment("parallel", "parallel traversal: anchors within gap/5, failure (n e^{-r gamma^2})^2",
               {**_GROVER, "segments": 4, "min_overlap": 0.8, "r": 600, "gamma": 0.05},
               _parallel_trial, _parallel_summary, _parallel_setup, trials=100),
    Experiment("dominant", "recursive traversal under dominance: attempted intervals at most C",
               {"path": "great-circle", "length": 5 * float(np.arccos(np.sqrt(0.95))), "r": 30, "gamma": 0.05,
                "delta": 0.5}, _dominant_trial, _dominant_summary, _dominant_setup, trials=100),
    Experiment("overlap-free", "overlap-free recursive traversal: mean at most nbar, moment at gamma 14/13",
               {"path": "great-circle", "length": 3.0}, _overlap_free_trial, _overlap_free_summary,
               _overlap_free_setup, trials=1000),
    Experiment("checkpoint-reduction", "checkpoint reduction: gap bounds and total length",
               {"length": 5.0, "steps": 20, "theta": 0.4, "theta_lo": 0.3, "theta_hi": 0.5},
               _reduction_trial, _reduction_summary, _reduction_setup, trials=1000),
    Experiment("galton-watson", "subdivision branching process: mean size and moment at gamma_max",
               {"p_s": 0.95}, _gw_trial, _gw_summary, trials=100000),
    Experiment("ldev-composition", "moment bounds compose over sequential steps",
               {"p": 1 / 3, "steps": 5}, _composition_trial, _composition_summary, _composition_setup,
               trials=20000),
    Experiment("ldev-random-count", "moment bound for a branching-process number of bounded-effort steps",
               {"p_s": 0.95, "p": 0.75, "cost_exponent": 11.0, "cost_gamma_max": 8 / 7},
               _random_count_trial, _random_count_summary, trials=100000),
    Experiment("bit-cost", "interval-tree cost: sigma <= 2 rho, enumerated <= integral <= rough bound",
               {"profile": "two-speed", "theta": 0.2, "length_in_theta": 10.0}, _bit_trial, _bit_summary,
               _bit_setup, trials=20),
    Experiment("angle-bound", "eigenvector angle under perturbation at most arcsin(||(S - delta) psi|| / gap)",
               {"dim": 8, "scale": 0.2}, _angle_trial, _angle_summary, trials=100),
    Experiment("rate-bound", "projected eigenvector speed at most ||dH/ds|| / gap on the Grover path",
               {"items": 16, "h": 1e-5, "slack": 1e-3}, _rate_trial, _rate_summary, trials=50),
]}

REGIMES = {"known-overlaps": "known-overlaps", "parallel": "parallel", "dominant": "dominant",
           "overlap-free": "overlap-free"}


def list_experiments() -> List[dict]:
    return [e.describe() for e in CATALOG.values()]


PATH_KEYS = ("path", "items", "length", "dim", "speeds")
PATH_KINDS = ("grover", "great-circle", "piecewise-speed", "random-smooth")

# (lower, upper, lower inclusive, upper inclusive)
RANGES = {
    "p": (0.0, 1.0, False, True), "p0": (0.0, 1.0, True, True), "gamma": (0.0, 1.0, False, False),
    "delta": (0.0, math.pi, False, True), "p_m": (0.5, 1.0, False, False), "p_s": (0.5, 1.0, False, True),
    "theta": (0.0, math.pi / 2, False, False), "theta_lo": (0.0, math.pi / 2, False, False),
    "theta_hi": (0.0, math.pi / 2, False, False), "length": (0.0, math.inf, False, False),
    "min_overlap": (0.0, 1.0, False, False), "scale": (0.0, math.inf, False, False),
    "h": (0.0, 0.01, False, True), "slack": (0.0, math.inf, True, False),
    "length_in_theta": (0.0, math.inf, False, False), "moment_gamma": (1.0, math.inf, True, False),
    "cost_exponent": (0.0, math.inf, False, False), "cost_gamma_max": (1.0, math.inf, False, False),
}
INT_MINIMA = {"r": 1, "items": 2, "dim": 2, "steps": 1, "segments": 1}


def validate_params(name: str, params: dict) -> None:
    """Raise ValueError naming every parameter outside its admissible range."""
    problems = []
    for key, value in params.items():
        if value is None:
            continue
        if key in INT_MINIMA:
            if not isinstance(value, (int, np.integer)) or value < INT_MINIMA[key]:
                problems.append(f"{key} must be an integer >= {INT_MINIMA[key]} (got {value!r})")
        elif key in RANGES:
            lo, hi, lo_in, hi_in = RANGES[key]
            try:
                x = float(value)
            except (TypeError, ValueError):
                problems.append(f"{key} must be a number (got {value!r})")
                continue
            ok = (x >= lo if lo_in else x > lo) and (x <= hi if hi_in else x < hi)
            if not ok:
                problems.append(f"{key}={value!r} outside {'[' if lo_in else '('}{lo:g}, {hi:g}{']' if hi_in else ')'}")
    if "path" in params and params["path"] not in PATH_KINDS:
        problems.append(f"path must be one of {', '.join(PATH_KINDS)}")
    if "profile" in params and params["profile"] not in PROFILES:
        problems.append(f"profile must be one of {', '.join(PROFILES)}")
    if problems:
        raise ValueError(f"invalid parameters for {name!r}: " + "; ".join(problems))


def resolve_params(name: str, overrides: Optional[dict] = None) -> dict:
    if name not in CATALOG:
        raise ValueError(f"unknown experiment {name!r}; choose from {', '.join(CATALOG)}")
    exp = CATALOG[name]
    params = dict(exp.defaults)
    path_ok = "path" in params
    for k, v in (overrides or {}).items():
        if k not in params and not (path_ok and k in PATH_KEYS + ("segments", "min_overlap")):
            raise ValueError(f"unknown parameter {k!r} for experiment {name!r}")
        params[k] = v
    validate_params(name, params)
    return params


def _run_chunk(name: str, params: dict, cfg: OracleConfig, seed: int, trial_ids: List[int], ctx=None) -> List[dict]:
    exp = CATALOG[name]
    ctx = exp.setup(params, cfg, seed) if ctx is None else ctx
    out = []
    for k in trial_ids:
        try:
            rec = exp.trial(params, ctx, trial_rng(seed, k), cfg)
        except (DepthCapError, PathRefinementError) as err:
            rec = record(0, 0, False, error=str(err))
        rec["trial_id"] = k
        out.append(rec)
    return out


def run_experiment(name: str, params: Optional[dict] = None, trials: Optional[int] = None, seed: int = 0,
                   cfg: OracleConfig = IDEAL, workers: Optional[int] = None) -> RunResult:
    """Run ``trials`` independent trials and summarize them.

    Trials are split into contiguous chunks over ``workers`` processes (the
    thread-count environment variable by default). Output order and values
    are the same for every worker count.
    """
    exp = CATALOG[name]
    params = resolve_params(name, params)
    n = exp.trials if trials is None else int(trials)
    if n < 1:
        raise ValueError("need at least one trial")
    workers = worker_count() if workers is None else workers
    ids = list(range(n))
    ctx = exp.setup(params, cfg, seed)
    if workers <= 1 or n < 2 * workers:
        records = _run_chunk(name, params, cfg, seed, ids, ctx)
    else:
        chunks = [c.tolist() for c in np.array_split(np.arange(n), workers) if c.size]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_run_chunk, [name] * len(chunks), [params] * len(chunks), [cfg] * len(chunks),
                             [seed] * len(chunks), chunks)
            records = [rec for part in parts for rec in part]
    aggregates, bounds, verdicts = exp.summarize(params, records, ctx)
    return RunResult(name, params, records, aggregates, bounds, verdicts)
