"""Checks of the probabilistic and geometric lemmas behind the cost bounds.

Covers moment-bound composition, the subdivision branching process,
speed-variation functionals of arclength profiles with the resulting
interval-tree cost bounds, and eigenvector perturbation bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .stats import Verdict, check_moment


# ---------------------------------------------------------------------------
# moment-bound composition
# ---------------------------------------------------------------------------

@dataclass
class GammaMomentBound:
    """<gamma^C> <= gamma^exponent for 1 <= gamma <= gamma_max."""

    gamma_max: float
    exponent: float

    def check(self, costs, gamma: Optional[float] = None, name: str = "moment") -> Verdict:
        g = self.gamma_max if gamma is None else gamma
        if not 1.0 <= g <= self.gamma_max + 1e-12:
            raise ValueError("gamma outside the certified range")
        return check_moment(name, costs, g, self.exponent)


def verify_ldev_composition(step_costs, step_exponents: Sequence[float], gammas: Sequence[float]) -> list:
    """Composed moment <gamma^(sum C_i)> against gamma^(sum of per-step exponents).

    ``step_costs`` is a (trials, steps) array.
    """
    C = np.asarray(step_costs, dtype=float)
    total = C.sum(axis=1)
    exp_total = float(np.sum(step_exponents))
    return [check_moment(f"composition gamma={g:.4g}", total, g, exp_total) for g in gammas]


# ---------------------------------------------------------------------------
# branching process
# ---------------------------------------------------------------------------

def gw_mean(p_s: float) -> float:
    """p_s / (2 p_s - 1), the expected number of nodes that succeed (the leaves).

    The expected total node count is :func:`gw_mean_nodes`.
    """
    if p_s <= 0.5:
        raise ValueError("closed form needs p_s > 1/2")
    return p_s / (2.0 * p_s - 1.0)


def gw_mean_nodes(p_s: float) -> float:
    """Expected total number of nodes: 1 / (2 p_s - 1)."""
    if p_s <= 0.5:
        raise ValueError("closed form needs p_s > 1/2")
    return 1.0 / (2.0 * p_s - 1.0)


def gw_gamma_max(p_s: float) -> float:
    if p_s <= 0.5:
        raise ValueError("closed form needs p_s > 1/2")
    if p_s >= 1.0:
        return float("inf")
    return 1.0 / (2.0 * np.sqrt(p_s * (1.0 - p_s)))


def gw_moment_exponent(p_s: float) -> float:
    """Exponent 1 + 2/(2 p_s - 1) of the moment bound."""
    return 1.0 + 2.0 / (2.0 * p_s - 1.0)


def gw_moment_exact(p_s: float, gamma: float) -> float:
    """<gamma^|S|> from the quadratic fixed-point equation (negative branch)."""
    if p_s >= 1.0:
        return gamma
    disc = 1.0 - 4.0 * gamma ** 2 * p_s * (1.0 - p_s)
    return (1.0 - np.sqrt(max(disc, 0.0))) / (2.0 * (1.0 - p_s) * gamma)


def galton_watson_trees(p_s: float, trials: int, rng, cap: int = 10 ** 8):
    """Node and leaf counts of independent subdivision trees.

    Each active node succeeds (becomes a leaf) with probability p_s;
    otherwise it spawns two active children. Returns ``(nodes, leaves)``.
    """
    active = np.ones(trials, dtype=np.int64)
    total = np.zeros(trials, dtype=np.int64)
    leaves = np.zeros(trials, dtype=np.int64)
    while active.any():
        total += active
        if total.max() > cap:
            raise RuntimeError("branching process exceeded the size cap")
        live = active > 0
        split = rng.binomial(active[live], 1.0 - p_s)
        leaves[live] += active[live] - split
        active[live] = 2 * split
    return total, leaves


def galton_watson_sizes(p_s: float, trials: int, rng, cap: int = 10 ** 8) -> np.ndarray:
    """Total node counts |S| of independent subdivision trees."""
    return galton_watson_trees(p_s, trials, rng, cap)[0]


def galton_watson_size(p_s: float, rng) -> int:
    return int(galton_watson_sizes(p_s, 1, rng)[0])


def verify_ldev_random_count(p_s: float, cost_sampler: Callable, cost_exponent: float, cost_gamma_max: float,
                             trials: int, rng, gamma: Optional[float] = None) -> dict:
    """Moment bound for a cost summed over a random number of invocations.

    The invocation count follows the branching process at ``p_s``; each
    invocation draws an independent cost from ``cost_sampler(rng, k)``.
    Invocations with zero cost are not counted. The total is checked against
    gamma^(m_bound * cost_exponent) at the largest admissible gamma unless
    ``gamma`` is given.
    """
    sizes = galton_watson_sizes(p_s, trials, rng)
    costs = cost_sampler(rng, int(sizes.sum()))
    owner = np.repeat(np.arange(trials), sizes)
    total = np.bincount(owner, weights=costs, minlength=trials)
    counted = np.bincount(owner, weights=(costs > 0).astype(float), minlength=trials)
    m_bound = gw_moment_exponent(p_s)
    lam_max = gw_gamma_max(p_s)
    g_max = min(lam_max ** (1.0 / cost_exponent), cost_gamma_max)
    g = g_max if gamma is None else gamma
    if g > g_max + 1e-12:
        raise ValueError("gamma outside the admissible range")
    count_verdict = check_moment("invocation count", counted, lam_max, m_bound)
    total_verdict = check_moment("total cost", total, g, m_bound * cost_exponent)
    return {"gamma": g, "gamma_max": g_max, "m_bound": m_bound, "count": count_verdict,
            "total": total_verdict, "mean_total": float(total.mean()), "mean_count": float(counted.mean())}


def tx_prime_costs(p: float, rng, size: int) -> np.ndarray:
    """Reflection counts of the bounded-effort transformation at overlap p, sampled from its chain."""
    q = 1.0 - p
    n = np.ones(size, dtype=np.int64)
    done = rng.random(size) < p
    for _ in range(2):
        live = ~done
        n[live] += 2
        done[live] = rng.random(int(live.sum())) < 4 * p * q
    live = np.flatnonzero(~done)
    while live.size:
        n[live] += 1
        stop = rng.random(live.size) >= p
        live = live[~stop]
    return n


# ---------------------------------------------------------------------------
# arclength profiles
# ---------------------------------------------------------------------------

class SpeedProfile:
    """Piecewise-constant angular speed on [0, 1].

    ``speeds[i]`` applies on [breakpoints[i], breakpoints[i+1]].
    """

    def __init__(self, breakpoints: Sequence[float], speeds: Sequence[float]):
        bp = np.asarray(breakpoints, dtype=float)
        v = np.asarray(speeds, dtype=float)
        if bp.size != v.size + 1 or np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must increase and bracket the speeds")
        if np.any(v < 0):
            raise ValueError("speeds must be non-negative")
        self.breakpoints = bp
        self.speeds = v
        self.cumulative = np.concatenate([[0.0], np.cumsum(v * np.diff(bp))])

    @classmethod
    def uniform(cls, length: float) -> "SpeedProfile":
        return cls([0.0, 1.0], [length])

    @property
    def length(self) -> float:
        return float(self.cumulative[-1])

    def arc_length(self, s):
        return np.interp(s, self.breakpoints, self.cumulative)

    def s_lower(self, l):
        """inf{s : L(s) >= l}."""
        l = np.asarray(l, dtype=float)
        k = np.searchsorted(self.cumulative, l, side="left")
        k = np.clip(k, 1, self.speeds.size)
        seg = k - 1
        with np.errstate(divide="ignore", invalid="ignore"):
            s = self.breakpoints[seg] + (l - self.cumulative[seg]) / self.speeds[seg]
        s = np.where(l <= self.cumulative[0], self.breakpoints[0], s)
        return np.clip(np.where(np.isfinite(s), s, self.breakpoints[seg]), self.breakpoints[0],
                       self.breakpoints[-1])

    def s_upper(self, l):
        """sup{s : L(s) <= l}."""
        l = np.asarray(l, dtype=float)
        k = np.searchsorted(self.cumulative, l, side="right")
        seg = np.clip(k - 1, 0, self.speeds.size - 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            s = self.breakpoints[seg] + (l - self.cumulative[seg]) / self.speeds[seg]
        s = np.where(k >= self.cumulative.size, self.breakpoints[-1], s)
        return np.clip(np.where(np.isfinite(s), s, self.breakpoints[seg + 1]), self.breakpoints[0],
                       self.breakpoints[-1])

    def special_lengths(self, theta: float) -> np.ndarray:
        base = self.cumulative
        return np.concatenate([base + k * theta for k in (-2, -1, 0, 1, 2)])

    def v_max(self, theta: float, a: float = 0.0, b: float = 1.0, grid: int = 400) -> float:
        """Largest average speed over subintervals of [a, b] longer than theta (closure of the condition)."""
        La, Lb = float(self.arc_length(a)), float(self.arc_length(b))
        v_avg = (Lb - La) / (b - a)
        if Lb - La <= theta:
            return v_avg
        ls = _length_grid(La, Lb, grid, self.special_lengths(theta))
        l1, l2 = np.meshgrid(ls, ls, indexing="ij")
        ok = l2 - l1 >= theta - 1e-12
        s1 = np.maximum(self.s_upper(l1), a)
        s2 = np.minimum(self.s_lower(l2), b)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.where(ok & (s2 > s1), (l2 - l1) / (s2 - s1), 0.0)
        return float(max(v.max(), v_avg))


def _length_grid(lo: float, hi: float, n: int, extra=()) -> np.ndarray:
    pts = np.concatenate([np.linspace(lo, hi, n), np.asarray(extra, dtype=float)])
    pts = pts[(pts >= lo - 1e-12) & (pts <= hi + 1e-12)]
    return np.unique(np.clip(pts, lo, hi))


def _scan_pairs(profile: SpeedProfile, l: float, a: float, b: float, theta: float, grid: int):
    La, Lb = float(profile.arc_length(a)), float(profile.arc_length(b))
    extra = np.concatenate([profile.special_lengths(theta), [l, l - theta, l + theta, l - 2 * theta,
                                                             La, Lb - theta, Lb - 2 * theta]])
    ls = _length_grid(La, Lb, grid, extra)
    l1, l2 = np.meshgrid(ls, ls, indexing="ij")

    def s_lo(x):
        return np.clip(profile.s_lower(x), a, b)

    def s_up(x):
        return np.clip(profile.s_upper(x), a, b)

    return La, Lb, l1, l2, s_lo, s_up


def sigma_theta(profile: SpeedProfile, l: float, theta: float, a: float = 0.0, b: float = 1.0,
                grid: int = 240) -> float:
    """Local maximum speed variation at arclength ``l``.

    Supremum of (s4 - s1)/(s3 - s2) over a <= s1 <= s2 < s3 <= s4 <= b with
    L(s2) <= l <= L(s3), L(s3) - L(s2) >= theta and L(s4) - L(s1) <= 2 theta
    (the closure of the strict conditions). The s_i are taken at the extreme
    ends of level sets, which reduces the search to a scan over (l1, l2).
    Returns 1 when the set is empty.
    """
    La, Lb, l1, l2, s_lo, s_up = _scan_pairs(profile, l, a, b, theta, grid)
    if Lb - La <= theta or not La <= l <= Lb:
        return 1.0
    l3 = np.maximum(l2 + theta, l)
    l4 = np.minimum(l1 + 2 * theta, Lb)
    ok = (l1 <= l2) & (l2 <= l) & (l3 <= l4 + 1e-12)
    den = s_lo(l3) - s_up(l2)
    ok &= den > 1e-15
    if not ok.any():
        return 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(ok, (s_up(l4) - s_lo(l1)) / den, -np.inf)
    return float(ratio.max())


def rho_theta(profile: SpeedProfile, l: float, theta: float, a: float = 0.0, b: float = 1.0,
              grid: int = 240) -> float:
    """Ratio of the fastest average speed over a length-theta window around ``l``
    to the slowest average speed over the enclosing length-2 theta window.
    Returns 1 when the set is empty.
    """
    La, Lb, l1, l2, s_lo, s_up = _scan_pairs(profile, l, a, b, theta, grid)
    l3 = l2 + theta
    l4 = np.minimum(l1 + 2 * theta, Lb)
    ok = (La <= l1) & (l1 <= l2) & (l2 <= l) & (l <= l3 + 1e-12) & (l3 <= l4 + 1e-12)
    fast_den = s_lo(l3) - s_up(l2)
    slow_den = s_up(l4) - s_lo(l1)
    ok &= (fast_den > 1e-15) & (l4 - l1 > 1e-15)
    if not ok.any():
        return 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        fast = theta / fast_den
        slow = (l4 - l1) / slow_den
        ratio = np.where(ok, fast / slow, -np.inf)
    return float(ratio.max())


def enumerate_bit_cost(profile: SpeedProfile, theta: float, cost: Callable[[float, float], float],
                       a: float = 0.0, b: float = 1.0, depth_cap: int = 40) -> float:
    """Exact tree cost: sum of ``cost`` over every interval of the tree longer than theta."""
    total = 0.0
    stack = [(a, b, 0)]
    while stack:
        c, d, depth = stack.pop()
        span = float(profile.arc_length(d) - profile.arc_length(c))
        if span <= theta:
            continue
        if depth > depth_cap:
            raise RuntimeError("interval tree deeper than the cap")
        total += cost(c, d)
        m = 0.5 * (c + d)
        stack.append((m, d, depth + 1))
        stack.append((c, m, depth + 1))
    return total


def bit_cost_bound(profile: SpeedProfile, theta: float, cost_ceiling, a: float = 0.0, b: float = 1.0,
                   points: int = 160, grid: int = 160) -> float:
    """Scale-resolved integral bound on the tree cost.

    (1/theta) sum_k 2^-k int (floor(log2 sigma_{2^k theta}(l)) + 1) Cbar_{2^k theta}(l) dl,
    integrated by the midpoint rule. ``cost_ceiling`` is a constant or a
    callable ``(scale, l) -> Cbar``.
    """
    La, Lb = float(profile.arc_length(a)), float(profile.arc_length(b))
    span = Lb - La
    if span <= theta:
        return 0.0
    ceiling = cost_ceiling if callable(cost_ceiling) else (lambda scale, l: float(cost_ceiling))
    ls = La + (np.arange(points) + 0.5) * span / points
    total = 0.0
    k = 0
    while (2 ** k) * theta < span:
        scale = (2 ** k) * theta
        vals = []
        for l in ls:
            sig = sigma_theta(profile, l, scale, a, b, grid)
            vals.append((np.floor(np.log2(max(sig, 1.0)) + 1e-12) + 1.0) * ceiling(scale, l))
        total += np.mean(vals) * span / (2 ** k)
        k += 1
    return float(total / theta)


def bit_cost_rough(profile: SpeedProfile, theta: float, c_max: float, a: float = 0.0, b: float = 1.0) -> float:
    """2 L (log2(v_max / v_avg) + 3) C_max / theta."""
    La, Lb = float(profile.arc_length(a)), float(profile.arc_length(b))
    v_avg = (Lb - La) / (b - a)
    v_max = profile.v_max(theta, a, b)
    return float(2.0 * (Lb - La) * (np.log2(v_max / v_avg) + 3.0) * c_max / theta)


# ---------------------------------------------------------------------------
# eigenvector perturbation
# ---------------------------------------------------------------------------

def eig_angle_bound(H, S, psi, lam: float, delta: float, gap: float) -> float:
    """arcsin(||(S - delta) psi|| / gap), clamped at pi/2.

    ``H`` and ``lam`` are accepted for interface symmetry; the bound only
    needs the perturbation applied to the unperturbed eigenvector.
    """
    if gap <= 0:
        raise ValueError("gap must be positive")
    psi = np.asarray(psi, dtype=complex)
    x = np.linalg.norm(np.asarray(S) @ psi - delta * psi) / gap
    return float(np.arcsin(min(1.0, x)))


def angle_to_subspace(psi, basis) -> float:
    """Angle between a unit vector and the span of the orthonormal columns of ``basis``."""
    B = np.atleast_2d(np.asarray(basis))
    if B.shape[0] != np.size(psi):
        B = B.T
    proj = np.linalg.norm(B.conj().T @ psi)
    return float(np.arccos(min(1.0, proj)))


def _tracked_eigvec(H, rule):
    w, v = np.linalg.eigh(H)
    k = rule(w)
    return w, v[:, k], k


def projected_rate(H_of: Callable[[float], np.ndarray], t: float, rule=np.argmin, h: float = 1e-5) -> float:
    """||(1 - |psi_t><psi_t|) d psi/ds|| by central differences, with phases aligned to psi_t."""
    _, v0, _ = _tracked_eigvec(H_of(t), rule)
    _, vp, _ = _tracked_eigvec(H_of(t + h), rule)
    _, vm, _ = _tracked_eigvec(H_of(t - h), rule)
    vp = vp * np.exp(-1j * np.angle(np.vdot(v0, vp)))
    vm = vm * np.exp(-1j * np.angle(np.vdot(v0, vm)))
    deriv = (vp - vm) / (2 * h)
    deriv -= v0 * np.vdot(v0, deriv)
    return float(np.linalg.norm(deriv))


def rate_bound(H_of: Callable[[float], np.ndarray], t: float, gap: float, h: float = 1e-5) -> float:
    """||dH/ds|| / gap with the derivative by central differences (operator norm)."""
    if gap <= 0:
        raise ValueError("gap must be positive")
    dH = (np.asarray(H_of(t + h)) - np.asarray(H_of(t - h))) / (2 * h)
    return float(np.linalg.norm(dH, 2) / gap)


def hermitian_gap(H, rule=np.argmin) -> float:
    w = np.linalg.eigvalsh(H)
    k = rule(w)
    others = np.delete(w, k)
    return float(np.min(np.abs(others - w[k])))
