"""Reference implementations used to certify the library.

Everything here is written independently of the package: classical
Markov-chain simulations, exact series, and brute-force scans. Tests
compare the package against these rather than against its own formulas.
"""

from __future__ import annotations

import math

import numpy as np


def cost_reference(delta: float, epsilon: float, c: float) -> int:
    return int(math.ceil(c * math.log(1.0 / epsilon) / delta - 1e-12))


def rt_transition_2d(p: float) -> float:
    """Probability that reflect-about-psi then measure-phi takes phi-perp to phi, using real 2x2 matrices."""
    a = math.asin(math.sqrt(1.0 - p))  # angle between psi and phi
    phi = np.array([1.0, 0.0])
    perp = np.array([0.0, 1.0])
    psi = np.array([math.cos(a), math.sin(a)])
    refl = 2 * np.outer(psi, psi) - np.eye(2)
    return float((phi @ refl @ perp) ** 2)


def chain_t(p: float, p0: float, size: int, rng) -> np.ndarray:
    """Reflection counts of the two-state absorbing chain behind T."""
    out = np.empty(size, dtype=np.int64)
    hop = 4 * p * (1 - p)
    for k in range(size):
        n = 1
        if rng.random() >= p0:
            while True:
                n += 2
                if rng.random() < hop:
                    break
        out[k] = n
    return out


def chain_tx_prime(p: float, size: int, rng):
    """(counts, success) of the bounded-effort chain: one measurement, two rounds, then alternation."""
    q = 1 - p
    hop = 4 * p * q
    counts = np.empty(size, dtype=np.int64)
    success = np.empty(size, dtype=bool)
    for k in range(size):
        n = 1
        ok = rng.random() < p
        rounds = 0
        while not ok and rounds < 2:
            n += 2
            ok = rng.random() < hop
            rounds += 1
        if not ok:
            while True:
                n += 1
                if rng.random() < q:  # psi found: failure
                    ok = False
                    break
                n += 1
                if rng.random() < q:  # phi found: success
                    ok = True
                    break
        counts[k] = n
        success[k] = ok
    return counts, success


def tx_prime_success_series(p: float, tol: float = 1e-20, max_terms: int = 10_000_000) -> float:
    """Success probability of the bounded-effort chain summed term by term."""
    q = 1 - p
    hop = 4 * p * q
    direct = p + (1 - p) * hop + (1 - p) * (1 - hop) * hop
    stuck = (1 - p) * (1 - hop) ** 2
    if stuck == 0.0:
        return direct
    # alternation: each psi-measurement fails with q, each phi-measurement succeeds with q
    tail = 0.0
    keep = 1.0
    for _ in range(max_terms):
        keep *= p          # psi-measurement missed
        tail += keep * q   # phi-measurement hit
        keep *= p          # phi-measurement missed
        if keep < tol:
            break
    return direct + stuck * tail


def catalan(k: int) -> int:
    return math.comb(2 * k, k) // (k + 1)


def gw_log_size_distribution(p_s: float, max_k: int = 4000):
    """log P(|S| = 2k + 1) = log(Catalan(k) p^(k+1) (1-p)^k) for k < max_k."""
    ks = np.arange(max_k)
    if p_s >= 1:
        logp = np.full(max_k, -np.inf)
        logp[0] = 0.0
        return 2 * ks + 1, logp
    logc = np.array([math.lgamma(2 * k + 1) - math.lgamma(k + 1) - math.lgamma(k + 2) for k in ks])
    return 2 * ks + 1, logc + (ks + 1) * math.log(p_s) + ks * math.log1p(-p_s)


def gw_size_distribution(p_s: float, max_k: int = 4000):
    sizes, logp = gw_log_size_distribution(p_s, max_k)
    return sizes, np.exp(logp)


def gw_series_mean(p_s: float) -> float:
    sizes, probs = gw_size_distribution(p_s)
    return float(np.sum(sizes * probs))


def gw_series_leaf_mean(p_s: float) -> float:
    sizes, probs = gw_size_distribution(p_s)
    return float(np.sum((sizes + 1) / 2 * probs))


def gw_series_moment(p_s: float, gamma: float) -> float:
    sizes, logp = gw_log_size_distribution(p_s)
    return float(np.sum(np.exp(logp + sizes * math.log(gamma))))


def dominance_brute(phases, weights, target: float, gamma: float, delta: float, centers: int = 20000) -> bool:
    """Scan window centres on a dense uniform grid."""
    phases = np.asarray(phases, dtype=float)
    weights = np.asarray(weights, dtype=float)
    cs = np.linspace(0.0, 2 * np.pi, centers, endpoint=False)
    dist = np.abs((phases[None, :] - cs[:, None] + np.pi) % (2 * np.pi) - np.pi)
    mass = (dist <= delta) @ weights
    tdist = np.abs((target - cs + np.pi) % (2 * np.pi) - np.pi)
    return bool(not np.any((mass > gamma) & (tdist > delta)))


def arc_length_piecewise(breakpoints, speeds, s):
    bp = np.asarray(breakpoints, dtype=float)
    v = np.asarray(speeds, dtype=float)
    cum = np.concatenate([[0.0], np.cumsum(v * np.diff(bp))])
    return np.interp(s, bp, cum)


def sigma_brute(breakpoints, speeds, l: float, theta: float, n: int = 41) -> float:
    """Dense scan over quadruples s1 <= s2 < s3 <= s4.

    The grid holds the breakpoints and the points whose arclength sits a
    multiple of theta (up to two) away from l or from a breakpoint's arclength.
    Speeds must be positive so that arclength can be inverted.
    """
    bp = np.asarray(breakpoints, float)
    cum = arc_length_piecewise(breakpoints, speeds, bp)
    marks = (np.append(cum, l)[:, None] + theta * np.arange(-2, 3)[None, :]).ravel()
    marks = marks[(marks >= 0) & (marks <= cum[-1])]
    s = np.unique(np.concatenate([np.linspace(0.0, 1.0, n), bp, np.interp(marks, cum, bp)]))
    L = arc_length_piecewise(breakpoints, speeds, s)
    i1, i2 = np.meshgrid(np.arange(s.size), np.arange(s.size), indexing="ij")
    left = (i1 <= i2) & (L[i2] <= l + 1e-12)
    a1, a2 = i1[left], i2[left]
    right = (i1 <= i2) & (L[i1] >= l - 1e-12)
    b3, b4 = i1[right], i2[right]
    best = -np.inf
    for k in range(0, a1.size, 256):
        x1, x2 = a1[k:k + 256, None], a2[k:k + 256, None]
        ok = ((s[b3][None, :] > s[x2]) & (L[b3][None, :] - L[x2] >= theta - 1e-12)
              & (L[b4][None, :] - L[x1] <= 2 * theta + 1e-12))
        if ok.any():
            num = np.broadcast_to(s[b4][None, :] - s[x1], ok.shape)[ok]
            den = np.broadcast_to(s[b3][None, :] - s[x2], ok.shape)[ok]
            best = max(best, float((num / den).max()))
    return 1.0 if not np.isfinite(best) else best


def bit_count(arc_length, theta: float, a: float = 0.0, b: float = 1.0, depth: int = 0) -> int:
    """Intervals of the binary tree whose length exceeds theta (plain recursion)."""
    if arc_length(b) - arc_length(a) <= theta:
        return 0
    if depth > 40:
        raise RuntimeError("too deep")
    m = 0.5 * (a + b)
    return 1 + bit_count(arc_length, theta, a, m, depth + 1) + bit_count(arc_length, theta, m, b, depth + 1)


def principal_angle_dense(H, S):
    """Angle between the lowest eigenvector of H and the nearest-in-energy eigenvector of H + S."""
    w, v = np.linalg.eigh(H)
    psi = v[:, 0]
    shift = float(np.real(psi.conj() @ S @ psi))
    w2, v2 = np.linalg.eigh(H + S)
    k = int(np.argmin(np.abs(w2 - (w[0] + shift))))
    return float(np.arccos(min(1.0, abs(np.vdot(v2[:, k], psi)))))
