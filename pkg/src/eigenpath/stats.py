"""Monte Carlo verdict helpers: standard errors and the 3-sigma slack policy."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

SIGMAS = 3.0


@dataclass(frozen=True)
class Verdict:
    """One statistical check. ``kind`` is "le", "ge" or "eq"."""

    name: str
    kind: str
    estimate: float
    stderr: float
    target: float
    passed: bool

    def as_dict(self) -> dict:
        return asdict(self)

    def line(self) -> str:
        sym = {"le": "<=", "ge": ">=", "eq": "=="}[self.kind]
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.estimate:.6g} (se {self.stderr:.3g}) {sym} {self.target:.6g}"


def mean_se(x) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        return float(x.mean()) if x.size else float("nan"), 0.0
    return float(x.mean()), float(x.std(ddof=1) / np.sqrt(x.size))


def proportion_se(k: int, n: int, p: Optional[float] = None) -> float:
    """Binomial standard error, at ``p`` if given, else at the empirical rate."""
    q = k / n if p is None else p
    return float(np.sqrt(max(q * (1.0 - q), 0.0) / n))


def check_le(name: str, samples_or_mean, bound: float, stderr: Optional[float] = None,
             sigmas: float = SIGMAS) -> Verdict:
    """Pass iff estimate <= bound + sigmas * stderr."""
    est, se = (samples_or_mean, stderr) if stderr is not None else mean_se(samples_or_mean)
    return Verdict(name, "le", float(est), float(se), float(bound), bool(est <= bound + sigmas * se))


def check_ge(name: str, samples_or_mean, bound: float, stderr: Optional[float] = None,
             sigmas: float = SIGMAS) -> Verdict:
    est, se = (samples_or_mean, stderr) if stderr is not None else mean_se(samples_or_mean)
    return Verdict(name, "ge", float(est), float(se), float(bound), bool(est >= bound - sigmas * se))


def check_eq(name: str, samples_or_mean, target: float, stderr: Optional[float] = None,
             sigmas: float = SIGMAS) -> Verdict:
    est, se = (samples_or_mean, stderr) if stderr is not None else mean_se(samples_or_mean)
    return Verdict(name, "eq", float(est), float(se), float(target), bool(abs(est - target) <= sigmas * se))


def scaled_moment(costs, gamma: float, exponent: float) -> np.ndarray:
    """gamma**(cost - exponent) per sample; its mean is <gamma^C> / gamma^exponent without overflow."""
    c = np.asarray(costs, dtype=float)
    return np.exp((c - exponent) * np.log(gamma))


def check_moment(name: str, costs, gamma: float, exponent: float, sigmas: float = SIGMAS) -> Verdict:
    """<gamma^C> <= gamma^exponent * (1 + sigmas * relative stderr), checked on the scaled ratio."""
    ratio = scaled_moment(costs, gamma, exponent)
    return check_le(name, ratio, 1.0, sigmas=sigmas)
