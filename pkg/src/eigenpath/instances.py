"""Small operator pairs with a prescribed overlap, used by experiments and demos."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import SpectralOperator, TWO_PI
from .oracles import IDEAL, OracleConfig, Reflector


def basis_with_first(v: np.ndarray) -> np.ndarray:
    """Unitary whose first column is ``v``."""
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    d = v.size
    M = np.eye(d, dtype=complex)
    k = int(np.argmax(np.abs(v)))
    M[:, [0, k]] = M[:, [k, 0]]
    M[:, 0] = v
    Q, R = np.linalg.qr(M)
    Q[:, 0] *= R[0, 0] / abs(R[0, 0])
    return Q


@dataclass
class OverlapInstance:
    """psi an eigenvector of U, phi an eigenvector of V, with |<psi|phi>|^2 = p."""

    U: SpectralOperator
    V: SpectralOperator
    psi: np.ndarray
    phi: np.ndarray
    phase_u: float
    phase_v: float
    gap: float

    @property
    def overlap(self) -> float:
        return float(abs(np.vdot(self.psi, self.phi)) ** 2)

    def psi_reflector(self, cfg: OracleConfig = IDEAL, anchor: Optional[float] = None) -> Reflector:
        return Reflector.from_oracle(self.U, self.phase_u if anchor is None else anchor, self.gap, cfg,
                                     target=self.psi)

    def phi_reflector(self, cfg: OracleConfig = IDEAL, anchor: Optional[float] = None) -> Reflector:
        return Reflector.from_oracle(self.V, self.phase_v if anchor is None else anchor, self.gap, cfg,
                                     target=self.phi)

    def copies(self, r: int) -> np.ndarray:
        return np.tile(self.psi, (r, 1))


def overlap_instance(p: float, dim: int = 4, rest: Optional[Sequence[float]] = None,
                     phases: Optional[Sequence[float]] = None) -> OverlapInstance:
    """V = diag(exp(i phases)) with phi = |0>; psi has weight p on |0>.

    ``rest`` distributes the remaining weight 1 - p over |1>..|dim-1>
    (uniform by default). U has psi as its first eigenvector, with the same
    phase list as V.
    """
    ph = np.asarray(phases if phases is not None else TWO_PI * np.arange(dim) / dim, dtype=float)
    w = np.full(dim - 1, 1.0 / (dim - 1)) if rest is None else np.asarray(rest, dtype=float)
    w = w / w.sum()
    psi = np.concatenate([[np.sqrt(p)], np.sqrt((1.0 - p) * w)]).astype(complex)
    phi = np.zeros(dim, dtype=complex)
    phi[0] = 1.0
    V = SpectralOperator.from_spectrum(ph, np.eye(dim, dtype=complex))
    U = SpectralOperator.from_spectrum(ph, basis_with_first(psi))
    gap = float(np.min(np.abs(np.mod(ph[0] - ph[1:] + np.pi, TWO_PI) - np.pi)))
    return OverlapInstance(U, V, psi, phi, float(ph[0]), float(ph[0]), gap)
