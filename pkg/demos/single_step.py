"""Moving one state onto a nearby one with reflections and measurements.

Run: python demos/single_step.py
"""

import numpy as np

from eigenpath.oracles import Reflector
from eigenpath.onestep import t_mean_reflections, transform_t, transform_tm, transform_tx_prime

rng = np.random.default_rng(1)

for p in (0.2, 0.5, 0.9):
    psi = np.array([1.0, 0.0], dtype=complex)
    phi = np.array([np.sqrt(p), np.sqrt(1 - p)], dtype=complex)
    psi_ref, phi_ref = Reflector.exact(psi), Reflector.exact(phi)

    plain = [transform_t(psi, psi_ref, phi_ref, None, rng).n for _ in range(5000)]
    suppressed = [transform_tm(psi_ref, phi_ref, None, rng).n for _ in range(5000)]
    bounded = [transform_tx_prime(psi_ref, phi_ref, None, rng) for _ in range(5000)]

    print(f"overlap p = {p}")
    print(f"  T    mean reflections {np.mean(plain):6.3f}  (closed form {t_mean_reflections(p, p):.3f})")
    print(f"  T_m  mean reflections {np.mean(suppressed):6.3f}  (the ancilla makes the overlap 3p/4)")
    rate = np.mean([b.success for b in bounded])
    print(f"  T'_x success rate     {rate:6.3f}  mean reflections {np.mean([b.n for b in bounded]):.3f}")
