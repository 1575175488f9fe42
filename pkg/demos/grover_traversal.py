"""Following the ground state of the Grover interpolation in three regimes.

Run: python demos/grover_traversal.py
"""

import numpy as np

from eigenpath.experiments import equal_angle_checkpoints
from eigenpath.oracles import CostLedger
from eigenpath.paths import grover_path
from eigenpath.traversal import greedy_checkpoints, segment_overlaps, traverse_known, traverse_parallel

rng = np.random.default_rng(3)
path = grover_path(16)

cps = greedy_checkpoints(path, 1 / 3)
print("greedy checkpoints:", np.round(cps, 3))
print("segment overlaps:  ", np.round(segment_overlaps(path, cps), 3))
runs = [traverse_known(path, cps, rng=rng) for _ in range(2000)]
print(f"known overlaps: mean reflections {np.mean([r.reflections for r in runs]):.3f}, "
      f"worst fidelity {min(r.final_fidelity for r in runs):.12f}")

cps4 = equal_angle_checkpoints(path, 4)
led = CostLedger()
rep = traverse_parallel(path, cps4, r=600, gamma=0.05, ledger=led, rng=rng)
print(f"parallel copies: success {rep.success}, anchors {np.round(rep.anchors, 4)}")
print(f"  true phases    {np.round([path.phase(s) for s in cps4], 4)}")
print(f"  oracle calls per copy {led.total_oracle_calls / 600:.3f}")
