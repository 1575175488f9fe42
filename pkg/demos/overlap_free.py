"""Traversal without any overlap information: bisect where a bounded attempt fails.

Run: python demos/overlap_free.py
"""

import numpy as np

from eigenpath.analysis import SpeedProfile
from eigenpath.core import velocity_profile
from eigenpath.paths import great_circle_path, speed_profile_path
from eigenpath.traversal import overlap_free_bound, traverse_recursive_overlap_free

rng = np.random.default_rng(5)
theta = float(np.arccos(np.sqrt(1 / 3)))

# endpoints nearly orthogonal, so a single attempt over [0, 1] rarely succeeds
for label, path in (("uniform L=1.5", great_circle_path(1.5)),
                    ("uneven L=1.5", speed_profile_path(SpeedProfile([0.0, 0.2, 1.0], [5.0, 0.625])))):
    geo = velocity_profile(path, theta)
    runs = [traverse_recursive_overlap_free(path, rng=rng) for _ in range(300)]
    depth = max(max(rec.depth for rec in r.intervals) for r in runs)
    print(f"{label}: v_max/v_avg {geo.v_max / geo.v_avg:.2f}, mean reflections "
          f"{np.mean([r.reflections for r in runs]):.2f}, mean intervals {np.mean([r.attempted for r in runs]):.2f}, "
          f"deepest split {depth}, bound {overlap_free_bound(geo.length, geo.v_max, geo.v_avg):.1f}")
