"""Size of the recursion tree when each attempt succeeds with probability p_s.

Run: python demos/branching.py
"""

import numpy as np

from eigenpath import analysis as an

rng = np.random.default_rng(7)
for p_s in (0.6, 0.8, 0.95):
    nodes, leaves = an.galton_watson_trees(p_s, 200_000, rng)
    g = an.gw_gamma_max(p_s)
    print(f"p_s = {p_s}: nodes {nodes.mean():.4f} (1/(2p_s-1) = {an.gw_mean_nodes(p_s):.4f}), "
          f"leaves {leaves.mean():.4f} (p_s/(2p_s-1) = {an.gw_mean(p_s):.4f}), "
          f"<g^|S|> at g={g:.3f}: exact {an.gw_moment_exact(p_s, g):.3f} "
          f"<= bound {g ** an.gw_moment_exponent(p_s):.3f}")
