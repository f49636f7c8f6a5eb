"""
Visiting more often spreads it faster
=====================================

Users act only when they check the site (every tau steps, with tau drawn
from an exponential distribution).  Halving the mean period roughly halves
the time the Trojan needs to reach the same share of the network.

    python demos/05_visit_frequency.py [facebook_combined.txt]
"""

import numpy as np

from _common import demo_graph
from trojanprop import preset
from trojanprop.experiments import run_model_replicates

g = demo_graph()

curves = {}
for mean in (40, 20, 10):
    curves[mean] = run_model_replicates(g, preset("exp1a", tau_mean=float(mean), runs=20, horizon=100)).infected

print("\n   t" + "".join(f"   tau~E({m})" for m in curves))
for t in (10, 25, 50, 75, 100):
    print(f"{t:>4}" + "".join(f"   {curves[m][t]:>9.0f}" for m in curves))

# %% time to half the network
half = g.node_count / 2
for m, y in curves.items():
    hit = np.flatnonzero(y >= half)
    print(f"tau~E({m}): half infected at t = {hit[0] if len(hit) else 'never'}")
