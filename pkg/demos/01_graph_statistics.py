"""
Structure of a social graph
===========================

Load an edge list (or grow a synthetic one) and look at the properties that
make online social networks different from random graphs: high clustering,
short paths and a heavy-tailed degree distribution.

    python demos/01_graph_statistics.py [facebook_combined.txt]
"""

import numpy as np

from _common import demo_graph
from trojanprop import clustering_coefficient, graph_stats

g = demo_graph()

# %% summary table
s = graph_stats(g)
for key, value in s.to_dict().items():
    print(f"{key:>18}: {value}")

# %% clustering of the best-connected user versus a typical one
hub = int(np.argmax(g.degree))
typical = int(np.argsort(g.degree)[g.node_count // 2])
print(f"\nhub {hub}: degree {g.degree[hub]}, clustering {clustering_coefficient(g, hub):.3f}")
print(f"median user {typical}: degree {g.degree[typical]}, clustering {clustering_coefficient(g, typical):.3f}")

# %% degree CCDF on a few points, the straight line in log-log space is the power law
ks = np.unique(np.geomspace(5, g.degree.max(), 8).astype(int))
ccdf = [(g.degree >= k).mean() for k in ks]
print("\n  k   P(deg >= k)")
for k, f in zip(ks, ccdf):
    print(f"{k:>4}   {f:.4f}")
print(f"fitted exponent: {s.powerlaw_alpha:.2f}")
