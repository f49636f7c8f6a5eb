"""
Disinfection strength
=====================

Two ways out of the infected state: help from clean friends (delta) and
recovering on one's own (q).  A sweep over each shows how the epidemic peak
shrinks as either probability grows.

    python demos/04_disinfection_sweep.py [facebook_combined.txt]
"""

from _common import demo_graph
from trojanprop import preset, sweep

g = demo_graph()

for param, base in (("delta", "exp3-0"), ("q", "exp4-0")):
    rows = sweep(param, [0.0, 0.1, 0.2, 0.3, 0.4], preset(base, runs=20), g)
    print(f"\n{param:>6}   peak infected   at step   protected at end")
    for r in rows:
        print(f"{r['value']:>6.1f}   {r['peak_infected']:>13.1f}   {r['peak_t']:>7}   {r['final_protected']:>16.0f}")

# friends' help is scaled by the share of friends who are still clean, so at
# equal values delta never recovers users faster than q does
