"""
How fast should AV updates ship?
================================

Susceptible users become immune at a per-step rate that ramps up to 0.75.
Faster ramps protect more people, and for the same deadline a linear ramp
beats an exponential one because it front-loads the protection.

    python demos/03_av_schedules.py [facebook_combined.txt]
"""

from _common import demo_graph
from trojanprop import beta, preset
from trojanprop.experiments import run_model_replicates

g = demo_graph()
names = [f"exp2-{kind}-{tm}" for kind in ("linear", "exp") for tm in (150, 100, 25)]

# %% the ramps themselves
print("\nimmunisation rate by step")
print(" " * 16 + "".join(f"{t:>7}" for t in (10, 25, 50, 100, 150)))
for name in names:
    s = preset(name).schedule
    print(f"{name:>16}" + "".join(f"{beta(s, t):>7.3f}" for t in (10, 25, 50, 100, 150)))

# %% expected counts at t = 50, averaged over 20 scenarios
print("\n            preset   infected(50)   protected(50)   final infected")
for name in names:
    ts = run_model_replicates(g, preset(name, runs=20))
    print(f"{name:>18}   {ts.infected[50]:>12.0f}   {ts.protected[50]:>13.0f}   {ts.infected[-1]:>14.0f}")
