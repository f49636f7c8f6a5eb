"""
Model against Monte Carlo
=========================

The probability model tracks every user's chance of being in each state.
Here it is run next to the stochastic simulator under matched scenarios
(same infiltrator and visit periods per replicate) and the two infected
curves are compared.

    python demos/02_model_vs_simulation.py [facebook_combined.txt]
"""

from _common import demo_graph
from trojanprop import pearson, preset, run_experiment, series_discrepancy

g = demo_graph()

# collaborative disinfection with delta = 0.2 and the slow linear AV ramp
spec = preset("exp3-0.2", runs=30)
res = run_experiment(spec, g)
model, sim = res.model, res.sim.average

# %% side by side every 10 steps
print("\n   t   model infected   simulated infected   protected (model)")
for t in range(0, spec.horizon + 1, 10):
    print(f"{t:>4}   {model.infected[t]:>14.1f}   {sim.infected[t]:>18.1f}   {model.protected[t]:>17.1f}")

# %% agreement
corr = pearson(model.infected, sim.infected)
disc = series_discrepancy(model.infected, sim.infected)
print(f"\nPearson r = {corr.r:.4f} (p = {corr.p_value:.2e}, n = {corr.n})")
print(f"largest gap {disc.max_abs_pct:.2f}% of the simulated peak, at t = {disc.argmax_t}")

# %% how long did the simulated outbreaks last?
stops = [r.stop_step for r in res.sim.records]
early = sum(r.stopped_early for r in res.sim.records)
print(f"{early} of {len(stops)} runs ended before the horizon; median stop step {sorted(stops)[len(stops) // 2]}")
