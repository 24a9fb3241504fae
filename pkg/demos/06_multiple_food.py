"""Several food sites at once: the colony splits into one compressed
cluster per food site.  Qualitative - the controller is unchanged, so
clusters that touch can merge.
"""

from foragesim.engine import Engine, RunConfig
from foragesim import analysis
from foragesim.viz import render_ascii

cfg = RunConfig(
    side=28, n=70, algo="compression", params={"p": 0.1, "lambda": 4.0},
    seed=9, max_steps=1_500_000,
    food=[(6, 6), (20, 8), (10, 21)],
)
eng = Engine(cfg)
eng.run()

comps = analysis.components(eng.world)
lat = eng.world.lattice
food_comps = 0
for comp in comps:
    sites = {eng.world.pos[p] for p in comp}
    touches = any(
        nb in eng.world.food for s in sites for nb in lat.nbr[s]
    )
    food_comps += touches

print(render_ascii(eng.world))
print(f"\n{len(comps)} clusters, {food_comps} touching a food site; "
      f"{sum(1 for s in eng.world.states if s == 0)} still searching")
