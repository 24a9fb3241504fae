"""Gather-then-search lifecycle of the stochastic compression controller.

Particles start dispersed, find the food, and compress into a low-perimeter
cluster around it; removing the food triggers the dissolution wave and the
colony returns to searching.  Watch phi (the dissolution potential) climb
during the gather phase and crash to zero after the food vanishes.
"""

from foragesim.engine import Engine, Event, RunConfig
from foragesim import analysis
from foragesim.viz import render_ascii

cfg = RunConfig(
    side=20, n=40, algo="compression", params={"p": 0.1, "lambda": 4.0},
    seed=11, max_steps=2_000_000, food=[(10, 10)],
    terminal="gathered", terminal_every=40,
)
eng = Engine(cfg)
art = eng.run()

print(f"gathered after {art.steps} steps")
sites = set(eng.world.food) | set(eng.world.pos)
print(f"phi = {analysis.potential(eng.world)[0]}, "
      f"alpha = {analysis.alpha_ratio(eng.world, sites):.2f}")
print(render_ascii(eng.world))

eng.inject_event(Event(step=eng.step_no, action="remove", at=(10, 10)))
start = eng.step_no
while eng.step_no < start + 200_000:
    eng.step()
    if eng.step_no % 40 == 0 and all(s == 0 for s in eng.world.states):
        break

print(f"\nfood removed; all particles back in dispersion after "
      f"{eng.step_no - start} further steps")
print(f"phi = {analysis.potential(eng.world)[0]}")
