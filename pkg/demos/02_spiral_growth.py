"""Spiral construction around a static food site.

The first six arrivals label themselves 0..5 counterclockwise, verify into
a complete circle (stage 4), and every later particle extends the single
winding chain of 6s.  Stages only ever move forward while the food stays
put.
"""

from foragesim.engine import Engine, RunConfig
from foragesim import analysis, spiral as sp
from foragesim.viz import render_ascii

cfg = RunConfig(
    side=18, n=14, algo="spiral", params={"rho": 0.25}, seed=4,
    max_steps=5_000_000, food=[(9, 9)],
    terminal="spiral_complete", terminal_every=28,
)
eng = Engine(cfg)

stage = analysis.stage(eng.world)
print(f"step 0: stage {stage}")
while eng.step_no < cfg.max_steps:
    pid, ev, aux, frm, to = eng.step()
    if ev != 0:
        s = analysis.stage(eng.world)
        if s != stage:
            print(f"step {eng.step_no}: stage {stage} -> {s}")
            stage = s
    if eng.step_no % 28 == 0:
        from foragesim.engine import spiral_complete
        if spiral_complete(eng.world):
            break

spirals = sp.find_spirals(eng.world)
print(f"\ncomplete after {eng.step_no} steps: one spiral of length "
      f"{len(spirals[0].particles)}")
print(render_ascii(eng.world, algo="spiral"))
