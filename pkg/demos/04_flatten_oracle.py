"""The flatten-to-line oracle: a random connected blob is driven onto a
single ray from the food using only legal cluster moves.  Every emitted
move is re-validated here against the movement rules.
"""

import random

from foragesim.lattice import World
from foragesim import comb, compression as cp
from foragesim.viz import render_ascii

rng = random.Random(8)
side = 32
w = World(side)
w.place_food((16, 16))
lat = w.lattice
frontier = [lat.index((16, 16))]
while w.n_particles < 9:
    site = lat.nbr[rng.choice(frontier)][rng.randrange(6)]
    if w.occ[site] == -1:
        w.add_particle(lat.coord(site), cp.C)
        frontier.append(site)

print("before:")
print(render_ascii(w))

moves = comb.flatten_to_line(w)
for (a, b) in moves:
    fa, ta = lat.index(a), lat.index(b)
    assert cp.move_verdict(w, fa, ta) == cp.VALID
    w.move_particle(w.occ[fa], ta)

print(f"\nafter {len(moves)} valid moves:")
print(render_ascii(w))
