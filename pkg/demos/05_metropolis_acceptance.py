"""Empirical acceptance frequencies of repeated identical move proposals
against the target min(1, lambda^delta) for a few biases.
"""

import random

from foragesim.lattice import World
from foragesim import compression as cp


class DirRecorder(random.Random):
    def randrange(self, n):
        v = super().randrange(n)
        if n == 6:
            self.last_dir = v
        return v


def find_proposal(delta, seed=0):
    rng = random.Random(seed)
    while True:
        w = World(12)
        w.place_food((6, 6))
        for _ in range(rng.randrange(3, 9)):
            c = (rng.randrange(3, 10), rng.randrange(3, 10))
            if w.occ[w.lattice.index(c)] == -1:
                w.add_particle(c, cp.C_F if rng.random() < 0.4 else cp.C)
        for pid in range(w.n_particles):
            frm = w.pos[pid]
            for d in range(6):
                to = w.lattice.nbr[frm][d]
                if (cp.move_verdict(w, frm, to) == cp.VALID
                        and cp.delta_edges(w, frm, to) == delta):
                    return w, pid, d


print(f"{'lambda':>8} {'delta':>6} {'target':>8} {'measured':>9}")
for delta in (-2, -1, 0, 1):
    w0, pid, d = find_proposal(delta)
    for lam in (0.5, 1.0, 4.0):
        params = cp.CompressionParams(0.1, lam)
        target = cp.acceptance_probability(delta, lam)
        rng = DirRecorder(17)
        pristine = (list(w0.occ), list(w0.pos), list(w0.states))
        w = w0.copy()
        hits = accepted = 0
        while hits < 20_000:
            moved = cp.movement_step(w, pid, params, rng)
            if rng.last_dir == d:
                hits += 1
                accepted += moved is not None
            w.occ, w.pos, w.states = (list(pristine[0]), list(pristine[1]),
                                      list(pristine[2]))
        print(f"{lam:8.1f} {delta:6d} {target:8.4f} {accepted / hits:9.4f}")
