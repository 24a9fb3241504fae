"""Hand-decoded reference configurations used across test modules."""

from foragesim.lattice import World
from foragesim import compression as cp

# A four-component configuration satisfying the state invariant; exactly the
# component listed under GROUP_B (bottom left) is non-residual.
FOOD_SITE = (5, 8)

GROUP_A = [(1, 4), (2, 3), (2, 4), (3, 3), (3, 4), (3, 5), (4, 5)]
GROUP_A_DT = [(4, 3), (4, 4)]
GROUP_B = [(1, 6), (2, 6), (2, 7), (3, 7), (3, 8), (3, 9), (4, 9), (4, 10)]
GROUP_B_CF = [(4, 8), (5, 9)]
GROUP_C = [(5, 7), (6, 6), (6, 7), (7, 7), (7, 8), (8, 7)]
GROUP_C_CF = [(6, 8)]
GROUP_D = [(6, 11), (7, 10), (8, 10), (8, 11), (9, 10), (9, 11)]
GROUP_D_CF = [(7, 11)]


def four_component_world(side=14):
    w = World(side)
    w.place_food(FOOD_SITE)
    members = {}
    for name, plain, cf, dt in (
        ("A", GROUP_A, [], GROUP_A_DT),
        ("B", GROUP_B, GROUP_B_CF, []),
        ("C", GROUP_C, GROUP_C_CF, []),
        ("D", GROUP_D, GROUP_D_CF, []),
    ):
        pids = []
        for c in plain:
            pids.append(w.add_particle(c, cp.C))
        for c in cf:
            pids.append(w.add_particle(c, cp.C_F))
        for c in dt:
            pids.append(w.add_particle(c, cp.DT))
        members[name] = set(pids)
    return w, members
