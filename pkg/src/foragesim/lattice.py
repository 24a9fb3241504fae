"""Triangular lattice on a torus: coordinates, directions, neighborhoods.

Sites are (x, y) integer pairs taken mod the side length L.  Each site has
six neighbors; direction 0 is the offset (+1, 0) and rotating a direction
by +1 turns it one step counterclockwise.  In the standard planar embedding
(x, y) -> (x * sqrt(3)/2, x/2 - y) the six directions sit at 30, 90, 150,
210, 270 and 330 degrees.

Internally sites are also addressed as flat indices idx = x * L + y; the
simulation hot paths use the precomputed flat neighbor table.
"""

from __future__ import annotations

# Counterclockwise neighbor offsets, direction 0 first.
OFFSETS = ((1, 0), (0, -1), (-1, -1), (-1, 0), (0, 1), (1, 1))

# occupancy sentinels
EMPTY = -1
FOOD = -2


def rotate(d, k):
    """Rotate direction d by k steps counterclockwise (k may be negative)."""
    return (d + k) % 6


def opposite(d):
    return (d + 3) % 6


class Lattice:
    """Geometry of an L x L triangular torus (N = L^2 sites)."""

    def __init__(self, side):
        if side < 3:
            raise ValueError("side must be >= 3")
        self.side = side
        self.nsites = side * side
        # flat neighbor table: nbr[idx][d] -> neighbor idx
        L = side
        self.nbr = [
            tuple(((x + dx) % L) * L + (y + dy) % L for dx, dy in OFFSETS)
            for x in range(L)
            for y in range(L)
        ]

    def index(self, c):
        x, y = c
        L = self.side
        return (x % L) * L + (y % L)

    def coord(self, idx):
        return divmod(idx, self.side)

    def neighbor(self, c, d):
        """The adjacent site in direction d, wrapped mod L."""
        x, y = c
        dx, dy = OFFSETS[d]
        L = self.side
        return ((x + dx) % L, (y + dy) % L)

    def neighbors(self, c):
        return [self.neighbor(c, d) for d in range(6)]

    def direction_of(self, a, b):
        """Direction d with neighbor(a, d) == b, or None if not adjacent."""
        L = self.side
        dx = (b[0] - a[0]) % L
        dy = (b[1] - a[1]) % L
        for d, (ox, oy) in enumerate(OFFSETS):
            if (ox % L, oy % L) == (dx, dy):
                return d
        return None

    def common_neighbors(self, a, b):
        """The two sites adjacent to both a and b; error if a, b not adjacent."""
        if self.direction_of(a, b) is None:
            raise ValueError("not adjacent")
        na = set(self.neighbors(a))
        nb = set(self.neighbors(b))
        return na & nb


class World:
    """Lattice occupancy plus per-particle state.

    Invariants: at most one particle per site; food sites never hold a
    particle.  `occ[idx]` is a particle id, EMPTY, or FOOD.  State ints are
    owned by the algorithm modules (compression / spiral); `parent` holds a
    direction 0..5 for spiral compression particles, -1 otherwise.
    """

    def __init__(self, side):
        self.lattice = Lattice(side)
        self.side = side
        self.occ = [EMPTY] * self.lattice.nsites
        self.food = set()       # of flat idx
        self.pos = []           # pid -> idx
        self.states = []        # pid -> int (algorithm-specific encoding)
        self.parent = []        # pid -> direction or -1

    @property
    def n_particles(self):
        return len(self.pos)

    def add_particle(self, c, state, parent=-1):
        idx = self.lattice.index(c)
        if self.occ[idx] != EMPTY:
            raise ValueError(f"site {c} occupied")
        pid = len(self.pos)
        self.occ[idx] = pid
        self.pos.append(idx)
        self.states.append(state)
        self.parent.append(parent)
        return pid

    def move_particle(self, pid, to_idx):
        if self.occ[to_idx] != EMPTY:
            raise ValueError("target site occupied")
        self.occ[self.pos[pid]] = EMPTY
        self.occ[to_idx] = pid
        self.pos[pid] = to_idx

    def place_food(self, c):
        idx = self.lattice.index(c)
        if self.occ[idx] != EMPTY:
            raise ValueError("site occupied")
        self.occ[idx] = FOOD
        self.food.add(idx)

    def remove_food(self, c):
        idx = self.lattice.index(c)
        if idx not in self.food:
            raise ValueError("no food at source")
        self.food.discard(idx)
        self.occ[idx] = EMPTY

    def move_food(self, src, dst):
        sidx = self.lattice.index(src)
        didx = self.lattice.index(dst)
        if sidx not in self.food:
            raise ValueError("no food at source")
        if didx != sidx and self.occ[didx] != EMPTY:
            raise ValueError("site occupied")
        self.food.discard(sidx)
        self.occ[sidx] = EMPTY
        self.food.add(didx)
        self.occ[didx] = FOOD

    def particle_at(self, c):
        o = self.occ[self.lattice.index(c)]
        return o if o >= 0 else None

    def copy(self):
        w = World.__new__(World)
        w.lattice = self.lattice
        w.side = self.side
        w.occ = list(self.occ)
        w.food = set(self.food)
        w.pos = list(self.pos)
        w.states = list(self.states)
        w.parent = list(self.parent)
        return w

    def check_occupancy(self):
        """Assert the occupancy invariants; used by tests and `verify`."""
        seen = set()
        for pid, idx in enumerate(self.pos):
            if self.occ[idx] != pid:
                raise AssertionError(f"occ/pos mismatch for particle {pid}")
            if idx in seen or idx in self.food:
                raise AssertionError(f"site {self.lattice.coord(idx)} double-occupied")
            seen.add(idx)
        for idx in self.food:
            if self.occ[idx] != FOOD:
                raise AssertionError("food set / occupancy mismatch")
        n_marked = sum(1 for o in self.occ if o != EMPTY)
        if n_marked != len(self.pos) + len(self.food):
            raise AssertionError("stray occupancy entries")
