"""Adaptive spiraling particle controller.

Particles are either in the dispersion state or carry a compression
sub-state: a base label 0..6 plus a verified flag (bases 0..5 only) and a
parent direction pointing one step inward along the spiral.  The first six
particles ring the food counterclockwise with bases 0..5; every later
spiral particle has base 6.

A particle joins (or re-labels itself) only when the local attachment
predicate holds for some state and direction; a stable particle toggles its
verified flag according to whether it is verifiable; an unstable,
non-attachable particle falls back to dispersion.  Dispersion particles do
a simple-exclusion random-walk step; compression particles never move.

Direction convention: +1 rotation is counterclockwise (see lattice module),
so relative-direction constraints here appear with the opposite sign to a
clockwise-positive formulation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lattice import EMPTY, FOOD

DISPERSION = 0

# compression code = 1 + base (+ 7 if verified); bases 0..6, verified bases 0..5
_VER_OFFSET = 7


def code(base, verified=False):
    if verified and base > 5:
        raise ValueError("base 6 has no verified form")
    return 1 + base + (_VER_OFFSET if verified else 0)


def base_of(c):
    return (c - 1) % _VER_OFFSET if c >= 1 else None


def is_verified(c):
    return c > _VER_OFFSET


def is_comp(c):
    return c >= 1


def state_name(c):
    if c == DISPERSION:
        return "D"
    b = base_of(c)
    return f"{b}*" if is_verified(c) else str(b)


# activation events
SP_NONE = 0
SP_RELABEL = 1   # stable particle toggled verified/unverified
SP_ATTACH = 2    # adopted a compression state (from dispersion or unstable)
SP_DETACH = 3    # unstable, non-attachable -> dispersion

EVENT_NAMES = ("none", "relabel", "attach", "detach")


@dataclass
class SpiralParams:
    """rho: probability that an attachable dispersion particle joins."""
    rho: float

    def __post_init__(self):
        if not (0.0 < self.rho < 0.5):
            raise ValueError("rho must lie strictly in (0, 1/2)")


def attachment_property(world, site, state_code, d):
    """The local predicate allowing a particle at `site` to hold
    `state_code` with parent direction d.

    `site` may be occupied or a hypothetical placement; only the
    neighborhood matters.  With v_p the neighbor in direction d and
    v_cw / v_ccw the neighbors one step clockwise / counterclockwise of it:

    - v_p must exist and not be a dispersion particle;
    - food parent: either s in {0, 0*} with the ccw neighbor not a
      compression particle, or the ccw neighbor is a compression particle
      of base 5.  (Without the first clause's ccw restriction, every
      food-adjacent particle could hold state 0 forever and the circle
      could never label itself 0..5; the base-5 clause is exactly what
      keeps the finished circle's 0* stable.);
    - parent base 0: base 1, parent's direction = d - 2, cw neighbor is food;
    - parent base 1..4: base = parent base + 1, parent's direction = d - 1,
      cw neighbor is food;
    - parent base 5: state exactly 6, parent's direction = d, cw neighbor in
      verified state 0*;
    - parent base 6: state 6, cw neighbor a compression particle; if its
      base is 0 then parent's direction = d - 1 and the cw neighbor's
      direction is that or one further clockwise; if its base is >= 1 then
      parent's direction is d or d - 1 and the cw neighbor's direction
      equals the parent's.
    """
    occ = world.occ
    states = world.states
    parent = world.parent
    nb = world.lattice.nbr[site]

    vp = occ[nb[d]]
    if vp == EMPTY:
        return False
    if vp >= 0 and states[vp] == DISPERSION:
        return False

    b = base_of(state_code)

    if vp == FOOD:
        o = occ[nb[(d + 1) % 6]]
        ccw_comp = o >= 0 and is_comp(states[o])
        if ccw_comp and base_of(states[o]) == 5:
            return True
        return b == 0 and not ccw_comp

    bp = base_of(states[vp])
    dp = parent[vp]
    cw_site = nb[d - 1]

    if bp == 0:
        return b == 1 and dp == (d - 2) % 6 and occ[cw_site] == FOOD
    if 1 <= bp <= 4:
        return b == bp + 1 and dp == (d - 1) % 6 and occ[cw_site] == FOOD
    if bp == 5:
        o = occ[cw_site]
        return (
            state_code == code(6)
            and dp == d
            and o >= 0
            and states[o] == code(0, verified=True)
        )
    # bp == 6
    if state_code != code(6):
        return False
    o = occ[cw_site]
    if o < 0 or not is_comp(states[o]):
        return False
    bcw = base_of(states[o])
    dcw = parent[o]
    if bcw == 0:
        return dp == (d - 1) % 6 and dcw in (dp, (dp - 1) % 6)
    return dp in (d, (d - 1) % 6) and dcw == dp


def _candidate_dirs(world, site):
    occ = world.occ
    states = world.states
    out = []
    for d, s in enumerate(world.lattice.nbr[site]):
        o = occ[s]
        if o == FOOD or (o >= 0 and is_comp(states[o])):
            out.append(d)
    return out


def find_attachment(world, site, all_pairs=False):
    """Search (base, direction) pairs satisfying the attachment property at
    `site`, unverified states only.  Returns the first pair under the
    deterministic order (smallest base, then smallest direction), or the
    full list when all_pairs is set.  None / empty list when nothing fits.
    """
    dirs = _candidate_dirs(world, site)
    if not dirs:
        return [] if all_pairs else None
    found = []
    for b in range(7):
        c = code(b)
        for d in dirs:
            if attachment_property(world, site, c, d):
                if not all_pairs:
                    return (b, d)
                found.append((b, d))
    return found if all_pairs else None


def is_stable(world, pid):
    s = world.states[pid]
    if not is_comp(s):
        return False
    return attachment_property(world, world.pos[pid], s, world.parent[pid])


def is_verifiable(world, pid):
    """For a stable particle of base <= 5: base 5 is always verifiable;
    otherwise the particle one step counterclockwise around the food must be
    in verified state (base+1)* with this particle as its parent."""
    s = world.states[pid]
    b = base_of(s)
    if b is None or b > 5:
        return False
    p = world.pos[pid]
    nb = world.lattice.nbr[p]
    d = world.parent[pid]
    food_site = nb[d] if b == 0 else nb[d - 1]
    if food_site not in world.food:
        return False
    if b == 5:
        return True
    k = None
    for dd, site in enumerate(world.lattice.nbr[food_site]):
        if site == p:
            k = dd
            break
    u_site = world.lattice.nbr[food_site][(k + 1) % 6]
    o = world.occ[u_site]
    if o < 0 or world.states[o] != code(b + 1, verified=True):
        return False
    return world.lattice.nbr[u_site][world.parent[o]] == p


def classify(world, pid):
    """Full classification of a particle: one of
    ('stable', verifiable_bool), ('attachable', base, dir, all_pairs),
    ('unstable',), ('dispersion',)."""
    s = world.states[pid]
    site = world.pos[pid]
    if is_comp(s):
        if attachment_property(world, site, s, world.parent[pid]):
            return ("stable", is_verifiable(world, pid))
        pairs = find_attachment(world, site, all_pairs=True)
        if pairs:
            b, d = pairs[0]
            return ("attachable", b, d, pairs)
        return ("unstable",)
    pairs = find_attachment(world, site, all_pairs=True)
    if pairs:
        b, d = pairs[0]
        return ("attachable", b, d, pairs)
    return ("dispersion",)


def activate(world, pid, params, rng):
    """One activation: state step per the attachment rules, then one
    random-walk move if the particle ends the state step in dispersion.
    Returns (event, frm, to) with frm = -1 when no move happened."""
    states = world.states
    s = states[pid]
    site = world.pos[pid]
    ev = SP_NONE

    if is_comp(s):
        if attachment_property(world, site, s, world.parent[pid]):
            b = base_of(s)
            if b <= 5:
                new = code(b, verified=True) if is_verifiable(world, pid) else code(b)
                if new != s:
                    states[pid] = new
                    ev = SP_RELABEL
        else:
            pair = find_attachment(world, site)
            if pair is not None:
                states[pid] = code(pair[0])
                world.parent[pid] = pair[1]
                ev = SP_ATTACH
            else:
                states[pid] = DISPERSION
                world.parent[pid] = -1
                ev = SP_DETACH
    else:
        pair = find_attachment(world, site)
        if pair is not None and rng.random() < params.rho:
            states[pid] = code(pair[0])
            world.parent[pid] = pair[1]
            ev = SP_ATTACH

    if states[pid] == DISPERSION:
        to = world.lattice.nbr[site][rng.randrange(6)]
        if world.occ[to] == EMPTY:
            world.occ[site] = EMPTY
            world.occ[to] = pid
            world.pos[pid] = to
            return ev, site, to
    return ev, -1, -1


def canonical_spiral_sites(lattice, food_idx, d0, limit):
    """First `limit` sites of the canonical counterclockwise spiral around
    `food_idx` whose position 0 lies in direction d0: the six food neighbors
    in ccw order, then each ring entered just past the previous ring's last
    corner and walked fully counterclockwise."""
    out = []
    for site in _spiral_iter(lattice, food_idx, d0):
        if len(out) >= limit:
            break
        out.append(site)
    return out


def spiral_parent_dirs(lattice, food_idx, d0, limit):
    """Parent directions matching canonical_spiral_sites: position i points
    at position i-1 (position 0 points at the food)."""
    sites = canonical_spiral_sites(lattice, food_idx, d0, limit)
    dirs = []
    prev = food_idx
    for s in sites:
        d = None
        for dd, nb in enumerate(lattice.nbr[s]):
            if nb == prev:
                d = dd
                break
        dirs.append(d)
        prev = s
    return dirs


@dataclass
class Spiral:
    food: int          # food site idx
    start_dir: int     # direction of position 0 from the food
    particles: list    # pids in spiral order
    truncated: bool    # canonical path self-intersected (lattice too small)


def find_spirals(world):
    """All maximal canonical spirals: verified 0*..5* then unverified 6s,
    parent chain rooted at the food, positions on the canonical
    counterclockwise path."""
    lat = world.lattice
    occ = world.occ
    states = world.states
    out = []
    for f in sorted(world.food):
        for d0 in range(6):
            seq = []
            visited = set()
            prev = f
            truncated = False
            for i, site in enumerate(_spiral_iter(lat, f, d0)):
                if site in visited or site == f:
                    truncated = True
                    break
                visited.add(site)
                o = occ[site]
                if o < 0:
                    break
                want = code(i, verified=True) if i <= 5 else code(6)
                if states[o] != want:
                    break
                if lat.nbr[site][world.parent[o]] != prev:
                    break
                seq.append(o)
                prev = site
            if seq:
                out.append(Spiral(f, d0, seq, truncated))
    return out


def _spiral_iter(lattice, food_idx, d0):
    nbr = lattice.nbr
    for i in range(6):
        yield nbr[food_idx][(d0 + i) % 6]
    r = 2
    while True:
        cur = food_idx
        for _ in range(r - 1):
            cur = nbr[cur][(d0 - 1) % 6]
        cur = nbr[cur][d0]
        yield cur
        legs = [((d0 + 1) % 6, r - 1)] + [((d0 + 2 + j) % 6, r) for j in range(5)]
        for d, steps in legs:
            for _ in range(steps):
                cur = nbr[cur][d]
                yield cur
        r += 1


def spiral_particles(world):
    """Set of pids belonging to some spiral."""
    pids = set()
    for sp in find_spirals(world):
        pids.update(sp.particles)
    return pids


def build_spiral_world(side, n, d0=0, food=None, verified_all=True):
    """Construct a world holding a canonical n-particle spiral (test/demo
    helper; also the shape behind the minimum-perimeter oracle).  Bases 0..5
    are verified when verified_all; later particles are 6s."""
    from .lattice import World

    w = World(side)
    if food is None:
        food = (side // 2, side // 2)
    w.place_food(food)
    fidx = w.lattice.index(food)
    sites = canonical_spiral_sites(w.lattice, fidx, d0, n)
    dirs = spiral_parent_dirs(w.lattice, fidx, d0, n)
    for i, (site, d) in enumerate(zip(sites, dirs)):
        b = min(i, 6)
        w.add_particle(w.lattice.coord(site), code(b, verified=(i <= 5 and verified_all)), d)
    return w
