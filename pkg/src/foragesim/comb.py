"""Deterministic move-sequence oracle: flatten any connected cluster with a
fixed food particle into a straight line using only valid compression moves.

The construction works radially: the six rays from the food are "spines";
a comb operation sweeps the particles between two adjacent spines toward
the counterclockwise one, and rounds of spine combs reduce the minimum
spine length until a bare line remains.  All bookkeeping happens in an
unwrapped planar copy with the food at the origin; the emitted moves are
translated back to torus coordinates at the end.

Every emitted move is validated against the compression move rules at emit
time; the oracle raises CombError rather than emit an illegal move.
"""

from __future__ import annotations

from collections import deque

from .lattice import OFFSETS

_SAFETY_ROUNDS = 64


class CombError(Exception):
    pass


def _nbrs(c):
    return [(c[0] + dx, c[1] + dy) for dx, dy in OFFSETS]


def _nbr(c, d):
    dx, dy = OFFSETS[d % 6]
    return (c[0] + dx, c[1] + dy)


# ---------------------------------------------------------------------------
# planar cluster with validated moves

class Cluster:
    """Particle set in the plane with the immobile food at (0, 0)."""

    def __init__(self, particles):
        self.food = (0, 0)
        self.particles = set(particles)
        if self.food in self.particles:
            raise ValueError("food site occupied by a particle")
        self.moves = []

    def occupied(self, c):
        return c == self.food or c in self.particles

    def copy(self):
        c = Cluster(self.particles)
        c.moves = list(self.moves)
        return c

    def move(self, frm, to):
        if frm not in self.particles:
            raise CombError(f"no particle at {frm}")
        if not valid_plane_move(self, frm, to):
            raise CombError(f"illegal move {frm} -> {to}")
        self.particles.discard(frm)
        self.particles.add(to)
        self.moves.append((frm, to))

    def connected(self):
        sites = self.particles | {self.food}
        start = self.food
        seen = {start}
        stack = [start]
        while stack:
            cur = stack.pop()
            for q in _nbrs(cur):
                if q in sites and q not in seen:
                    seen.add(q)
                    stack.append(q)
        return len(seen) == len(sites)


def valid_plane_move(cluster, frm, to):
    """Definition-1 legality in the plane (every particle plus the food is
    a cluster particle)."""
    if to not in _nbrs(frm) or cluster.occupied(to):
        return False
    occ = cluster.occupied
    nf = _nbrs(frm)
    nt = _nbrs(to)
    if sum(1 for s in nf if occ(s)) >= 5:
        return False
    common = set(nf) & set(nt)
    s_sites = [s for s in common if occ(s)]
    if s_sites:
        region = [s for s in set(nf) | set(nt) if s != frm and s != to]
        rset = {s for s in region if occ(s)}
        seen = set(s_sites)
        stack = list(s_sites)
        while stack:
            cur = stack.pop()
            for q in _nbrs(cur):
                if q in rset and q not in seen:
                    seen.add(q)
                    stack.append(q)
        return len(seen) == len(rset)
    side_f = {s for s in nf if s != to and occ(s)}
    side_t = {s for s in nt if s != frm and occ(s)}
    if not side_f or not side_t:
        return False
    return _mutually_connected(side_f) and _mutually_connected(side_t)


def _mutually_connected(sset):
    if len(sset) <= 1:
        return True
    start = next(iter(sset))
    seen = {start}
    stack = [start]
    while stack:
        cur = stack.pop()
        for q in _nbrs(cur):
            if q in sset and q not in seen:
                seen.add(q)
                stack.append(q)
    return len(seen) == len(sset)


# ---------------------------------------------------------------------------
# frames: (lane, depth) coordinates relative to a source spine

class CombFrame:
    """Coordinate frame for combing from the spine in direction `source`
    toward the next spine counterclockwise (sign +1) or clockwise (-1).
    Lane grows along the source spine ("up-left" in the canonical drawing),
    depth grows toward the target spine ("down")."""

    def __init__(self, source, sign=1):
        self.source = source % 6
        self.sign = 1 if sign >= 0 else -1
        self.A = OFFSETS[self.source]
        self.B = OFFSETS[(self.source + 2 * self.sign) % 6]
        ax, ay = self.A
        bx, by = self.B
        self._det = ax * by - ay * bx  # always +-1 on this lattice

    @property
    def target(self):
        return (self.source + self.sign) % 6

    def site(self, l, d):
        return (l * self.A[0] + d * self.B[0], l * self.A[1] + d * self.B[1])

    def lane_depth(self, c):
        x, y = c
        ax, ay = self.A
        bx, by = self.B
        l = (x * by - y * bx) // self._det
        d = (ax * y - ay * x) // self._det
        assert self.site(l, d) == c
        return (l, d)

    # frame-relative steps: (dlane, ddepth)
    UP = (0, -1)
    DOWN = (0, 1)
    UP_LEFT = (1, 0)
    DOWN_LEFT = (1, 1)
    UP_RIGHT = (-1, -1)
    DOWN_RIGHT = (-1, 0)

    def step(self, ld, rel):
        return (ld[0] + rel[0], ld[1] + rel[1])


def _in_region(l, d, l2, d2):
    """(l2, d2) lies in the residual region of (l, d): on or below the
    down-left half-line from (l, d)."""
    return l2 >= l and d2 >= d + (l2 - l)


class _Grid:
    """Frame-local occupancy view of a cluster."""

    def __init__(self, cluster, frame):
        self.cluster = cluster
        self.frame = frame
        self.map = {}
        for p in cluster.particles:
            self.map[frame.lane_depth(p)] = p
        self.food_ld = (0, 0)

    def refresh(self):
        self.map = {}
        for p in self.cluster.particles:
            self.map[self.frame.lane_depth(p)] = p

    def occ(self, ld):
        return ld == self.food_ld or ld in self.map

    def particle(self, ld):
        return ld in self.map

    def move(self, frm_ld, to_ld):
        self.cluster.move(self.frame.site(*frm_ld), self.frame.site(*to_ld))
        del self.map[frm_ld]
        self.map[to_ld] = self.frame.site(*to_ld)

    def region_particles(self, l, d):
        return [ld for ld in self.map if _in_region(l, d, ld[0], ld[1])]


# ---------------------------------------------------------------------------
# combed / combable predicates

def is_combed(cluster, frame, l, d):
    """The residual region of (l, d) holds only straight down-left lines,
    nothing directly above their topmost particles, each line hanging from
    an occupied column site one lane right with nothing below it."""
    g = _Grid(cluster, frame)
    return _is_combed_grid(g, l, d)


def _is_combed_grid(g, l, d):
    region = g.region_particles(l, d)
    if not region:
        return True
    tops = {}
    for (a, b) in region:
        if a not in tops or b < tops[a]:
            tops[a] = b
    for a, b in tops.items():
        if g.occ((a, b - 1)):
            return False
    rset = set(region)
    for (a, b) in rset:
        # only diagonal (down-left / up-right) region neighbors allowed
        for rel in (CombFrame.UP, CombFrame.DOWN, CombFrame.UP_LEFT, CombFrame.DOWN_RIGHT):
            q = (a + rel[0], b + rel[1])
            if q in rset:
                return False
        ur = (a - 1, b - 1)
        if ur in rset:
            continue
        if _in_region(l, d, ur[0], ur[1]):
            return False  # line starts mid-region with nothing up-right
        if not (a == l and g.occ(ur) and not g.occ((a - 1, b))):
            return False
    return True


def is_combable(cluster, frame, l, d):
    """(l+1, d+1) combed and the site directly above (l, d) empty."""
    g = _Grid(cluster, frame)
    return not g.occ((l, d - 1)) and _is_combed_grid(g, l + 1, d + 1)


# ---------------------------------------------------------------------------
# the comb operation

def _shiftable(g, ld):
    if not g.particle(ld):
        return False
    need = {CombFrame.DOWN, CombFrame.UP_RIGHT}
    for rel in (CombFrame.UP, CombFrame.DOWN, CombFrame.UP_LEFT,
                CombFrame.DOWN_LEFT, CombFrame.UP_RIGHT, CombFrame.DOWN_RIGHT):
        q = (ld[0] + rel[0], ld[1] + rel[1])
        if g.occ(q) != (rel in need):
            return False
    return True


def _lane_components(g, l, d, dmax):
    """Consecutive runs of particles on lane l at depth >= d."""
    comps = []
    run = None
    for b in range(d, dmax + 1):
        if g.particle((l, b)):
            if run is None:
                run = [b, b]
            else:
                run[1] = b
        elif run is not None:
            comps.append(tuple(run))
            run = None
    if run is not None:
        comps.append(tuple(run))
    return comps


def _depth_bound(g, l, d):
    if not g.map:
        return d
    return max(max(b for (_, b) in g.map), d) + 2


def _walk_particle(g, start_ld, target_ld, l, d):
    """Move one particle from start to target through empty region sites,
    every hop a valid move (breadth-first over the single-particle move
    graph, other particles fixed)."""
    if start_ld == target_ld:
        return
    frame = g.frame
    cluster = g.cluster
    base = set(cluster.particles)
    base.discard(frame.site(*start_ld))
    probe = Cluster(base)
    prev = {start_ld: None}
    queue = deque([start_ld])
    found = False
    while queue and not found:
        cur = queue.popleft()
        cur_site = frame.site(*cur)
        probe.particles.add(cur_site)
        for rel in (CombFrame.UP, CombFrame.DOWN, CombFrame.UP_LEFT,
                    CombFrame.DOWN_LEFT, CombFrame.UP_RIGHT, CombFrame.DOWN_RIGHT):
            nxt = (cur[0] + rel[0], cur[1] + rel[1])
            if nxt in prev or g.occ(nxt):
                continue
            if not (_in_region(l, d, nxt[0], nxt[1]) or nxt == target_ld):
                continue
            if valid_plane_move(probe, cur_site, frame.site(*nxt)):
                prev[nxt] = cur
                if nxt == target_ld:
                    found = True
                    break
                queue.append(nxt)
        probe.particles.discard(cur_site)
    if not found:
        raise CombError(f"no walk from {start_ld} to {target_ld}")
    path = [target_ld]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    path.reverse()
    for a, b in zip(path, path[1:]):
        g.move(a, b)


def _shift(g, p_ld):
    """The shift move on a shiftable lane particle: slide the maximal
    chain of shiftable sites two-steps-down-right apart, either opening
    p's site (down-right shifts) or making p non-shiftable (up-left)."""
    chain = [p_ld]
    while _shiftable(g, (chain[-1][0] - 2, chain[-1][1])):
        chain.append((chain[-1][0] - 2, chain[-1][1]))
    q = (chain[-1][0] - 2, chain[-1][1])          # first non-shiftable site
    q_up = (q[0], q[1] - 1)
    q_dl = (q[0] + 1, q[1] + 1)
    if not g.occ(q) or g.occ(q_up) or g.occ(q_dl):
        for ld in reversed(chain):
            g.move(ld, (ld[0] - 1, ld[1]))        # down-right
    else:
        g.move(q, (q[0] + 1, q[1]))               # up-left
        for ld in chain[:0:-1]:
            g.move(ld, (ld[0] + 1, ld[1]))
        # p itself stays; it is non-shiftable now


def comb(cluster, frame, l, d):
    """Comb the combable position (l, d): line formation brings every lane-l
    component at depth >= d down to singletons, line merging re-hangs the
    diagonal lines so that (l, d) is combed.  Returns the emitted moves."""
    if not is_combable(cluster, frame, l, d):
        raise CombError(f"position ({l},{d}) is not combable")
    g = _Grid(cluster, frame)
    start_idx = len(cluster.moves)

    guard = 0
    while True:
        guard += 1
        if guard > 10000:
            raise CombError("line formation did not terminate")
        comps = _lane_components(g, l, d, _depth_bound(g, l, d))
        target = next(((a, b) for (a, b) in comps if b > a), None)
        if target is None:
            break
        a, b = target
        p = (l, a)
        if _shiftable(g, p):
            _shift(g, p)
            continue
        # walk p around its component to extend the line hanging from the
        # component's bottom
        j = 1
        while g.particle((l + j, b + j)):
            j += 1
        _walk_particle(g, p, (l + j, b + j), l, d)

    # line merging: process the hanging lines from the lowest upwards
    guard = 0
    while True:
        guard += 1
        if guard > 10000:
            raise CombError("line merging did not terminate")
        tops = sorted(
            (b for (a, b) in g.map if a == l and b >= d), reverse=True
        )
        fixed = None
        for t in tops:
            anchor = (l - 1, t - 1)
            below_anchor = (l - 1, t)
            if g.occ(anchor) and not g.occ(below_anchor):
                continue  # rests properly
            fixed = t
            break
        if fixed is None:
            break
        t = fixed
        line = []
        j = 0
        while g.particle((l + j, t + j)):
            line.append((l + j, t + j))
            j += 1
        below = any(g.particle((l + j2, t + 1 + j2)) for j2 in range(len(line) + 1))
        if below:
            # merge into the line below: leftmost particle first, each to
            # the current end of the structure below
            for ld in reversed(line):
                jj = 0
                while g.occ((l + jj, t + 1 + jj)):
                    jj += 1
                _walk_particle(g, ld, (l + jj, t + 1 + jj), l, d)
        else:
            for ld in line:  # shift the whole line down, rightmost first
                g.move(ld, (ld[0], ld[1] + 1))

    if not _is_combed_grid(g, l, d):
        raise CombError(f"({l},{d}) not combed after comb")
    return cluster.moves[start_idx:]


# ---------------------------------------------------------------------------
# spines

def spine_info(cluster, k):
    """(length, furthest) for the spine in direction k.

    The anchor is the furthest particle on this spine's ray that touches a
    particle off the ray (the food does not count); the spine's length is
    the anchor's distance, 0 with no anchor.  Particles beyond the anchor
    are the bare protruding tail.  Off-ray contact is judged against this
    spine only: on a radius-1 hexagon the corners touch only other spines'
    particles yet must anchor at distance 1, while a bare line must have
    length 0 on every spine.
    """
    if not cluster.particles:
        return 0, 0
    bound = max(hex_distance(p) for p in cluster.particles) + 1
    ray_sites = {
        (OFFSETS[k][0] * tt, OFFSETS[k][1] * tt) for tt in range(0, bound + 1)
    }
    anchor = furthest = 0
    for t in range(1, bound + 1):
        site = (OFFSETS[k][0] * t, OFFSETS[k][1] * t)
        if site not in cluster.particles:
            continue
        furthest = t
        if any(q in cluster.particles and q not in ray_sites for q in _nbrs(site)):
            anchor = t
    return anchor, furthest


def spine_lengths(cluster):
    return [spine_info(cluster, k)[0] for k in range(6)]


def hex_distance(c):
    x, y = c
    if x * y >= 0:
        return max(abs(x), abs(y))
    return abs(x) + abs(y)


def spine_comb(cluster, frame):
    """Comb the whole sector left of the source spine down toward the
    target spine: positions ride one step below the bare spine and on the
    spine across the tail, ending at lane r+1."""
    start_idx = len(cluster.moves)
    r, r_t = spine_info(cluster, frame.source)
    lanes = [frame.lane_depth(p)[0] for p in cluster.particles]
    x1 = max(lanes) if lanes else 0
    seq = []
    for x in range(x1, r, -1):
        seq.append((x, 1 if x > r_t else 0))
    for (x, y) in seq:
        comb(cluster, frame, x, y)
    if not is_combed(cluster, frame, r + 1, 1):
        raise CombError("spine comb did not comb (r+1, 1)")
    return cluster.moves[start_idx:], r


def gap_in_line(cluster, frame, r):
    """First empty depth on the segment from the source anchor (r, 0) down
    to the target spine site (r, r); None if the segment is full."""
    for d in range(0, r + 1):
        if not cluster.occupied(frame.site(r, d)):
            return d
    return None


# ---------------------------------------------------------------------------
# hexagon with a tail

def ring_sites(r):
    out = []
    for k in range(6):
        corner = (OFFSETS[k][0] * r, OFFSETS[k][1] * r)
        step = OFFSETS[(k + 2) % 6]
        for i in range(r):
            out.append((corner[0] + step[0] * i, corner[1] + step[1] * i))
    return out


def is_hexagon_with_tail(cluster, r):
    if spine_lengths(cluster) != [r] * 6:
        return False
    tail_dirs = set()
    for p in cluster.particles:
        dist = hex_distance(p)
        if dist <= r:
            continue
        on = None
        for k in range(6):
            if p == (OFFSETS[k][0] * dist, OFFSETS[k][1] * dist):
                on = k
                break
        if on is None:
            return False
        tail_dirs.add(on)
    return len(tail_dirs) <= 1


def _wall_frames(v0):
    """Frames in which the ring site v0 (a non-corner at distance r) lies on
    the left wall, as (frame, depth) pairs; both chiralities."""
    r = hex_distance(v0)
    out = []
    for k in range(6):
        for sign in (1, -1):
            fr = CombFrame(k, sign)
            l, d = fr.lane_depth(v0)
            if l == r and 1 <= d <= r - 1:
                out.append((fr, d))
    return out


def _reduce_via_ring_gap(cluster, v0, m):
    r = hex_distance(v0)
    for fr, d in sorted(_wall_frames(v0), key=lambda t: t[1]):
        if is_combable(cluster, fr, r, d + 1):
            comb(cluster, fr, r, d + 1)
            if min(spine_lengths(cluster)) < m:
                return True
    return False


def hexagon_reduce(cluster, r):
    """One minimum-spine-length reduction from a radius-r hexagon with a
    tail (r >= 1)."""
    m = r
    ring = ring_sites(r)
    gaps = [s for s in ring if s not in cluster.particles]
    if gaps:
        for v0 in gaps:
            if _reduce_via_ring_gap(cluster, v0, m):
                return
        raise CombError("ring gap exploitation failed")

    if r == 1:
        _, tail_dir = _tail_of(cluster, r)
        for k in range(6):
            if k == tail_dir:
                continue
            src = OFFSETS[k]
            for dk in (1, -1):
                to = (src[0] + OFFSETS[(k + dk) % 6][0], src[1] + OFFSETS[(k + dk) % 6][1])
                if not cluster.occupied(to) and valid_plane_move(cluster, src, to):
                    cluster.move(src, to)
                    if min(spine_lengths(cluster)) < m:
                        return
                    raise CombError("radius-1 corner move did not reduce")
        raise CombError("no radius-1 reduction move found")

    # find (v_-2, v_-1): a distance r-2 occupant adjacent to a distance r-1
    # particle (the food when r == 2)
    pair = None
    for p in sorted(cluster.particles):
        if hex_distance(p) != r - 1:
            continue
        for q in _nbrs(p):
            if hex_distance(q) == r - 2 and cluster.occupied(q):
                pair = (q, p)
                break
        if pair:
            break
    if pair is None:
        raise CombError("connected hexagon lacks an inner support path")
    v_m2, v_m1 = pair

    # corner case: v_-1 adjacent to a ring corner; push the corner (and any
    # tail behind it) one step outward off the spine
    for k in range(6):
        corner = (OFFSETS[k][0] * r, OFFSETS[k][1] * r)
        if corner in cluster.particles and corner in _nbrs(v_m1):
            fr = CombFrame(k, 1)
            cluster.move(corner, fr.site(r + 1, 1))
            tt = r + 1
            while cluster.occupied(fr.site(tt, 0)):
                cluster.move(fr.site(tt, 0), fr.site(tt + 1, 1))
                tt += 1
            if min(spine_lengths(cluster)) < m:
                return
            raise CombError("corner relocation did not reduce")

    # middle-of-wall case: open a gap at v0
    u_m1 = None
    common = set(_nbrs(v_m1)) & set(_nbrs(v_m2))
    for q in common:
        if q != v_m1 and hex_distance(q) == r - 1:
            u_m1 = q
            break
    if u_m1 is None:
        raise CombError("no inner companion site")
    v0 = None
    for q in set(_nbrs(u_m1)) & set(_nbrs(v_m1)):
        if hex_distance(q) == r and q in cluster.particles:
            v0 = q
            break
    if v0 is None:
        raise CombError("no wall particle above the support pair")
    if not cluster.occupied(u_m1):
        cluster.move(v0, u_m1)
    else:
        u_p1 = (2 * v0[0] - u_m1[0], 2 * v0[1] - u_m1[1])
        cluster.move(v0, u_p1)
    if not _reduce_via_ring_gap(cluster, v0, m):
        raise CombError("wall gap exploitation failed")


def _tail_of(cluster, r):
    for p in cluster.particles:
        dist = hex_distance(p)
        if dist > r:
            for k in range(6):
                if p == (OFFSETS[k][0] * dist, OFFSETS[k][1] * dist):
                    return dist, k
    return 0, None


# ---------------------------------------------------------------------------
# full reduction

def reduce_min_spine(cluster):
    """Apply combs until the minimum spine length strictly decreases."""
    m = min(spine_lengths(cluster))
    if m < 1:
        raise CombError("minimum spine length already 0")
    src = spine_lengths(cluster).index(m)
    clean = 0
    for _ in range(_SAFETY_ROUNDS):
        if clean >= 7 and is_hexagon_with_tail(cluster, m):
            hexagon_reduce(cluster, m)
            if min(spine_lengths(cluster)) >= m:
                raise CombError("hexagon reduction failed")
            return
        fr = CombFrame(src, 1)
        _, r = spine_comb(cluster, fr)
        if min(spine_lengths(cluster)) < m:
            return
        d_gap = gap_in_line(cluster, fr, r)
        if d_gap is not None and 1 <= d_gap <= r - 1:
            if is_combable(cluster, fr, r, d_gap + 1):
                comb(cluster, fr, r, d_gap + 1)
                if min(spine_lengths(cluster)) < m:
                    return
        src = fr.target
        clean += 1
    raise CombError("reduce_min_spine exceeded its round budget")


def is_line(cluster):
    """All particles on one ray from the food, contiguous from distance 1."""
    n = len(cluster.particles)
    if n == 0:
        return True
    for k in range(6):
        ray = {(OFFSETS[k][0] * t, OFFSETS[k][1] * t) for t in range(1, n + 1)}
        if cluster.particles == ray:
            return True
    return False


def flatten_cluster(cluster):
    """Drive the cluster to a straight line anchored at the food."""
    if not cluster.connected():
        raise CombError("configuration not connected")
    guard = 0
    while min(spine_lengths(cluster)) >= 1:
        reduce_min_spine(cluster)
        guard += 1
        if guard > _SAFETY_ROUNDS:
            raise CombError("flatten did not reach spine length 0")
    src = spine_lengths(cluster).index(0)
    for _ in range(_SAFETY_ROUNDS):
        if is_line(cluster):
            return cluster.moves
        fr = CombFrame(src, 1)
        spine_comb(cluster, fr)
        src = fr.target
    if not is_line(cluster):
        raise CombError("final sweep did not produce a line")
    return cluster.moves


# ---------------------------------------------------------------------------
# torus-facing API

def cluster_from_world(world, room_check=True):
    """Unwrapped planar copy of a torus world holding one food site; errors
    if the configuration wraps or (when room_check) leaves no room to lay
    out a line."""
    if len(world.food) != 1:
        raise ValueError("the oracle needs exactly one food particle")
    lat = world.lattice
    food = next(iter(world.food))
    sites = {food} | {world.pos[p] for p in range(world.n_particles)}
    plan = {food: (0, 0)}
    stack = [food]
    while stack:
        cur = stack.pop()
        cx, cy = plan[cur]
        for d2, nb2 in enumerate(lat.nbr[cur]):
            if nb2 in sites:
                q = (cx + OFFSETS[d2][0], cy + OFFSETS[d2][1])
                if nb2 in plan:
                    if plan[nb2] != q:
                        raise ValueError("configuration wraps around the torus")
                else:
                    plan[nb2] = q
                    stack.append(nb2)
    if len(plan) != len(sites):
        raise ValueError("configuration not connected")
    n = world.n_particles
    extent = max(max(abs(c[0]), abs(c[1])) for c in plan.values()) if n else 0
    if room_check and 2 * (extent + n + 2) >= lat.side:
        raise ValueError("not enough lattice room to lay the cluster out as a line")
    cluster = Cluster(c for c in plan.values() if c != (0, 0))
    return cluster, food


def flatten_to_line(world):
    """Move sequence (torus coordinate pairs) ending in a straight line of
    particles with the food at one end; every move is a valid compression
    move."""
    cluster, food = cluster_from_world(world)
    if is_line(cluster):
        return []
    flatten_cluster(cluster)
    lat = world.lattice
    fx, fy = lat.coord(food)
    L = lat.side
    out = []
    for (a, b) in cluster.moves:
        out.append(
            (((a[0] + fx) % L, (a[1] + fy) % L), ((b[0] + fx) % L, (b[1] + fy) % L))
        )
    return out


def moves_to_json(moves):
    import json

    return json.dumps([[list(a), list(b)] for a, b in moves])
