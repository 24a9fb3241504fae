"""Executable metrics: components, the state invariant, residual detection,
the dissolution potential, perimeter and compression ratios, circle
consistency and stages, the parent auxiliary graph, hole detection, and the
dominating-chain hitting-time harness.

All functions are read-only over a world snapshot.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .lattice import EMPTY, FOOD, OFFSETS
from . import compression as cp
from . import spiral as sp


# ---------------------------------------------------------------------------
# components and the state invariant (compression algorithm)

def components(world):
    """Connected components of compression-state and DT particles (lattice
    adjacency; food is not part of any component).  List of pid sets."""
    states = world.states
    occ = world.occ
    nbr = world.lattice.nbr
    seen = set()
    comps = []
    for pid in range(world.n_particles):
        if pid in seen or states[pid] < 1:
            continue
        comp = {pid}
        stack = [pid]
        seen.add(pid)
        while stack:
            cur = stack.pop()
            for s in nbr[world.pos[cur]]:
                o = occ[s]
                if o >= 0 and o not in seen and states[o] >= 1:
                    seen.add(o)
                    comp.add(o)
                    stack.append(o)
        comps.append(comp)
    return comps


def check_state_invariant(world, comps=None):
    """Every component must contain a C_GF, C_F or DT particle.
    Returns (ok, offending components)."""
    if comps is None:
        comps = components(world)
    states = world.states
    bad = []
    for comp in comps:
        if not any(states[p] in (cp.C_F, cp.C_GF, cp.DT) for p in comp):
            bad.append(comp)
    return not bad, bad


def _adjacent_food(world, pid):
    for s in world.lattice.nbr[world.pos[pid]]:
        if s in world.food:
            return True
    return False


def residual_compression(world, comps=None):
    """Members of residual components: a component holding a DT particle, a
    food-bit particle away from food, or a food-adjacent compression
    particle without the food bit."""
    if comps is None:
        comps = components(world)
    states = world.states
    out = set()
    for comp in comps:
        residual = False
        for p in comp:
            s = states[p]
            if s == cp.DT:
                residual = True
            elif cp.is_compression(s):
                fb = cp.has_food_bit(s)
                adj = _adjacent_food(world, p)
                if fb != adj:
                    residual = True
            if residual:
                break
        if residual:
            out.update(comp)
    return out


def residual_spiral(world, spiral_pids=None):
    """Compression-state particles outside every spiral that are in state 6
    or not adjacent to food."""
    if spiral_pids is None:
        spiral_pids = sp.spiral_particles(world)
    out = set()
    for pid in range(world.n_particles):
        s = world.states[pid]
        if s == sp.DISPERSION or pid in spiral_pids:
            continue
        if sp.base_of(s) == 6 or not _adjacent_food(world, pid):
            out.add(pid)
    return out


def potential(world):
    """(phi, phi_c, phi_dt, phi_t): compression particles, DT particles,
    held growth tokens; phi is their sum."""
    phi_c = phi_dt = phi_t = 0
    for s in world.states:
        if cp.is_compression(s):
            phi_c += 1
            if cp.has_growth(s):
                phi_t += 1
        elif s == cp.DT:
            phi_dt += 1
    return phi_c + phi_dt + phi_t, phi_c, phi_dt, phi_t


# ---------------------------------------------------------------------------
# perimeter and minimum-perimeter oracle

def _unwrap(lattice, sites):
    """Planar coordinates for a connected, non-wrapping site set."""
    sset = set(sites)
    if not sset:
        raise ValueError("empty cluster")
    start = next(iter(sorted(sset)))
    plan = {start: (0, 0)}
    stack = [start]
    while stack:
        cur = stack.pop()
        cx, cy = plan[cur]
        for d, nb in enumerate(lattice.nbr[cur]):
            if nb in sset:
                ox, oy = OFFSETS[d]
                q = (cx + ox, cy + oy)
                if nb in plan:
                    if plan[nb] != q:
                        raise ValueError("cluster wraps around the torus")
                else:
                    plan[nb] = q
                    stack.append(nb)
    if len(plan) != len(sset):
        raise ValueError("cluster not connected")
    xs = [p[0] for p in plan.values()]
    ys = [p[1] for p in plan.values()]
    if max(xs) - min(xs) >= lattice.side - 1 or max(ys) - min(ys) >= lattice.side - 1:
        raise ValueError("cluster wraps around the torus")
    return plan


def _plane_add(c, d):
    ox, oy = OFFSETS[d]
    return (c[0] + ox, c[1] + oy)


def _boundary_walk_length(pts):
    """Length of the closed walk around the outer boundary of a connected
    planar site set; 0 for a single site."""
    if len(pts) <= 1:
        return 0
    start = max(pts, key=lambda c: (c[0], c[1]))
    d0 = next(d for d in range(6) if _plane_add(start, d) in pts)
    first = (start, d0)
    cur = _plane_add(start, d0)
    inc = d0
    steps = 1
    while True:
        out = None
        base = (inc + 4) % 6
        for k in range(6):
            d = (base + k) % 6
            if _plane_add(cur, d) in pts:
                out = d
                break
        if (cur, out) == first:
            return steps
        cur = _plane_add(cur, out)
        inc = out
        steps += 1


def perimeter(world, cluster_sites):
    """Boundary closed-walk length of a connected cluster of sites (flat
    indices).  Single site -> 0, adjacent pair -> 2."""
    plan = _unwrap(world.lattice, cluster_sites)
    return _boundary_walk_length(set(plan.values()))


def _plane_spiral_iter(d0=0):
    """Canonical spiral positions in the plane around (0, 0)."""
    for i in range(6):
        yield OFFSETS[(d0 + i) % 6]
    r = 2
    while True:
        cur = (0, 0)
        for _ in range(r - 1):
            cur = _plane_add(cur, (d0 - 1) % 6)
        cur = _plane_add(cur, d0)
        yield cur
        legs = [((d0 + 1) % 6, r - 1)] + [((d0 + 2 + j) % 6, r) for j in range(5)]
        for d, steps in legs:
            for _ in range(steps):
                cur = _plane_add(cur, d)
                yield cur
        r += 1


def canonical_compact_sites(n, d0=0):
    """The n-site minimum-perimeter construction: the center plus the first
    n-1 canonical spiral positions, in the plane."""
    pts = [(0, 0)]
    it = _plane_spiral_iter(d0)
    while len(pts) < n:
        pts.append(next(it))
    return pts


_PMIN_CACHE = {}


def p_min(n):
    """Minimum perimeter of an n-site connected cluster, realized by the
    canonical spiral construction."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n not in _PMIN_CACHE:
        _PMIN_CACHE[n] = _boundary_walk_length(set(canonical_compact_sites(n)))
    return _PMIN_CACHE[n]


def alpha_ratio(world, cluster_sites):
    """perimeter / p_min(|cluster|); degenerate p_min = 0 counts as ratio 1."""
    per = perimeter(world, cluster_sites)
    pm = p_min(len(set(cluster_sites)))
    if pm == 0:
        return 1.0
    return per / pm


# ---------------------------------------------------------------------------
# circles, inconsistency, stages (spiral algorithm)

def _circle_flags(world, center, rot):
    """correctly-filled and verified-correctly-filled flags for the six
    positions of the circle (center, position 0 at direction rot)."""
    nbr = world.lattice.nbr[center]
    occ = world.occ
    correct = [False] * 6
    ver = [False] * 6
    for k in range(6):
        site = nbr[(rot + k) % 6]
        o = occ[site]
        if o < 0:
            continue
        s = world.states[o]
        if not sp.is_comp(s) or sp.base_of(s) != k:
            continue
        want = center if k == 0 else nbr[(rot + k - 1) % 6]
        if world.lattice.nbr[site][world.parent[o]] != want:
            continue
        correct[k] = True
        ver[k] = sp.is_verified(s)
    return correct, ver


def _food_circle_value(correct, ver):
    for x in range(5, -1, -1):
        if ver[x] and any(not correct[j] for j in range(x + 1, 6)):
            return x + 1
    return 0


def inconsistency_value(world):
    """Sum of per-circle inconsistency values over all circles.

    A food-centered circle scores x+1 where x is the largest position
    correctly filled with a verified particle while some later position is
    not correctly filled; any other circle scores the number of positions
    correctly filled with verified particles.  Only circles centered on food
    or next to a verified particle can score, so only those are scanned.
    """
    centers = set(world.food)
    for pid in range(world.n_particles):
        if sp.is_verified(world.states[pid]):
            centers.update(world.lattice.nbr[world.pos[pid]])
    total = 0
    for c in centers:
        is_food = c in world.food
        for rot in range(6):
            correct, ver = _circle_flags(world, c, rot)
            if is_food:
                total += _food_circle_value(correct, ver)
            else:
                total += sum(ver)
    return total


def complete_circle(world, food_site):
    """(complete, all_verified) for the circle around a food site: complete
    when some rotation has all six positions correctly filled."""
    for rot in range(6):
        correct, ver = _circle_flags(world, food_site, rot)
        if all(correct):
            return True, all(ver)
    return False, False


def stage(world):
    """Progress ladder: 1 inconsistent; 2 consistent, no complete circle;
    3 complete circle; 4 verified complete circle."""
    if inconsistency_value(world) > 0:
        return 1
    best = 2
    for f in world.food:
        comp, ver = complete_circle(world, f)
        if comp:
            best = max(best, 4 if ver else 3)
    return best


# ---------------------------------------------------------------------------
# auxiliary parent graph

def auxiliary_graph(world):
    """Directed graph: stable particles point to their parent, attachable
    particles to every potential parent.  Returns (edges, max_indegree)
    where edges maps pid -> set of targets (pids, or ('food', site)) and
    max_indegree is over non-food targets."""
    edges = {}
    indeg = {}
    occ = world.occ
    nbr = world.lattice.nbr
    for pid in range(world.n_particles):
        cls = sp.classify(world, pid)
        targets = set()
        if cls[0] == "stable":
            targets.add(nbr[world.pos[pid]][world.parent[pid]])
        elif cls[0] == "attachable":
            for _, d in cls[3]:
                targets.add(nbr[world.pos[pid]][d])
        if not targets:
            continue
        tset = set()
        for site in targets:
            o = occ[site]
            if o == FOOD:
                tset.add(("food", site))
            elif o >= 0:
                tset.add(o)
                indeg[o] = indeg.get(o, 0) + 1
        edges[pid] = tset
    max_in = max(indeg.values()) if indeg else 0
    return edges, max_in


# ---------------------------------------------------------------------------
# holes

def is_hole_free(world, cluster_sites):
    """True iff no cycle of cluster sites encircles an empty site: every
    non-cluster cell of the bounding box is reachable from outside."""
    plan = _unwrap(world.lattice, cluster_sites)
    pts = set(plan.values())
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x0, x1 = min(xs) - 1, max(xs) + 1
    y0, y1 = min(ys) - 1, max(ys) + 1
    seed = (x0, y0)
    seen = {seed}
    stack = [seed]
    while stack:
        cur = stack.pop()
        for d in range(6):
            q = _plane_add(cur, d)
            if x0 <= q[0] <= x1 and y0 <= q[1] <= y1 and q not in pts and q not in seen:
                seen.add(q)
                stack.append(q)
    box_empty = sum(
        1
        for x in range(x0, x1 + 1)
        for y in range(y0, y1 + 1)
        if (x, y) not in pts
    )
    return len(seen) == box_empty


# ---------------------------------------------------------------------------
# hitting-time harness (dominating chain)

def biased_walk_hitting_time(n, k, eta, trials, rng, return_samples=False):
    """Empirical mean first-hit time of 0 for the chain started at k that
    steps -1 with probability 1/n, +1 with probability eta/n, else stays.
    The expected value is bounded by n*k / (1 - eta)."""
    if k < 0 or n < 1 or not (0.0 <= eta < 1.0):
        raise ValueError("need n >= 1, k >= 0, 0 <= eta < 1")
    if k == 0:
        return (0.0, [0] * trials) if return_samples else 0.0
    p = 1.0 / n
    q = eta / n
    samples = []
    for _ in range(trials):
        x = k
        t = 0
        while x > 0:
            r = rng.random()
            if r < p:
                x -= 1
            elif r < p + q:
                x += 1
            t += 1
        samples.append(t)
    mean = sum(samples) / trials
    return (mean, samples) if return_samples else mean


# ---------------------------------------------------------------------------
# sampled metrics frames

def aggregation_proxy(world):
    """Fraction of particles with at least 3 occupied neighbors (plot-only
    density heuristic; carries no acceptance weight)."""
    if world.n_particles == 0:
        return 0.0
    occ = world.occ
    nbr = world.lattice.nbr
    dense = 0
    for pid in range(world.n_particles):
        cnt = 0
        for s in nbr[world.pos[pid]]:
            if occ[s] != EMPTY:
                cnt += 1
        if cnt >= 3:
            dense += 1
    return dense / world.n_particles


CSV_COLUMNS = [
    "step", "phi", "phi_c", "phi_dt", "phi_t", "cluster_count", "n_residual",
    "perimeter", "alpha", "inconsistency", "stage", "aggregation", "n_by_state",
]


@dataclass
class MetricsFrame:
    step: int
    phi: int
    phi_c: int
    phi_dt: int
    phi_t: int
    cluster_count: int
    n_residual: int
    perimeter: int | None
    alpha: float | None
    inconsistency: int
    stage: int
    aggregation: float
    n_by_state: dict = field(default_factory=dict)

    def csv_row(self):
        states = "|".join(f"{k}:{v}" for k, v in sorted(self.n_by_state.items()))
        vals = [
            self.step, self.phi, self.phi_c, self.phi_dt, self.phi_t,
            self.cluster_count, self.n_residual,
            "" if self.perimeter is None else self.perimeter,
            "" if self.alpha is None else f"{self.alpha:.6f}",
            self.inconsistency, self.stage, f"{self.aggregation:.6f}", states,
        ]
        return ",".join(str(v) for v in vals)

    def to_json(self):
        return json.dumps(self.__dict__)


def food_cluster_sites(world):
    """Food sites plus the compression/DT particles connected to them
    (through particles and food); None when there is no food."""
    if not world.food:
        return None
    occ = world.occ
    states = world.states
    nbr = world.lattice.nbr
    sites = set(world.food)
    stack = list(world.food)
    while stack:
        cur = stack.pop()
        for s in nbr[cur]:
            if s in sites:
                continue
            o = occ[s]
            if o >= 0 and states[o] >= 1:
                sites.add(s)
                stack.append(s)
    return sites


def compute_metrics(world, algo, step=0):
    n_by_state = {}
    if algo == "compression":
        for s in world.states:
            name = cp.STATE_NAMES[s]
            n_by_state[name] = n_by_state.get(name, 0) + 1
        phi, phi_c, phi_dt, phi_t = potential(world)
        comps = components(world)
        n_res = len(residual_compression(world, comps))
        inc = 0
        stg = 0
    else:
        for s in world.states:
            name = sp.state_name(s)
            n_by_state[name] = n_by_state.get(name, 0) + 1
        phi_c = sum(1 for s in world.states if s >= 1)
        phi, phi_dt, phi_t = phi_c, 0, 0
        comps = components(world)
        n_res = len(residual_spiral(world))
        inc = inconsistency_value(world)
        stg = stage(world)
    per = alpha = None
    sites = food_cluster_sites(world)
    if sites and len(sites) > len(world.food):
        try:
            per = perimeter(world, sites)
            alpha = per / p_min(len(sites)) if p_min(len(sites)) > 0 else 1.0
        except ValueError:
            per = alpha = None
    return MetricsFrame(
        step=step, phi=phi, phi_c=phi_c, phi_dt=phi_dt, phi_t=phi_t,
        cluster_count=len(comps), n_residual=n_res, perimeter=per, alpha=alpha,
        inconsistency=inc, stage=stg, aggregation=aggregation_proxy(world),
        n_by_state=n_by_state,
    )
