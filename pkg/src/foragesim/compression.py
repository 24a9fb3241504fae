"""Adaptive compression particle controller.

Six particle states: a dispersion state D, four compression states
(C, C_G, C_F, C_GF encoding a growth-token bit and a food bit), and the
dispersion-token state DT that propagates the dissolution wave.

An activation runs two steps: a state change, then a movement.  Dispersion
particles do a simple-exclusion random-walk step; compression particles
propose one random direction and execute it only if it is a valid
cluster-preserving move, accepted with the Metropolis probability
min(1, lambda^delta_e).  A particle that was DT at the start of its
activation converts to D and never moves that activation.

"Cluster particles" are the food particles plus all particles in a
compression state or in DT; move legality is defined against them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lattice import EMPTY, FOOD

# state encoding
D = 0
C = 1
C_G = 2
C_F = 3
C_GF = 4
DT = 5

STATE_NAMES = ("D", "C", "C_G", "C_F", "C_GF", "DT")

# verdicts for a proposed move
VALID = "valid"
OCCUPIED = "occupied"
INVALID_DEGREE = "invalid_degree"
INVALID_PROPERTY = "invalid_property"

# state-change events
EV_NONE = 0
EV_JOIN_FOOD = 1    # D -> C_F next to food
EV_JOIN_TOKEN = 2   # D -> C, consuming a neighbor's growth token
EV_DEMOTE = 3       # compression -> D, neighbors -> DT
EV_DT_WAVE = 4      # DT -> D, neighbors -> DT
EV_TOKEN_PASS = 5
EV_TOKEN_GEN = 6

EVENT_NAMES = ("none", "join_food", "join_token", "demote", "dt_wave",
               "token_pass", "token_gen")


def has_growth(s):
    return s == C_G or s == C_GF


def has_food_bit(s):
    return s == C_F or s == C_GF


def is_compression(s):
    return 1 <= s <= 4


@dataclass
class MoveProposal:
    """A single-edge move with its legality verdict and acceptance odds:
    accept_prob is min(1, lam**delta_e) for valid proposals and 0 otherwise."""
    frm: int
    to: int
    delta_e: int
    verdict: str
    accept_prob: float


def propose_move(world, frm, to, lam):
    """Evaluate the move frm -> to as the movement step would."""
    verdict = move_verdict(world, frm, to)
    if verdict != VALID:
        return MoveProposal(frm, to, 0, verdict, 0.0)
    de = delta_edges(world, frm, to)
    return MoveProposal(frm, to, de, verdict, acceptance_probability(de, lam))


@dataclass
class CompressionParams:
    """p: join/generation probability, strictly below 1/6; lam: move bias.

    The controller accepts any lam > 0 so the expansion regime (small lam)
    can be simulated, even though the gather analysis assumes lam > 1.
    """
    p: float
    lam: float

    def __post_init__(self):
        if not (0.0 < self.p < 1.0 / 6.0):
            raise ValueError("p must lie strictly in (0, 1/6)")
        if self.lam <= 0.0:
            raise ValueError("lambda must be positive")


def _is_cluster(world, idx):
    o = world.occ[idx]
    if o == FOOD:
        return True
    return o >= 0 and world.states[o] >= 1


def acceptance_probability(delta_e, lam):
    """Metropolis acceptance min(1, lam**delta_e)."""
    if lam <= 0.0:
        raise ValueError("lambda must be positive")
    return min(1.0, lam ** delta_e)


def delta_edges(world, frm, to):
    """Change in cluster adjacencies if the particle at frm moved to to.

    Computed locally: cluster neighbors at the target (the mover's old site
    excluded) minus cluster neighbors at the source.
    """
    nbr = world.lattice.nbr
    before = 0
    for s in nbr[frm]:
        if _is_cluster(world, s):
            before += 1
    after = 0
    for s in nbr[to]:
        if s != frm and _is_cluster(world, s):
            after += 1
    return after - before


def _connected_within(world, sites, seeds):
    """True if every cluster site in `sites` is reachable from `seeds`
    via cluster sites of `sites` (lattice adjacency)."""
    cluster = [s for s in sites if _is_cluster(world, s)]
    if not cluster:
        return True
    cset = set(cluster)
    seen = set(s for s in seeds if s in cset)
    if not seen and cluster:
        return False
    frontier = list(seen)
    nbr = world.lattice.nbr
    while frontier:
        cur = frontier.pop()
        for s in nbr[cur]:
            if s in cset and s not in seen:
                seen.add(s)
                frontier.append(s)
    return len(seen) == len(cset)


def _mutually_connected(world, sites):
    cluster = [s for s in sites if _is_cluster(world, s)]
    if len(cluster) <= 1:
        return True
    return _connected_within(world, sites, cluster[:1])


def move_verdict(world, frm, to):
    """Classify the single-edge move frm -> to of a compression particle.

    Valid iff the target is empty, the source has fewer than 5 cluster
    neighbors, and the move satisfies Property 1 (shared cluster neighbor,
    local connectivity through the 8-site joint neighborhood) or Property 2
    (no shared cluster neighbor, both endpoints keep locally connected
    neighborhoods).  Properties 1 and 2 have mutually exclusive premises,
    so they are combined with OR.
    """
    if world.occ[to] != EMPTY:
        return OCCUPIED
    nbr = world.lattice.nbr
    nf = nbr[frm]
    nt = nbr[to]
    deg = 0
    for s in nf:
        if _is_cluster(world, s):
            deg += 1
    if deg >= 5:
        return INVALID_DEGREE
    common = set(nf) & set(nt)
    s_sites = [s for s in common if _is_cluster(world, s)]
    if s_sites:
        region = [s for s in set(nf) | set(nt) if s != frm and s != to]
        ok = _connected_within(world, region, s_sites)
    else:
        side_f = [s for s in nf if s != to]
        side_t = [s for s in nt if s != frm]
        ok = (
            any(_is_cluster(world, s) for s in side_f)
            and any(_is_cluster(world, s) for s in side_t)
            and _mutually_connected(world, side_f)
            and _mutually_connected(world, side_t)
        )
    return VALID if ok else INVALID_PROPERTY


def causes_local_disconnection(world, frm, to):
    """True iff the mover's cluster neighbors, connected within
    N(frm) u {frm} before the move (trivially, through the mover), are no
    longer mutually connected afterwards.

    The left-behind neighbors are the subjects of the check; the mover at
    its new site (which lies in N(frm)) still counts as a path vertex.
    Counting the mover as a subject instead would flag every move with no
    shared cluster neighbor, including the valid two-sided ones.
    """
    nbr = world.lattice.nbr
    neigh = [s for s in nbr[frm] if _is_cluster(world, s)]
    if len(neigh) <= 1:
        return False
    before = set(neigh)
    before.add(frm)
    if not _bfs_connected(nbr, before):
        return False
    after = set(neigh)
    after.add(to)
    seen = {neigh[0]}
    frontier = [neigh[0]]
    while frontier:
        cur = frontier.pop()
        for s in nbr[cur]:
            if s in after and s not in seen:
                seen.add(s)
                frontier.append(s)
    return any(x not in seen for x in neigh)


def _bfs_connected(nbr, sset):
    it = iter(sset)
    start = next(it)
    seen = {start}
    frontier = [start]
    while frontier:
        cur = frontier.pop()
        for s in nbr[cur]:
            if s in sset and s not in seen:
                seen.add(s)
                frontier.append(s)
    return len(seen) == len(sset)


def state_change(world, pid, params, rng):
    """Step 1 of an activation.  Returns (event, aux).

    aux is the number of neighbors switched to DT for demote/wave events,
    the token source pid for a consumption, the receiver pid for a pass.
    """
    occ = world.occ
    states = world.states
    nbr = world.lattice.nbr
    p = world.pos[pid]
    s = states[pid]
    neigh = nbr[p]

    if s == DT:
        states[pid] = D
        k = 0
        for site in neigh:
            o = occ[site]
            if o >= 0 and is_compression(states[o]):
                states[o] = DT
                k += 1
        return EV_DT_WAVE, k

    food = world.food
    food_adj = False
    for site in neigh:
        if site in food:
            food_adj = True
            break

    if s == D:
        if food_adj:
            if rng.random() < params.p:
                states[pid] = C_F
                return EV_JOIN_FOOD, 0
            return EV_NONE, 0
        holders = None
        for site in neigh:
            o = occ[site]
            if o >= 0 and has_growth(states[o]):
                if holders is None:
                    holders = [o]
                else:
                    holders.append(o)
        if holders and rng.random() < params.p:
            src = holders[0] if len(holders) == 1 else holders[rng.randrange(len(holders))]
            states[src] = C if states[src] == C_G else C_F
            states[pid] = C
            return EV_JOIN_TOKEN, src
        return EV_NONE, 0

    # compression states
    fb = has_food_bit(s)
    demote = (fb and not food_adj) or (not fb and food_adj)
    if not demote and food_adj:
        # shares a compression-state neighbor with the food that lacks the
        # food bit (neighbor states as of the start of the activation)
        for d in range(6):
            fsite = neigh[d]
            if fsite in food:
                for w in (neigh[d - 1], neigh[(d + 1) % 6]):
                    o = occ[w]
                    if o >= 0 and is_compression(states[o]) and not has_food_bit(states[o]):
                        demote = True
                        break
                if demote:
                    break
    if demote:
        states[pid] = D
        k = 0
        for site in neigh:
            o = occ[site]
            if o >= 0 and is_compression(states[o]):
                states[o] = DT
                k += 1
        return EV_DEMOTE, k

    if has_growth(s):
        d = rng.randrange(6)
        o = occ[neigh[d]]
        if o >= 0 and is_compression(states[o]) and not has_growth(states[o]):
            states[o] = C_G if states[o] == C else C_GF
            states[pid] = C if s == C_G else C_F
            return EV_TOKEN_PASS, o
        return EV_NONE, 0

    if food_adj and rng.random() < params.p:
        states[pid] = C_G if s == C else C_GF
        return EV_TOKEN_GEN, 0

    return EV_NONE, 0


def movement_step(world, pid, params, rng, move_hook=None):
    """Step 2 of an activation, driven by the post-state-change state.

    Returns (frm, to) for an executed move, else None.  Compression-state
    particles end by recomputing their food bit from adjacency.
    """
    occ = world.occ
    states = world.states
    nbr = world.lattice.nbr
    s = states[pid]
    p = world.pos[pid]

    if s == D:
        to = nbr[p][rng.randrange(6)]
        if occ[to] == EMPTY:
            occ[p] = EMPTY
            occ[to] = pid
            world.pos[pid] = to
            return (p, to)
        return None

    if s == DT:
        return None

    d = rng.randrange(6)
    to = nbr[p][d]
    moved = None
    if occ[to] == EMPTY and move_verdict(world, p, to) == VALID:
        de = delta_edges(world, p, to)
        if de >= 0 and params.lam >= 1.0:
            accept = True
        else:
            accept = rng.random() < params.lam ** de
        if accept:
            if move_hook is not None:
                move_hook(world, pid, p, to)
            occ[p] = EMPTY
            occ[to] = pid
            world.pos[pid] = to
            moved = (p, to)
            p = to

    food = world.food
    fb = False
    for site in nbr[p]:
        if site in food:
            fb = True
            break
    s = states[pid]
    g = s == C_G or s == C_GF
    states[pid] = (C_GF if g else C_F) if fb else (C_G if g else C)
    return moved


def activate(world, pid, params, rng, move_hook=None):
    """One full activation.  Returns (event, aux, frm, to); frm is -1 when
    no move was executed.  A particle in DT at activation start converts to
    D (propagating the wave) and does not get a movement step."""
    if world.states[pid] == DT:
        ev, aux = state_change(world, pid, params, rng)
        return ev, aux, -1, -1
    ev, aux = state_change(world, pid, params, rng)
    moved = movement_step(world, pid, params, rng, move_hook)
    if moved is None:
        return ev, aux, -1, -1
    return ev, aux, moved[0], moved[1]
