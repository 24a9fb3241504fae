import random

import pytest

from foragesim.lattice import World, OFFSETS
from foragesim import comb, compression as cp, analysis
from foragesim.comb import Cluster, CombFrame, CombError


def torus_world(particle_coords, side=48, food=None):
    w = World(side)
    food = food or (side // 2, side // 2)
    w.place_food(food)
    fx, fy = food
    for (x, y) in particle_coords:  # coords relative to the food
        w.add_particle(((x + fx) % side, (y + fy) % side), cp.C)
    return w


def random_connected_world(rng, n, side=48):
    w = World(side)
    food = (side // 2, side // 2)
    w.place_food(food)
    lat = w.lattice
    frontier = [lat.index(food)]
    placed = set()
    while len(placed) < n:
        base = rng.choice(frontier)
        site = lat.nbr[base][rng.randrange(6)]
        if w.occ[site] == -1:
            w.add_particle(lat.coord(site), cp.C)
            placed.add(site)
            frontier.append(site)
    return w


def replay_on_torus(w, moves, reversibility=False):
    """Apply oracle moves on the torus world, re-checking each against the
    compression move rules; returns the final world."""
    lat = w.lattice
    w2 = w.copy()
    for (a, b) in moves:
        fa, ta = lat.index(a), lat.index(b)
        assert cp.move_verdict(w2, fa, ta) == cp.VALID, (a, b)
        pre_ok = analysis.is_hole_free(w2, set(w2.food) | set(w2.pos))
        pid = w2.occ[fa]
        w2.move_particle(pid, ta)
        sites = set(w2.food) | set(w2.pos)
        analysis._unwrap(lat, sites)  # still connected, still planar
        if reversibility and pre_ok and analysis.is_hole_free(w2, sites):
            assert cp.move_verdict(w2, ta, fa) == cp.VALID, (a, b)
    return w2


# ---------------------------------------------------------------------------
# frames

def test_frame_roundtrip_bijection():
    for u in range(6):
        for sign in (1, -1):
            fr = CombFrame(u, sign)
            for l in range(-5, 6):
                for d in range(-5, 6):
                    assert fr.lane_depth(fr.site(l, d)) == (l, d)


def test_frame_axes_are_source_and_target():
    fr = CombFrame(2, 1)
    assert fr.site(3, 0) == (3 * OFFSETS[2][0], 3 * OFFSETS[2][1])
    # depth r on lane r lands on the target spine
    tx, ty = OFFSETS[fr.target]
    assert fr.site(2, 2) == (2 * tx, 2 * ty)


# ---------------------------------------------------------------------------
# combed / combable

def test_empty_region_is_combed():
    cl = Cluster([(1, 0)])
    fr = CombFrame(2, 1)
    assert comb.is_combed(cl, fr, 3, 1)


def test_occupied_above_blocks_combable():
    fr = CombFrame(2, 1)
    cl = Cluster([fr.site(2, 0)])
    assert not comb.is_combable(cl, fr, 2, 1)   # site above (2,1) occupied
    assert comb.is_combable(cl, fr, 2, 2)


def test_particle_above_topmost_blocks_combed():
    fr = CombFrame(2, 1)
    # two stacked particles inside the region of (1,1): the upper one sits
    # directly above the topmost -> condition 1 fails
    cl = Cluster([fr.site(2, 3), fr.site(2, 4), fr.site(1, 0)])
    assert not comb.is_combed(cl, fr, 2, 3)


def test_leftmost_lane_always_combable_with_empty_above():
    fr = CombFrame(2, 1)
    cl = Cluster([fr.site(2, 1)])
    # nothing on lanes > 2, site above (2,1)? (2,0) empty
    assert comb.is_combable(cl, fr, 2, 1)


def test_comb_empty_lane_emits_nothing():
    fr = CombFrame(2, 1)
    cl = Cluster([fr.site(1, 0)])
    moves = comb.comb(cl, fr, 3, 1)
    assert moves == []


def test_comb_line_formation_and_merging_produces_combed():
    rng = random.Random(0)
    fr = CombFrame(2, 1)
    for trial in range(40):
        # random particles on lanes 2..4 below depth 1, plus a support spine
        pts = {fr.site(1, 0), fr.site(2, 0)}
        for _ in range(rng.randrange(2, 9)):
            pts.add(fr.site(rng.randrange(2, 5), rng.randrange(1, 6)))
        cl = Cluster(pts)
        if not cl.connected():
            continue
        # comb the whole wedge: (4,1), (3,1), (2,1) when combable
        try:
            for lane in (4, 3, 2):
                if comb.is_combable(cl, fr, lane, 1):
                    comb.comb(cl, fr, lane, 1)
                    assert comb.is_combed(cl, fr, lane, 1)
        except CombError as e:
            raise AssertionError((trial, sorted(pts))) from e


def test_comb_leaves_sites_above_untouched():
    rng = random.Random(1)
    fr = CombFrame(2, 1)
    for _ in range(40):
        pts = {fr.site(1, 0), fr.site(2, 0), fr.site(3, 0)}
        for _ in range(rng.randrange(2, 8)):
            pts.add(fr.site(rng.randrange(2, 6), rng.randrange(1, 6)))
        cl = Cluster(pts)
        if not cl.connected():
            continue
        l, d = 3, 1
        if not comb.is_combable(cl, fr, l, d):
            continue
        before = {c for c in cl.particles}
        comb.comb(cl, fr, l, d)
        after = cl.particles
        for c in before ^ after:
            lc, dc = fr.lane_depth(c)
            above = (lc > l and dc < d + (lc - l)) or (lc <= l and dc < d)
            assert not above, (c, (lc, dc))


# ---------------------------------------------------------------------------
# spines

def test_spine_lengths_bare_line_are_zero():
    # a line has no anchors at all: every spine length 0
    cl = Cluster([(t, 0) for t in range(1, 6)])
    assert comb.spine_lengths(cl) == [0] * 6


def test_spine_length_counts_anchor_not_tail():
    # hexagon of radius 1 with a 2-long tail on spine 0
    pts = set(comb.ring_sites(1)) | {(2, 0), (3, 0)}
    cl = Cluster(pts)
    assert comb.spine_info(cl, 0) == (1, 3)
    for k in range(1, 6):
        assert comb.spine_info(cl, k) == (1, 1)
    assert comb.is_hexagon_with_tail(cl, 1)


def test_hexagon_with_tail_rejects_two_tails():
    pts = set(comb.ring_sites(1)) | {(2, 0), (0, 2)}
    cl = Cluster(pts)
    assert not comb.is_hexagon_with_tail(cl, 1)


def test_reduce_min_spine_strictly_decreases():
    for r in (1, 2):
        pts = set()
        for t in range(1, r + 1):
            pts.update(comb.ring_sites(t))
        cl = Cluster(pts)
        m = min(comb.spine_lengths(cl))
        assert m == r
        comb.reduce_min_spine(cl)
        assert min(comb.spine_lengths(cl)) < m


# ---------------------------------------------------------------------------
# flatten_to_line

def test_already_line_is_empty_sequence():
    w = torus_world([(1, 0), (2, 0), (3, 0)])
    assert comb.flatten_to_line(w) == []


def test_l_shape_flattens_quickly():
    w = torus_world([(1, 0), (1, 1)])
    moves = comb.flatten_to_line(w)
    assert 0 < len(moves) <= 10
    w2 = replay_on_torus(w, moves, reversibility=True)
    cl, _ = comb.cluster_from_world(w2, room_check=False)
    assert comb.is_line(cl)


def test_flatten_random_suite_small():
    rng = random.Random(42)
    for _ in range(25):
        n = rng.randrange(1, 11)
        w = random_connected_world(rng, n)
        moves = comb.flatten_to_line(w)
        w2 = replay_on_torus(w, moves, reversibility=True)
        cl, _ = comb.cluster_from_world(w2, room_check=False)
        assert comb.is_line(cl)


def test_oracle_refuses_wrapping_configuration():
    w = World(8)
    w.place_food((0, 0))
    for x in range(1, 8):
        w.add_particle((x, 0), cp.C)
    with pytest.raises(ValueError):
        comb.flatten_to_line(w)


def test_oracle_refuses_disconnected_configuration():
    w = torus_world([(1, 0), (4, 4)])
    with pytest.raises(ValueError, match="connected"):
        comb.flatten_to_line(w)


def test_moves_export_json():
    w = torus_world([(1, 0), (1, 1)])
    moves = comb.flatten_to_line(w)
    import json

    parsed = json.loads(comb.moves_to_json(moves))
    assert parsed == [[list(a), list(b)] for a, b in moves]
