import random

import pytest

from foragesim.lattice import World
from foragesim import compression as cp
from foragesim import analysis

from conftest import ScriptRng
from fixtures import four_component_world


def world_with(food=None, particles=()):
    w = World(12)
    if food:
        w.place_food(food)
    pids = [w.add_particle(c, s) for c, s in particles]
    return w, pids


# ---------------------------------------------------------------------------
# move legality

def test_valid_move_next_to_food():
    w, _ = world_with(food=(0, 0), particles=[((1, 0), cp.C)])
    lat = w.lattice
    assert cp.move_verdict(w, lat.index((1, 0)), lat.index((1, 1))) == cp.VALID


def test_invalid_move_detaches_from_cluster():
    w, _ = world_with(food=(0, 0), particles=[((1, 0), cp.C)])
    lat = w.lattice
    assert cp.move_verdict(w, lat.index((1, 0)), lat.index((2, 0))) == cp.INVALID_PROPERTY


def test_occupied_target():
    w, _ = world_with(food=(0, 0), particles=[((1, 0), cp.C), ((1, 1), cp.C)])
    lat = w.lattice
    assert cp.move_verdict(w, lat.index((1, 0)), lat.index((1, 1))) == cp.OCCUPIED
    assert cp.move_verdict(w, lat.index((1, 0)), lat.index((0, 0))) == cp.OCCUPIED


def test_degree_five_blocks_moves():
    # mover with five cluster neighbors and one gap to step into
    w = World(12)
    for c in [(1, 0), (1, 1), (0, 1), (-1, -1), (0, -1)]:
        w.add_particle(c, cp.C)
    w.add_particle((0, 0), cp.C)
    lat = w.lattice
    assert cp.move_verdict(w, lat.index((0, 0)), lat.index((-1, 0))) == cp.INVALID_DEGREE


def test_property2_two_sided_move():
    # no shared cluster neighbor, both endpoints keep a connected side
    w = World(12)
    for c in [(0, -1), (-1, -1), (1, 2), (2, 2)]:
        w.add_particle(c, cp.C)
    mover = w.add_particle((0, 0), cp.C)
    lat = w.lattice
    # target (0,1): commons of (0,0)-(0,1) are (1,1) and (-1,0): both empty
    assert cp.move_verdict(w, lat.index((0, 0)), lat.index((0, 1))) == cp.VALID


def test_local_disconnection_bridge():
    w = World(12)
    for c in [(1, 0), (-1, 0)]:
        w.add_particle(c, cp.C)
    w.add_particle((0, 0), cp.C)
    lat = w.lattice
    assert cp.causes_local_disconnection(w, lat.index((0, 0)), lat.index((1, 1)))


def test_local_disconnection_false_for_valid_example():
    w, _ = world_with(food=(0, 0), particles=[((1, 0), cp.C)])
    lat = w.lattice
    assert not cp.causes_local_disconnection(w, lat.index((1, 0)), lat.index((1, 1)))


def test_local_disconnection_isolated_particle_vacuous():
    w, _ = world_with(particles=[((4, 4), cp.C)])
    lat = w.lattice
    assert not cp.causes_local_disconnection(w, lat.index((4, 4)), lat.index((4, 5)))


def test_valid_moves_never_locally_disconnect_randomized():
    rng = random.Random(7)
    for _ in range(200):
        w = World(9)
        w.place_food((4, 4))
        sites = [(rng.randrange(9), rng.randrange(9)) for _ in range(12)]
        for c in set(sites):
            if w.occ[w.lattice.index(c)] == -1:
                w.add_particle(c, cp.C)
        for pid in range(w.n_particles):
            frm = w.pos[pid]
            for to in w.lattice.nbr[frm]:
                if cp.move_verdict(w, frm, to) == cp.VALID:
                    assert not cp.causes_local_disconnection(w, frm, to)


# ---------------------------------------------------------------------------
# metropolis arithmetic

def test_move_proposal_bundle():
    w, _ = world_with(food=(0, 0), particles=[((1, 0), cp.C)])
    lat = w.lattice
    prop = cp.propose_move(w, lat.index((1, 0)), lat.index((1, 1)), 4.0)
    assert prop.verdict == cp.VALID
    assert prop.accept_prob == cp.acceptance_probability(prop.delta_e, 4.0)
    blocked = cp.propose_move(w, lat.index((1, 0)), lat.index((2, 0)), 4.0)
    assert blocked.verdict == cp.INVALID_PROPERTY and blocked.accept_prob == 0.0


def test_acceptance_probability_values():
    assert cp.acceptance_probability(1, 4.0) == 1.0
    assert cp.acceptance_probability(-2, 4.0) == pytest.approx(0.0625)
    assert cp.acceptance_probability(-5, 1.0) == 1.0
    with pytest.raises(ValueError):
        cp.acceptance_probability(0, 0.0)


def test_delta_edges_local_count():
    w, _ = world_with(food=(0, 0), particles=[((1, 0), cp.C), ((1, 2), cp.C)])
    lat = w.lattice
    # (1,0) -> (1,1): before {food}; after {food, (1,2)}, old site excluded
    de = cp.delta_edges(w, lat.index((1, 0)), lat.index((1, 1)))
    assert de == 1


# ---------------------------------------------------------------------------
# state-change branches

def test_dispersion_joins_via_food():
    w, (pid,) = world_with(food=(0, 0), particles=[((1, 0), cp.D)])
    ev, _ = cp.state_change(w, pid, cp.CompressionParams(0.1, 4.0), ScriptRng([0.05]))
    assert ev == cp.EV_JOIN_FOOD and w.states[pid] == cp.C_F


def test_dispersion_join_no_draw_success_is_rejected():
    w, (pid,) = world_with(food=(0, 0), particles=[((1, 0), cp.D)])
    ev, _ = cp.state_change(w, pid, cp.CompressionParams(0.1, 4.0), ScriptRng([0.5]))
    assert ev == cp.EV_NONE and w.states[pid] == cp.D


def test_dispersion_consumes_growth_token():
    w, (pid, holder) = world_with(particles=[((3, 3), cp.D), ((4, 3), cp.C_G)])
    ev, src = cp.state_change(w, pid, cp.CompressionParams(0.1, 4.0), ScriptRng([0.05]))
    assert ev == cp.EV_JOIN_TOKEN and src == holder
    assert w.states[pid] == cp.C and w.states[holder] == cp.C


def test_dt_wave_converts_compression_neighbors():
    w, (pid, a, b, d0) = world_with(
        particles=[((3, 3), cp.DT), ((4, 3), cp.C), ((3, 4), cp.C_F), ((2, 3), cp.D)]
    )
    ev, k = cp.state_change(w, pid, cp.CompressionParams(0.1, 4.0), ScriptRng())
    assert ev == cp.EV_DT_WAVE and k == 2
    assert w.states[pid] == cp.D
    assert w.states[a] == cp.DT and w.states[b] == cp.DT
    assert w.states[d0] == cp.D  # dispersion neighbors untouched


def test_food_bit_without_food_demotes():
    w, (pid, nb) = world_with(particles=[((3, 3), cp.C_F), ((4, 3), cp.C)])
    ev, k = cp.state_change(w, pid, cp.CompressionParams(0.1, 4.0), ScriptRng())
    assert ev == cp.EV_DEMOTE and k == 1
    assert w.states[pid] == cp.D and w.states[nb] == cp.DT


def test_no_food_bit_next_to_food_demotes():
    w, (pid,) = world_with(food=(0, 0), particles=[((1, 0), cp.C)])
    ev, _ = cp.state_change(w, pid, cp.CompressionParams(0.1, 4.0), ScriptRng())
    assert ev == cp.EV_DEMOTE and w.states[pid] == cp.D


def test_shared_bare_neighbor_with_food_demotes():
    # mover C_F next to food; the shared neighbor (1,1)... use common sites
    w, (pid, shared) = world_with(
        food=(0, 0), particles=[((1, 0), cp.C_F), ((1, 1), cp.C)]
    )
    # (1,1) is adjacent to both (1,0) and the food and lacks the food bit
    ev, _ = cp.state_change(w, pid, cp.CompressionParams(0.1, 4.0), ScriptRng())
    assert ev == cp.EV_DEMOTE
    assert w.states[pid] == cp.D and w.states[shared] == cp.DT


def test_token_pass_flips_both():
    w, (giver, taker) = world_with(particles=[((3, 3), cp.C_G), ((4, 3), cp.C)])
    # direction 0 points from (3,3) to (4,3)
    ev, dst = cp.state_change(w, giver, cp.CompressionParams(0.1, 4.0), ScriptRng(ranges=[0]))
    assert ev == cp.EV_TOKEN_PASS and dst == taker
    assert w.states[giver] == cp.C and w.states[taker] == cp.C_G


def test_token_pass_blocked_by_existing_token():
    w, (giver, other) = world_with(particles=[((3, 3), cp.C_G), ((4, 3), cp.C_GF)])
    ev, _ = cp.state_change(w, giver, cp.CompressionParams(0.1, 4.0), ScriptRng(ranges=[0]))
    assert ev == cp.EV_NONE
    assert w.states[giver] == cp.C_G and w.states[other] == cp.C_GF


def test_token_generation_next_to_food():
    w, (pid,) = world_with(food=(0, 0), particles=[((1, 0), cp.C_F)])
    ev, _ = cp.state_change(w, pid, cp.CompressionParams(0.1, 4.0), ScriptRng([0.02]))
    assert ev == cp.EV_TOKEN_GEN and w.states[pid] == cp.C_GF


# ---------------------------------------------------------------------------
# movement

def test_dispersion_move_into_empty():
    w, (pid,) = world_with(particles=[((3, 3), cp.D)])
    moved = cp.movement_step(w, pid, cp.CompressionParams(0.1, 4.0), ScriptRng(ranges=[0]))
    assert moved is not None
    assert w.lattice.coord(w.pos[pid]) == (4, 3)


def test_dispersion_move_blocked_by_occupied():
    w, (pid, _) = world_with(particles=[((3, 3), cp.D), ((4, 3), cp.D)])
    moved = cp.movement_step(w, pid, cp.CompressionParams(0.1, 4.0), ScriptRng(ranges=[0]))
    assert moved is None
    assert w.lattice.coord(w.pos[pid]) == (3, 3)


def test_compression_move_certain_when_delta_nonnegative():
    # delta 0 with lam >= 1 executes without an acceptance draw
    w, (pid, _) = world_with(food=(0, 0), particles=[((1, 0), cp.C_F), ((2, 1), cp.C)])
    lat = w.lattice
    d = lat.direction_of((1, 0), (1, 1))
    moved = cp.movement_step(w, pid, cp.CompressionParams(0.1, 4.0), ScriptRng(ranges=[d]))
    assert moved == (lat.index((1, 0)), lat.index((1, 1)))
    # food bit recomputed from the new position (still adjacent to food)
    assert w.states[pid] == cp.C_F


def test_move_onto_food_adjacent_site_sets_food_bit():
    w, (pid, _) = world_with(food=(0, 0), particles=[((2, 1), cp.C), ((1, 0), cp.C_F)])
    lat = w.lattice
    d = lat.direction_of((2, 1), (1, 1))
    moved = cp.movement_step(w, pid, cp.CompressionParams(0.1, 4.0), ScriptRng(ranges=[d]))
    assert moved == (lat.index((2, 1)), lat.index((1, 1)))
    assert w.states[pid] == cp.C_F


def test_food_bit_recomputed_even_without_a_move():
    w, (pid,) = world_with(food=(0, 0), particles=[((1, 1), cp.C_F)])
    lat = w.lattice
    d = lat.direction_of((1, 1), (2, 2))
    # the proposed move strands the particle (no shared cluster neighbor,
    # empty target side) so it is refused; the food bit is still refreshed
    moved = cp.movement_step(w, pid, cp.CompressionParams(0.1, 1.0), ScriptRng(ranges=[d]))
    assert moved is None
    assert w.states[pid] == cp.C_F


def test_dt_particles_never_move_on_activation():
    w, (pid, _) = world_with(particles=[((3, 3), cp.DT), ((4, 3), cp.C)])
    ev, aux, frm, to = cp.activate(w, pid, cp.CompressionParams(0.1, 4.0), ScriptRng())
    assert ev == cp.EV_DT_WAVE and frm == -1
    assert w.lattice.coord(w.pos[pid]) == (3, 3)


def test_promoted_particle_does_compression_move():
    # D next to food joins as C_F and then attempts a compression move
    w, (pid,) = world_with(food=(0, 0), particles=[((1, 0), cp.D)])
    lat = w.lattice
    d = lat.direction_of((1, 0), (1, 1))
    ev, _, frm, to = cp.activate(
        w, pid, cp.CompressionParams(0.1, 4.0), ScriptRng([0.01], ranges=[d])
    )
    assert ev == cp.EV_JOIN_FOOD
    assert (frm, to) == (lat.index((1, 0)), lat.index((1, 1)))


# ---------------------------------------------------------------------------
# four-component reference configuration

def test_reference_world_components_and_invariant():
    w, members = four_component_world()
    comps = analysis.components(w)
    assert len(comps) == 4
    got = {frozenset(c) for c in comps}
    want = {frozenset(members[k]) for k in "ABCD"}
    assert got == want
    ok, bad = analysis.check_state_invariant(w)
    assert ok and not bad


def test_reference_world_residuals():
    w, members = four_component_world()
    res = analysis.residual_compression(w)
    assert res == members["A"] | members["C"] | members["D"]


def test_single_bare_compression_particle_violates_invariant():
    w, _ = world_with(particles=[((3, 3), cp.C)])
    ok, bad = analysis.check_state_invariant(w)
    assert not ok and len(bad) == 1


def test_all_dispersion_invariant_vacuous():
    w, _ = world_with(particles=[((3, 3), cp.D), ((5, 5), cp.D)])
    ok, _ = analysis.check_state_invariant(w)
    assert ok


# ---------------------------------------------------------------------------
# token accounting over randomized activations

def count_tokens(w):
    return sum(1 for s in w.states if cp.has_growth(s))


def test_token_conservation_per_activation():
    rng = random.Random(11)
    w = World(10)
    w.place_food((5, 5))
    spots = [(x, y) for x in range(10) for y in range(10) if (x, y) != (5, 5)]
    rng.shuffle(spots)
    for c in spots[:30]:
        w.add_particle(c, cp.D)
    params = cp.CompressionParams(0.12, 4.0)
    for _ in range(30000):
        pid = rng.randrange(w.n_particles)
        before = count_tokens(w)
        ev, aux, _, _ = cp.activate(w, pid, params, rng)
        after = count_tokens(w)
        if ev in (cp.EV_DEMOTE, cp.EV_DT_WAVE):
            assert after <= before
        else:
            assert abs(after - before) <= 1
        if ev == cp.EV_TOKEN_GEN:
            assert after == before + 1
        if ev == cp.EV_JOIN_TOKEN:
            assert after == before - 1
    w.check_occupancy()
