import random
from math import comb

import pytest

from swarmfsa.automaton import parse_automaton
from swarmfsa.errors import ThresholdViolation, UnknownSymbol
from swarmfsa.field import GF2, make_field
from swarmfsa.prg import evolve
from swarmfsa.protocol import (
    NO_INPUT,
    TickInput,
    agent_tick,
    enumerate_groups,
    expected_block_count,
    expected_seed_count,
    transition_sum,
)
from swarmfsa.schemes import dealer_init_nn, dealer_init_tn, reconstruct_nn

from test_automaton import bundled_four_state, random_automaton


def zero_prg(seed, m, modulus):
    """Test hook: all-zero material, seed evolves to a fixed marker."""
    return [0] * m, bytes(len(seed))


def test_enumerate_groups_nn():
    assert enumerate_groups(3, "nn") == [(1, 2), (1, 3), (2, 3)]


def test_enumerate_groups_tn_small():
    assert enumerate_groups(3, "tn", 1) == [(1, 2, 3)]
    got = enumerate_groups(5, "tn", 2)
    assert len(got) == comb(5, 4)
    assert all(len(g) == 4 for g in got)
    assert got == sorted(got)


def test_enumerate_groups_threshold_violation():
    with pytest.raises(ThresholdViolation):
        enumerate_groups(4, "tn", 2)
    with pytest.raises(ThresholdViolation):
        enumerate_groups(3, "tn", 0)


def test_transition_sum_four_state_alpha():
    # New label of state 2 is old l2 + old l4; state 3 has no predecessors.
    a = bundled_four_state()
    f = make_field(257)
    labels = [10, 20, 30, 40]
    out = transition_sum(labels, a, "a", f)
    assert out[1] == 60
    assert out[2] == 0


def test_transition_sum_identity_permutation():
    a = parse_automaton("states 3\nalphabet a\ntrans 1 a 1\ntrans 2 a 2\ntrans 3 a 3")
    f = GF2
    labels = [1, 0, 1]
    assert transition_sum(labels, a, "a", f) == labels


def test_transition_sum_moves_one_hot_like_the_oracle():
    # XOR-reconstructed one-hot across simulated agents follows step().
    rng = random.Random(12)
    for _ in range(30):
        a = random_automaton(rng, rng.randrange(1, 7), ["a", "b"])
        n = rng.randrange(2, 5)
        cur = rng.randrange(1, a.num_states + 1)
        rows = []
        for i in range(n - 1):
            rows.append([rng.getrandbits(1) for _ in range(a.num_states)])
        last = [
            (1 if j + 1 == cur else 0) ^ (sum(r[j] for r in rows) & 1)
            for j in range(a.num_states)
        ]
        rows.append(last)
        sym = rng.choice(["a", "b"])
        moved = [transition_sum(r, a, sym, GF2) for r in rows]
        secrets = [0] * a.num_states
        for r in moved:
            for j in range(a.num_states):
                secrets[j] ^= r[j]
        expect = a.step(cur, sym)
        assert secrets == [1 if j + 1 == expect else 0 for j in range(a.num_states)]


def test_transition_sum_unknown_symbol():
    with pytest.raises(UnknownSymbol):
        transition_sum([0], parse_automaton("states 1\nalphabet a\ntrans 1 a 1"), "x", GF2)


def test_agent_tick_zero_prg_keeps_labels():
    a = bundled_four_state()
    dep = dealer_init_nn(a, 3, 2, random.Random(0))
    ag = dep.agent(1)
    ag.expand_override = zero_prg
    before = list(ag.blocks[0].labels)
    agent_tick(ag, NO_INPUT)
    assert list(ag.blocks[0].labels) == before
    assert ag.tick == 1


def test_agent_tick_hand_simulated_pair():
    # n=2, m=2: the single pair seed returns b=(1,0); both agents flip
    # label 1 and the per-state XOR sums are preserved.
    a = parse_automaton("states 2\nalphabet a\ntrans 1 a 1\ntrans 2 a 2")
    dep = dealer_init_nn(a, 2, 1, random.Random(1))

    def hook(seed, m, modulus):
        return [1, 0], bytes(len(seed))

    before = [list(ag.blocks[0].labels) for ag in dep.agents]
    for ag in dep.agents:
        ag.expand_override = hook
        agent_tick(ag, NO_INPUT)
    after = [list(ag.blocks[0].labels) for ag in dep.agents]
    for b, x in zip(before, after):
        assert x == [b[0] ^ 1, b[1]]
    assert reconstruct_nn(after, 2) == 1


def test_tick_input_symbol_validation():
    a = bundled_four_state()
    dep = dealer_init_nn(a, 2, 1, random.Random(2))
    with pytest.raises(UnknownSymbol):
        agent_tick(dep.agent(1), TickInput("nope"))


def test_storage_formulas():
    a = bundled_four_state()
    rng = random.Random(3)
    dep = dealer_init_nn(a, 5, 1, rng)
    for ag in dep.agents:
        assert ag.seed_count() == 5 - 1 == expected_seed_count("nn", 5, 0)
        assert ag.label_list_count() == 1
        assert len(ag.blocks[0].labels) == a.num_states
    dep = dealer_init_tn(a, 5, 2, make_field(257), 1, rng)
    for ag in dep.agents:
        assert ag.seed_count() == comb(4, 1) == expected_seed_count("tn", 5, 2)


def test_snapshot_at_init_shows_dealer_values():
    a = bundled_four_state()
    dep = dealer_init_nn(a, 3, 2, random.Random(4))
    s0 = dep.snapshot(1)
    assert s0.tick == 0
    assert s0.blocks[0].labels == dep.dealer.initial_labels[(1, None)]
    for g, seed in zip(s0.blocks[0].groups, s0.blocks[0].seeds):
        assert seed == dep.dealer.group_seeds[(None, g)]


def test_snapshot_seeds_evolved_exactly_r_times():
    a = bundled_four_state()
    dep = dealer_init_nn(a, 3, 2, random.Random(5))
    r = 7
    for _ in range(r):
        dep.tick_all(NO_INPUT)
    snap = dep.snapshot(2)
    assert snap.tick == r
    for g, seed in zip(snap.blocks[0].groups, snap.blocks[0].seeds):
        assert seed == evolve(dep.dealer.group_seeds[(None, g)], r, a.num_states, GF2)


def test_snapshots_same_tick_identical():
    a = bundled_four_state()
    dep = dealer_init_nn(a, 3, 1, random.Random(6))
    dep.tick_all(TickInput("a"))
    assert dep.snapshot(3) == dep.snapshot(3)


def test_tick_counters_stay_in_lockstep():
    a = bundled_four_state()
    dep = dealer_init_tn(a, 5, 2, make_field(257), 1, random.Random(7))
    for k in range(5):
        dep.tick_all(TickInput("b"))
        assert {ag.tick for ag in dep.agents} == {k + 1}


def test_group_members_hold_identical_seeds_every_tick():
    a = bundled_four_state()
    dep = dealer_init_tn(a, 5, 2, make_field(257), 3, random.Random(8))
    for _ in range(6):
        dep.tick_all(NO_INPUT)
        held = {}
        for ag in dep.agents:
            blk = ag.blocks[0]
            for slot, g in enumerate(blk.groups):
                cur = bytes(blk.seeds[slot * 16 : (slot + 1) * 16])
                held.setdefault(g, set()).add(cur)
        assert all(len(v) == 1 for v in held.values())


def test_block_counts_naive_formula():
    assert expected_block_count("tn-naive", 5, 2) == comb(4, 2)
    assert expected_block_count("nn", 5, 0) == 1
