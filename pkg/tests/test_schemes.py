import itertools
import random
from math import comb

import pytest

from swarmfsa.automaton import run_direct
from swarmfsa.errors import (
    FieldTooSmall,
    InvalidOneHot,
    MissingShares,
    NoFullSubset,
    NotEnoughShares,
    ThresholdViolation,
)
from swarmfsa.field import GF2, MERSENNE61, make_field
from swarmfsa.prg import evolve
from swarmfsa.protocol import NO_INPUT, TickInput
from swarmfsa.schemes import (
    dealer_init_nn,
    dealer_init_tn,
    dealer_init_tn_naive,
    reconstruct_nn,
    reconstruct_tn,
    reconstruct_tn_naive,
)
from swarmfsa.sharing import lagrange_at

from test_automaton import bundled_four_state, random_automaton


def random_schedule(rng, a, horizon, input_rate=0.5):
    return [
        rng.choice(a.alphabet) if rng.random() < input_rate else None
        for _ in range(horizon)
    ]


# -------------------------------------------------------------- all-agents


def test_nn_init_single_state_two_agents():
    a = bundled_four_state()
    rng = random.Random(0)
    seen = set()
    for _ in range(50):
        dep = dealer_init_nn(a, 2, 1, rng)
        x = dep.agent(1).blocks[0].labels[0]
        y = dep.agent(2).blocks[0].labels[0]
        assert x ^ y == 1
        seen.add((x, y))
    assert seen == {(0, 1), (1, 0)}


def test_nn_init_xor_is_indicator():
    a = bundled_four_state()
    dep = dealer_init_nn(a, 4, 3, random.Random(1))
    for j in range(a.num_states):
        acc = 0
        for ag in dep.agents:
            acc ^= ag.blocks[0].labels[j]
        assert acc == (1 if j + 1 == 3 else 0)


def test_nn_agent_holds_n_minus_1_seeds():
    a = bundled_four_state()
    dep = dealer_init_nn(a, 6, 1, random.Random(2))
    for ag in dep.agents:
        assert len(ag.blocks[0].groups) == 5


def test_nn_reconstruct_trivial_and_round_trip():
    assert reconstruct_nn([[1, 0], [0, 0]], 2) == 1
    a = bundled_four_state()
    dep = dealer_init_nn(a, 3, 4, random.Random(3))
    assert dep.reconstruct() == 4


def test_nn_reconstruct_errors():
    with pytest.raises(MissingShares):
        reconstruct_nn([[1, 0]], 2)
    with pytest.raises(InvalidOneHot):
        reconstruct_nn([[1, 1], [0, 0]], 2)  # two active states
    with pytest.raises(InvalidOneHot):
        reconstruct_nn([[0, 0], [0, 0]], 2)  # none active


def test_nn_rerandomization_is_globally_zero_sum():
    # Every pair's material enters the global XOR twice and cancels.
    a = bundled_four_state()
    dep = dealer_init_nn(a, 4, 2, random.Random(4))
    for r in range(5):
        before = [list(ag.blocks[0].labels) for ag in dep.agents]
        dep.tick_all(NO_INPUT)
        after = [list(ag.blocks[0].labels) for ag in dep.agents]
        for j in range(a.num_states):
            acc = 0
            for b, x in zip(before, after):
                acc ^= b[j] ^ x[j]
            assert acc == 0


def test_nn_seed_evolution_matches_evolve():
    a = bundled_four_state()
    dep = dealer_init_nn(a, 3, 1, random.Random(5))
    r = 9
    for _ in range(r):
        dep.tick_all(TickInput("a"))
    for ag in dep.agents:
        blk = ag.blocks[0]
        for slot, g in enumerate(blk.groups):
            assert bytes(blk.seeds[slot * 16 : (slot + 1) * 16]) == evolve(
                dep.dealer.group_seeds[(None, g)], r, a.num_states, GF2
            )


def test_nn_oracle_equivalence_random_runs():
    rng = random.Random(6)
    for _ in range(40):
        a = random_automaton(rng, rng.randrange(1, 7), ["a", "b", "c"][: rng.randrange(1, 4)])
        n = rng.randrange(2, 6)
        init = rng.randrange(1, a.num_states + 1)
        dep = dealer_init_nn(a, n, init, rng)
        sched = random_schedule(rng, a, rng.randrange(0, 60))
        for sym in sched:
            dep.tick_all(sym)
        assert dep.reconstruct() == run_direct(a, init, sched)


# --------------------------------------------------------------- threshold


def test_tn_init_counts_and_interpolation():
    a = bundled_four_state()
    f = make_field(257)
    dep = dealer_init_tn(a, 5, 2, f, 2, random.Random(7))
    for ag in dep.agents:
        assert len(ag.blocks[0].groups) == comb(4, 1)
    for j in range(a.num_states):
        pts = [(ag.agent_index, ag.blocks[0].labels[j]) for ag in dep.agents]
        assert lagrange_at(pts, 0, f) == (1 if j + 1 == 2 else 0)


def test_tn_single_group_when_t_is_one():
    a = bundled_four_state()
    dep = dealer_init_tn(a, 3, 1, make_field(5), 1, random.Random(8))
    for ag in dep.agents:
        assert ag.blocks[0].groups == [(1, 2, 3)]


def test_tn_validation_errors():
    a = bundled_four_state()
    with pytest.raises(ThresholdViolation):
        dealer_init_tn(a, 4, 2, make_field(257), 1, random.Random(0))
    with pytest.raises(FieldTooSmall):
        dealer_init_tn(a, 5, 2, make_field(5), 1, random.Random(0))


def test_tn_rerandomization_keeps_secrets_and_degree():
    a = bundled_four_state()
    f = make_field(257)
    dep = dealer_init_tn(a, 5, 2, f, 3, random.Random(9))
    for _ in range(6):
        dep.tick_all(NO_INPUT)
        for j in range(a.num_states):
            pts = [(ag.agent_index, ag.blocks[0].labels[j]) for ag in dep.agents]
            base = pts[:3]
            # all five points on the degree-<=2 interpolant of the first three
            for x, y in pts[3:]:
                assert lagrange_at(base, x, f) == y
            assert lagrange_at(base, 0, f) == (1 if j + 1 == 3 else 0)


def test_tn_single_group_hook_adds_known_polynomial():
    # t=1, n=3: material b=3 for the only group adds P(x)=3x, i.e. 3,1,4.
    a = bundled_four_state()
    f = make_field(5)
    dep = dealer_init_tn(a, 3, 1, f, 1, random.Random(10))

    def hook(seed, m, modulus):
        return [3] * m, bytes(len(seed))

    before = [list(ag.blocks[0].labels) for ag in dep.agents]
    for ag in dep.agents:
        ag.expand_override = hook
    dep.tick_all(NO_INPUT)
    after = [list(ag.blocks[0].labels) for ag in dep.agents]
    added = [3, 1, 4]
    for i in range(3):
        for j in range(a.num_states):
            assert (before[i][j] + added[i]) % 5 == after[i][j]


def test_tn_every_subset_reconstructs_same_state():
    rng = random.Random(11)
    for p in (257, MERSENNE61):
        f = make_field(p)
        a = random_automaton(rng, 5, ["a", "b"])
        n, t = 5, 2
        init = rng.randrange(1, 6)
        dep = dealer_init_tn(a, n, t, f, init, rng)
        sched = random_schedule(rng, a, 30)
        for sym in sched:
            dep.tick_all(sym)
        expect = run_direct(a, init, sched)
        shares = [(ag.agent_index, list(ag.blocks[0].labels)) for ag in dep.agents]
        for subset in itertools.combinations(range(n), t + 1):
            got = reconstruct_tn([shares[i] for i in subset], t, f)
            assert got == expect


def test_tn_reconstruct_errors():
    f = make_field(257)
    with pytest.raises(NotEnoughShares):
        reconstruct_tn([(1, [1, 0])], 1, f)
    with pytest.raises(ValueError):
        reconstruct_tn([(1, [1, 0]), (1, [1, 0])], 1, f)


def test_tn_strict_mode_flags_tampering():
    a = bundled_four_state()
    f = make_field(257)
    dep = dealer_init_tn(a, 5, 1, f, 1, random.Random(12))
    shares = [(ag.agent_index, list(ag.blocks[0].labels)) for ag in dep.agents]
    shares[4][1][0] = (shares[4][1][0] + 1) % 257
    # non-strict never touches the tampered fifth share
    assert reconstruct_tn(shares, 1, f) == 1
    with pytest.raises(InvalidOneHot):
        reconstruct_tn(shares, 1, f, strict=True)


# ------------------------------------------------------------------- naive


def test_naive_instance_structure():
    a = bundled_four_state()
    dep = dealer_init_tn_naive(a, 3, 1, 1, random.Random(13))
    ag1 = dep.agent(1)
    assert [b.subset for b in ag1.blocks] == [(1, 2), (1, 3)]
    for b in ag1.blocks:
        assert len(b.groups) == 1  # t pairwise seeds per instance
        assert len(b.labels) == a.num_states


def test_naive_storage_formula():
    a = bundled_four_state()
    n, t = 5, 2
    dep = dealer_init_tn_naive(a, n, t, 1, random.Random(14))
    for ag in dep.agents:
        assert len(ag.blocks) == comb(n - 1, t)
        for b in ag.blocks:
            assert len(b.groups) == t


def test_naive_oracle_equivalence_every_responder_set():
    rng = random.Random(15)
    for _ in range(10):
        a = random_automaton(rng, rng.randrange(1, 5), ["a", "b"])
        n, t = rng.choice([(3, 1), (5, 2)])
        init = rng.randrange(1, a.num_states + 1)
        dep = dealer_init_tn_naive(a, n, t, init, rng)
        sched = random_schedule(rng, a, 20)
        for sym in sched:
            dep.tick_all(sym)
        expect = run_direct(a, init, sched)
        for responders in itertools.combinations(range(1, n + 1), t + 1):
            got = reconstruct_tn_naive([dep.agent(i) for i in responders])
            assert got == expect


def test_naive_not_enough_responders():
    a = bundled_four_state()
    dep = dealer_init_tn_naive(a, 5, 2, 1, random.Random(16))
    with pytest.raises(NoFullSubset):
        reconstruct_tn_naive([dep.agent(1), dep.agent(2)])


def test_nn_tick_cost_dominated_by_seed_count_not_states():
    # Soft cost check: per-tick work is one expansion per owned pair, so
    # doubling m (at these sizes, still one hash block per expansion)
    # must grow per-tick time by well under 1.5x. Median of interleaved
    # warmed runs to keep scheduler noise out.
    import statistics
    import time

    def make(m, n=4):
        rng = random.Random(5)
        a = random_automaton(rng, m, ["a"])
        return dealer_init_nn(a, n, 1, rng)

    def run(dep, ticks=2000):
        t0 = time.perf_counter()
        for r in range(ticks):
            dep.tick_all("a" if r % 2 else None)
        return (time.perf_counter() - t0) / ticks

    d4, d8 = make(4), make(8)
    run(d4, 500)
    run(d8, 500)
    r4, r8 = [], []
    for _ in range(5):
        r4.append(run(d4))
        r8.append(run(d8))
    ratio = statistics.median(r8) / statistics.median(r4)
    assert ratio <= 1.5, f"doubling m scaled per-tick time by {ratio:.2f}x"
