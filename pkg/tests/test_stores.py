import random

import pytest

from swarmfsa.adversary import CorruptionTimeline, capture
from swarmfsa.errors import StateFileCorrupt
from swarmfsa.field import make_field
from swarmfsa.protocol import NO_INPUT, TickInput
from swarmfsa.schemes import dealer_init_nn, dealer_init_tn, dealer_init_tn_naive
from swarmfsa.stores import (
    agent_state_nbytes,
    parse_agent_state,
    parse_dealer,
    parse_ticks,
    parse_timeline,
    read_agent_state,
    serialize_agent_state,
    serialize_dealer,
    serialize_ticks,
    serialize_timeline,
    serialize_view,
    write_agent_state,
)

from test_automaton import bundled_four_state


def deployments():
    a = bundled_four_state()
    rng = random.Random(42)
    yield dealer_init_nn(a, 3, 2, rng), a
    yield dealer_init_tn(a, 5, 2, make_field(257), 1, rng), a
    yield dealer_init_tn_naive(a, 5, 2, 4, rng), a


def test_agent_state_round_trip_all_schemes():
    for dep, a in deployments():
        for _ in range(3):
            dep.tick_all(TickInput("a"))
        for ag in dep.agents:
            text = serialize_agent_state(ag)
            back = parse_agent_state(text, a)
            assert serialize_agent_state(back) == text
            assert back.tick == ag.tick
            assert [list(b.labels) for b in back.blocks] == [
                list(b.labels) for b in ag.blocks
            ]
            assert [bytes(b.seeds) for b in back.blocks] == [
                bytes(b.seeds) for b in ag.blocks
            ]


def test_agent_state_size_constant_across_ticks():
    for dep, _ in deployments():
        size0 = [agent_state_nbytes(ag) for ag in dep.agents]
        for _ in range(25):
            dep.tick_all(NO_INPUT)
        assert [agent_state_nbytes(ag) for ag in dep.agents] == size0


def test_agent_state_file_io(tmp_path):
    a = bundled_four_state()
    dep = dealer_init_nn(a, 2, 1, random.Random(0))
    path = tmp_path / "agent1.state"
    write_agent_state(path, dep.agent(1))
    back = read_agent_state(path, a)
    assert serialize_agent_state(back) == serialize_agent_state(dep.agent(1))


@pytest.mark.parametrize(
    "mutate",
    [
        lambda s: s.replace("swarmfsa-agent v1", "swarmfsa-agent v9"),
        lambda s: s.replace("scheme nn", "scheme zz"),
        lambda s: s + "garbage\n",
        lambda s: s.replace("labels ", "labelz ", 1),
        lambda s: s.replace("tick 000000000000", "tick aa"),
        lambda s: "\n".join(ln for ln in s.splitlines() if not ln.startswith("T=1,2")) + "\n",
    ],
)
def test_agent_state_corruption_detected(mutate):
    a = bundled_four_state()
    dep = dealer_init_nn(a, 3, 1, random.Random(1))
    text = serialize_agent_state(dep.agent(1))
    with pytest.raises(StateFileCorrupt):
        parse_agent_state(mutate(text), a)


def test_agent_state_wrong_automaton_rejected():
    from swarmfsa.automaton import parse_automaton

    a = bundled_four_state()
    dep = dealer_init_nn(a, 2, 1, random.Random(2))
    other = parse_automaton("states 2\nalphabet a\ntrans 1 a 1\ntrans 2 a 2")
    with pytest.raises(StateFileCorrupt):
        parse_agent_state(serialize_agent_state(dep.agent(1)), other)


def test_dealer_round_trip_rebuilds_deployment():
    for dep, a in deployments():
        text = serialize_dealer(dep)
        back = parse_dealer(text, a)
        assert back.scheme == dep.scheme
        assert back.dealer.init_state == dep.dealer.init_state
        assert back.dealer.group_seeds == dep.dealer.group_seeds
        assert back.dealer.initial_labels == dep.dealer.initial_labels
        assert serialize_dealer(back) == text
        for ag, bg in zip(dep.agents, back.agents):
            assert serialize_agent_state(ag) == serialize_agent_state(bg)


def test_timeline_round_trip_and_comments():
    rho = CorruptionTimeline.of([(1, 0), (3, 7)])
    text = serialize_timeline(rho)
    assert parse_timeline(text) == rho
    assert parse_timeline("# nothing\n\n" + text) == rho
    with pytest.raises(StateFileCorrupt):
        parse_timeline("corrupt one 2\n")
    with pytest.raises(StateFileCorrupt):
        parse_timeline("corrupt 1\n")


def test_ticks_round_trip():
    sched = ["a", None, "b", None]
    text = serialize_ticks(sched)
    assert text == "a\n-\nb\n-\n"
    assert parse_ticks(text) == sched
    assert parse_ticks("# header\na\n\n-\n") == ["a", None]


def test_view_dump_contains_captured_at():
    a = bundled_four_state()
    dep = dealer_init_nn(a, 3, 1, random.Random(3))
    view = capture(dep, ["a", "b"], CorruptionTimeline.of([(2, 1)]))
    text = serialize_view(view)
    assert text.startswith("swarmfsa-view v1\n")
    assert "captured_at 000000000001" in text
    assert "agent 2" in text
