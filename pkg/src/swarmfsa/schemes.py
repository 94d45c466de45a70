"""The three deployment schemes and their reconstruction procedures.

All-agents scheme ("nn"): per-state labels are XOR shares over GF(2) of
the active-state indicator (1 for the current state, 0 elsewhere); every
pair of agents shares a seed, and each tick every agent XORs the pair
material into its labels. Every per-group contribution enters the global
XOR exactly twice, so the shared secrets are unchanged.

Threshold scheme ("tn"): labels are Shamir shares over GF(p), one seed
per subset of n-t+1 agents, and the per-group increment for agent i is
the group zero-polynomial evaluated at i. The aggregate refresh
polynomial vanishes at 0, so any t+1 label lists still reconstruct.

Per-subset variant ("tn-naive"): an independent all-agents instance for
every (t+1)-subset; kept because it cross-validates the threshold scheme
and makes the storage trade-off concrete.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .automaton import Automaton
from .errors import (
    FieldTooSmall,
    InvalidOneHot,
    MissingShares,
    NoFullSubset,
    NotEnoughShares,
    ThresholdViolation,
)
from .field import GF2, FieldSpec
from .prg import random_seed
from .protocol import (
    SCHEME_NN,
    SCHEME_TN,
    SCHEME_TN_NAIVE,
    AgentState,
    GroupId,
    TickInput,
    agent_tick,
    enumerate_groups,
    make_block,
    owned_groups,
    snapshot,
)
from .sharing import additive_share_bit, lagrange_at, shamir_share, zero_poly_weight


@dataclass
class DealerRecord:
    """Omniscient initialization record, kept only for tests/verification.

    A production deployment writes agent state files and discards this.
    """

    init_state: int
    # (block subset or None, group id) -> initial seed bytes
    group_seeds: dict[tuple[GroupId | None, GroupId], bytes] = field(default_factory=dict)
    # (agent index, block subset or None) -> initial label tuple
    initial_labels: dict[tuple[int, GroupId | None], tuple[int, ...]] = field(
        default_factory=dict
    )


@dataclass
class Deployment:
    """All n agents of one run plus the optional dealer record."""

    scheme: str
    automaton: Automaton
    field: FieldSpec
    n: int
    t: int
    agents: list[AgentState]
    dealer: DealerRecord | None

    def agent(self, i: int) -> AgentState:
        return self.agents[i - 1]

    @property
    def tick(self) -> int:
        return self.agents[0].tick

    def tick_all(self, inp: TickInput | str | None, rerandomize: bool = True) -> None:
        """One global clock tick: same input delivered to every agent."""
        for ag in self.agents:
            agent_tick(ag, inp, rerandomize=rerandomize)

    def snapshot(self, i: int):
        return snapshot(self.agents[i - 1])

    def reconstruct(self) -> int:
        if self.scheme == SCHEME_NN:
            return reconstruct_nn([list(a.blocks[0].labels) for a in self.agents], self.n)
        if self.scheme == SCHEME_TN:
            return reconstruct_tn(
                [(a.agent_index, list(a.blocks[0].labels)) for a in self.agents],
                self.t,
                self.field,
            )
        return reconstruct_tn_naive(self.agents)


def dealer_init_nn(
    a: Automaton, n: int, init_state: int, rng, keep_dealer: bool = True
) -> Deployment:
    """All-agents initialization: XOR shares of the one-hot indicator plus
    one fresh seed per agent pair (given to both members)."""
    if n < 2:
        raise ValueError("need at least 2 agents")
    if not 1 <= init_state <= a.num_states:
        raise ValueError("initial state out of range")
    m = a.num_states
    share_rows = [
        additive_share_bit(1 if j == init_state else 0, n, rng).shares
        for j in range(1, m + 1)
    ]
    labels = {
        (i, None): [row[i - 1][1] for row in share_rows] for i in range(1, n + 1)
    }
    seeds = {(None, g): random_seed(rng) for g in enumerate_groups(n, SCHEME_NN)}
    return assemble_deployment(SCHEME_NN, a, GF2, n, 0, init_state, labels, seeds, keep_dealer)


def dealer_init_tn(
    a: Automaton,
    n: int,
    t: int,
    f: FieldSpec,
    init_state: int,
    rng,
    keep_dealer: bool = True,
) -> Deployment:
    """Threshold initialization: Shamir shares of the indicator per state,
    one seed per size-(n-t+1) subset, per-agent refresh weights."""
    if not (n > 2 * t >= 2):
        raise ThresholdViolation(f"need n > 2t >= 2, got n={n}, t={t}")
    if f.modulus <= n:
        raise FieldTooSmall(f"modulus {f.modulus} must exceed n={n}")
    if not 1 <= init_state <= a.num_states:
        raise ValueError("initial state out of range")
    m = a.num_states
    share_rows = [
        shamir_share(1 if j == init_state else 0, t, n, f, rng).shares
        for j in range(1, m + 1)
    ]
    labels = {
        (i, None): [row[i - 1][1] for row in share_rows] for i in range(1, n + 1)
    }
    seeds = {(None, g): random_seed(rng) for g in enumerate_groups(n, SCHEME_TN, t)}
    return assemble_deployment(SCHEME_TN, a, f, n, t, init_state, labels, seeds, keep_dealer)


def dealer_init_tn_naive(
    a: Automaton, n: int, t: int, init_state: int, rng, keep_dealer: bool = True
) -> Deployment:
    """Per-subset variant: an independent all-agents instance over GF(2)
    for every (t+1)-subset, all fed the same input stream."""
    if not (n > 2 * t >= 2):
        raise ThresholdViolation(f"need n > 2t >= 2, got n={n}, t={t}")
    if not 1 <= init_state <= a.num_states:
        raise ValueError("initial state out of range")
    m = a.num_states
    subsets = [tuple(c) for c in itertools.combinations(range(1, n + 1), t + 1)]
    labels: dict = {}
    seeds: dict = {}
    for S in subsets:
        rows = [
            additive_share_bit(1 if j == init_state else 0, len(S), rng).shares
            for j in range(1, m + 1)
        ]
        for pos, agent in enumerate(S):
            labels[(agent, S)] = [row[pos][1] for row in rows]
        for pair in itertools.combinations(S, 2):
            seeds[(S, pair)] = random_seed(rng)
    return assemble_deployment(
        SCHEME_TN_NAIVE, a, GF2, n, t, init_state, labels, seeds, keep_dealer
    )


def assemble_deployment(
    scheme: str,
    a: Automaton,
    f: FieldSpec,
    n: int,
    t: int,
    init_state: int,
    labels: dict,
    seeds: dict,
    keep_dealer: bool = True,
    tick: int = 0,
) -> Deployment:
    """Build a deployment from explicit label/seed assignments.

    ``labels`` maps (agent index, block subset or None) to a label list;
    ``seeds`` maps (block subset or None, group id) to seed bytes. Used by
    the dealers (with freshly drawn values) and by state-file rehydration.
    """
    m = a.num_states
    dealer = DealerRecord(init_state) if keep_dealer else None
    agents = []
    if scheme in (SCHEME_NN, SCHEME_TN):
        groups = enumerate_groups(n, scheme, t)
        for i in range(1, n + 1):
            own = owned_groups(groups, i)
            if scheme == SCHEME_TN:
                weights = [zero_poly_weight(g, t, n, i, f) for g in own]
            else:
                weights = [1] * len(own)
            block = make_block(
                None, m, labels[(i, None)], own, [seeds[(None, g)] for g in own], weights
            )
            agents.append(AgentState(scheme, i, n, t, f, a, [block], tick=tick))
    elif scheme == SCHEME_TN_NAIVE:
        subsets = [tuple(c) for c in itertools.combinations(range(1, n + 1), t + 1)]
        for i in range(1, n + 1):
            blocks = []
            for S in subsets:
                if i not in S:
                    continue
                pairs = [p for p in itertools.combinations(S, 2) if i in p]
                blocks.append(
                    make_block(
                        S, m, labels[(i, S)], pairs, [seeds[(S, p)] for p in pairs], [1] * len(pairs)
                    )
                )
            agents.append(AgentState(scheme, i, n, t, f, a, blocks, tick=tick))
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    if dealer is not None:
        dealer.initial_labels = {k: tuple(v) for k, v in labels.items()}
        dealer.group_seeds = {k: bytes(v) for k, v in seeds.items()}
    return Deployment(scheme, a, f, n, t, agents, dealer)


def _one_hot_state(secrets: Sequence[int]) -> int:
    """Index (1-based) of the single 1 in a 0/1 vector, else InvalidOneHot."""
    hot = [j for j, v in enumerate(secrets, start=1) if v == 1]
    if len(hot) != 1 or any(v not in (0, 1) for v in secrets):
        raise InvalidOneHot(f"reconstructed secrets are not one-hot: {list(secrets)}")
    return hot[0]


def reconstruct_nn(label_lists: Sequence[Sequence[int]], n: int) -> int:
    """XOR every agent's label per state; the active state is the single 1."""
    if len(label_lists) != n:
        raise MissingShares(f"all-agents reconstruction needs {n} lists, got {len(label_lists)}")
    m = len(label_lists[0])
    secrets = [0] * m
    for labels in label_lists:
        if len(labels) != m:
            raise MissingShares("label lists have mismatched lengths")
        for j in range(m):
            secrets[j] ^= labels[j]
    return _one_hot_state(secrets)


def reconstruct_tn(
    shares: Sequence[tuple[int, Sequence[int]]],
    t: int,
    f: FieldSpec,
    strict: bool = False,
) -> int:
    """Interpolate each state's labels at 0 from any t+1 agents.

    ``strict`` additionally verifies that every supplied share lies on
    the interpolated polynomial (an integration-test aid; the semi-honest
    model never needs it).
    """
    seen = {}
    for i, labels in shares:
        if i in seen:
            raise ValueError(f"duplicate share from agent {i}")
        seen[i] = list(labels)
    if len(seen) < t + 1:
        raise NotEnoughShares(f"threshold reconstruction needs {t + 1} shares, got {len(seen)}")
    indices = list(seen)
    base = indices[: t + 1]
    rest = indices[t + 1 :]
    m = len(seen[indices[0]])
    secrets = []
    for j in range(m):
        pts = [(i, seen[i][j]) for i in base]
        secrets.append(lagrange_at(pts, 0, f))
        if strict:
            for i in rest:
                if lagrange_at(pts, i, f) != seen[i][j]:
                    raise InvalidOneHot(
                        f"share of agent {i} for state {j + 1} is off-polynomial"
                    )
    return _one_hot_state(secrets)


def reconstruct_tn_naive(states: Sequence[AgentState]) -> int:
    """Pick the lexicographically first (t+1)-subset of responders and run
    the all-agents reconstruction on that instance."""
    if not states:
        raise NoFullSubset("no responders")
    t = states[0].t
    by_index = {st.agent_index: st for st in states}
    responders = sorted(by_index)
    if len(responders) < t + 1:
        raise NoFullSubset(
            f"need a fully responding subset of {t + 1} agents, got {len(responders)}"
        )
    instance = tuple(responders[: t + 1])
    label_lists = []
    for i in instance:
        block = next(b for b in by_index[i].blocks if b.subset == instance)
        label_lists.append(list(block.labels))
    return reconstruct_nn(label_lists, t + 1)
