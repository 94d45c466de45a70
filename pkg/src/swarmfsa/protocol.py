"""Scheme-independent agent machinery.

An agent's per-tick work is the same template in every scheme: if an
input symbol arrived, fold the labels through the transition map; then,
for every seed-sharing group the agent belongs to (in canonical order),
expand the group seed, overwrite it with the successor, and add the
scheme-specific increment to every label. The whole update is atomic:
nothing outside the agent can observe an intermediate state.

Schemes differ only in the group table (pairs vs size n-t+1 subsets vs
pairs inside owned subsets) and in the per-group label increment weight,
so both are data here, not code.
"""

from __future__ import annotations

import itertools
from array import array
from dataclasses import dataclass
from math import comb
from typing import Callable, Sequence

from . import _kernel, _kernel_py
from .automaton import Automaton
from .errors import ThresholdViolation, UnknownSymbol
from .field import FieldSpec
from .prg import SEED_LEN

GroupId = tuple[int, ...]

SCHEME_NN = "nn"
SCHEME_TN = "tn"
SCHEME_TN_NAIVE = "tn-naive"
SCHEMES = (SCHEME_NN, SCHEME_TN, SCHEME_TN_NAIVE)

#: Expansion function type used by the PRG override test hook.
ExpandFn = Callable[[bytes, int, int], tuple[list[int], bytes]]


@dataclass(frozen=True)
class TickInput:
    """One clock tick's input: a symbol token, or None for no input."""

    symbol: str | None = None


NO_INPUT = TickInput(None)


def enumerate_groups(n: int, scheme: str, t: int = 0) -> list[GroupId]:
    """Canonical (lexicographic) table of seed-sharing groups.

    Pairwise scheme: all C(n,2) pairs. Threshold scheme: all subsets of
    size n-t+1 (requires n > 2t >= 2).
    """
    if scheme == SCHEME_NN:
        if n < 2:
            raise ValueError("need at least 2 agents")
        return [tuple(c) for c in itertools.combinations(range(1, n + 1), 2)]
    if scheme in (SCHEME_TN, SCHEME_TN_NAIVE):
        if not (n > 2 * t >= 2):
            raise ThresholdViolation(f"need n > 2t >= 2, got n={n}, t={t}")
        size = n - t + 1
        return [tuple(c) for c in itertools.combinations(range(1, n + 1), size)]
    raise ValueError(f"unknown scheme {scheme!r}")


def owned_groups(groups: Sequence[GroupId], i: int) -> list[GroupId]:
    """Subsequence of the canonical table containing agent i."""
    return [g for g in groups if i in g]


@dataclass
class ShareBlock:
    """One protocol instance's labels plus the seeds that refresh them.

    The basic schemes have a single block per agent; the per-subset
    variant keeps one block per owned (t+1)-subset, with ``subset``
    recording which one.
    """

    subset: GroupId | None
    labels: array  # array('Q'), length m, reduced field elements
    groups: list[GroupId]  # canonical order, all containing the owner
    seeds: bytearray  # len(groups) * seed_len bytes
    weights: array  # array('Q'), per-group label increment factor


@dataclass
class AgentState:
    """Everything one agent stores between ticks."""

    scheme: str
    agent_index: int
    n: int
    t: int
    field: FieldSpec
    automaton: Automaton
    blocks: list[ShareBlock]
    tick: int = 0
    seed_len: int = SEED_LEN
    expand_override: ExpandFn | None = None  # test hook; None = reference PRG

    def seed_count(self) -> int:
        return sum(len(b.groups) for b in self.blocks)

    def label_list_count(self) -> int:
        return len(self.blocks)


def make_block(
    subset: GroupId | None,
    m: int,
    labels: Sequence[int],
    groups: Sequence[GroupId],
    seeds: Sequence[bytes],
    weights: Sequence[int],
) -> ShareBlock:
    if len(labels) != m:
        raise ValueError("label count != m")
    if not (len(groups) == len(seeds) == len(weights)):
        raise ValueError("groups/seeds/weights length mismatch")
    return ShareBlock(
        subset=tuple(subset) if subset is not None else None,
        labels=array("Q", labels),
        groups=[tuple(g) for g in groups],
        seeds=bytearray(b"".join(seeds)),
        weights=array("Q", weights),
    )


def transition_sum(labels: Sequence[int], a: Automaton, symbol: str, f: FieldSpec) -> list[int]:
    """New label vector after one input symbol: each state's label is the
    sum of the labels of its predecessors; empty-preimage states get 0."""
    idx, off = a.preimage_arrays(symbol)
    p = f.modulus
    out = []
    for j in range(a.num_states):
        acc = 0
        for z in range(off[j], off[j + 1]):
            acc += labels[idx[z]]
        out.append(acc % p)
    return out


def _transition_in_place(block: ShareBlock, a: Automaton, symbol: str, p: int) -> None:
    idx, off = a.preimage_arrays(symbol)
    old = block.labels[:]
    for j in range(a.num_states):
        acc = 0
        for z in range(off[j], off[j + 1]):
            acc += old[idx[z]]
        block.labels[j] = acc % p

def agent_tick(st: AgentState, inp: TickInput | str | None, rerandomize: bool = True) -> AgentState:
    """Run one clock tick on an agent, in place, and return it.

    ``rerandomize=False`` is a fault-injection hook for the privacy power
    tests; the real protocol always re-randomizes.
    """
    symbol = inp.symbol if isinstance(inp, TickInput) else inp
    p = st.field.modulus
    if symbol is not None:
        if symbol not in st.automaton.alphabet:
            raise UnknownSymbol(f"symbol {symbol!r} not in alphabet")
        pre_idx, pre_off = st.automaton.preimage_arrays(symbol)
    else:
        pre_idx, pre_off = None, None
    for block in st.blocks:
        if not rerandomize:
            if symbol is not None:
                _transition_in_place(block, st.automaton, symbol, p)
            continue
        if st.expand_override is None:
            _kernel.agent_tick_raw(
                block.labels, pre_idx, pre_off, block.seeds, block.weights, p, st.seed_len
            )
        else:
            _kernel_py.agent_tick_raw(
                block.labels,
                pre_idx,
                pre_off,
                block.seeds,
                block.weights,
                p,
                st.seed_len,
                expand_fn=st.expand_override,
            )
    st.tick += 1
    return st


def rerandomize_agent(st: AgentState) -> AgentState:
    """Apply only the re-randomization phase (no transition, no tick bump).

    This is the building block the tick template invokes after the
    transition fold; exposed for direct testing of the refresh algebra.
    """
    p = st.field.modulus
    for block in st.blocks:
        if st.expand_override is None:
            _kernel.agent_tick_raw(
                block.labels, None, None, block.seeds, block.weights, p, st.seed_len
            )
        else:
            _kernel_py.agent_tick_raw(
                block.labels,
                None,
                None,
                block.seeds,
                block.weights,
                p,
                st.seed_len,
                expand_fn=st.expand_override,
            )
    return st


@dataclass(frozen=True)
class SnapshotBlock:
    subset: GroupId | None
    labels: tuple[int, ...]
    groups: tuple[GroupId, ...]
    seeds: tuple[bytes, ...]


@dataclass(frozen=True)
class Snapshot:
    """Deep, immutable copy of an agent's memory between ticks.

    Contains exactly what a corrupting adversary reads: identity, scheme
    parameters, current labels, current (already evolved) seeds, and the
    tick counter. Dealer randomness and erased seeds are absent by
    construction.
    """

    agent_index: int
    scheme: str
    n: int
    t: int
    modulus: int
    tick: int
    blocks: tuple[SnapshotBlock, ...]

    def label_vector(self) -> tuple[int, ...]:
        """All labels in canonical block order, flattened."""
        out: list[int] = []
        for b in self.blocks:
            out.extend(b.labels)
        return tuple(out)

    def key(self):
        """Hashable canonical encoding (used by exact distribution maps)."""
        return (
            self.agent_index,
            self.tick,
            tuple((b.subset, b.labels, b.groups, b.seeds) for b in self.blocks),
        )


def snapshot(st: AgentState) -> Snapshot:
    blocks = []
    for b in st.blocks:
        seeds = tuple(
            bytes(b.seeds[g * st.seed_len : (g + 1) * st.seed_len])
            for g in range(len(b.groups))
        )
        blocks.append(
            SnapshotBlock(
                subset=b.subset,
                labels=tuple(b.labels),
                groups=tuple(b.groups),
                seeds=seeds,
            )
        )
    return Snapshot(
        agent_index=st.agent_index,
        scheme=st.scheme,
        n=st.n,
        t=st.t,
        modulus=st.field.modulus,
        tick=st.tick,
        blocks=tuple(blocks),
    )


def expected_seed_count(scheme: str, n: int, t: int) -> int:
    """Storage formula: seeds held by one agent."""
    if scheme == SCHEME_NN:
        return n - 1
    if scheme == SCHEME_TN:
        return comb(n - 1, t - 1)
    if scheme == SCHEME_TN_NAIVE:
        return comb(n - 1, t) * t
    raise ValueError(f"unknown scheme {scheme!r}")


def expected_block_count(scheme: str, n: int, t: int) -> int:
    if scheme in (SCHEME_NN, SCHEME_TN):
        return 1
    if scheme == SCHEME_TN_NAIVE:
        return comb(n - 1, t)
    raise ValueError(f"unknown scheme {scheme!r}")
