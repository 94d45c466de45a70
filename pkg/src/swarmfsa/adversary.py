"""Corruption timelines, captured views, and the lazy intermediate scheme.

A semi-honest adversary corrupts agents one at a time (each at most
once), reading the full memory of the victim at the moment of
corruption: current labels, current seeds, scheme parameters. The
aggregate of those snapshots is its view.

The intermediate scheme is the bridge used to reason about privacy: it
has the same memory layout as a real deployment, but labels start as
sums of pure random field elements (one fresh vector per seed-sharing
group) and stay frozen until their owner is corrupted, and a group's
seed starts evolving only after the first member of the group is
corrupted. Its view is a function of the dealer randomness and the
timeline alone, hence exactly independent of the initial state and the
input stream; the test harness verifies that by exhaustive enumeration
on tiny instances and compares the real schemes against it statistically.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from . import _kernel
from .automaton import Automaton
from .errors import ThresholdViolation, TickOutOfRange, TooLargeToEnumerate
from .field import FieldSpec
from .prg import SEED_LEN, random_seed
from .protocol import (
    SCHEME_NN,
    SCHEME_TN,
    SCHEME_TN_NAIVE,
    AgentState,
    GroupId,
    Snapshot,
    TickInput,
    enumerate_groups,
    make_block,
    snapshot,
)
from .sharing import zero_poly_weight


@dataclass(frozen=True)
class Corruption:
    agent: int
    tick: int


@dataclass(frozen=True)
class CorruptionTimeline:
    """Ordered corruption events with non-decreasing ticks."""

    events: tuple[Corruption, ...]

    @classmethod
    def of(cls, pairs: Sequence[tuple[int, int]]) -> "CorruptionTimeline":
        return cls(tuple(Corruption(a, r) for a, r in pairs))

    def __len__(self) -> int:
        return len(self.events)

    def is_well_formed(self, n: int) -> bool:
        agents = [c.agent for c in self.events]
        ticks = [c.tick for c in self.events]
        return (
            all(1 <= a <= n for a in agents)
            and len(set(agents)) == len(agents)
            and all(r >= 0 for r in ticks)
            and all(ticks[k] <= ticks[k + 1] for k in range(len(ticks) - 1))
        )


def validate_timeline(rho: CorruptionTimeline, scheme: str, n: int, t: int) -> bool:
    """True iff the timeline is well-formed and the adversary is
    appropriate for the scheme: at most n-1 corruptions for the
    all-agents scheme, at most t for the threshold schemes."""
    if not rho.is_well_formed(n):
        return False
    if scheme == SCHEME_NN:
        return len(rho) <= n - 1
    if scheme in (SCHEME_TN, SCHEME_TN_NAIVE):
        return len(rho) <= t
    raise ValueError(f"unknown scheme {scheme!r}")


def first_hypergraph_violation(
    groups: Sequence[GroupId], rho: CorruptionTimeline
) -> int | None:
    """First corruption step (1-based) violating the seed-cover condition.

    At every step the victim must belong to some seed-sharing group that
    is disjoint from everything corrupted at earlier steps; that group's
    still-private seed is what keeps the victim's labels independent of
    the view collected so far. Returns None when every step is covered.
    """
    corrupted: set[int] = set()
    group_sets = [set(g) for g in groups]
    for step, c in enumerate(rho.events, start=1):
        if not any(c.agent in g and not (g & corrupted) for g in group_sets):
            return step
        corrupted.add(c.agent)
    return None


def hypergraph_check(groups: Sequence[GroupId], rho: CorruptionTimeline, n: int = 0) -> bool:
    return first_hypergraph_violation(groups, rho) is None


@dataclass(frozen=True)
class View:
    """Aggregated snapshots obtained under one corruption timeline."""

    snapshots: tuple[Snapshot, ...]

    def label_vector(self) -> tuple[int, ...]:
        out: list[int] = []
        for s in self.snapshots:
            out.extend(s.label_vector())
        return tuple(out)

    def key(self):
        return tuple(s.key() for s in self.snapshots)

    def encode(self) -> bytes:
        """Canonical byte encoding (distribution-map key)."""
        return repr(self.key()).encode()


def capture(deployment, schedule: Sequence, rho: CorruptionTimeline) -> View:
    """Drive a deployment through the schedule, snapshotting each victim
    right after the barrier of its corruption tick.

    Tick 0 means "after initialization, before any tick". The run stops
    once the last corruption has been captured; later ticks cannot change
    the view.
    """
    horizon = len(schedule)
    for c in rho.events:
        if not 0 <= c.tick <= horizon:
            raise TickOutOfRange(f"corruption tick {c.tick} outside horizon {horizon}")
    due: dict[int, list[int]] = {}
    for c in rho.events:
        due.setdefault(c.tick, []).append(c.agent)
    snaps = [deployment.snapshot(a) for a in due.get(0, [])]
    last = max((c.tick for c in rho.events), default=0)
    for r, inp in enumerate(schedule[:last], start=1):
        deployment.tick_all(inp)
        for a in due.get(r, []):
            snaps.append(deployment.snapshot(a))
    return View(tuple(snaps))


class BitTape:
    """Random-like source backed by an explicit bit string.

    Serves getrandbits from the low bits of ``value`` outward; used to
    enumerate every randomness assignment of a tiny intermediate-scheme
    instance exactly.
    """

    def __init__(self, value: int, total_bits: int):
        self.value = value
        self.remaining = total_bits

    def getrandbits(self, k: int) -> int:
        if k > self.remaining:
            raise ValueError("bit tape exhausted")
        out = self.value & ((1 << k) - 1)
        self.value >>= k
        self.remaining -= k
        return out


class _GroupRef:
    """One seed-sharing group inside an intermediate deployment."""

    __slots__ = ("key", "members", "trigger", "material")

    def __init__(self, key, trigger):
        self.key = key  # (block subset or None, group id)
        self.members = []  # (ShareBlock, slot index) per holding agent
        self.trigger = trigger  # corruption tick of first corrupted holder
        self.material = None  # transient per-cycle expansion output

def _group_structure(scheme, n, t, f):
    """Canonical [(block subset or None, group, weight_fn)] per scheme."""
    if scheme == SCHEME_NN:
        return [(None, g) for g in enumerate_groups(n, SCHEME_NN)]
    if scheme == SCHEME_TN:
        return [(None, g) for g in enumerate_groups(n, SCHEME_TN, t)]
    if scheme == SCHEME_TN_NAIVE:
        if not (n > 2 * t >= 2):
            raise ThresholdViolation(f"need n > 2t >= 2, got n={n}, t={t}")
        keys = []
        for S in itertools.combinations(range(1, n + 1), t + 1):
            for pair in itertools.combinations(S, 2):
                keys.append((tuple(S), pair))
        return keys
    raise ValueError(f"unknown scheme {scheme!r}")


class IntermediateDeployment:
    """Corruption-triggered lazy variant of a base scheme.

    Built via :func:`intermediate_init`. Matches the base scheme's memory
    layout exactly; only initialization and the update triggers differ.
    """

    def __init__(self, scheme, automaton, f, n, t, agents, group_refs, corr_tick, seed_len, expand_fn):
        self.scheme = scheme
        self.automaton = automaton
        self.field = f
        self.n = n
        self.t = t
        self.agents = agents
        self._group_refs = group_refs
        self._corr_tick = corr_tick
        self.seed_len = seed_len
        self._expand = expand_fn or _kernel.prg_expand_raw
        self.tick = 0

    def agent(self, i: int) -> AgentState:
        return self.agents[i - 1]

    def snapshot(self, i: int) -> Snapshot:
        return snapshot(self.agents[i - 1])

    def tick_all(self, inp: TickInput | str | None) -> None:
        """One clock tick: evolve triggered seeds, update labels of
        already-corrupted agents per the base scheme, freeze the rest."""
        symbol = inp.symbol if isinstance(inp, TickInput) else inp
        cycle = self.tick + 1
        m = self.automaton.num_states
        p = self.field.modulus
        for ref in self._group_refs:
            if ref.trigger is not None and cycle >= ref.trigger + 1:
                blk, slot = ref.members[0]
                lo = slot * self.seed_len
                seed = bytes(blk.seeds[lo : lo + self.seed_len])
                b, nxt = self._expand(seed, m, p)
                ref.material = b
                for mb, ms in ref.members:
                    mlo = ms * self.seed_len
                    mb.seeds[mlo : mlo + self.seed_len] = nxt
            else:
                ref.material = None
        by_block: dict[int, list] = {}
        for ref in self._group_refs:
            if ref.material is None:
                continue
            for blk, slot in ref.members:
                by_block.setdefault(id(blk), []).append((slot, ref.material))
        for st in self.agents:
            ct = self._corr_tick.get(st.agent_index)
            if ct is None or cycle < ct + 1:
                continue  # labels frozen until after the owner's corruption
            for blk in st.blocks:
                if symbol is not None:
                    idx, off = self.automaton.preimage_arrays(symbol)
                    old = blk.labels[:]
                    for j in range(m):
                        acc = 0
                        for z in range(off[j], off[j + 1]):
                            acc += old[idx[z]]
                        blk.labels[j] = acc % p
                for slot, material in by_block.get(id(blk), []):
                    w = blk.weights[slot]
                    for j in range(m):
                        blk.labels[j] = (blk.labels[j] + w * material[j]) % p
        for st in self.agents:
            st.tick += 1
        self.tick += 1


def intermediate_init(
    scheme: str,
    a: Automaton,
    n: int,
    t: int,
    f: FieldSpec,
    rho: CorruptionTimeline,
    rng,
    seed_len: int = SEED_LEN,
    expand_fn=None,
) -> IntermediateDeployment:
    """Initialize the lazy intermediate variant of a base scheme.

    Per seed-sharing group the dealer draws a seed plus m uniform field
    elements; each agent's initial label j is the plain sum of those
    elements over the groups it belongs to (coefficient 1 per group), and
    the per-group vectors are then discarded. Draw order is canonical
    (groups in table order; seed first, then the m elements).
    """
    m = a.num_states
    keys = _group_structure(scheme, n, t, f)
    if scheme == SCHEME_TN and f.modulus <= n:
        raise ThresholdViolation(f"modulus {f.modulus} must exceed n={n}")
    if scheme in (SCHEME_NN, SCHEME_TN_NAIVE) and f.modulus != 2:
        raise ValueError("pairwise schemes run over GF(2)")
    seeds: dict = {}
    rvals: dict = {}
    for key in keys:
        seeds[key] = random_seed(rng, seed_len)
        rvals[key] = [f.rand_element(rng) for _ in range(m)]
    corr_tick = {c.agent: c.tick for c in rho.events}

    def trigger_for(key) -> int | None:
        _, group = key
        ticks = [c.tick for c in rho.events if c.agent in group]
        return min(ticks) if ticks else None

    refs = {key: _GroupRef(key, trigger_for(key)) for key in keys}
    agents = []
    for i in range(1, n + 1):
        if scheme == SCHEME_TN_NAIVE:
            block_subsets = sorted({key[0] for key in keys if i in key[0]})
        else:
            block_subsets = [None]
        blocks = []
        for subset in block_subsets:
            own = [key for key in keys if key[0] == subset and i in key[1]]
            labels = [0] * m
            for key in own:
                for j in range(m):
                    labels[j] = (labels[j] + rvals[key][j]) % f.modulus
            if scheme == SCHEME_TN:
                weights = [zero_poly_weight(key[1], t, n, i, f) for key in own]
            else:
                weights = [1] * len(own)
            blk = make_block(
                subset, m, labels, [key[1] for key in own], [seeds[key] for key in own], weights
            )
            blocks.append(blk)
            for slot, key in enumerate(own):
                refs[key].members.append((blk, slot))
        agents.append(AgentState(scheme, i, n, t, f, a, blocks, seed_len=seed_len))
    return IntermediateDeployment(
        scheme, a, f, n, t, agents, [refs[key] for key in keys], corr_tick, seed_len, expand_fn
    )


def enumerable_bits(scheme: str, n: int, t: int, m: int, f: FieldSpec, seed_len: int) -> int:
    """Total dealer-randomness bits of an intermediate instance."""
    if f.modulus != 2:
        raise TooLargeToEnumerate("exact enumeration is defined over GF(2) only")
    keys = _group_structure(scheme, n, t, f)
    return len(keys) * (8 * seed_len + m)


def exact_view_distribution(
    scheme: str,
    a: Automaton,
    n: int,
    t: int,
    f: FieldSpec,
    schedule: Sequence,
    rho: CorruptionTimeline,
    init_state: int = 1,
    seed_len: int = 1,
    max_bits: int = 24,
) -> dict:
    """Exact distribution of the intermediate scheme's view.

    Enumerates every dealer-randomness assignment of an intermediate
    instance (GF(2), tiny seeds) and returns {view key: count}; the total
    mass is 2**bits. ``init_state`` is accepted for symmetry with the
    real schemes but cannot influence the result; callers prove exactly
    that by comparing maps across different (state, input) pairs.
    """
    del init_state  # the intermediate scheme's view ignores it by design
    bits = enumerable_bits(scheme, n, t, a.num_states, f, seed_len)
    if bits > max_bits:
        raise TooLargeToEnumerate(f"{bits} randomness bits exceed the {max_bits}-bit cap")
    counts: dict = {}
    for v in range(1 << bits):
        tape = BitTape(v, bits)
        dep = intermediate_init(scheme, a, n, t, f, rho, tape, seed_len=seed_len)
        view = capture(dep, schedule, rho)
        k = view.key()
        counts[k] = counts.get(k, 0) + 1
    return counts
