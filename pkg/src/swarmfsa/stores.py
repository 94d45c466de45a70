"""On-disk formats: agent state, dealer record, views, timelines, traces.

All formats are versioned, line-based UTF-8 with ``#`` comments where
noted. Field elements are fixed-width lowercase hex (width derived from
the modulus), seeds are 32 hex chars, and the tick counter is a
zero-padded 12-digit decimal so a state file's byte size is independent
of how long the deployment has been running.
"""

from __future__ import annotations

import itertools
import os
import pathlib

from .automaton import Automaton
from .errors import StateFileCorrupt
from .field import FieldSpec, make_field
from .prg import SEED_LEN
from .protocol import (
    SCHEME_NN,
    SCHEME_TN,
    SCHEME_TN_NAIVE,
    AgentState,
    GroupId,
    enumerate_groups,
    owned_groups,
)
from .adversary import Corruption, CorruptionTimeline, View
from .schemes import Deployment, assemble_deployment

AGENT_MAGIC = "swarmfsa-agent v1"
DEALER_MAGIC = "swarmfsa-dealer v1"
VIEW_MAGIC = "swarmfsa-view v1"

_TICK_WIDTH = 12


def _fmt_tick(tick: int) -> str:
    if tick < 0 or tick >= 10**_TICK_WIDTH:
        raise ValueError("tick out of serializable range")
    return format(tick, f"0{_TICK_WIDTH}d")


def _fmt_group(g: GroupId) -> str:
    return ",".join(str(i) for i in g)


def _parse_group(text: str) -> GroupId:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise StateFileCorrupt(f"bad group spec {text!r}") from None


def _labels_line(labels, f: FieldSpec) -> str:
    return "labels " + ",".join(f.to_hex(v) for v in labels)


def _seed_line(g: GroupId, seed: bytes) -> str:
    return f"T={_fmt_group(g)}:seed={seed.hex()}"


class _Lines:
    """Cursor over non-empty lines with uniform corruption errors."""

    def __init__(self, text: str):
        self.lines = [ln.rstrip("\n") for ln in text.splitlines()]
        self.pos = 0

    def peek(self) -> str | None:
        while self.pos < len(self.lines):
            ln = self.lines[self.pos].strip()
            if ln:
                return ln
            self.pos += 1
        return None

    def next(self) -> str:
        ln = self.peek()
        if ln is None:
            raise StateFileCorrupt("unexpected end of file")
        self.pos += 1
        return ln

    def expect_kv(self, key: str) -> str:
        ln = self.next()
        parts = ln.split(maxsplit=1)
        if len(parts) != 2 or parts[0] != key:
            raise StateFileCorrupt(f"expected '{key} <value>', got {ln!r}")
        return parts[1]


def _parse_seed_line(ln: str) -> tuple[GroupId, bytes]:
    if not ln.startswith("T="):
        raise StateFileCorrupt(f"expected seed line, got {ln!r}")
    try:
        head, seed_hex = ln[2:].split(":seed=")
        seed = bytes.fromhex(seed_hex)
    except ValueError:
        raise StateFileCorrupt(f"bad seed line {ln!r}") from None
    if len(seed) != SEED_LEN:
        raise StateFileCorrupt(f"seed must be {SEED_LEN} bytes, got {len(seed)}")
    return _parse_group(head), seed


def _parse_labels_line(ln: str, f: FieldSpec, m: int) -> list[int]:
    if not ln.startswith("labels "):
        raise StateFileCorrupt(f"expected labels line, got {ln!r}")
    parts = ln[len("labels ") :].split(",")
    if len(parts) != m:
        raise StateFileCorrupt(f"expected {m} labels, got {len(parts)}")
    try:
        return [f.from_hex(x) for x in parts]
    except Exception as exc:
        raise StateFileCorrupt(f"bad label encoding: {exc}") from None


# ------------------------------------------------------------- agent state


def serialize_agent_state(st: AgentState) -> str:
    f = st.field
    out = [
        AGENT_MAGIC,
        f"scheme {st.scheme}",
        f"n {st.n}",
        f"t {st.t}",
        f"i {st.agent_index}",
        f"modulus {f.modulus}",
        f"m {st.automaton.num_states}",
        f"tick {_fmt_tick(st.tick)}",
    ]
    for blk in st.blocks:
        if st.scheme == SCHEME_TN_NAIVE:
            out.append(f"block {_fmt_group(blk.subset)}")
        out.append(_labels_line(blk.labels, f))
        for slot, g in enumerate(blk.groups):
            seed = bytes(blk.seeds[slot * st.seed_len : (slot + 1) * st.seed_len])
            out.append(_seed_line(g, seed))
    return "\n".join(out) + "\n"


def parse_agent_state(text: str, a: Automaton) -> AgentState:
    cur = _Lines(text)
    if cur.next() != AGENT_MAGIC:
        raise StateFileCorrupt("not an agent state file")
    scheme = cur.expect_kv("scheme")
    if scheme not in (SCHEME_NN, SCHEME_TN, SCHEME_TN_NAIVE):
        raise StateFileCorrupt(f"unknown scheme {scheme!r}")
    try:
        n = int(cur.expect_kv("n"))
        t = int(cur.expect_kv("t"))
        i = int(cur.expect_kv("i"))
        modulus = int(cur.expect_kv("modulus"))
        m = int(cur.expect_kv("m"))
        tick = int(cur.expect_kv("tick"))
    except ValueError:
        raise StateFileCorrupt("non-integer header field") from None
    if m != a.num_states:
        raise StateFileCorrupt(f"state file has m={m}, automaton has {a.num_states}")
    if not 1 <= i <= n:
        raise StateFileCorrupt(f"agent index {i} out of range")
    try:
        f = make_field(modulus)
    except Exception as exc:
        raise StateFileCorrupt(f"bad modulus: {exc}") from None

    labels: dict = {}
    seeds: dict = {}
    if scheme in (SCHEME_NN, SCHEME_TN):
        expected = owned_groups(enumerate_groups(n, scheme, t), i)
        labels[(i, None)] = _parse_labels_line(cur.next(), f, m)
        for g in expected:
            got_g, seed = _parse_seed_line(cur.next())
            if got_g != g:
                raise StateFileCorrupt(f"expected seed for group {g}, got {got_g}")
            seeds[(None, g)] = seed
    else:
        subsets = [
            S for S in itertools.combinations(range(1, n + 1), t + 1) if i in S
        ]
        for S in subsets:
            ln = cur.next()
            if ln != f"block {_fmt_group(S)}":
                raise StateFileCorrupt(f"expected 'block {_fmt_group(S)}', got {ln!r}")
            labels[(i, S)] = _parse_labels_line(cur.next(), f, m)
            for pair in itertools.combinations(S, 2):
                if i not in pair:
                    continue
                got_g, seed = _parse_seed_line(cur.next())
                if got_g != pair:
                    raise StateFileCorrupt(f"expected seed for pair {pair}, got {got_g}")
                seeds[(S, pair)] = seed
    if cur.peek() is not None:
        raise StateFileCorrupt(f"trailing content: {cur.peek()!r}")
    # Rebuild through the common assembler for one agent, then pick it out.
    # Peer labels/seeds are placeholders; only agent i's block data is real.
    return _rebuild_single_agent(scheme, a, f, n, t, i, tick, labels, seeds)


def _rebuild_single_agent(scheme, a, f, n, t, i, tick, labels, seeds) -> AgentState:
    from .protocol import make_block
    from .sharing import zero_poly_weight

    m = a.num_states
    if scheme in (SCHEME_NN, SCHEME_TN):
        own = owned_groups(enumerate_groups(n, scheme, t), i)
        if scheme == SCHEME_TN:
            weights = [zero_poly_weight(g, t, n, i, f) for g in own]
        else:
            weights = [1] * len(own)
        blocks = [
            make_block(None, m, labels[(i, None)], own, [seeds[(None, g)] for g in own], weights)
        ]
    else:
        blocks = []
        for S in itertools.combinations(range(1, n + 1), t + 1):
            if i not in S:
                continue
            pairs = [p for p in itertools.combinations(S, 2) if i in p]
            blocks.append(
                make_block(S, m, labels[(i, S)], pairs, [seeds[(S, p)] for p in pairs], [1] * len(pairs))
            )
    return AgentState(scheme, i, n, t, f, a, blocks, tick=tick)


def write_agent_state(path, st: AgentState) -> None:
    """Atomic write: temp file in the same directory, then rename."""
    path = pathlib.Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(serialize_agent_state(st), encoding="utf-8")
    os.replace(tmp, path)


def read_agent_state(path, a: Automaton) -> AgentState:
    return parse_agent_state(pathlib.Path(path).read_text(encoding="utf-8"), a)


def agent_state_nbytes(st: AgentState) -> int:
    """Serialized size; constant across a run at any horizon."""
    return len(serialize_agent_state(st).encode("utf-8"))

# ------------------------------------------------------------ dealer record


def serialize_dealer(dep: Deployment) -> str:
    if dep.dealer is None:
        raise ValueError("deployment has no dealer record")
    f = dep.field
    out = [
        DEALER_MAGIC,
        f"scheme {dep.scheme}",
        f"n {dep.n}",
        f"t {dep.t}",
        f"modulus {f.modulus}",
        f"m {dep.automaton.num_states}",
        f"init {dep.dealer.init_state}",
    ]
    if dep.scheme in (SCHEME_NN, SCHEME_TN):
        for i in range(1, dep.n + 1):
            out.append(f"agent {i} " + _labels_line(dep.dealer.initial_labels[(i, None)], f))
        for g in enumerate_groups(dep.n, dep.scheme, dep.t):
            out.append(_seed_line(g, dep.dealer.group_seeds[(None, g)]))
    else:
        for S in itertools.combinations(range(1, dep.n + 1), dep.t + 1):
            out.append(f"block {_fmt_group(S)}")
            for i in S:
                out.append(f"agent {i} " + _labels_line(dep.dealer.initial_labels[(i, S)], f))
            for pair in itertools.combinations(S, 2):
                out.append(_seed_line(pair, dep.dealer.group_seeds[(S, pair)]))
    return "\n".join(out) + "\n"


def _parse_agent_labels_line(ln: str, f: FieldSpec, m: int) -> tuple[int, list[int]]:
    parts = ln.split(maxsplit=2)
    if len(parts) != 3 or parts[0] != "agent":
        raise StateFileCorrupt(f"expected 'agent <i> labels ...', got {ln!r}")
    try:
        i = int(parts[1])
    except ValueError:
        raise StateFileCorrupt("bad agent index") from None
    return i, _parse_labels_line(parts[2], f, m)


def parse_dealer(text: str, a: Automaton) -> Deployment:
    """Rehydrate a full deployment (tick 0) from a dealer record file."""
    cur = _Lines(text)
    if cur.next() != DEALER_MAGIC:
        raise StateFileCorrupt("not a dealer record file")
    scheme = cur.expect_kv("scheme")
    try:
        n = int(cur.expect_kv("n"))
        t = int(cur.expect_kv("t"))
        modulus = int(cur.expect_kv("modulus"))
        m = int(cur.expect_kv("m"))
        init_state = int(cur.expect_kv("init"))
    except ValueError:
        raise StateFileCorrupt("non-integer header field") from None
    if m != a.num_states:
        raise StateFileCorrupt(f"dealer file has m={m}, automaton has {a.num_states}")
    f = make_field(modulus)
    labels: dict = {}
    seeds: dict = {}
    if scheme in (SCHEME_NN, SCHEME_TN):
        for i in range(1, n + 1):
            got, vals = _parse_agent_labels_line(cur.next(), f, m)
            if got != i:
                raise StateFileCorrupt(f"expected labels for agent {i}, got {got}")
            labels[(i, None)] = vals
        for g in enumerate_groups(n, scheme, t):
            got_g, seed = _parse_seed_line(cur.next())
            if got_g != g:
                raise StateFileCorrupt(f"expected seed for group {g}")
            seeds[(None, g)] = seed
    elif scheme == SCHEME_TN_NAIVE:
        for S in itertools.combinations(range(1, n + 1), t + 1):
            if cur.next() != f"block {_fmt_group(S)}":
                raise StateFileCorrupt(f"expected block {S}")
            for i in S:
                got, vals = _parse_agent_labels_line(cur.next(), f, m)
                if got != i:
                    raise StateFileCorrupt(f"expected labels for agent {i}, got {got}")
                labels[(i, S)] = vals
            for pair in itertools.combinations(S, 2):
                got_g, seed = _parse_seed_line(cur.next())
                if got_g != pair:
                    raise StateFileCorrupt(f"expected seed for pair {pair}")
                seeds[(S, pair)] = seed
    else:
        raise StateFileCorrupt(f"unknown scheme {scheme!r}")
    if cur.peek() is not None:
        raise StateFileCorrupt(f"trailing content: {cur.peek()!r}")
    return assemble_deployment(scheme, a, f, n, t, init_state, labels, seeds, keep_dealer=True)


# ------------------------------------------------------------------- views


def serialize_view(view: View) -> str:
    out = [VIEW_MAGIC]
    for s in view.snapshots:
        f = make_field(s.modulus)
        out += [
            "snapshot",
            f"agent {s.agent_index}",
            f"captured_at {_fmt_tick(s.tick)}",
            f"scheme {s.scheme}",
            f"n {s.n}",
            f"t {s.t}",
            f"modulus {s.modulus}",
            f"m {len(s.blocks[0].labels)}",
        ]
        for blk in s.blocks:
            if s.scheme == SCHEME_TN_NAIVE:
                out.append(f"block {_fmt_group(blk.subset)}")
            out.append(_labels_line(blk.labels, f))
            for g, seed in zip(blk.groups, blk.seeds):
                out.append(_seed_line(g, seed))
    return "\n".join(out) + "\n"


# --------------------------------------------------------------- timelines


def serialize_timeline(rho: CorruptionTimeline) -> str:
    return "".join(f"corrupt {c.agent} {c.tick}\n" for c in rho.events)


def parse_timeline(text: str) -> CorruptionTimeline:
    events = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] != "corrupt":
            raise StateFileCorrupt(f"timeline line {lineno}: expected 'corrupt <agent> <tick>'")
        try:
            events.append(Corruption(int(parts[1]), int(parts[2])))
        except ValueError:
            raise StateFileCorrupt(f"timeline line {lineno}: non-integer field") from None
    return CorruptionTimeline(tuple(events))


# ------------------------------------------------------------- tick traces


def serialize_ticks(schedule) -> str:
    """One line per tick: the symbol token, or '-' for no input."""
    out = []
    for sym in schedule:
        s = sym.symbol if hasattr(sym, "symbol") else sym
        out.append("-" if s is None else str(s))
    return "\n".join(out) + ("\n" if out else "")


def parse_ticks(text: str) -> list:
    schedule = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        schedule.append(None if line == "-" else line)
    return schedule
