"""Finite-state automaton: representation, text format, direct execution.

States are 1-indexed (index 0 stays free as the secret evaluation point
of the threshold scheme). An automaton has no distinguished initial or
terminal state; the initial state is a deployment parameter.

File format (UTF-8, line based, ``#`` starts a comment):

    states <m>
    alphabet <tok1> <tok2> ...
    trans <from:1..m> <tok> <to:1..m>     # exactly m * |alphabet| lines

``run_direct`` is the ground-truth oracle the test harness compares every
distributed reconstruction against.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass, field

from .errors import DuplicateTransition, ParseError, PartialTransition, UnknownSymbol


@dataclass
class Automaton:
    num_states: int
    alphabet: tuple[str, ...]
    transitions: dict[tuple[int, str], int]
    _preimage_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def step(self, state: int, symbol: str) -> int:
        """Apply the transition map once."""
        if symbol not in self.alphabet:
            raise UnknownSymbol(f"symbol {symbol!r} not in alphabet")
        return self.transitions[(state, symbol)]

    def preimage_arrays(self, symbol: str):
        """CSR-style predecessor lists for one symbol, 0-based, cached.

        Returns (idx, off) with idx/off array('i'); the predecessors of
        state j+1 are idx[off[j]:off[j+1]] (each a 0-based state index).
        Used by the tick kernel for the transition fold.
        """
        if symbol not in self.alphabet:
            raise UnknownSymbol(f"symbol {symbol!r} not in alphabet")
        cached = self._preimage_cache.get(symbol)
        if cached is not None:
            return cached
        pre: list[list[int]] = [[] for _ in range(self.num_states)]
        for k in range(1, self.num_states + 1):
            pre[self.transitions[(k, symbol)] - 1].append(k - 1)
        idx = array("i")
        off = array("i", [0])
        for js in pre:
            idx.extend(js)
            off.append(len(idx))
        self._preimage_cache[symbol] = (idx, off)
        return idx, off


def run_direct(a: Automaton, init: int, stream) -> int:
    """Fold the transition map over a stream of optional symbols.

    ``stream`` yields alphabet tokens or None (a clock tick with no
    input, which leaves the state unchanged).
    """
    s = init
    for sym in stream:
        if sym is not None:
            s = a.step(s, sym)
    return s


def parse_automaton(text: str) -> Automaton:
    """Parse and validate the line-based automaton format."""
    num_states = None
    alphabet: tuple[str, ...] | None = None
    transitions: dict[tuple[int, str], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "states":
            if num_states is not None or len(parts) != 2:
                raise ParseError(f"line {lineno}: bad states line")
            try:
                num_states = int(parts[1])
            except ValueError:
                raise ParseError(f"line {lineno}: states count is not an integer") from None
            if num_states < 1:
                raise ParseError(f"line {lineno}: need at least one state")
        elif kind == "alphabet":
            if alphabet is not None or len(parts) < 2:
                raise ParseError(f"line {lineno}: bad alphabet line")
            toks = tuple(parts[1:])
            if len(set(toks)) != len(toks):
                raise ParseError(f"line {lineno}: duplicate alphabet token")
            alphabet = toks
        elif kind == "trans":
            if num_states is None or alphabet is None:
                raise ParseError(f"line {lineno}: trans before states/alphabet")
            if len(parts) != 4:
                raise ParseError(f"line {lineno}: bad trans line")
            try:
                src, dst = int(parts[1]), int(parts[3])
            except ValueError:
                raise ParseError(f"line {lineno}: state index is not an integer") from None
            tok = parts[2]
            if tok not in alphabet:
                raise ParseError(f"line {lineno}: unknown symbol {tok!r}")
            if not (1 <= src <= num_states and 1 <= dst <= num_states):
                raise ParseError(f"line {lineno}: state index out of range")
            if (src, tok) in transitions:
                raise DuplicateTransition(f"line {lineno}: duplicate trans {src} {tok}")
            transitions[(src, tok)] = dst
        else:
            raise ParseError(f"line {lineno}: unknown directive {kind!r}")
    if num_states is None or alphabet is None:
        raise ParseError("missing states or alphabet line")
    missing = [
        (s, tok)
        for s in range(1, num_states + 1)
        for tok in alphabet
        if (s, tok) not in transitions
    ]
    if missing:
        raise PartialTransition(f"transition map not total, first missing: {missing[0]}")
    return Automaton(num_states, alphabet, transitions)


def serialize_automaton(a: Automaton) -> str:
    """Inverse of parse_automaton on valid automata."""
    lines = [f"states {a.num_states}", "alphabet " + " ".join(a.alphabet)]
    for s in range(1, a.num_states + 1):
        for tok in a.alphabet:
            lines.append(f"trans {s} {tok} {a.transitions[(s, tok)]}")
    return "\n".join(lines) + "\n"
