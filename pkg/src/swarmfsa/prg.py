"""Deterministic seed expansion and evolution.

Every seed-sharing group of agents holds one seed and expands it in
lockstep at every clock tick, obtaining m field elements (the label
re-randomization material) plus a successor seed that immediately
replaces the old one. Because expansion is a pure function of the seed,
group members that never communicate still derive identical material at
every tick.

The concrete construction (documented in _kernel_py) is SHA-256 in
counter mode. It is deliberately pluggable: anything with the signature
``(seed: bytes, m: int, modulus: int) -> (list[int], bytes)`` can be
swapped in at the deployment level, e.g. a stream-cipher variant or a
deterministic fake for tests.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import _kernel
from .field import FieldSpec

#: Default seed width in bytes (128 bits).
SEED_LEN = 16


@dataclass(frozen=True)
class Expansion:
    """One expansion step: m field elements and the successor seed."""

    elements: tuple[int, ...]
    next_seed: bytes


def expand(seed: bytes, m: int, f: FieldSpec) -> Expansion:
    """Expand a seed into m elements of f plus a successor seed.

    Deterministic: identical (seed, m, f) give identical output on every
    platform. The successor seed has the same width as the input seed.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    elements, nxt = _kernel.prg_expand_raw(bytes(seed), m, f.modulus)
    return Expansion(tuple(elements), nxt)


def evolve(seed: bytes, k: int, m: int, f: FieldSpec) -> bytes:
    """k-fold seed evolution: take next_seed k times. evolve(s, 0) == s."""
    if k < 0:
        raise ValueError("k must be non-negative")
    s = bytes(seed)
    for _ in range(k):
        _, s = _kernel.prg_expand_raw(s, m, f.modulus)
    return s


def random_seed(rng, nbytes: int = SEED_LEN) -> bytes:
    """Fresh seed from a Random-like source (dealer randomness)."""
    return rng.getrandbits(8 * nbytes).to_bytes(nbytes, "big")
