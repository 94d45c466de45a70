"""Pure-Python tick kernel.

This module is the semantic reference for the hot per-tick operations;
the compiled kernel in _kernel_cy.pyx must reproduce it byte for byte.
It has no dependencies beyond hashlib so it always imports.

Seed expansion byte stream: block_i = SHA256(seed || BE32(i)) for
i = 0, 1, 2, ...; blocks are concatenated and consumed left to right.
An expansion for m elements over GF(p) consumes m*w bytes of elements
(w = 1 for p = 2, 16 otherwise) followed by len(seed) bytes for the
successor seed.
"""

from __future__ import annotations

import hashlib

BACKEND = "pure-python"


def sha_stream(seed: bytes, nbytes: int) -> bytes:
    """First nbytes of the counter-mode SHA-256 stream keyed by seed."""
    out = bytearray()
    i = 0
    while len(out) < nbytes:
        out += hashlib.sha256(seed + i.to_bytes(4, "big")).digest()
        i += 1
    return bytes(out[:nbytes])


def prg_expand_raw(seed: bytes, m: int, modulus: int):
    """Expand seed into (list of m reduced ints, successor seed bytes)."""
    w = 1 if modulus == 2 else 16
    need = m * w + len(seed)
    buf = sha_stream(seed, need)
    if modulus == 2:
        elements = [buf[j] & 1 for j in range(m)]
    else:
        elements = [
            int.from_bytes(buf[j * 16 : (j + 1) * 16], "big") % modulus for j in range(m)
        ]
    return elements, buf[m * w :]


def agent_tick_raw(labels, pre_idx, pre_off, seeds, weights, modulus, seed_len, expand_fn=None):
    """Apply one clock tick in place.

    labels   mutable sequence of m reduced ints (array('Q'))
    pre_idx  flat 0-based predecessor indices, or None for an input-free tick
    pre_off  offsets into pre_idx, length m+1 (None iff pre_idx is None)
    seeds    bytearray of num_groups seeds, seed_len bytes each, canonical
             group order; overwritten in place with the successor seeds
    weights  per-group label increment factor (1 for the pairwise scheme)

    The transition fold runs first, then one expansion plus weighted label
    increment per group, in order. Overwriting each seed as it is consumed
    is what implements secure erasure of pre-expansion seeds.
    """
    if expand_fn is None:
        expand_fn = prg_expand_raw
    m = len(labels)
    if pre_idx is not None:
        old = labels[:]
        for j in range(m):
            acc = 0
            for z in range(pre_off[j], pre_off[j + 1]):
                acc += old[pre_idx[z]]
            labels[j] = acc % modulus
    ngroups = len(weights)
    for g in range(ngroups):
        lo = g * seed_len
        b, nxt = expand_fn(bytes(seeds[lo : lo + seed_len]), m, modulus)
        w = weights[g]
        for j in range(m):
            labels[j] = (labels[j] + w * b[j]) % modulus
        seeds[lo : lo + seed_len] = nxt
