"""Compiled kernel must reproduce the pure-Python reference byte for byte."""

import random
from array import array

import pytest

from swarmfsa import _kernel_py

cy = pytest.importorskip("swarmfsa._kernel_cy")

MODULI = [2, 5, 257, (1 << 61) - 1]


def test_backends_differ():
    assert _kernel_py.BACKEND != cy.BACKEND


def test_sha_stream_parity():
    rng = random.Random(0)
    for _ in range(50):
        seed = rng.getrandbits(8 * rng.choice([1, 2, 16])).to_bytes(
            rng.choice([16]), "big"
        )[:16]
        n = rng.randrange(0, 200)
        assert cy.sha_stream(seed, n) == _kernel_py.sha_stream(seed, n)


def test_expand_parity_all_moduli():
    rng = random.Random(1)
    for _ in range(200):
        p = rng.choice(MODULI)
        m = rng.randrange(1, 12)
        slen = rng.choice([1, 2, 16])
        seed = bytes(rng.getrandbits(8) for _ in range(slen))
        assert cy.prg_expand_raw(seed, m, p) == _kernel_py.prg_expand_raw(seed, m, p)


def random_preimage(rng, m):
    idx = array("i")
    off = array("i", [0])
    targets = [rng.randrange(m) for _ in range(m)]
    for j in range(m):
        idx.extend(k for k in range(m) if targets[k] == j)
        off.append(len(idx))
    return idx, off


def test_agent_tick_parity_random_configs():
    rng = random.Random(2)
    for _ in range(150):
        p = rng.choice(MODULI)
        m = rng.randrange(1, 9)
        slen = rng.choice([1, 16])
        ngroups = rng.randrange(0, 5)
        labels1 = array("Q", [rng.randrange(p) for _ in range(m)])
        labels2 = array("Q", labels1)
        seeds_raw = bytes(rng.getrandbits(8) for _ in range(ngroups * slen))
        seeds1, seeds2 = bytearray(seeds_raw), bytearray(seeds_raw)
        weights = array("Q", [rng.randrange(1, p) if p > 2 else 1 for _ in range(ngroups)])
        if rng.random() < 0.5:
            idx, off = random_preimage(rng, m)
        else:
            idx, off = None, None
        cy.agent_tick_raw(labels1, idx, off, seeds1, weights, p, slen)
        _kernel_py.agent_tick_raw(labels2, idx, off, seeds2, weights, p, slen)
        assert list(labels1) == list(labels2)
        assert seeds1 == seeds2


def test_agent_tick_parity_long_run():
    # Accumulated divergence check: many ticks over the Mersenne field.
    p = (1 << 61) - 1
    rng = random.Random(3)
    m = 6
    labels1 = array("Q", [rng.randrange(p) for _ in range(m)])
    labels2 = array("Q", labels1)
    seeds_raw = bytes(rng.getrandbits(8) for _ in range(3 * 16))
    seeds1, seeds2 = bytearray(seeds_raw), bytearray(seeds_raw)
    weights = array("Q", [5, 17, p - 2])
    idx, off = random_preimage(rng, m)
    for _ in range(300):
        cy.agent_tick_raw(labels1, idx, off, seeds1, weights, p, 16)
        _kernel_py.agent_tick_raw(labels2, idx, off, seeds2, weights, p, 16)
    assert list(labels1) == list(labels2)
    assert seeds1 == seeds2
