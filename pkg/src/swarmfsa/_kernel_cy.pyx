# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled tick kernel.

Same contract as _kernel_py (which is the semantic reference): the byte
stream is SHA-256 in counter mode over seed || BE32(i), elements consume
1 byte (GF(2)) or 16 bytes big-endian (prime fields), the successor seed
consumes len(seed) bytes. Hashing goes straight to libcrypto; field
arithmetic uses 128-bit intermediates so any modulus below 2^62 is safe.
"""

from cpython.bytes cimport PyBytes_FromStringAndSize
from libc.stdlib cimport free, malloc
from libc.string cimport memcpy

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"

cdef extern from "openssl/evp.h":
    ctypedef struct EVP_MD:
        pass
    const EVP_MD *EVP_sha256()
    int EVP_Digest(const void *data, size_t count, unsigned char *md,
                   unsigned int *size, const EVP_MD *type, void *impl)

BACKEND = "cython"

DEF MAX_SEED = 64
DEF DIGEST = 32


cdef int _fill_stream(const unsigned char *seed, int seed_len,
                      unsigned char *out, int need) except -1:
    """First ``need`` bytes of the counter-mode SHA-256 stream."""
    cdef unsigned char buf[MAX_SEED + 4]
    cdef unsigned char md[DIGEST]
    cdef unsigned int mdlen
    cdef int produced = 0
    cdef unsigned int counter = 0
    cdef int take
    if seed_len > MAX_SEED:
        raise ValueError("seed too long for the compiled kernel")
    memcpy(buf, seed, seed_len)
    while produced < need:
        buf[seed_len] = <unsigned char> ((counter >> 24) & 0xFF)
        buf[seed_len + 1] = <unsigned char> ((counter >> 16) & 0xFF)
        buf[seed_len + 2] = <unsigned char> ((counter >> 8) & 0xFF)
        buf[seed_len + 3] = <unsigned char> (counter & 0xFF)
        if EVP_Digest(buf, seed_len + 4, md, &mdlen, EVP_sha256(), NULL) != 1:
            raise RuntimeError("SHA-256 failure")
        take = need - produced
        if take > DIGEST:
            take = DIGEST
        memcpy(out + produced, md, take)
        produced += take
        counter += 1
    return 0


cdef inline unsigned long long _elem_from_chunk(const unsigned char *chunk,
                                                unsigned long long modulus) nogil:
    """16 bytes big-endian reduced mod modulus (prime-field extraction)."""
    cdef u128 acc = 0
    cdef int k
    for k in range(16):
        acc = ((acc << 8) | chunk[k]) % modulus
    return <unsigned long long> acc


def sha_stream(seed: bytes, nbytes: int) -> bytes:
    cdef int need = nbytes
    if need < 0:
        raise ValueError("nbytes must be non-negative")
    cdef unsigned char *out = <unsigned char *> malloc(need if need > 0 else 1)
    if out == NULL:
        raise MemoryError()
    try:
        _fill_stream(seed, len(seed), out, need)
        return PyBytes_FromStringAndSize(<char *> out, need)
    finally:
        free(out)


def prg_expand_raw(seed: bytes, m: int, modulus):
    """Expand seed into (list of m reduced ints, successor seed bytes)."""
    cdef unsigned long long p = modulus
    cdef int mm = m
    cdef int seed_len = len(seed)
    cdef int w = 1 if p == 2 else 16
    cdef int need = mm * w + seed_len
    cdef unsigned char *buf = <unsigned char *> malloc(need)
    cdef int j
    if buf == NULL:
        raise MemoryError()
    try:
        _fill_stream(seed, seed_len, buf, need)
        elements = []
        if p == 2:
            for j in range(mm):
                elements.append(buf[j] & 1)
        else:
            for j in range(mm):
                elements.append(_elem_from_chunk(buf + j * 16, p))
        nxt = PyBytes_FromStringAndSize(<char *> (buf + mm * w), seed_len)
        return elements, nxt
    finally:
        free(buf)


def agent_tick_raw(labels, pre_idx, pre_off, seeds, weights, modulus, seed_len):
    """One in-place clock tick; see _kernel_py.agent_tick_raw."""
    cdef unsigned long long[::1] lab = labels
    cdef unsigned char[::1] sd = seeds
    cdef unsigned long long[::1] wt = weights
    cdef unsigned long long p = modulus
    cdef int slen = seed_len
    cdef int m = lab.shape[0]
    cdef int ngroups = wt.shape[0]
    cdef int w = 1 if p == 2 else 16
    cdef int need = m * w + slen
    cdef int[::1] pidx
    cdef int[::1] poff
    cdef int j, z, g, lo
    cdef u128 acc
    cdef unsigned long long b, wg
    cdef unsigned long long *old
    cdef unsigned char *buf

    if pre_idx is not None:
        pidx = pre_idx
        poff = pre_off
        old = <unsigned long long *> malloc(m * sizeof(unsigned long long))
        if old == NULL:
            raise MemoryError()
        try:
            for j in range(m):
                old[j] = lab[j]
            for j in range(m):
                acc = 0
                for z in range(poff[j], poff[j + 1]):
                    acc += old[pidx[z]]
                lab[j] = <unsigned long long> (acc % p)
        finally:
            free(old)

    buf = <unsigned char *> malloc(need)
    if buf == NULL:
        raise MemoryError()
    try:
        for g in range(ngroups):
            lo = g * slen
            _fill_stream(&sd[lo], slen, buf, need)
            wg = wt[g]
            if p == 2:
                for j in range(m):
                    b = buf[j] & 1
                    lab[j] = <unsigned long long> ((<u128> lab[j] + <u128> wg * b) % p)
            else:
                for j in range(m):
                    b = _elem_from_chunk(buf + j * 16, p)
                    lab[j] = <unsigned long long> ((<u128> lab[j] + <u128> wg * b) % p)
            for j in range(slen):
                sd[lo + j] = buf[m * w + j]
    finally:
        free(buf)
