"""Finite-field arithmetic over GF(2) and odd prime fields GF(p).

Elements are plain Python ints kept reduced to [0, modulus); a FieldSpec
carries the modulus together with the byte and hex widths used by the
seed-expansion stream and the on-disk formats. Keeping elements as bare
ints (rather than wrapper objects) is what lets the compiled tick kernel
share data with the pure-Python path without conversion.

Byte extraction uses a fixed 16-byte big-endian chunk per element for
prime fields. For p = 2**61 - 1 the statistical distance of the reduced
value from uniform is below 2**-67; fixed-width extraction is preferred
over rejection sampling so all agents consume the stream in lockstep.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CompositeModulus, WidthMismatch, ZeroInverse

#: Production default modulus: the Mersenne prime 2^61 - 1. Fits 64-bit
#: values with 128-bit multiply intermediates.
MERSENNE61 = (1 << 61) - 1

# Witness set making Miller-Rabin deterministic for n < 3.3 * 10^24,
# which covers every modulus this library accepts.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test for n < 2**64."""
    if n < 2:
        return False
    for w in _MR_WITNESSES:
        if n % w == 0:
            return n == w
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The arithmetic domain GF(modulus). Construct via :func:`make_field`."""

    modulus: int

    @property
    def element_bytes(self) -> int:
        """Bytes consumed from an expansion stream per element (1 or 16)."""
        return 1 if self.modulus == 2 else 16

    @property
    def hex_width(self) -> int:
        """Fixed width, in hex chars, of a serialized element."""
        return (self.modulus.bit_length() + 3) // 4

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.modulus

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.modulus

    def mul(self, a: int, b: int) -> int:
        return a * b % self.modulus

    def neg(self, a: int) -> int:
        return -a % self.modulus

    def inv(self, a: int) -> int:
        """Multiplicative inverse; raises ZeroInverse for a = 0."""
        if a % self.modulus == 0:
            raise ZeroInverse("0 has no multiplicative inverse")
        # Fermat: a^(p-2) mod p. Valid because the modulus is prime.
        return pow(a, self.modulus - 2, self.modulus)

    def reduce(self, a: int) -> int:
        return a % self.modulus

    def contains(self, a: int) -> bool:
        return 0 <= a < self.modulus

    def rand_element(self, rng) -> int:
        """Uniform element using rng.getrandbits (works for any Random)."""
        if self.modulus == 2:
            return rng.getrandbits(1)
        bits = self.modulus.bit_length()
        while True:
            v = rng.getrandbits(bits)
            if v < self.modulus:
                return v

    def from_bytes(self, data: bytes) -> int:
        """Map a fixed-width byte chunk to an element.

        GF(2): one byte, least significant bit. GF(p): 16 bytes read
        big-endian, reduced mod p (see module docstring on bias).
        """
        if len(data) != self.element_bytes:
            raise WidthMismatch(
                f"expected {self.element_bytes} bytes for GF({self.modulus}), got {len(data)}"
            )
        if self.modulus == 2:
            return data[0] & 1
        return int.from_bytes(data, "big") % self.modulus

    def to_hex(self, a: int) -> str:
        """Lowercase zero-padded hex of a reduced element, fixed width."""
        if not self.contains(a):
            raise ValueError(f"{a} is not reduced in GF({self.modulus})")
        return format(a, f"0{self.hex_width}x")

    def from_hex(self, text: str) -> int:
        if len(text) != self.hex_width:
            raise WidthMismatch(
                f"expected {self.hex_width} hex chars for GF({self.modulus}), got {len(text)}"
            )
        v = int(text, 16)
        if not self.contains(v):
            raise ValueError(f"{text} is not a reduced GF({self.modulus}) element")
        return v


def make_field(modulus: int) -> FieldSpec:
    """Validate the modulus and return a FieldSpec.

    Accepts 2 or an odd prime; raises CompositeModulus otherwise.
    """
    if modulus < 2:
        raise ValueError("modulus must be at least 2")
    if modulus != 2 and not is_prime(modulus):
        raise CompositeModulus(f"{modulus} is not prime")
    return FieldSpec(modulus)


#: Binary field used by the all-agents scheme.
GF2 = FieldSpec(2)
