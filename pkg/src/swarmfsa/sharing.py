"""Secret-sharing algebra.

Two sharing schemes back the protocols: XOR/additive all-or-nothing
sharing over GF(2), and Shamir threshold sharing over a prime field with
agent i holding the evaluation at x = i (the secret sits at x = 0).

The threshold scheme's communication-free re-randomization rests on the
group zero-polynomial: for a seed-sharing group T of size n - t + 1, the
unique degree-t polynomial through (0, 0), (i', 0) for every agent i'
outside T, and (k, b) at the minimal index k in T. Every member of T can
evaluate it at its own index knowing only b, and the sum of such
polynomials over all groups vanishes at 0, so the shared secrets are
untouched.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import (
    AgentNotInGroup,
    BadGroupSize,
    DuplicateX,
    FieldTooSmall,
    MissingShares,
)
from .field import GF2, FieldSpec


@dataclass(frozen=True)
class ShareVector:
    """Shares of one secret, tagged with the scheme that produced them."""

    scheme: str  # "additive-gf2" | "shamir"
    field: FieldSpec
    shares: tuple[tuple[int, int], ...]  # (agent index 1..n, value)


def additive_share_bit(secret: int, n: int, rng) -> ShareVector:
    """Split a bit into n uniform bits XOR-summing to it."""
    if n < 2:
        raise ValueError("additive sharing needs at least 2 agents")
    if secret not in (0, 1):
        raise ValueError("secret must be a bit")
    vals = [rng.getrandbits(1) for _ in range(n - 1)]
    parity = 0
    for v in vals:
        parity ^= v
    vals.append(parity ^ secret)
    return ShareVector("additive-gf2", GF2, tuple(enumerate(vals, start=1)))


def additive_reconstruct(v: ShareVector, n: int | None = None) -> int:
    """XOR of all shares; raises MissingShares unless all n are present."""
    if n is not None and len(v.shares) != n:
        raise MissingShares(f"need all {n} shares, got {len(v.shares)}")
    acc = 0
    for _, val in v.shares:
        acc ^= val
    return acc


def shamir_share(
    secret: int,
    t: int,
    n: int,
    f: FieldSpec,
    rng,
    coeffs: Sequence[int] | None = None,
) -> ShareVector:
    """Shamir sharing: degree-t polynomial with free coefficient = secret.

    ``coeffs`` is a test hook forcing c_1..c_t; normally they are drawn
    uniformly from f.
    """
    if not n > t >= 0:
        raise ValueError(f"need n > t >= 0, got n={n}, t={t}")
    if f.modulus <= n:
        raise FieldTooSmall(f"modulus {f.modulus} must exceed n={n}")
    if coeffs is None:
        cs = [f.rand_element(rng) for _ in range(t)]
    else:
        if len(coeffs) != t:
            raise ValueError(f"need exactly {t} forced coefficients")
        cs = [f.reduce(c) for c in coeffs]
    poly = [f.reduce(secret)] + cs
    shares = tuple((i, _poly_eval(poly, i, f)) for i in range(1, n + 1))
    return ShareVector("shamir", f, shares)


def _poly_eval(coeffs_low_first: Sequence[int], x: int, f: FieldSpec) -> int:
    acc = 0
    for c in reversed(coeffs_low_first):
        acc = (acc * x + c) % f.modulus
    return acc


def lagrange_at(points: Sequence[tuple[int, int]], x0: int, f: FieldSpec) -> int:
    """Value at x0 of the minimal-degree polynomial through the points."""
    if not points:
        raise ValueError("need at least one point")
    xs = [x for x, _ in points]
    if len(set(xs)) != len(xs):
        raise DuplicateX("interpolation points share an x-coordinate")
    p = f.modulus
    total = 0
    for xi, yi in points:
        num, den = 1, 1
        for xj, _ in points:
            if xj == xi:
                continue
            num = num * ((x0 - xj) % p) % p
            den = den * ((xi - xj) % p) % p
        total = (total + yi * num % p * f.inv(den)) % p
    return total


def zero_poly_weight(T: Sequence[int], t: int, n: int, i: int, f: FieldSpec) -> int:
    """Evaluation at i of the group polynomial normalized to 1 at min(T).

    The group zero-polynomial for material b is b times this weight, so
    agents precompute the weight once per group. Constraint points:
    (0, 0), (i', 0) for the t-1 agents outside T, and (min(T), 1).
    """
    group = sorted(set(T))
    if len(group) != n - t + 1:
        raise BadGroupSize(f"group size {len(group)}, expected {n - t + 1}")
    if not all(1 <= g <= n for g in group):
        raise BadGroupSize("group members must be agent indices in 1..n")
    if i not in group:
        raise AgentNotInGroup(f"agent {i} is outside the group")
    if f.modulus <= n:
        raise FieldTooSmall(f"modulus {f.modulus} must exceed n={n}")
    k = group[0]
    zeros = [0] + [j for j in range(1, n + 1) if j not in group]
    p = f.modulus
    num, den = 1, 1
    for c in zeros:
        num = num * ((i - c) % p) % p
        den = den * ((k - c) % p) % p
    return num * f.inv(den) % p


def group_zero_poly_eval(
    T: Sequence[int], t: int, n: int, b: int, i: int, f: FieldSpec
) -> int:
    """P_T(i) for the degree-t polynomial with P(0)=0, P|outside T = 0,
    P(min(T)) = b. Linear in b, so this is b * zero_poly_weight."""
    return f.mul(f.reduce(b), zero_poly_weight(T, t, n, i, f))
