"""Residue arithmetic in Z_k and ground sets of nonzero residues.

Residues are plain ints in [0, k).  Signed representatives live in
(-k/2, k/2], which makes the representative of k/2 (k even) equal to +k/2.
"""
from __future__ import annotations

import json
from dataclasses import dataclass


def least_prime_divisor(k: int) -> int:
    """Smallest prime divisor of k (k >= 2), by trial division."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if k % 2 == 0:
        return 2
    d = 3
    while d * d <= k:
        if k % d == 0:
            return d
        d += 2
    return k


def signed_rep(x: int, k: int) -> int:
    """Representative of x mod k in the window (-k/2, k/2]."""
    r = x % k
    # 2r > k  <=>  r > k/2, so k/2 itself stays positive
    if 2 * r > k:
        r -= k
    return r


def is_unit(x: int, k: int) -> bool:
    import math
    return math.gcd(x % k, k) == 1


def inv_unit(x: int, k: int) -> int:
    """Multiplicative inverse of a unit x mod k."""
    return pow(x % k, -1, k)


@dataclass(frozen=True)
class Modulus:
    """Cyclic group order k together with its least prime divisor p."""

    k: int
    p: int

    @classmethod
    def of(cls, k: int) -> "Modulus":
        return cls(k=k, p=least_prime_divisor(k))

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"modulus must be >= 2, got {self.k}")


@dataclass(frozen=True)
class GroundSet:
    """A finite subset of Z_k, canonically stored as residues in [0, k).

    Zero is allowed only when explicitly requested; the constructions here
    operate on subsets of Z_k \\ {0}.
    """

    modulus: Modulus
    elements: frozenset

    @classmethod
    def of(cls, k: int, elements, allow_zero: bool = False) -> "GroundSet":
        mod = Modulus.of(k)
        canon = frozenset(e % k for e in elements)
        if not allow_zero and 0 in canon:
            raise ValueError("ground set must not contain 0")
        return cls(modulus=mod, elements=canon)

    @property
    def k(self) -> int:
        return self.modulus.k

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(sorted(self.elements))

    def __contains__(self, x):
        return x % self.k in self.elements

    def sorted(self) -> list:
        return sorted(self.elements)

    def signed(self) -> list:
        """Elements as signed representatives, sorted by magnitude then value."""
        reps = [signed_rep(e, self.k) for e in self.elements]
        reps.sort(key=lambda r: (abs(r), r))
        return reps

    def dilate(self, lam: int) -> "GroundSet":
        """Image under multiplication by a unit lam; a bijection on Z_k."""
        if not is_unit(lam, self.k):
            raise ValueError(f"dilation factor {lam} is not a unit mod {self.k}")
        return GroundSet(self.modulus,
                         frozenset((lam * e) % self.k for e in self.elements))

    def to_json(self) -> str:
        return json.dumps({"k": self.k, "elements": self.sorted()})

    @classmethod
    def from_json(cls, text: str) -> "GroundSet":
        obj = json.loads(text)
        return cls.of(obj["k"], obj["elements"])


def dilate(S: GroundSet, lam: int) -> GroundSet:
    return S.dilate(lam)
