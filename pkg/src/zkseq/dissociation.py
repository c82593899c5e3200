"""Dissociated subsets of Z_k: tests, dimension, greedy extraction, subset sums.

D is dissociated when its 2^|D| subset sums are pairwise distinct mod k.
This is equivalent to having no vanishing {-1, 0, 1}-combination: two
colliding subset sums S, T give the combination 1 on S \\ T and -1 on
T \\ S, and conversely.
"""
from __future__ import annotations

import itertools

from .zk import GroundSet, signed_rep

MAX_DISSOCIATED_SIZE = 30
MAX_DIMENSION_SIZE = 20
MAX_SUBSET_SUM_WORK = 10_000_000


def _as_elems(S):
    if isinstance(S, GroundSet):
        return S.k, S.sorted()
    k, elems = S
    return k, sorted(e % k for e in elems)


def _subset_sums_distinct(elems, k, limit=None) -> bool:
    """Incremental check that all subset sums are distinct mod k."""
    sums = {0}
    for e in elems:
        shifted = set((s + e) % k for s in sums)
        if shifted & sums:
            return False
        sums |= shifted
        if limit is not None and len(sums) > limit:
            raise MemoryError("subset sum enumeration exceeded limit")
    return True


def is_dissociated(S) -> bool:
    """True when all 2^|S| subset sums are distinct mod k.

    S is a GroundSet or a (k, elements) pair; size capped at
    MAX_DISSOCIATED_SIZE to bound the enumeration.
    """
    k, elems = _as_elems(S)
    if len(elems) != len(set(elems)):
        return False
    if len(elems) > MAX_DISSOCIATED_SIZE:
        raise ValueError(
            f"set of size {len(elems)} exceeds cap {MAX_DISSOCIATED_SIZE}")
    if 0 in elems:
        return False
    return _subset_sums_distinct(elems, k)


def dimension(B) -> int:
    """Size of the largest dissociated subset of B.  Exact, exponential.

    Depth-first search over candidate subsets in sorted order, pruning
    branches that cannot beat the incumbent and extensions that collide.
    """
    k, elems = _as_elems(B)
    elems = [e for e in elems if e != 0]
    n = len(elems)
    if n > MAX_DIMENSION_SIZE:
        raise ValueError(f"set of size {n} exceeds cap {MAX_DIMENSION_SIZE}")
    best = 0

    def grow(idx, sums, size):
        nonlocal best
        if size > best:
            best = size
        if size + (n - idx) <= best:
            return
        for i in range(idx, n):
            e = elems[i]
            shifted = set((s + e) % k for s in sums)
            if shifted & sums:
                continue
            grow(i + 1, sums | shifted, size + 1)

    grow(0, {0}, 0)
    return best


def greedy_max_dissociated(B, target_size=None, order=None) -> list:
    """Greedy scan of B, keeping elements that preserve dissociativity.

    Scan order defaults to ascending |signed representative| (ties by
    value), so small-magnitude elements are preferred.  Stops once
    target_size elements are kept.  Returns the kept elements in scan
    order; the result is dissociated but not necessarily maximum.
    """
    k, elems = _as_elems(B)
    elems = [e for e in elems if e != 0]
    if order is not None:
        order = [e % k for e in order]
        if set(order) != set(elems):
            raise ValueError("order must be a permutation of B")
        scan = order
    else:
        scan = sorted(elems, key=lambda e: (abs(signed_rep(e, k)), e))
    if target_size is None:
        target_size = len(scan)
    kept = []
    sums = {0}
    for e in scan:
        if len(kept) >= target_size:
            break
        shifted = set((s + e) % k for s in sums)
        if shifted & sums:
            continue
        sums |= shifted
        kept.append(e)
    return kept


def subset_sums_exact(T, M: int) -> set:
    """{ sum of S : S subset of T, |S| = M } mod k."""
    k, elems = _as_elems(T)
    n = len(elems)
    if M < 0 or M > n:
        return set()
    import math
    if math.comb(n, M) * max(M, 1) > MAX_SUBSET_SUM_WORK:
        raise ValueError("subset sum enumeration too large")
    return set(sum(c) % k for c in itertools.combinations(elems, M))


def subset_sums_upto(T, M: int) -> set:
    """{ sum of S : S subset of T, 1 <= |S| <= M } mod k."""
    k, elems = _as_elems(T)
    out = set()
    for m in range(1, min(M, len(elems)) + 1):
        out |= subset_sums_exact((k, elems), m)
    return out
