"""Validators for orderings of subsets of Z_k.

Definitions, for an ordering a_1, ..., a_n of a set A with partial sums
p_i = a_1 + ... + a_i (mod k), p_0 = 0:

- valid ordering:     p_1, ..., p_n pairwise distinct
- sequencing:         valid and p_i != 0 for all i < n
- t-weak sequencing:  for every pair i != j with |i - j| <= t, the sums
                      p_i and p_j are nonzero and distinct

Note the t-weak definition makes every partial sum nonzero as soon as
n >= 2, including p_n; a set with total sum 0 therefore has no t-weak
sequencing for any t >= 1.

Each predicate has a fast implementation and a quadratic reference
implementation (suffix ``_ref``) that re-derives every interval sum from
scratch; the pair is kept for differential testing.
"""
from __future__ import annotations


def partial_sums(seq, k: int) -> list:
    """[p_1, ..., p_n] mod k."""
    sums = []
    acc = 0
    for a in seq:
        acc = (acc + a) % k
        sums.append(acc)
    return sums


def _check_distinct_set(seq, k):
    n = len(seq)
    if len(set(x % k for x in seq)) != n:
        raise ValueError("ordering repeats an element")


def is_valid_ordering(seq, k: int) -> bool:
    """Partial sums pairwise distinct."""
    _check_distinct_set(seq, k)
    sums = partial_sums(seq, k)
    return len(set(sums)) == len(sums)


def is_sequencing(seq, k: int) -> bool:
    """Valid ordering with p_i != 0 for every proper prefix."""
    _check_distinct_set(seq, k)
    sums = partial_sums(seq, k)
    if len(set(sums)) != len(sums):
        return False
    return all(s != 0 for s in sums[:-1]) if sums else True


def is_t_weak(seq, k: int, t: int) -> bool:
    """t-weak sequencing predicate, literal form."""
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    _check_distinct_set(seq, k)
    return not find_zero_intervals(seq, k, t)


def find_zero_intervals(seq, k: int, t: int) -> list:
    """Intervals witnessing t-weak failures, as 1-indexed (a, b) pairs.

    (a, b) is reported when the interval sum a_a + ... + a_b vanishes and
    either a == 1 (a zero partial sum, forbidden at any length for n >= 2)
    or b - a + 1 <= t (a short zero-sum interval).  Equivalently: prefix
    sums p_{a-1} and p_b collide with a - 1 == 0 or b - (a - 1) <= t.
    """
    n = len(seq)
    if n < 2:
        return []
    sums = [0] + partial_sums(seq, k)
    last_seen = {}
    out = []
    for j, s in enumerate(sums):
        if s in last_seen:
            for i in last_seen[s]:
                if i == 0 or j - i <= t:
                    out.append((i + 1, j))
            last_seen[s].append(j)
        else:
            last_seen[s] = [j]
    out.sort()
    return out


def explain_failure(seq, k: int, goal: str, t: int | None = None):
    """First violation of the goal as a witness dict, or None when the
    ordering passes.  Positions are 1-indexed partial-sum indices."""
    if goal not in ("valid", "sequencing", "tweak"):
        raise ValueError(f"unknown goal {goal!r}")
    if goal == "tweak" and (t is None or t < 1):
        raise ValueError("tweak goal needs t >= 1")
    seen = set()
    for a in seq:
        r = a % k
        if r == 0:
            return {"type": "zero-element", "element": a}
        if r in seen:
            return {"type": "repeated-element", "element": a}
        seen.add(r)
    n = len(seq)
    sums = partial_sums(seq, k)
    if goal == "tweak":
        bad = find_zero_intervals(seq, k, t)
        if not bad:
            return None
        a, b = bad[0]
        return {"type": "zero-interval", "start": a, "end": b,
                "partial_sum": sums[b - 1]}
    first_at = {}
    for j, s in enumerate(sums, start=1):
        if s in first_at:
            return {"type": "repeated-partial-sum", "i": first_at[s], "j": j,
                    "partial_sum": s}
        first_at[s] = j
    if goal == "sequencing":
        for j, s in enumerate(sums, start=1):
            if s == 0 and j != n:
                return {"type": "zero-partial-sum", "index": j}
    return None


# -- quadratic reference implementations ------------------------------------

def is_valid_ordering_ref(seq, k: int) -> bool:
    _check_distinct_set(seq, k)
    n = len(seq)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if sum(seq[i:j]) % k == 0:
                return False
    return True


def is_sequencing_ref(seq, k: int) -> bool:
    if not is_valid_ordering_ref(seq, k):
        return False
    n = len(seq)
    for i in range(1, n):
        if sum(seq[:i]) % k == 0:
            return False
    return True


def is_t_weak_ref(seq, k: int, t: int) -> bool:
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    _check_distinct_set(seq, k)
    n = len(seq)
    if n < 2:
        return True
    for i in range(1, n + 1):
        if sum(seq[:i]) % k == 0:
            return False
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if j - i <= t and sum(seq[i:j]) % k == 0:
                return False
    return True
