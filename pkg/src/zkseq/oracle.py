"""Exhaustive ground truth for small instances.

brute_force searches all orderings of a set (pruned DFS) for one meeting a
goal; census sweeps every subset of Z_k \\ {0} up to a size cap.  No
symmetry reduction: the oracle stays trivially auditable.
"""
from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field

from . import verify
from .zk import GroundSet

MAX_BRUTE_FORCE = 12
MAX_CENSUS_K = 17

GOALS = ("valid", "sequencing", "tweak")


def _as_pair(A):
    if isinstance(A, GroundSet):
        return A.k, A.sorted()
    k, elems = A
    return k, sorted(e % k for e in elems)


def brute_force(A, goal: str, t: int | None = None):
    """First ordering of A meeting the goal, or None if none exists.

    goal is one of "valid", "sequencing", "tweak" (tweak needs t >= 1).
    DFS prunes on the partial-sum constraints of the goal: repeated sums,
    and zero sums where forbidden.
    """
    if goal not in GOALS:
        raise ValueError(f"unknown goal {goal!r}")
    if goal == "tweak":
        if t is None or t < 1:
            raise ValueError("tweak goal needs t >= 1")
    k, elems = _as_pair(A)
    n = len(elems)
    if n > MAX_BRUTE_FORCE:
        raise ValueError(f"|A| = {n} exceeds brute-force cap {MAX_BRUTE_FORCE}")
    if n == 0:
        return []

    sums = [0]
    order = []
    used = [False] * n

    def admissible(s, depth):
        # depth is the 1-based index the new partial sum would take
        if goal == "valid":
            return s not in sums[1:]
        if goal == "sequencing":
            return s not in sums[1:] and (s != 0 or depth == n)
        if s == 0 and n >= 2:
            return False
        lo = max(1, depth - t)
        return all(sums[i] != s for i in range(lo, depth))

    def extend():
        depth = len(order) + 1
        for i in range(n):
            if used[i]:
                continue
            s = (sums[-1] + elems[i]) % k
            if not admissible(s, depth):
                continue
            used[i] = True
            order.append(elems[i])
            sums.append(s)
            if len(order) == n or extend():
                return True
            used[i] = False
            order.pop()
            sums.pop()
        return False

    if not extend():
        return None
    if goal == "valid":
        assert verify.is_valid_ordering(order, k)
    elif goal == "sequencing":
        assert verify.is_sequencing(order, k)
    else:
        assert verify.is_t_weak(order, k, t)
    return list(order)


@dataclass
class CensusReport:
    k: int
    max_size: int
    goal: str
    t: int | None
    rows: list = field(default_factory=list)
    # per-size: {size: [total, achievable]}
    counts: dict = field(default_factory=dict)

    @property
    def failures(self) -> int:
        return sum(tot - ach for tot, ach in self.counts.values())

    def to_rows(self) -> list:
        return self.rows


def census(k: int, max_size: int, goal: str, t: int | None = None) -> CensusReport:
    """Try the goal on every nonempty A subseteq Z_k \\ {0} with |A| <= max_size."""
    if k > MAX_CENSUS_K:
        raise ValueError(f"census capped at k <= {MAX_CENSUS_K}, got {k}")
    if k < 2:
        raise ValueError("k must be >= 2")
    max_size = min(max_size, k - 1, MAX_BRUTE_FORCE)
    goal_label = goal if goal != "tweak" else f"tweak-{t}"
    report = CensusReport(k=k, max_size=max_size, goal=goal_label, t=t)
    nonzero = list(range(1, k))
    for size in range(1, max_size + 1):
        total = ach = 0
        for A in itertools.combinations(nonzero, size):
            witness = brute_force((k, A), goal, t)
            bitmask = sum(1 << (e - 1) for e in A)
            total += 1
            if witness is not None:
                ach += 1
            report.rows.append({
                "k": k,
                "subset_bitmask": bitmask,
                "size": size,
                "goal": goal_label,
                "achievable": witness is not None,
                "witness": " ".join(str(x) for x in witness) if witness else "",
            })
        report.counts[size] = [total, ach]
    return report


CENSUS_COLUMNS = ["k", "subset_bitmask", "size", "goal", "achievable", "witness"]


def write_census_csv(report: CensusReport, fileobj) -> None:
    w = csv.DictWriter(fileobj, fieldnames=CENSUS_COLUMNS)
    w.writeheader()
    for row in report.rows:
        w.writerow(row)
