"""Orderings of P and N making reverse(p), delta, n a sequencing while the
initial segment sums IS(p), IS(n) avoid prescribed target sets.

The quantitative contract is the per-target budget

    |IS(p) n Y_j| <= inf_L ( ceil(|Y_j|/L) + L + 4 + 4*sum_{i<j} |Y_i| )

checked after the fact; the construction itself is a greedy placement with
bounded backtracking (the existence argument behind the budget is a
different, non-constructive one; any witness meeting the validator and the
budget is interchangeable downstream).

Sign convention: the search assumes signed_rep(delta) >= 0.  A negative
delta is handled by negating the whole instance (P <-> -N, delta -> -delta,
Y+ <-> -Y-), solving, and mapping the orderings back (p = -n', n = -p'),
which preserves both the sequencing property and the intersection counts.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import verify
from .zk import GroundSet, signed_rep


class SearchExhausted(Exception):
    """The skeleton search failed.

    complete=True means the whole tree was explored (no sequencing exists
    for this P/N/delta); False means the node budget ran out first.
    """

    def __init__(self, message, complete: bool):
        super().__init__(message)
        self.complete = complete


@dataclass
class PNConfig:
    node_budget: int = 10_000
    seed: int = 0


@dataclass
class PNOrderings:
    k: int
    p_order: tuple
    n_order: tuple
    delta: int
    targets_plus: list
    targets_minus: list
    achieved_plus: list = field(default_factory=list)
    achieved_minus: list = field(default_factory=list)
    budgets_plus: list = field(default_factory=list)
    budgets_minus: list = field(default_factory=list)
    in_regime: bool = True
    flags: list = field(default_factory=list)
    negated: bool = False
    seed: int = 0

    def skeleton(self) -> list:
        """reverse(p), delta, n — delta appears as a literal element iff nonzero."""
        mid = [self.delta] if self.delta % self.k != 0 else []
        return list(reversed(self.p_order)) + mid + list(self.n_order)


def initial_segment_sums(b, k: int) -> set:
    """IS(b) = {b_1 + ... + b_j : 0 <= j <= len(b)} mod k; always contains 0."""
    out = {0}
    acc = 0
    for x in b:
        acc = (acc + x) % k
        out.add(acc)
    return out


def initial_segment_sums_t(b, k: int, t: int) -> set:
    """IS_t(b): prefix sums up to length t (t clamps to len(b))."""
    if t < 0:
        raise ValueError("t must be >= 0")
    return initial_segment_sums(list(b)[:t], k)


def proposition_budget(sizes, j: int) -> int:
    """min over L in {1..sizes[j-1]+1} of ceil(|Y_j|/L) + L + 4 + 4*sum_{i<j}|Y_i|.

    sizes holds |Y_1|..|Y_m|; j is 1-based.
    """
    if j < 1 or j > len(sizes):
        raise ValueError(f"index {j} out of range for {len(sizes)} targets")
    yj = sizes[j - 1]
    if any(sz < 0 for sz in sizes):
        raise ValueError("sizes must be non-negative")
    tail = 4 * sum(sizes[:j - 1])
    best = min(-(-yj // L) + L for L in range(1, yj + 2))
    return best + 4 + tail


def _regime_flags(P, N, delta, k):
    flags = []
    pn = len(P) + len(N)
    if pn:
        bound = k / (4 * pn)
        if not all(0 < signed_rep(x, k) < bound for x in P):
            flags.append("p-outside-interval")
        if not all(-bound < signed_rep(x, k) < 0 for x in N):
            flags.append("n-outside-interval")
        if delta % k and not 0 < signed_rep(delta, k) < bound:
            flags.append("delta-outside-interval")
    return flags


def _search_skeleton(P, N, delta, Y_plus, Y_minus, k, config):
    """Greedy/backtracking DFS over the skeleton reverse(p), delta, n.

    Positions are filled left to right.  Prefix sums must stay pairwise
    distinct and nonzero except possibly the very last.  Candidate order at
    each node: fewest new target hits first (IS(p) value = sum(P) - prefix
    during the reversed-p phase; IS(n) value = prefix - sum(P) - delta in
    the n phase), ties by element value, optionally shuffled by seed.
    """
    sum_p = sum(P) % k
    has_delta = delta % k != 0
    total_len = len(P) + len(N) + (1 if has_delta else 0)
    rng = random.Random(config.seed)

    p_rev: list = []
    n_fwd: list = []
    # seen holds p_1..p_i only: zero is rejected positionally (allowed last),
    # and p_0 = 0 is not part of the distinctness requirement
    seen = set()
    sums = [0]
    nodes = 0
    complete = True

    def hits_plus(is_value):
        return sum(1 for Y in Y_plus if is_value in Y)

    def hits_minus(is_value):
        return sum(1 for Y in Y_minus if is_value in Y)

    def candidates(phase, remaining, prefix):
        cands = []
        for e in remaining:
            s = (prefix + e) % k
            depth = len(sums)  # index this sum would take, 1-based
            if s in seen or (s == 0 and depth != total_len):
                continue
            if phase == "p":
                cost = hits_plus((sum_p - s) % k)
            else:
                cost = hits_minus((s - sum_p - delta) % k)
            cands.append((cost, e, s))
        cands.sort(key=lambda c: (c[0], c[1]))
        if config.seed and len(cands) > 1:
            # stable jitter: shuffle within equal-cost groups only
            i = 0
            while i < len(cands):
                j = i
                while j < len(cands) and cands[j][0] == cands[i][0]:
                    j += 1
                if j - i > 1:
                    chunk = cands[i:j]
                    rng.shuffle(chunk)
                    cands[i:j] = chunk
                i = j
        return cands

    def place(phase):
        nonlocal nodes, complete
        if phase == "p":
            remaining = [e for e in P if e not in p_rev]
            if not remaining:
                return place("delta")
        elif phase == "delta":
            if not has_delta:
                return place("n")
            s = (sums[-1] + delta) % k
            if s in seen or (s == 0 and len(sums) != total_len):
                return False
            # the delta slot is fixed, so a dead end here just backtracks
            seen.add(s)
            sums.append(s)
            if place("n"):
                return True
            seen.discard(s)
            sums.pop()
            return False
        else:
            remaining = [e for e in N if e not in n_fwd]
            if not remaining:
                return True
        if nodes >= config.node_budget:
            complete = False
            return False
        nodes += 1
        for _, e, s in candidates(phase, remaining, sums[-1]):
            (p_rev if phase == "p" else n_fwd).append(e)
            seen.add(s)
            sums.append(s)
            if place(phase):
                return True
            (p_rev if phase == "p" else n_fwd).pop()
            seen.discard(s)
            sums.pop()
        return False

    if place("p"):
        return list(reversed(p_rev)), list(n_fwd), True
    return None, None, complete


def order_pn(P, N, delta: int, Y_plus=None, Y_minus=None,
             config: PNConfig | None = None) -> PNOrderings:
    """Find orderings p of P and n of N meeting the skeleton contract.

    P, N: GroundSets (either may be empty).  Y_plus/Y_minus: target sets of
    residues, one per index j.  Raises SearchExhausted when no skeleton
    sequencing is found within the node budget.
    """
    if config is None:
        config = PNConfig()
    Y_plus = [frozenset(y) for y in (Y_plus or [])]
    Y_minus = [frozenset(y) for y in (Y_minus or [])]
    if isinstance(P, GroundSet):
        k = P.k
        P_set, N_set = set(P.elements), set(N.elements)
    else:
        raise TypeError("P must be a GroundSet")
    delta = delta % k

    if P_set and delta and (-sum(N_set)) % k == delta:
        raise ValueError("delta equals -sum(N) with P nonempty (guard violated)")
    if N_set and delta and (-sum(P_set)) % k == delta:
        raise ValueError("delta equals -sum(P) with N nonempty (guard violated)")

    negated = delta != 0 and signed_rep(delta, k) < 0
    if negated:
        Pn = GroundSet.of(k, [(-x) % k for x in N_set]) if N_set else GroundSet.of(k, [])
        Nn = GroundSet.of(k, [(-x) % k for x in P_set]) if P_set else GroundSet.of(k, [])
        inner = order_pn(Pn, Nn, (-delta) % k,
                         [frozenset((-y) % k for y in Y) for Y in Y_minus],
                         [frozenset((-y) % k for y in Y) for Y in Y_plus],
                         config)
        p_order = tuple((-x) % k for x in inner.n_order)
        n_order = tuple((-x) % k for x in inner.p_order)
        result = PNOrderings(
            k=k, p_order=p_order, n_order=n_order, delta=delta,
            targets_plus=Y_plus, targets_minus=Y_minus,
            in_regime=inner.in_regime, flags=inner.flags + ["negated"],
            negated=True, seed=config.seed)
    else:
        flags = _regime_flags(P_set, N_set, delta, k)
        p_list, n_list, complete = _search_skeleton(
            sorted(P_set), sorted(N_set), delta, Y_plus, Y_minus, k, config)
        if p_list is None:
            raise SearchExhausted(
                "no skeleton sequencing found"
                + (" (search space exhausted)" if complete else " (node budget hit)"),
                complete=complete)
        result = PNOrderings(
            k=k, p_order=tuple(p_list), n_order=tuple(n_list), delta=delta,
            targets_plus=Y_plus, targets_minus=Y_minus,
            in_regime=not flags, flags=flags, negated=False, seed=config.seed)

    skel = result.skeleton()
    if skel:
        assert verify.is_sequencing(skel, k), "skeleton postcondition violated"
    is_p = initial_segment_sums(result.p_order, k)
    is_n = initial_segment_sums(result.n_order, k)
    result.achieved_plus = [len(is_p & Y) for Y in Y_plus]
    result.achieved_minus = [len(is_n & Y) for Y in Y_minus]
    sizes_p = [len(Y) for Y in Y_plus]
    sizes_m = [len(Y) for Y in Y_minus]
    result.budgets_plus = [proposition_budget(sizes_p, j + 1) for j in range(len(Y_plus))]
    result.budgets_minus = [proposition_budget(sizes_m, j + 1) for j in range(len(Y_minus))]
    if any(a > b for a, b in zip(result.achieved_plus, result.budgets_plus)) or \
       any(a > b for a, b in zip(result.achieved_minus, result.budgets_minus)):
        if "target-budget-exceeded" not in result.flags:
            result.flags = result.flags + ["target-budget-exceeded"]
    return result
