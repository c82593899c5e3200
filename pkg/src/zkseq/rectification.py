"""Unit-dilation rectification: find a unit lambda placing lambda*B in a
short symmetric interval around 0.

Two routes: a pigeonhole construction over a box lattice, and an exhaustive
scan over all units as the optimality oracle.  Both report the achieved max |signed_rep(lambda*b)|;
interval targets are asserted by callers only in-regime.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .dissociation import greedy_max_dissociated
from .zk import GroundSet, is_unit, signed_rep

MAX_PIGEONHOLE_DIM = 12
MAX_EXHAUSTIVE_K = 10_000_000
GOAL_GUARD = 1e-12


class RectificationInfeasible(Exception):
    """Pigeonhole scan exhausted Lambda without a box collision."""

    def __init__(self, box_count):
        self.box_count = box_count
        super().__init__(f"no box collision among {box_count} boxes")


@dataclass(frozen=True)
class RectificationResult:
    lam: int
    max_abs: int
    method: str  # pigeonhole | exhaustive | identity

    def to_json_dict(self) -> dict:
        return {"lambda": self.lam, "max_abs": self.max_abs, "method": self.method}


def goal_inequality_holds(h: int, p: int) -> bool:
    """h*ln(h) + 2h*ln(10) + h^2*ln(3) < ln(p), with a small guard band.

    The regime test for pigeonhole rectification: when true, the pigeonhole
    bound lands lambda*B inside (-k/(100|B|), k/(100|B|)).
    """
    if h < 0 or p < 2:
        raise ValueError("need h >= 0 and p >= 2")
    if h == 0:
        return True
    lhs = h * math.log(h) + 2 * h * math.log(10) + h * h * math.log(3)
    rhs = math.log(p)
    return lhs < rhs - GOAL_GUARD * max(abs(lhs), abs(rhs), 1.0)


def max_abs_signed(elems, k: int, lam: int) -> int:
    return max((abs(signed_rep(lam * e, k)) for e in elems), default=0)


def rectify_pigeonhole(B: GroundSet) -> RectificationResult:
    """lambda = lambda1 - lambda2 from the first box collision over Lambda = {0..p-1}.

    Boxes: each lambda maps to the vector (floor((lambda*d_i mod k) * m / k))_i
    over a maximal dissociated core D = {d_1..d_r}, with m = ceil(p^(1/r))
    boxes per coordinate.  A collision gives |signed_rep(lambda*d_i)| < k/m
    for every i, and lambda1 > lambda2 keeps lambda in {1..p-1}, hence a unit.
    """
    if len(B) == 0:
        raise ValueError("B must be nonempty")
    k = B.k
    p = B.modulus.p
    core = greedy_max_dissociated(B)
    r = len(core)
    if r > MAX_PIGEONHOLE_DIM:
        raise ValueError(f"dissociated core size {r} exceeds cap {MAX_PIGEONHOLE_DIM}")
    m = math.ceil(p ** (1.0 / r))
    seen = {}
    lam = None
    for l1 in range(p):
        key = tuple((l1 * d % k) * m // k for d in core)
        l2 = seen.get(key)
        if l2 is not None:
            lam = (l1 - l2) % k
            break
        seen[key] = l1
    if lam is None:
        raise RectificationInfeasible(box_count=m ** r)
    # collision inside one box of width k/m forces this per-coordinate bound
    for d in core:
        assert abs(signed_rep(lam * d, k)) * m <= k
    return RectificationResult(lam=lam, max_abs=max_abs_signed(B.sorted(), k, lam),
                               method="pigeonhole")


def _unit_mask_numpy(k: int):
    import numpy as np
    mask = np.ones(k, dtype=bool)
    mask[0] = False
    kk = k
    q = 2
    while q * q <= kk:
        if kk % q == 0:
            mask[::q] = False
            while kk % q == 0:
                kk //= q
        q += 1
    if kk > 1:
        mask[::kk] = False
    return mask


def rectify_exhaustive(B: GroundSet) -> RectificationResult:
    """Unit lambda minimizing max |signed_rep(lambda*b)|; ties to smallest lambda."""
    if len(B) == 0:
        raise ValueError("B must be nonempty")
    k = B.k
    if k > MAX_EXHAUSTIVE_K:
        raise ValueError(f"k = {k} exceeds exhaustive scan cap {MAX_EXHAUSTIVE_K}")
    elems = B.sorted()
    if k > 50_000:
        import numpy as np
        lams = np.arange(k, dtype=np.int64)
        worst = np.zeros(k, dtype=np.int64)
        for b in elems:
            r = (lams * b) % k
            np.maximum(worst, np.minimum(r, k - r), out=worst)
        worst[~_unit_mask_numpy(k)] = k  # exclude non-units from the argmin
        best_lam = int(np.argmin(worst))  # first minimum = smallest lambda
        return RectificationResult(lam=best_lam, max_abs=int(worst[best_lam]),
                                   method="exhaustive")
    best_lam, best_val = None, None
    for lam in range(1, k):
        if not is_unit(lam, k):
            continue
        val = max_abs_signed(elems, k, lam)
        if best_val is None or val < best_val:
            best_lam, best_val = lam, val
    return RectificationResult(lam=best_lam, max_abs=best_val, method="exhaustive")


def rectify_auto(B: GroundSet, target: float | None = None) -> RectificationResult:
    """Cheapest route that meets target (a max_abs bound), else best effort.

    Tries the identity first, then the pigeonhole argument when the core is
    small enough, then the exhaustive scan when k permits.  Returns the best
    max_abs seen; callers compare against their own interval targets.
    """
    if len(B) == 0:
        return RectificationResult(lam=1, max_abs=0, method="identity")
    k = B.k
    best = RectificationResult(lam=1, max_abs=max_abs_signed(B.sorted(), k, 1),
                               method="identity")
    if target is not None and best.max_abs < target:
        return best
    core_size = len(greedy_max_dissociated(B))
    if core_size <= MAX_PIGEONHOLE_DIM:
        try:
            cand = rectify_pigeonhole(B)
            if cand.max_abs < best.max_abs:
                best = cand
        except RectificationInfeasible:
            pass
        if target is not None and best.max_abs < target:
            return best
    if k <= MAX_EXHAUSTIVE_K:
        cand = rectify_exhaustive(B)
        if cand.max_abs < best.max_abs:
            best = cand
    return best
