"""One-shot construction pipeline.

Given a decomposition P u N u (D_1..D_s), split each block into four
quarters, arrange them as

    P, D_1^(1), D_1^(2), ..., D_s^(1), D_s^(2),
       D_1^(3), D_1^(4), ..., D_s^(3), D_s^(4), N

(T_1..T_u, u = 4s), order the endpoint quarters by uniform permutations
sigma_1, sigma_s conditioned on acceptability, order internal adjacent
pairs (T_2j, T_2j+1) conditioned on boundary safety, and concatenate

    reverse(p), t_1, ..., t_u, n.

The acceptability condition on the last quarter applies to its
outward-facing direction (the reverse of its assembly order), mirroring
how p participates reversed: the prefix-sum collisions it must exclude
are those between the tail of T_u and the n segment (and the head of T_1
and the reversed-p segment, where the assembly order is checked as is).

Randomness sources and their groups:
  ("sigma", l)  endpoint permutation: split of D_l plus the induced
                orders of its first/last quarter (l in {1, s})
  ("split", l)  uniform 4-partition of an internal D_l
  ("pair", j)   joint ordering of the pair (T_2j, T_2j+1)

The t-weak driver finds a violated interval (zero-sum of length <= t, or
zero prefix of any length), resamples exactly the sources the interval
touches (re-establishing acceptability/boundary safety by rejection), and
repeats; the classical driver resamples everything independently per retry
and verifies the full sequencing property.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from . import oracle as oracle_mod
from . import verify
from .dissociation import subset_sums_exact
from .pn_ordering import PNConfig, PNOrderings, SearchExhausted, initial_segment_sums, order_pn
from .structure import (Decomposition, DecompositionError, StructureConfig,
                        compute_R_classical, compute_R_tweak, decompose)
from .zk import GroundSet, signed_rep


class ConstructionFailed(Exception):
    def __init__(self, reason, flags=None, witnesses=None):
        super().__init__(reason)
        self.reason = reason
        self.flags = list(flags or [])
        self.witnesses = list(witnesses or [])


@dataclass
class PipelineConfig:
    mode: str = "auto"            # auto | classical | tweak
    t: int | None = None
    K: int | None = None          # derived from R unless set
    R: int | None = None          # derived from p (and |A|) unless set
    c1: float = 1.0
    c2: float = 1.0
    max_resamples: int | None = None   # default 10^6 * |A|
    max_retries: int = 1000
    seed: int = 0
    oracle_fallback: bool = True
    oracle_bound: int = 12
    rejection_cap: int = 10_000
    decompose_retries: int = 64
    pn_node_budget: int = 10_000
    tolerance: float = 2.0


def derive_K(R: int, c2: float = 1.0) -> int:
    return max(1, math.ceil(c2 * math.sqrt(R)))


@dataclass
class Block:
    elements: tuple   # current assembly order
    source: int       # 1-based index into the decomposition's blocks
    quarter: int      # 1..4


@dataclass
class BlockPlan:
    k: int
    K: int
    s: int
    blocks: list = field(default_factory=list)   # T_1..T_u
    seed: object = None

    @property
    def u(self) -> int:
        return len(self.blocks)

    def sizes(self) -> list:
        return [len(b.elements) for b in self.blocks]

    def taus(self) -> list:
        return [sum(b.elements) % self.k for b in self.blocks]

    def pattern(self) -> list:
        return [(b.source, b.quarter) for b in self.blocks]

    def expected_pattern(self) -> list:
        first = [(j, q) for j in range(1, self.s + 1) for q in (1, 2)]
        second = [(j, q) for j in range(1, self.s + 1) for q in (3, 4)]
        return first + second


@dataclass
class SegmentMap:
    p_len: int
    spans: list          # [(start, end)] per T_j, 1-indexed inclusive
    n_span: tuple        # (start, end) or None
    total: int


@dataclass
class FinalOrdering:
    k: int
    ordering: tuple
    mode: str | None = None
    t: int | None = None
    seed: int | None = None
    resamples: int = 0
    provenance: list = field(default_factory=list)
    plan: BlockPlan | None = None
    pn: PNOrderings | None = None
    decomposition: Decomposition | None = None
    flags: list = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "ordering": list(self.ordering),
            "mode": self.mode,
            "t": self.t,
            "seed": self.seed,
            "resamples": self.resamples,
            "provenance": self.provenance,
        }


def _quarter_sizes(n: int) -> list:
    base, rem = divmod(n, 4)
    return [base + (1 if i < rem else 0) for i in range(4)]


def _tindex(source: int, quarter: int, s: int) -> int:
    if quarter <= 2:
        return 2 * (source - 1) + quarter
    return 2 * s + 2 * (source - 1) + (quarter - 2)


def split_blocks(D: Decomposition, K: int, rng, seed=None) -> BlockPlan:
    """Quarter every block and arrange the quarters in the deterministic order.

    Internal blocks get independent uniform 4-partitions (shuffle and cut);
    endpoint blocks get the consecutive segments of a uniform permutation,
    whose within-quarter orders are retained as the t_1 / t_u candidates.
    """
    s = D.s
    plan = BlockPlan(k=D.k, K=K, s=s, seed=seed)
    if s == 0:
        return plan
    slots: dict = {}
    for j, Dj in enumerate(D.blocks, start=1):
        perm = sorted(Dj)
        rng.shuffle(perm)
        at = 0
        for q, sz in enumerate(_quarter_sizes(len(perm)), start=1):
            if sz == 0:
                raise ValueError(f"block {j} too small to quarter (size {len(perm)})")
            slots[(j, q)] = Block(elements=tuple(perm[at:at + sz]), source=j, quarter=q)
            at += sz
    order = [(j, q) for j in range(1, s + 1) for q in (1, 2)] + \
            [(j, q) for j in range(1, s + 1) for q in (3, 4)]
    plan.blocks = [slots[key] for key in order]
    return plan


def build_Y_targets(D: Decomposition, K: int):
    """Y+_j and Y-_j for j = 1..K, as residue sets."""
    if D.s < 1:
        raise ValueError("Y targets need s >= 1")
    k = D.k
    delta = D.delta % k
    first, last = D.blocks[0], D.blocks[-1]
    Y_plus, Y_minus = [], []
    for j in range(1, K + 1):
        s1 = subset_sums_exact((k, first), j)
        ss = subset_sums_exact((k, last), j)
        Y_plus.append(frozenset((-v) % k for v in s1) | frozenset((v - delta) % k for v in ss))
        Y_minus.append(frozenset((-v) % k for v in ss) | frozenset((v - delta) % k for v in s1))
    return Y_plus, Y_minus


def is_acceptable(t_block, which_end: str, K: int, p_order, n_order, delta: int, k: int) -> bool:
    """First min(K, len) prefix sums of t_block avoid the end's forbidden set.

    first: -IS(p) u (delta + IS(n));  last: -IS(n) u (delta + IS(p)).
    """
    if which_end not in ("first", "last"):
        raise ValueError("which_end must be 'first' or 'last'")
    is_p = initial_segment_sums(p_order, k)
    is_n = initial_segment_sums(n_order, k)
    if which_end == "first":
        forbidden = {(-v) % k for v in is_p} | {(delta + v) % k for v in is_n}
    else:
        forbidden = {(-v) % k for v in is_n} | {(delta + v) % k for v in is_p}
    acc = 0
    for x in list(t_block)[:K]:
        acc = (acc + x) % k
        if acc in forbidden:
            return False
    return True


def is_boundary_safe(left, right, K: int, k: int) -> bool:
    """No vanishing junction sum: (last i of left) + (first j of right) != 0
    for all 0 <= i, j <= K with (i, j) != (0, 0)."""
    left = list(left)
    right = list(right)
    # nonempty selections only; the empty side contributes 0 and is handled
    # by testing each side's sums alone, so a nonempty run that happens to
    # sum to 0 mod k is not mistaken for the empty one
    suffixes = set()
    acc = 0
    for x in reversed(left[-K:]):
        acc = (acc + x) % k
        suffixes.add(acc)
    prefixes = set()
    acc = 0
    for x in right[:K]:
        acc = (acc + x) % k
        prefixes.add(acc)
    if 0 in suffixes or 0 in prefixes:
        return False
    for a in suffixes:
        if (-a) % k in prefixes:
            return False
    return True


def classify_interval(interval, plan: BlockPlan, segmap: SegmentMap) -> str:
    """TypeII iff the interval holds between K and |T_j| - K elements of some T_j."""
    a, b = interval
    if not (1 <= a <= b <= segmap.total) or (a == 1 and b == segmap.total):
        raise ValueError("interval must be proper and nonempty")
    K = plan.K
    for blk, (s0, e0) in zip(plan.blocks, segmap.spans):
        ov = min(b, e0) - max(a, s0) + 1
        if ov >= K and ov <= len(blk.elements) - K:
            return "TypeII"
    return "TypeI"


def _segments(p_len: int, sizes, n_len: int) -> SegmentMap:
    spans = []
    at = p_len + 1
    for sz in sizes:
        spans.append((at, at + sz - 1))
        at += sz
    n_span = (at, at + n_len - 1) if n_len else None
    return SegmentMap(p_len=p_len, spans=spans, n_span=n_span,
                      total=at + n_len - 1)


def assemble(p_order, n_order, block_orderings, plan: BlockPlan) -> FinalOrdering:
    """Concatenate reverse(p), t_1..t_u, n with a positional provenance map."""
    if len(block_orderings) != plan.u:
        raise ValueError("expected one ordering per plan block")
    for got, blk in zip(block_orderings, plan.blocks):
        if sorted(got) != sorted(blk.elements):
            raise ValueError("block ordering is not a permutation of its plan block")
    ordering = list(reversed(list(p_order)))
    provenance = []
    if p_order:
        provenance.append({"segment": "p", "start": 1, "end": len(ordering)})
    for i, (got, blk) in enumerate(zip(block_orderings, plan.blocks)):
        start = len(ordering) + 1
        ordering.extend(got)
        provenance.append({"segment": "T", "index": i + 1, "source": blk.source,
                           "quarter": blk.quarter, "start": start, "end": len(ordering)})
    if n_order:
        start = len(ordering) + 1
        ordering.extend(n_order)
        provenance.append({"segment": "n", "start": start, "end": len(ordering)})
    return FinalOrdering(k=plan.k, ordering=tuple(ordering), provenance=provenance,
                         plan=plan)


class _Sampler:
    """Holds the current splits and orderings of one pipeline run."""

    def __init__(self, decomp: Decomposition, K: int, pn: PNOrderings, rng,
                 rejection_cap: int):
        self.decomp = decomp
        self.k = decomp.k
        self.K = K
        self.pn = pn
        self.rng = rng
        self.cap = rejection_cap
        self.s = decomp.s
        self.u = 4 * self.s
        self.quarters: dict = {}   # source -> [list of 4 lists, assembly order]

    def endpoint(self, source: int) -> bool:
        return source == 1 or source == self.s

    def _acceptable_sigma(self, source: int) -> bool:
        q = self.quarters[source]
        ok = True
        if source == 1:
            ok = is_acceptable(q[0], "first", self.K, self.pn.p_order,
                               self.pn.n_order, self.pn.delta, self.k)
        if ok and source == self.s:
            ok = is_acceptable(list(reversed(q[3])), "last", self.K, self.pn.p_order,
                               self.pn.n_order, self.pn.delta, self.k)
        return ok

    def draw_source(self, source: int) -> None:
        elems = sorted(self.decomp.blocks[source - 1])
        sizes = _quarter_sizes(len(elems))
        for _ in range(self.cap):
            perm = list(elems)
            self.rng.shuffle(perm)
            cuts = []
            at = 0
            for sz in sizes:
                cuts.append(perm[at:at + sz])
                at += sz
            self.quarters[source] = cuts
            if not self.endpoint(source) or self._acceptable_sigma(source):
                return
        raise ConstructionFailed("acceptability-rejection-exhausted",
                                 flags=[f"sigma-{source}-rejections-{self.cap}"])

    def pair_members(self, pair: int):
        # pair j joins T_2j and T_2j+1
        return 2 * pair, 2 * pair + 1

    def source_quarter(self, t_idx: int):
        if t_idx <= 2 * self.s:
            return (t_idx + 1) // 2, 2 - (t_idx % 2)
        r = t_idx - 2 * self.s
        return (r + 1) // 2, 4 - (r % 2)

    def order_of(self, t_idx: int) -> list:
        src, q = self.source_quarter(t_idx)
        return self.quarters[src][q - 1]

    def draw_pair(self, pair: int) -> None:
        lt, rt = self.pair_members(pair)
        (ls, lq), (rs, rq) = self.source_quarter(lt), self.source_quarter(rt)
        left, right = self.quarters[ls][lq - 1], self.quarters[rs][rq - 1]
        for _ in range(self.cap):
            self.rng.shuffle(left)
            self.rng.shuffle(right)
            if is_boundary_safe(left, right, self.K, self.k):
                return
        raise ConstructionFailed("boundary-rejection-exhausted",
                                 flags=[f"pair-{pair}-rejections-{self.cap}"])

    def pairs_of_source(self, source: int):
        out = set()
        for q in (1, 2, 3, 4):
            t_idx = _tindex(source, q, self.s)
            if 2 <= t_idx <= self.u - 1:
                out.add(t_idx // 2)
        return out

    def initial_sample(self) -> None:
        for source in range(1, self.s + 1):
            self.draw_source(source)
        for pair in range(1, 2 * self.s):
            self.draw_pair(pair)

    def resample_sources(self, sources) -> None:
        pairs = set()
        for source in sorted(sources):
            self.draw_source(source)
            pairs |= self.pairs_of_source(source)
        for pair in sorted(pairs):
            self.draw_pair(pair)

    def block_orderings(self) -> list:
        return [list(self.order_of(t)) for t in range(1, self.u + 1)]

    def plan(self, seed=None) -> BlockPlan:
        plan = BlockPlan(k=self.k, K=self.K, s=self.s, seed=seed)
        order = [(j, q) for j in range(1, self.s + 1) for q in (1, 2)] + \
                [(j, q) for j in range(1, self.s + 1) for q in (3, 4)]
        plan.blocks = [Block(elements=tuple(self.quarters[j][q - 1]), source=j, quarter=q)
                       for j, q in order]
        return plan

    def boundary_pairs_safe(self) -> bool:
        return all(
            is_boundary_safe(self.order_of(2 * pair), self.order_of(2 * pair + 1),
                             self.K, self.k)
            for pair in range(1, 2 * self.s))


def _sources_touching(a: int, b: int, segmap: SegmentMap, plan: BlockPlan) -> set:
    out = set()
    for blk, (s0, e0) in zip(plan.blocks, segmap.spans):
        if s0 <= b and a <= e0:
            out.add(blk.source)
    return out


def _interval_sources(a: int, b: int, segmap: SegmentMap, plan: BlockPlan) -> set:
    """Randomness-source groups an interval event depends on."""
    out = set()
    s = plan.s
    u = plan.u
    for idx, (blk, (s0, e0)) in enumerate(zip(plan.blocks, segmap.spans), start=1):
        ov = min(b, e0) - max(a, s0) + 1
        if ov <= 0:
            continue
        split_var = ("sigma", blk.source) if blk.source in (1, s) else ("split", blk.source)
        out.add(split_var)
        if ov < len(blk.elements):
            if idx == 1:
                out.add(("sigma", 1))
            elif idx == u:
                out.add(("sigma", s))
            else:
                out.add(("pair", idx // 2))
    return out


def lll_dependency_degree(plan: BlockPlan, t: int, p_len: int = 0, n_len: int = 0) -> int:
    """Worst-case count of other <= t-length intervals sharing a randomness
    source with some interval, on this plan (t clamps to all proper intervals)."""
    if plan.u == 0:
        raise ValueError("plan is empty")
    segmap = _segments(p_len, plan.sizes(), n_len)
    total = segmap.total
    t_eff = min(t, total)
    intervals = []
    for a in range(1, total + 1):
        for b in range(a, min(a + t_eff - 1, total) + 1):
            if a == 1 and b == total:
                continue
            intervals.append((a, b))
    sources = {iv: frozenset(_interval_sources(iv[0], iv[1], segmap, plan))
               for iv in intervals}
    by_var: dict = {}
    for iv, vs in sources.items():
        for v in vs:
            by_var.setdefault(v, set()).add(iv)
    best = 0
    for iv, vs in sources.items():
        if not vs:
            continue
        neigh = set()
        for v in vs:
            neigh |= by_var[v]
        neigh.discard(iv)
        best = max(best, len(neigh))
    return best


def _trivial_ordering(A: GroundSet, config, mode: str) -> FinalOrdering:
    elems = A.sorted()
    return FinalOrdering(k=A.k, ordering=tuple(elems), mode=mode, t=config.t,
                         seed=config.seed, resamples=0,
                         provenance=[{"segment": "trivial", "start": 1,
                                      "end": len(elems)}] if elems else [])


def _oracle_ordering(A: GroundSet, goal: str, t, config, mode: str) -> FinalOrdering:
    witness = oracle_mod.brute_force(A, goal, t)
    if witness is None:
        raise ConstructionFailed("proven-infeasible",
                                 flags=["oracle-exhausted-no-witness"])
    prov = [{"segment": "oracle", "start": 1, "end": len(witness)}] if witness else []
    return FinalOrdering(k=A.k, ordering=tuple(witness), mode=mode, t=t,
                         seed=config.seed, resamples=0, provenance=prov,
                         flags=["oracle_fallback"])


def _mix(seed: int, i: int) -> int:
    return seed * 1_000_003 + i + 1


def _decompose_for(A: GroundSet, R: int, config, seed: int) -> Decomposition:
    return decompose(A, R, StructureConfig(tolerance=config.tolerance,
                                           retries=config.decompose_retries,
                                           seed=seed))


def _order_for(decomp: Decomposition, K: int, config, seed: int) -> PNOrderings:
    k = decomp.k
    P = GroundSet.of(k, decomp.P, allow_zero=False) if decomp.P else GroundSet.of(k, [])
    N = GroundSet.of(k, decomp.N, allow_zero=False) if decomp.N else GroundSet.of(k, [])
    if decomp.s > 0:
        Y_plus, Y_minus = build_Y_targets(decomp, K)
    else:
        Y_plus, Y_minus = [], []
    return order_pn(P, N, decomp.delta, Y_plus, Y_minus,
                    PNConfig(node_budget=config.pn_node_budget, seed=seed))


def run_tweak(A: GroundSet, config: PipelineConfig) -> FinalOrdering:
    """t-weak sequencing via conditioned sampling plus local resampling."""
    if config.t is None or config.t < 1:
        raise ValueError("tweak mode needs t >= 1")
    t = config.t
    k = A.k
    n = len(A)
    if n <= 1:
        return _trivial_ordering(A, config, "tweak")
    if sum(A.elements) % k == 0:
        # the final partial sum is the total; with n >= 2 it pairs with its
        # neighbor, so no t-weak sequencing exists for a zero-sum set
        raise ConstructionFailed("total-sum-zero", flags=["infeasible-total-zero"])
    p = A.modulus.p
    R = config.R if config.R else compute_R_tweak(p, config.c1)
    K = config.K if config.K else derive_K(R, config.c2)
    flags = []
    if config.K and config.K != derive_K(R, config.c2):
        flags.append("k-overridden")
    budget = config.max_resamples if config.max_resamples else 10 ** 6 * n

    try:
        decomp = _decompose_for(A, R, config, config.seed)
        pn = _order_for(decomp, K, config, config.seed)
        flags.extend(decomp.out_of_regime)
        flags.extend(pn.flags)
        if decomp.s == 0:
            skeleton = pn.skeleton()
            result = FinalOrdering(k=k, ordering=tuple(skeleton), mode="tweak", t=t,
                                   seed=config.seed, resamples=0, pn=pn,
                                   decomposition=decomp, flags=flags)
            result.provenance = _skeleton_provenance(pn)
            if not verify.is_t_weak(_undilate(result.ordering, decomp, k), k, t):
                raise ConstructionFailed("skeleton-not-t-weak", flags=flags)
            return _finish(result, decomp)

        rng = random.Random(_mix(config.seed, 0))
        sampler = _Sampler(decomp, K, pn, rng, config.rejection_cap)
        sampler.initial_sample()
        resamples = 0
        while True:
            plan = sampler.plan(seed=config.seed)
            fo = assemble(pn.p_order, pn.n_order, sampler.block_orderings(), plan)
            segmap = _segments(len(pn.p_order), plan.sizes(), len(pn.n_order))
            violations = verify.find_zero_intervals(list(fo.ordering), k, t)
            if not violations:
                break
            if resamples >= budget:
                raise ConstructionFailed("resample-budget-exhausted", flags=flags,
                                         witnesses=violations[:10])
            a, b = violations[0]
            touched = _sources_touching(a, b, segmap, plan)
            if not touched:
                raise ConstructionFailed("skeleton-violation", flags=flags,
                                         witnesses=[(a, b)])
            sampler.resample_sources(touched)
            resamples += 1

        assert sampler._acceptable_sigma(1) and sampler._acceptable_sigma(sampler.s)
        assert sampler.boundary_pairs_safe()
        fo.mode, fo.t, fo.seed, fo.resamples = "tweak", t, config.seed, resamples
        fo.pn, fo.decomposition, fo.flags = pn, decomp, flags
        result = _finish(fo, decomp)
        assert verify.is_t_weak(list(result.ordering), k, t)
        return result
    except (ConstructionFailed, DecompositionError, SearchExhausted) as exc:
        return _fallback(A, "tweak", t, config, exc)


def run_classical(A: GroundSet, config: PipelineConfig) -> FinalOrdering:
    """Sequencing via full independent resampling with a retry budget."""
    k = A.k
    n = len(A)
    if n <= 1:
        return _trivial_ordering(A, config, "classical")
    p = A.modulus.p
    R = config.R if config.R else compute_R_classical(p, n, config.c1)
    K = config.K if config.K else derive_K(R, config.c2)
    flags = []
    last_exc = None
    decomp = None
    pn = None
    for retry in range(config.max_retries):
        seed_r = _mix(config.seed, retry)
        if decomp is None or retry % 8 == 7:
            try:
                decomp = _decompose_for(A, R, config, seed_r)
            except DecompositionError as exc:
                # decompose already burned its own randomized retries; more
                # outer retries cannot fix a structural failure
                last_exc = exc
                break
        try:
            pn = _order_for(decomp, K, config, seed_r)
        except SearchExhausted as exc:
            last_exc = exc
            if exc.complete and decomp.s == 0:
                break   # the whole skeleton space is infeasible; retries won't help
            decomp = None
            continue

        run_flags = list(decomp.out_of_regime) + list(pn.flags)
        if decomp.s == 0:
            skeleton = pn.skeleton()
            fo = FinalOrdering(k=k, ordering=tuple(skeleton), mode="classical",
                               t=None, seed=config.seed, resamples=retry,
                               pn=pn, decomposition=decomp,
                               flags=flags + run_flags)
            fo.provenance = _skeleton_provenance(pn)
            result = _finish(fo, decomp)
            assert verify.is_sequencing(list(result.ordering), k)
            return result

        rng = random.Random(seed_r)
        sampler = _Sampler(decomp, K, pn, rng, config.rejection_cap)
        try:
            sampler.initial_sample()
        except ConstructionFailed as exc:
            last_exc = exc
            flags.extend(exc.flags)
            continue
        plan = sampler.plan(seed=config.seed)
        fo = assemble(pn.p_order, pn.n_order, sampler.block_orderings(), plan)
        result_ordering = _undilate(fo.ordering, decomp, k)
        if verify.is_sequencing(result_ordering, k):
            fo.mode, fo.seed, fo.resamples = "classical", config.seed, retry
            fo.pn, fo.decomposition = pn, decomp
            fo.flags = flags + run_flags
            return _finish(fo, decomp)
    exc = last_exc or ConstructionFailed("retry-budget-exhausted")
    return _fallback(A, "classical", None, config, exc, extra_flags=flags)


def _fallback(A, mode, t, config, exc, extra_flags=None):
    flags = list(getattr(exc, "flags", [])) + list(extra_flags or [])
    if isinstance(exc, DecompositionError):
        flags.append("decomposition-failed")
    if isinstance(exc, SearchExhausted):
        flags.append("pn-search-exhausted")
    if config.oracle_fallback and len(A) <= config.oracle_bound:
        goal = "tweak" if mode == "tweak" else "sequencing"
        fo = _oracle_ordering(A, goal, t, config, mode)
        fo.flags = list(dict.fromkeys(fo.flags + flags))
        return fo
    reason = getattr(exc, "reason", None) or str(exc) or "construction-failed"
    raise ConstructionFailed(reason, flags=flags,
                             witnesses=getattr(exc, "witnesses", []))


def _skeleton_provenance(pn: PNOrderings) -> list:
    prov = []
    r = len(pn.p_order)
    if r:
        prov.append({"segment": "p", "start": 1, "end": r})
    at = r
    if pn.delta % pn.k != 0:
        prov.append({"segment": "delta", "start": at + 1, "end": at + 1})
        at += 1
    if pn.n_order:
        prov.append({"segment": "n", "start": at + 1, "end": at + len(pn.n_order)})
    return prov


def _undilate(ordering, decomp: Decomposition, k: int):
    """Map an ordering of dilate(A, lambda) back to an ordering of A."""
    lam_inv = pow(decomp.lam, -1, k)
    return [x * lam_inv % k for x in ordering]


def _finish(fo: FinalOrdering, decomp: Decomposition) -> FinalOrdering:
    fo.ordering = tuple(_undilate(fo.ordering, decomp, fo.k))
    return fo


def sequence(A: GroundSet, config: PipelineConfig | None = None) -> FinalOrdering:
    """Mode dispatcher: auto tries the oracle first on small sets, then the
    pipeline; classical/tweak go straight to their drivers."""
    if config is None:
        config = PipelineConfig()
    mode = config.mode
    if mode == "auto":
        goal_mode = "tweak" if config.t is not None else "classical"
        if len(A) <= 10:
            goal = "tweak" if config.t is not None else "sequencing"
            witness = oracle_mod.brute_force(A, goal, config.t)
            if witness is None:
                raise ConstructionFailed("proven-infeasible",
                                         flags=["oracle-exhausted-no-witness"])
            prov = [{"segment": "oracle", "start": 1, "end": len(witness)}] if witness else []
            return FinalOrdering(k=A.k, ordering=tuple(witness), mode=goal_mode,
                                 t=config.t, seed=config.seed, resamples=0,
                                 provenance=prov, flags=["oracle_first"])
        mode = goal_mode
    if mode == "tweak":
        return run_tweak(A, config)
    if mode == "classical":
        return run_classical(A, config)
    raise ValueError(f"unknown mode {config.mode!r}")
